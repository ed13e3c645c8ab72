#include <doctest.h>

#include <algorithm>

#include "../support/oracle.hpp"
#include "warpzsl/compat.hpp"
#include "warpzsl/error.hpp"
#include "warpzsl/rng.hpp"

using namespace warpzsl;

namespace {

CompatibilityModel model_of(std::initializer_list<std::initializer_list<double>> rows) {
  CompatibilityModel m;
  m.weights.resize(static_cast<Eigen::Index>(rows.size()),
                   static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m.weights(i, j++) = v;
    ++i;
  }
  return m;
}

CompatibilityModel random_model(Rng& rng, std::size_t da, std::size_t ds) {
  CompatibilityModel m;
  m.weights.resize(static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(ds));
  for (Eigen::Index i = 0; i < m.weights.size(); ++i) m.weights.data()[i] = rng.normal();
  return m;
}

oracle::Mat to_mat(const CompatibilityModel& m) {
  oracle::Mat w(m.acoustic_dim(), oracle::Vec(m.semantic_dim()));
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w[i].size(); ++j)
      w[i][j] = m.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return w;
}

oracle::Vec random_vec(Rng& rng, std::size_t n) {
  oracle::Vec v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST_SUITE("compat") {

TEST_CASE("project") {
  auto id = model_of({{1, 0}, {0, 1}});
  std::vector<double> theta{3, 4};
  auto p = project(id, theta);
  CHECK(p(0) == 3);
  CHECK(p(1) == 4);
  auto swap = model_of({{0, 1}, {1, 0}});
  std::vector<double> e1{1, 0};
  auto q = project(swap, e1);
  CHECK(q(0) == 0);
  CHECK(q(1) == 1);

  Rng rng(1);
  auto m = random_model(rng, 3, 2);
  auto t = random_vec(rng, 3);
  auto expect = oracle::project(to_mat(m), t);
  auto got = project(m, t);
  for (int j = 0; j < 2; ++j) CHECK(got(j) == doctest::Approx(expect[j]).epsilon(1e-12));

  std::vector<double> wrong{1, 2};
  CHECK_THROWS_AS(project(m, wrong), ValidationError);
  std::vector<double> nan{1, 2, std::nan("")};
  CHECK_THROWS_AS(project(m, nan), ValidationError);
}

TEST_CASE("compatibility") {
  auto id = model_of({{1, 0}, {0, 1}});
  std::vector<double> a{1, 2}, b{3, 4};
  CHECK(compatibility(id, a, b) == 11);
  auto zero = model_of({{0, 0}, {0, 0}});
  CHECK(compatibility(zero, a, b) == 0);
  auto swap = model_of({{0, 1}, {1, 0}});
  std::vector<double> e1{1, 0}, e2{0, 1};
  CHECK(compatibility(swap, e1, e2) == 1);
  std::vector<double> bad{1, 2, 3};
  CHECK_THROWS_AS(compatibility(id, a, bad), ValidationError);
}

TEST_CASE("bilinearity and consistency with project") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t da = 1 + rng.below(6), ds = 1 + rng.below(6);
    auto m = random_model(rng, da, ds);
    auto t1 = random_vec(rng, da), t2 = random_vec(rng, da);
    auto p1 = random_vec(rng, ds), p2 = random_vec(rng, ds);
    double a = rng.normal(), b = rng.normal();
    oracle::Vec tc(da), pc(ds);
    for (std::size_t i = 0; i < da; ++i) tc[i] = a * t1[i] + b * t2[i];
    for (std::size_t j = 0; j < ds; ++j) pc[j] = a * p1[j] + b * p2[j];
    double lhs = compatibility(m, tc, p1);
    double rhs = a * compatibility(m, t1, p1) + b * compatibility(m, t2, p1);
    CHECK(oracle::rel_error(lhs, rhs) < 1e-9 * 10);
    double lhs2 = compatibility(m, t1, pc);
    double rhs2 = a * compatibility(m, t1, p1) + b * compatibility(m, t1, p2);
    CHECK(oracle::rel_error(lhs2, rhs2) < 1e-9 * 10);
    auto proj = project(m, t1);
    double dot = 0.0;
    for (std::size_t j = 0; j < ds; ++j) dot += proj(static_cast<Eigen::Index>(j)) * p1[j];
    CHECK(oracle::rel_error(compatibility(m, t1, p1), dot) < 1e-9);
    CHECK(oracle::rel_error(compatibility(m, t1, p1), oracle::score(to_mat(m), t1, p1)) < 1e-9);
  }
}

TEST_CASE("score_classes ordering and ties") {
  EmbeddingTable sem(1);
  sem.add("low", std::vector<double>{0.1});
  sem.add("high", std::vector<double>{0.9});
  auto id = model_of({{1}});
  std::vector<double> theta{1};
  std::vector<std::string> both{"low", "high"};
  auto ranked = score_classes(id, theta, sem, both);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].class_id == "high");

  EmbeddingTable flat(1);
  for (const char* c : {"z", "m", "a"}) flat.add(c, std::vector<double>{1.0});
  std::vector<std::string> reversed{"a", "m", "z"};
  auto tied = score_classes(id, theta, flat, reversed);
  CHECK(tied[0].class_id == "z");
  CHECK(tied[1].class_id == "m");
  CHECK(tied[2].class_id == "a");
  CHECK(classify(id, theta, flat, reversed) == "z");

  std::vector<std::string> unknown{"q"};
  CHECK_THROWS_AS(score_classes(id, theta, sem, unknown), ValidationError);
  std::vector<std::string> none;
  CHECK_THROWS_AS(score_classes(id, theta, sem, none), ValidationError);
}

TEST_CASE("classify") {
  EmbeddingTable sem(1);
  sem.add("A", std::vector<double>{1});
  sem.add("B", std::vector<double>{2});
  sem.add("C", std::vector<double>{0});
  auto id = model_of({{1}});
  std::vector<double> theta{1};
  std::vector<std::string> abc{"A", "B", "C"};
  CHECK(classify(id, theta, sem, abc) == "B");
  std::vector<std::string> only{"C"};
  CHECK(classify(id, theta, sem, only) == "C");
  auto neg = model_of({{-5}});
  CHECK(classify(neg, theta, sem, only) == "C");
}

TEST_CASE("classify and score_classes agree with an enumerate-and-max oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t da = 1 + rng.below(5), ds = 1 + rng.below(5), k = 1 + rng.below(8);
    auto m = random_model(rng, da, ds);
    EmbeddingTable sem(ds);
    std::vector<std::string> ids;
    oracle::Mat phis;
    for (std::size_t c = 0; c < k; ++c) {
      ids.push_back("c" + std::to_string(c));
      phis.push_back(random_vec(rng, ds));
      sem.add(ids.back(), phis.back());
    }
    auto theta = random_vec(rng, da);
    std::size_t best = 0;
    double best_score = oracle::score(to_mat(m), theta, phis[0]);
    for (std::size_t c = 1; c < k; ++c) {
      double s = oracle::score(to_mat(m), theta, phis[c]);
      if (s > best_score) best = c, best_score = s;
    }
    CHECK(classify(m, theta, sem, ids) == ids[best]);
    auto ranked = score_classes(m, theta, sem, ids);
    CHECK(ranked.size() == k);
    CHECK(ranked[0].class_id == ids[best]);
    CHECK(std::is_sorted(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.score > b.score; }));

    CompatibilityModel scaled = m;
    scaled.weights *= 0.01 + 100.0 * rng.uniform();
    CHECK(classify(scaled, theta, sem, ids) == ids[best]);
  }
}

TEST_CASE("candidate set resolution") {
  EmbeddingTable sem(1);
  for (const char* c : {"a", "b", "c"}) sem.add(c, std::vector<double>{0});
  std::vector<std::string> ids{"c", "a", "c"};
  auto set = CandidateSet::resolve(sem, ids);
  CHECK(set.ids == std::vector<std::string>{"a", "c"});
  CHECK(set.position("c") == 1);
  CHECK(set.position("b") == -1);
}

}  // TEST_SUITE
