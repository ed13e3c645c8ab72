#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "../support/oracle.hpp"
#include "warpzsl/error.hpp"
#include "warpzsl/metrics.hpp"
#include "warpzsl/rng.hpp"

using namespace warpzsl;

namespace {

ScoredClassList ranked(std::initializer_list<std::pair<const char*, double>> scores) {
  EmbeddingTable sem(1);
  std::vector<std::string> ids;
  for (const auto& [id, s] : scores) {
    sem.add(id, std::vector<double>{s});
    ids.push_back(id);
  }
  CompatibilityModel m;
  m.weights = Eigen::MatrixXd::Identity(1, 1);
  std::vector<double> one{1};
  return score_classes(m, one, sem, ids);
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("top1") {
  std::vector<std::string> p{"A", "B", "A"}, t{"A", "B", "B"};
  CHECK(top1(p, t) == doctest::Approx(2.0 / 3.0));
  CHECK(top1(t, t) == 1.0);
  std::vector<std::string> wrong{"B", "A", "A"};
  CHECK(top1(wrong, t) == 0.0);
  std::vector<std::string> shorter{"A"}, empty;
  CHECK_THROWS_AS(top1(shorter, t), ValidationError);
  CHECK_THROWS_AS(top1(empty, empty), ValidationError);
}

TEST_CASE("average precision") {
  auto r = ranked({{"A", 0.2}, {"B", 0.9}, {"C", 0.5}});
  CHECK(average_precision(r, "B") == 1.0);
  CHECK(average_precision(r, "C") == 0.5);
  CHECK_THROWS_AS(average_precision(r, "Z"), ValidationError);
  ScoredClassList ten;
  for (int i = 0; i < 10; ++i) ten.push_back({"c" + std::to_string(i), 10.0 - i});
  CHECK(average_precision(ten, "c9") == 0.1);
}

TEST_CASE("evaluate against a sort-and-position oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t k = 2 + rng.below(8), da = 1 + rng.below(4), ds = 1 + rng.below(4);
    CompatibilityModel m;
    m.weights.resize(static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(ds));
    oracle::Mat w(da, oracle::Vec(ds));
    for (std::size_t i = 0; i < da; ++i)
      for (std::size_t j = 0; j < ds; ++j)
        m.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w[i][j] = rng.normal();
    EmbeddingTable sem(ds);
    oracle::Mat phis;
    std::vector<std::string> ids;
    for (std::size_t c = 0; c < k; ++c) {
      oracle::Vec phi(ds);
      for (auto& v : phi) v = rng.normal();
      ids.push_back("c" + std::to_string(c));
      sem.add(ids.back(), phi);
      phis.push_back(phi);
    }
    LabeledData data;
    data.features.resize(20, static_cast<Eigen::Index>(da));
    double ap_sum = 0.0, correct = 0.0;
    for (int s = 0; s < 20; ++s) {
      oracle::Vec theta(da);
      for (std::size_t i = 0; i < da; ++i) data.features(s, static_cast<Eigen::Index>(i)) = theta[i] = rng.normal();
      std::size_t truth = rng.below(k);
      data.sample_ids.push_back("s" + std::to_string(s));
      data.class_ids.push_back(ids[truth]);
      oracle::Vec scores;
      for (const auto& phi : phis) scores.push_back(oracle::score(w, theta, phi));
      auto pos = oracle::position(scores, truth);
      ap_sum += 1.0 / static_cast<double>(pos);
      correct += pos == 1 ? 1.0 : 0.0;
    }
    auto report = evaluate(m, data, sem, ids);
    CHECK(report.n_samples == 20);
    CHECK(report.map == doctest::Approx(ap_sum / 20).epsilon(1e-12));
    CHECK(report.top1 == doctest::Approx(correct / 20).epsilon(1e-12));
    CHECK(report.map >= report.top1);
    for (const auto& e : report.per_sample) {
      CHECK(e.average_precision == 1.0 / static_cast<double>(e.true_rank));
      CHECK((e.true_rank == 1) == (e.predicted == e.truth));
    }
  }
}

TEST_CASE("evaluate: single perfect sample and errors") {
  EmbeddingTable sem(1);
  sem.add("a", std::vector<double>{1});
  sem.add("b", std::vector<double>{-1});
  CompatibilityModel m;
  m.weights = Eigen::MatrixXd::Identity(1, 1);
  LabeledData d;
  d.sample_ids = {"s"};
  d.class_ids = {"a"};
  d.features = Eigen::Matrix<double, 1, 1>::Constant(2.0);
  std::vector<std::string> ab{"a", "b"};
  auto report = evaluate(m, d, sem, ab);
  CHECK(report.top1 == 1.0);
  CHECK(report.map == 1.0);
  auto json = nlohmann::json::parse(to_json(report));
  CHECK(json["per_sample"][0]["true_rank"] == 1);
  CHECK_FALSE(nlohmann::json::parse(to_json(report, false)).contains("per_sample"));

  std::vector<std::string> only_b{"b"};
  CHECK_THROWS_AS(evaluate(m, d, sem, only_b), ValidationError);
  LabeledData empty;
  empty.features.resize(0, 1);
  CHECK_THROWS_AS(evaluate(m, empty, sem, ab), ValidationError);
}

TEST_CASE("random baseline") {
  auto b10 = random_baseline(10);
  CHECK(b10.map == doctest::Approx(0.2928968253968254).epsilon(1e-14));
  CHECK(b10.top1 == 0.1);
  auto b105 = random_baseline(105);
  CHECK(b105.map == doctest::Approx(oracle::harmonic(105) / 105).epsilon(1e-14));
  CHECK(std::floor(b105.map * 1e4) / 1e4 == 0.0498);
  CHECK(b105.top1 == doctest::Approx(1.0 / 105));
  auto b1 = random_baseline(1);
  CHECK(b1.map == 1.0);
  CHECK(b1.top1 == 1.0);
  CHECK_THROWS_AS(random_baseline(0), ValidationError);
  for (std::size_t k = 1; k <= 7; ++k)
    CHECK(random_baseline(k).map == doctest::Approx(oracle::enumerated_mean_reciprocal_rank(k)).epsilon(1e-12));
}

TEST_CASE("contingency") {
  std::vector<std::string> a{"A", "B"}, b{"A", "C"}, t{"A", "B"};
  auto c = build_contingency(a, b, t);
  CHECK(c == ContingencyTable{1, 1, 0, 0});
  CHECK(c.total() == 2);
  auto same = build_contingency(a, a, t);
  CHECK(same.a_only == 0);
  CHECK(same.b_only == 0);
  std::vector<std::string> x{"A", "X"}, y{"X", "B"};
  auto disjoint = build_contingency(x, y, t);
  CHECK(disjoint.both_correct + disjoint.both_wrong == 0);
  CHECK(disjoint.total() == 2);
  std::vector<std::string> shorter{"A"};
  CHECK_THROWS_AS(build_contingency(shorter, a, t), ValidationError);
}

TEST_CASE("mcnemar") {
  auto r = mcnemar({1854, 381, 609, 18533});
  CHECK(r.statistic == doctest::Approx(227.0 * 227.0 / 990.0).epsilon(1e-12));
  CHECK(std::abs(r.statistic - 52.05) <= 0.01);
  CHECK(std::abs(r.p_value - 5.41e-13) <= 0.02 * 5.41e-13);

  auto sym = mcnemar({0, 10, 10, 0});
  CHECK(sym.statistic == 0.0);
  CHECK(sym.p_value == 1.0);
  auto one = mcnemar({0, 1, 0, 0});
  CHECK(one.statistic == 0.0);
  CHECK_THROWS_AS(mcnemar({5, 0, 0, 5}), ValidationError);

  CHECK(mcnemar({0, 30, 70, 0}).statistic == mcnemar({0, 70, 30, 0}).statistic);
  double prev = 2.0;
  for (std::uint64_t a = 50; a <= 100; a += 5) {
    auto p = mcnemar({0, a, 100 - a, 0}).p_value;
    CHECK(p <= prev);
    prev = p;
  }
}

TEST_CASE("chi-squared tail reference values") {
  // erfc(sqrt(x/2)) at textbook quantiles
  CHECK(chi_squared_1dof_upper_tail(3.841458820694124) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_squared_1dof_upper_tail(6.634896601021214) == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(chi_squared_1dof_upper_tail(0.0) == 1.0);
  CHECK(chi_squared_1dof_upper_tail(200.0) > 0.0);
}

}  // TEST_SUITE
