#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "warpzsl/corpus.hpp"
#include "warpzsl/error.hpp"
#include "warpzsl/rng.hpp"

using namespace warpzsl;

namespace {

EmbeddingTable table_from(const std::string& text) {
  std::istringstream in(text);
  return read_embedding_table(in, "t.tsv");
}

template <class T, class W, class R>
T round_trip(const T& value, W write, R read) {
  std::ostringstream out;
  write(value, out);
  std::istringstream in(out.str());
  return read(in, "<rt>");
}

std::size_t error_line(const std::string& text) {
  try {
    table_from(text);
  } catch (const ValidationError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("embedding table reads header and rows in file order") {
  auto t = table_from("#dim=2\na\t1.0\t2.0\nb\t0.0\t-1.5\n");
  CHECK(t.dim() == 2);
  REQUIRE(t.size() == 2);
  CHECK(t.id(0) == "a");
  CHECK(t.at("b")[1] == -1.5);
  CHECK(t.kind() == EmbeddingKind::semantic);
}

TEST_CASE("empty body keeps the declared dimensionality") {
  auto t = table_from("#dim=300\n");
  CHECK(t.dim() == 300);
  CHECK(t.empty());
}

TEST_CASE("comments, blank lines and kind metadata") {
  auto t = table_from("\n#dim=1\n#kind=acoustic\n# note\n\nx\t+3e-2\n");
  CHECK(t.kind() == EmbeddingKind::acoustic);
  CHECK(t.at("x")[0] == 0.03);
}

TEST_CASE("malformed tables report the offending line") {
  CHECK(error_line("#dim=2\na\t1\t2\t3\n") == 2);
  CHECK(error_line("#dim=2\na\t1\n") == 2);
  CHECK(error_line("#dim=1\na\t1\nb\tnan\n") == 3);
  CHECK(error_line("#dim=1\na\tinf\n") == 2);
  CHECK(error_line("#dim=1\na\t1\n\na\t2\n") == 4);
  CHECK(error_line("a\t1\n") == 1);
  CHECK(error_line("#dim=0\n") == 1);
  CHECK(error_line("#dim=x\n") == 1);
  CHECK(error_line("#dim=1\nx\t1\n#kind=semantic\n") == 3);
  CHECK_THROWS_AS(table_from(""), ValidationError);
}

TEST_CASE("error message names file, line and rule") {
  try {
    table_from("#dim=2\na\t1\t2\t3\n");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.source() == "t.tsv");
    CHECK(std::string(e.what()).find("t.tsv:2:") == 0);
    CHECK(e.rule().find("arity") != std::string::npos);
  }
}

TEST_CASE("invariants are enforced before anything is written") {
  EmbeddingTable t(2);
  std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(t.add("a", three), ValidationError);
  std::vector<double> bad{1, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(t.add("a", bad), ValidationError);
  std::vector<double> ok{1, 2};
  CHECK_THROWS_AS(t.add("", ok), ValidationError);
  CHECK_THROWS_AS(t.add("a\tb", ok), ValidationError);
  CHECK_THROWS_AS(t.add("a\nb", ok), ValidationError);
  CHECK_THROWS_AS(t.add("#a", ok), ValidationError);
  t.add("a", ok);
  CHECK_THROWS_AS(t.add("a", ok), ValidationError);
  CHECK(t.size() == 1);
}

TEST_CASE("0.1 survives a write/read cycle") {
  EmbeddingTable t(1);
  t.add("x", std::vector<double>{0.1});
  auto back = round_trip(t, [](auto& v, auto& o) { write_embedding_table(v, o); },
                         [](auto& i, auto s) { return read_embedding_table(i, s); });
  CHECK(back.at("x")[0] == 0.1);
  CHECK(back == t);
}

TEST_CASE("format_double and parse_double") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-0.0) == "-0");
  CHECK(parse_double("1e3") == 1000.0);
  CHECK(parse_double("+2.5") == 2.5);
  CHECK(parse_double("-.5") == -0.5);
  CHECK_FALSE(parse_double("inf"));
  CHECK_FALSE(parse_double("nan"));
  CHECK_FALSE(parse_double("1.0x"));
  CHECK_FALSE(parse_double(""));
  CHECK_FALSE(parse_double("1e999"));
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    double v = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.below(200)) - 100);
    CHECK(parse_double(format_double(v)) == v);
  }
}

TEST_CASE("catalog records and errors") {
  std::istringstream in(
      "{\"class_id\":\"dog\",\"label\":\"dog\"}\n"
      "{\"class_id\":\"cat\",\"label\":\"cat\",\"description\":\"Sounds made by cats.\"}\n");
  auto c = read_class_catalog(in, "c.jsonl");
  REQUIRE(c.size() == 2);
  CHECK_FALSE(c.records()[0].description);
  CHECK(*c.find("cat")->description == "Sounds made by cats.");

  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream s(text);
    try {
      read_class_catalog(s, "c.jsonl");
    } catch (const ValidationError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("{\"class_id\":\"dog\",\"label\":\"dog\"}\n"
                "{\"class_id\":\"dog\",\"label\":\"dog\"}\n") == 2);
  CHECK(line_of("{\"class_id\":\"dog\"}\n") == 1);
  CHECK(line_of("\n{\"class_id\":\"dog\",\"label\":\"\"}\n") == 2);
  CHECK(line_of("{not json\n") == 1);
  CHECK(line_of("[1]\n") == 1);
}

TEST_CASE("sample set format") {
  std::istringstream in("#binding=clips.tsv\ns1\tdog\ns2\tcat\n");
  auto s = read_sample_set(in, "s.tsv");
  CHECK(s.binding() == "clips.tsv");
  CHECK(s.size() == 2);
  ClassCatalog cat;
  cat.add({"dog", "dog", {}});
  CHECK_THROWS_AS(s.check_classes(cat), ValidationError);
  std::istringstream dup("s1\tdog\ns1\tdog\n");
  CHECK_THROWS_AS(read_sample_set(dup), ValidationError);
  std::istringstream bad("s1\tdog\textra\n");
  CHECK_THROWS_AS(read_sample_set(bad), ValidationError);
}

TEST_CASE("fold plan validation") {
  std::istringstream good(
      R"({"folds":{"F0":["a","b"],"F1":["c"]},"roles":{"zsl-train":["F0"],"zsl-test":["F1"]}})");
  auto plan = read_fold_plan(good, "p.json");
  CHECK(plan.classes_for(Role::zsl_train) == std::vector<std::string>{"a", "b"});
  CHECK(plan.classes_for(Role::zsl_test) == std::vector<std::string>{"c"});
  CHECK_THROWS_AS(plan.classes_for(Role::model_train), ValidationError);

  std::istringstream overlap(R"({"folds":{"F0":["a"],"F1":["a"]},"roles":{}})");
  CHECK_THROWS_WITH_AS(read_fold_plan(overlap), doctest::Contains("'a'"),
                       ValidationError);
  std::istringstream unknown(R"({"folds":{"F0":["a"]},"roles":{"zsl-test":["F9"]}})");
  CHECK_THROWS_WITH_AS(read_fold_plan(unknown), doctest::Contains("F9"),
                       ValidationError);
  std::istringstream leak(
      R"({"folds":{"F0":["a"]},"roles":{"zsl-train":["F0"],"zsl-test":["F0"]}})");
  CHECK_THROWS_AS(read_fold_plan(leak), ValidationError);
  std::istringstream role(R"({"folds":{"F0":["a"]},"roles":{"bogus":["F0"]}})");
  CHECK_THROWS_AS(read_fold_plan(role), ValidationError);
}

TEST_CASE("model file round trip and validation") {
  CompatibilityModel m;
  m.weights = Eigen::MatrixXd::Random(3, 2);
  m.lambda = 0.01;
  m.seed = 18446744073709551615ULL;
  m.notes = "note \"quoted\"\ttab";
  auto back = round_trip(m, [](auto& v, auto& o) { write_model(v, o); },
                         [](auto& i, auto s) { return read_model(i, s); });
  CHECK(back == m);

  std::istringstream short_rows(
      "{\"acoustic_dim\":2,\"semantic_dim\":1,\"lambda\":0,\"seed\":0,\"notes\":\"\"}\n1\n");
  CHECK_THROWS_AS(read_model(short_rows), ValidationError);
  std::istringstream wide(
      "{\"acoustic_dim\":1,\"semantic_dim\":1,\"lambda\":0,\"seed\":0,\"notes\":\"\"}\n1\t2\n");
  CHECK_THROWS_AS(read_model(wide), ValidationError);
  std::istringstream negative(
      "{\"acoustic_dim\":1,\"semantic_dim\":1,\"lambda\":-1,\"seed\":0,\"notes\":\"\"}\n1\n");
  CHECK_THROWS_AS(read_model(negative), ValidationError);

  CompatibilityModel bad;
  bad.weights = Eigen::MatrixXd::Constant(1, 1, std::nan(""));
  std::ostringstream sink;
  CHECK_THROWS_AS(write_model(bad, sink), ValidationError);
}

TEST_CASE("labeled data resolves samples against the acoustic table") {
  EmbeddingTable acoustic(2, EmbeddingKind::acoustic);
  acoustic.add("s1", std::vector<double>{1, 2});
  acoustic.add("s2", std::vector<double>{3, 4});
  SampleSet samples;
  samples.add({"s2", "b"});
  samples.add({"s1", "a"});
  auto data = LabeledData::resolve(samples, acoustic);
  CHECK(data.row(0)[0] == 3);
  CHECK(data.class_ids == std::vector<std::string>{"b", "a"});
  auto only_a = data.restricted_to({"a"});
  CHECK(only_a.size() == 1);
  CHECK(only_a.row(0)[1] == 2);
  samples.add({"s3", "a"});
  CHECK_THROWS_WITH_AS(LabeledData::resolve(samples, acoustic),
                       doctest::Contains("s3"), ValidationError);
}

TEST_CASE("files: unwritable and missing paths raise IoError") {
  EmbeddingTable t(1);
  CHECK_THROWS_AS(write_embedding_table(t, "/nonexistent-dir/x.tsv"), IoError);
  CHECK_THROWS_AS(read_embedding_table("/nonexistent-dir/x.tsv"), IoError);
  auto path = std::filesystem::temp_directory_path() / "warpzsl_corpus_test.tsv";
  t.add("a", std::vector<double>{1.5});
  write_embedding_table(t, path);
  CHECK(read_embedding_table(path) == t);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
