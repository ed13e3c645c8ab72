#include <map>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "warpzsl/compat.hpp"
#include "warpzsl/corpus.hpp"
#include "warpzsl/error.hpp"
#include "warpzsl/metrics.hpp"
#include "warpzsl/semantics.hpp"
#include "warpzsl/splits.hpp"
#include "warpzsl/warp.hpp"

namespace py = pybind11;
using namespace warpzsl;

using Vec = std::vector<double>;

namespace {

Role role_from(const std::string& name) {
  auto role = parse_role(name);
  if (!role) throw ValidationError("unknown role '" + name + "'");
  return *role;
}

EmbeddingKind kind_from(const std::string& name) {
  if (name == "acoustic") return EmbeddingKind::acoustic;
  if (name == "semantic") return EmbeddingKind::semantic;
  throw ValidationError("unknown embedding kind '" + name + "'");
}

Eigen::VectorXd to_eigen(std::span<const double> values) {
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

py::list scored(const ScoredClassList& list) {
  py::list out;
  for (const auto& s : list) out.append(py::make_tuple(s.class_id, s.score));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Zero-shot classification with a WARP-trained bilinear model";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  // corpus --------------------------------------------------------------------

  py::class_<EmbeddingTable>(m, "EmbeddingTable")
      .def(py::init([](std::size_t dim, const std::string& kind) {
             return EmbeddingTable(dim, kind_from(kind));
           }),
           py::arg("dim"), py::arg("kind") = "semantic")
      .def_property_readonly("dim", &EmbeddingTable::dim)
      .def_property_readonly("kind",
                             [](const EmbeddingTable& t) { return std::string(to_string(t.kind())); })
      .def_property_readonly("ids", &EmbeddingTable::ids)
      .def("add", [](EmbeddingTable& t, std::string id, const Vec& v) { t.add(std::move(id), v); })
      .def("at", [](const EmbeddingTable& t, const std::string& id) { return to_eigen(t.at(id)); })
      .def("row", [](const EmbeddingTable& t, std::size_t i) { return to_eigen(t.row(i)); })
      .def("__len__", &EmbeddingTable::size)
      .def("__contains__", &EmbeddingTable::contains)
      .def("__eq__", [](const EmbeddingTable& a, const EmbeddingTable& b) { return a == b; })
      .def_static("read", py::overload_cast<const std::filesystem::path&>(&read_embedding_table))
      .def("write", [](const EmbeddingTable& t, const std::filesystem::path& p) {
        write_embedding_table(t, p);
      });

  py::class_<ClassRecord>(m, "ClassRecord")
      .def(py::init([](std::string id, std::string label, std::optional<std::string> desc) {
             return ClassRecord{std::move(id), std::move(label), std::move(desc)};
           }),
           py::arg("class_id"), py::arg("label"), py::arg("description") = py::none())
      .def_readwrite("class_id", &ClassRecord::class_id)
      .def_readwrite("label", &ClassRecord::label)
      .def_readwrite("description", &ClassRecord::description);

  py::class_<ClassCatalog>(m, "ClassCatalog")
      .def(py::init<>())
      .def("add", &ClassCatalog::add)
      .def_property_readonly("records", &ClassCatalog::records)
      .def_property_readonly("class_ids", &ClassCatalog::class_ids)
      .def("__len__", &ClassCatalog::size)
      .def_static("read", py::overload_cast<const std::filesystem::path&>(&read_class_catalog))
      .def("write", [](const ClassCatalog& c, const std::filesystem::path& p) {
        write_class_catalog(c, p);
      });

  py::class_<SampleSet>(m, "SampleSet")
      .def(py::init<std::string>(), py::arg("binding") = "")
      .def("add", [](SampleSet& s, std::string sample_id, std::string class_id) {
        s.add({std::move(sample_id), std::move(class_id)});
      })
      .def_property_readonly("binding", &SampleSet::binding)
      .def_property_readonly("records",
                             [](const SampleSet& s) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const auto& r : s.records()) out.emplace_back(r.sample_id, r.class_id);
                               return out;
                             })
      .def("__len__", &SampleSet::size)
      .def_static("read", py::overload_cast<const std::filesystem::path&>(&read_sample_set))
      .def("write", [](const SampleSet& s, const std::filesystem::path& p) {
        write_sample_set(s, p);
      });

  py::class_<FoldPlan>(m, "FoldPlan")
      .def(py::init<>())
      .def("add_fold", [](FoldPlan& p, std::string name, std::vector<std::string> classes) {
        p.add_fold({std::move(name), std::move(classes)});
      })
      .def("set_role", [](FoldPlan& p, const std::string& role, std::vector<std::string> folds) {
        p.set_role(role_from(role), std::move(folds));
      })
      .def_property_readonly("folds",
                             [](const FoldPlan& p) {
                               std::vector<std::pair<std::string, std::vector<std::string>>> out;
                               for (const auto& f : p.folds()) out.emplace_back(f.name, f.classes);
                               return out;
                             })
      .def_property_readonly("roles",
                             [](const FoldPlan& p) {
                               std::map<std::string, std::vector<std::string>> out;
                               for (const auto& [r, f] : p.roles()) out[std::string(to_string(r))] = f;
                               return out;
                             })
      .def("classes_for", [](const FoldPlan& p, const std::string& role) {
        return p.classes_for(role_from(role));
      })
      .def("validate", [](const FoldPlan& p) { p.validate(); })
      .def("__eq__", [](const FoldPlan& a, const FoldPlan& b) { return a == b; })
      .def_static("read", py::overload_cast<const std::filesystem::path&>(&read_fold_plan))
      .def("write", [](const FoldPlan& plan, const std::filesystem::path& p) {
        write_fold_plan(plan, p);
      });

  py::class_<CompatibilityModel>(m, "CompatibilityModel")
      .def(py::init([](Eigen::MatrixXd weights, double lambda, std::uint64_t seed,
                       std::string notes) {
             CompatibilityModel model{std::move(weights), lambda, seed, std::move(notes)};
             model.validate();
             return model;
           }),
           py::arg("weights"), py::arg("lambda_") = 0.0, py::arg("seed") = 0,
           py::arg("notes") = "")
      .def_readwrite("weights", &CompatibilityModel::weights)
      .def_readwrite("lambda_", &CompatibilityModel::lambda)
      .def_readwrite("seed", &CompatibilityModel::seed)
      .def_readwrite("notes", &CompatibilityModel::notes)
      .def_property_readonly("acoustic_dim", &CompatibilityModel::acoustic_dim)
      .def_property_readonly("semantic_dim", &CompatibilityModel::semantic_dim)
      .def_static("read", py::overload_cast<const std::filesystem::path&>(&read_model))
      .def("write", [](const CompatibilityModel& model, const std::filesystem::path& p) {
        write_model(model, p);
      });

  py::class_<LabeledData>(m, "LabeledData")
      .def(py::init([](std::vector<std::string> sample_ids, std::vector<std::string> class_ids,
                       Eigen::MatrixXd features) {
             if (sample_ids.size() != class_ids.size() ||
                 static_cast<std::size_t>(features.rows()) != sample_ids.size()) {
               throw ValidationError("sample_ids, class_ids and feature rows differ in length");
             }
             LabeledData d;
             d.sample_ids = std::move(sample_ids);
             d.class_ids = std::move(class_ids);
             d.features = features;
             return d;
           }),
           py::arg("sample_ids"), py::arg("class_ids"), py::arg("features"))
      .def_static("resolve", &LabeledData::resolve)
      .def_readonly("sample_ids", &LabeledData::sample_ids)
      .def_readonly("class_ids", &LabeledData::class_ids)
      .def_property_readonly("features",
                             [](const LabeledData& d) { return Eigen::MatrixXd(d.features); })
      .def("restricted_to", &LabeledData::restricted_to)
      .def("__len__", &LabeledData::size);

  // semantics -----------------------------------------------------------------

  m.def("tokenize",
        [](const std::string& text, bool lowercase, std::set<std::string> stopwords) {
          return tokenize(text, TokenRule{lowercase, std::move(stopwords)});
        },
        py::arg("text"), py::arg("lowercase") = false,
        py::arg("stopwords") = std::set<std::string>{});
  m.def("assemble_label_embedding",
        [](const std::string& label, const EmbeddingTable& words, bool lowercase,
           std::set<std::string> stopwords) {
          return assemble_label_embedding(label, words, TokenRule{lowercase, std::move(stopwords)})
              .vector;
        },
        py::arg("label"), py::arg("word_table"), py::arg("lowercase") = false,
        py::arg("stopwords") = std::set<std::string>{});
  m.def("assemble_sentence_embedding",
        [](const std::string& text, const EmbeddingTable& words, bool lowercase,
           std::set<std::string> stopwords) {
          return assemble_sentence_embedding(text, words, TokenRule{lowercase, std::move(stopwords)})
              .vector;
        },
        py::arg("description"), py::arg("word_table"), py::arg("lowercase") = false,
        py::arg("stopwords") = std::set<std::string>{});
  m.def("concat_embeddings", [](const std::vector<const EmbeddingTable*>& tables) {
    return concat_embeddings(tables);
  });
  m.def("aggregate_clip_embedding",
        [](const std::vector<Vec>& segments) { return aggregate_clip_embedding(segments); });

  // compat --------------------------------------------------------------------

  m.def("project", [](const CompatibilityModel& model, const Vec& x) { return project(model, x); });
  m.def("compatibility", [](const CompatibilityModel& model, const Vec& x, const Vec& z) {
    return compatibility(model, x, z);
  });
  m.def("score_classes",
        [](const CompatibilityModel& model, const Vec& x, const EmbeddingTable& semantic,
           const std::vector<std::string>& candidates) {
          return scored(score_classes(model, x, semantic, candidates));
        });
  m.def("classify", [](const CompatibilityModel& model, const Vec& x,
                       const EmbeddingTable& semantic, const std::vector<std::string>& candidates) {
    return classify(model, x, semantic, candidates);
  });

  // warp ----------------------------------------------------------------------

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("lambda_grid", &TrainConfig::lambda_grid)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_property(
          "rank_mode",
          [](const TrainConfig& c) { return c.rank_mode == RankMode::exact ? "exact" : "sampled"; },
          [](TrainConfig& c, const std::string& mode) {
            if (mode == "exact") {
              c.rank_mode = RankMode::exact;
            } else if (mode == "sampled") {
              c.rank_mode = RankMode::sampled;
            } else {
              throw ValidationError("rank_mode must be 'exact' or 'sampled'");
            }
          })
      .def_readwrite("margin_rank", &TrainConfig::margin_rank)
      .def_readwrite("sample_cap", &TrainConfig::sample_cap)
      .def_readwrite("init_scale", &TrainConfig::init_scale)
      .def_readwrite("early_stop_patience", &TrainConfig::early_stop_patience)
      .def("to_json", &train_config_to_json)
      .def_static("from_json", [](const std::string& text) { return parse_train_config(text); });

  py::class_<EpochRecord>(m, "EpochRecord")
      .def_readonly("lambda_", &EpochRecord::lambda)
      .def_readonly("epoch", &EpochRecord::epoch)
      .def_readonly("train_objective", &EpochRecord::train_objective)
      .def_readonly("validation_top1", &EpochRecord::validation_top1);

  py::class_<LambdaSummary>(m, "LambdaSummary")
      .def_readonly("lambda_", &LambdaSummary::lambda)
      .def_readonly("best_epoch", &LambdaSummary::best_epoch)
      .def_readonly("epochs_run", &LambdaSummary::epochs_run)
      .def_readonly("best_validation_top1", &LambdaSummary::best_validation_top1);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("model", &TrainResult::model)
      .def_readonly("validation_top1", &TrainResult::validation_top1)
      .def_readonly("epochs", &TrainResult::epochs)
      .def_readonly("lambdas", &TrainResult::lambdas);

  m.def("beta", &beta, py::arg("rank"));
  m.def("hinge", [](const CompatibilityModel& model, const Vec& x, const std::string& truth,
                    const std::string& other, const EmbeddingTable& semantic) {
    return hinge(model, x, truth, other, semantic);
  });
  m.def("rank_of",
        [](const CompatibilityModel& model, const Vec& x, const std::string& truth,
           const EmbeddingTable& semantic, const std::vector<std::string>& train_classes,
           bool margin_rank) {
          Rng unused(0);
          RankOptions options;
          options.margin_rank = margin_rank;
          auto r = rank_of(model, x, truth, semantic, train_classes, options, unused);
          return py::make_tuple(r.rank, r.violators);
        },
        py::arg("model"), py::arg("acoustic"), py::arg("true_class"), py::arg("semantic"),
        py::arg("train_classes"), py::arg("margin_rank") = true);
  m.def("objective",
        [](const CompatibilityModel& model, const LabeledData& data, const EmbeddingTable& semantic,
           const std::vector<std::string>& train_classes, double lambda, bool margin_rank) {
          return objective(model, data, semantic, train_classes, lambda, margin_rank);
        },
        py::arg("model"), py::arg("data"), py::arg("semantic"),
        py::arg("train_classes"), py::arg("lambda_"), py::arg("margin_rank") = true);
  m.def("subgradient",
        [](const CompatibilityModel& model, const Vec& x, const std::string& truth,
           const EmbeddingTable& semantic, const std::vector<std::string>& train_classes,
           double lambda, bool margin_rank) {
          return subgradient(model, x, truth, semantic, train_classes, lambda, margin_rank);
        },
        py::arg("model"), py::arg("acoustic"), py::arg("true_class"), py::arg("semantic"),
        py::arg("train_classes"), py::arg("lambda_"), py::arg("margin_rank") = true);
  m.def("train",
        [](const LabeledData& train_set, const LabeledData& validation_set,
           const EmbeddingTable& semantic, const std::vector<std::string>& train_classes,
           const std::vector<std::string>& validation_classes, const TrainConfig& config) {
          py::gil_scoped_release release;
          return train(train_set, validation_set, semantic, train_classes, validation_classes,
                       config);
        },
        py::arg("train_set"), py::arg("validation_set"), py::arg("semantic"),
        py::arg("train_classes"), py::arg("validation_classes"),
        py::arg("config") = TrainConfig{});

  // splits --------------------------------------------------------------------

  m.def("category_folds", &category_folds);
  m.def("random_folds", &random_folds, py::arg("catalog"), py::arg("k"), py::arg("seed"));
  m.def("undersample", &undersample, py::arg("samples"), py::arg("cap"), py::arg("threshold"),
        py::arg("seed"));
  m.def("bin_stratified_folds",
        [](const SampleSet& samples, const ClassCatalog& catalog,
           std::optional<std::vector<std::size_t>> edges, std::size_t k, std::uint64_t seed) {
          BinSpec bins = edges ? BinSpec{*edges} : BinSpec::defaults();
          bins.validate();
          return bin_stratified_folds(samples, catalog, bins, k, seed);
        },
        py::arg("samples"), py::arg("catalog"), py::arg("edges") = py::none(), py::arg("k") = 5,
        py::arg("seed") = 0);
  m.def("make_data_setting", [](const FoldPlan& plan, const std::string& setting) {
    if (setting == "S1") return make_data_setting(plan, DataSetting::S1);
    if (setting == "S2") return make_data_setting(plan, DataSetting::S2);
    throw ValidationError("setting must be 'S1' or 'S2'");
  });

  // metrics -------------------------------------------------------------------

  py::class_<SampleEvaluation>(m, "SampleEvaluation")
      .def_readonly("sample_id", &SampleEvaluation::sample_id)
      .def_readonly("truth", &SampleEvaluation::truth)
      .def_readonly("predicted", &SampleEvaluation::predicted)
      .def_readonly("true_rank", &SampleEvaluation::true_rank)
      .def_readonly("average_precision", &SampleEvaluation::average_precision);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("n_samples", &EvalReport::n_samples)
      .def_readonly("top1", &EvalReport::top1)
      .def_readonly("map", &EvalReport::map)
      .def_readonly("per_sample", &EvalReport::per_sample)
      .def("to_json", &to_json, py::arg("include_per_sample") = true);

  m.def("evaluate",
        [](const CompatibilityModel& model, const LabeledData& test_set,
           const EmbeddingTable& semantic, const std::vector<std::string>& candidates) {
          return evaluate(model, test_set, semantic, candidates);
        },
        py::arg("model"), py::arg("test_set"), py::arg("semantic"),
        py::arg("candidates"));
  m.def("top1", [](const std::vector<std::string>& p, const std::vector<std::string>& t) {
    return top1(p, t);
  });
  m.def("random_baseline", [](std::size_t k) {
    auto b = random_baseline(k);
    return py::make_tuple(b.map, b.top1);
  });
  m.def("build_contingency",
        [](const std::vector<std::string>& a, const std::vector<std::string>& b,
           const std::vector<std::string>& t) {
          auto c = build_contingency(a, b, t);
          return py::make_tuple(c.both_correct, c.a_only, c.b_only, c.both_wrong);
        });
  m.def("mcnemar",
        [](std::uint64_t both_correct, std::uint64_t a_only, std::uint64_t b_only,
           std::uint64_t both_wrong) {
          auto r = mcnemar({both_correct, a_only, b_only, both_wrong});
          return py::make_tuple(r.statistic, r.p_value);
        },
        py::arg("both_correct"), py::arg("a_only"), py::arg("b_only"), py::arg("both_wrong"));
}
