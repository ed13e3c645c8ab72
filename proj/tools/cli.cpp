#include "cli.hpp"

#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "manifest.hpp"
#include "warpzsl/compat.hpp"
#include "warpzsl/corpus.hpp"
#include "warpzsl/error.hpp"
#include "warpzsl/metrics.hpp"
#include "warpzsl/semantics.hpp"
#include "warpzsl/splits.hpp"
#include "warpzsl/warp.hpp"

namespace warpzsl::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void log_line(std::ostream& err, const ordered_json& event) {
  err << event.dump() << '\n';
}

ordered_json parse_json_file(const fs::path& path) {
  const auto text = read_text_file(path);
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what(), path.string());
  }
}

Role role_option(const std::string& text) {
  const auto role = parse_role(text);
  if (!role) throw ValidationError("unknown role '" + text + "'");
  return *role;
}

// Samples of `samples` whose class is in `classes`, joined with their
// acoustic vectors.
LabeledData samples_for(const SampleSet& samples, const EmbeddingTable& acoustic,
                        const std::vector<std::string>& classes,
                        std::string_view what) {
  const std::set<std::string> keep(classes.begin(), classes.end());
  SampleSet subset(samples.binding());
  for (const auto& r : samples.records()) {
    if (keep.contains(r.class_id)) subset.add(r);
  }
  if (subset.empty()) {
    throw ValidationError("no " + std::string(what) + " samples in the sample set");
  }
  return LabeledData::resolve(subset, acoustic);
}

void check_model_tables(const CompatibilityModel& model, const EmbeddingTable& acoustic,
                        const EmbeddingTable& semantic) {
  if (acoustic.dim() != model.acoustic_dim() || semantic.dim() != model.semantic_dim()) {
    throw ValidationError("dimension mismatch: model is " +
                          std::to_string(model.acoustic_dim()) + "x" +
                          std::to_string(model.semantic_dim()) + ", tables are " +
                          std::to_string(acoustic.dim()) + " (acoustic) and " +
                          std::to_string(semantic.dim()) + " (semantic)");
  }
}

// ---------------------------------------------------------------------------
// split

struct SplitArgs {
  std::string strategy;
  fs::path catalog;
  fs::path categories;
  fs::path samples;
  fs::path bins;
  std::size_t k = 5;
  std::uint64_t seed = 0;
  std::string setting;
  std::size_t undersample_cap = 0;
  std::size_t undersample_threshold = 0;
  fs::path samples_out;
  fs::path out;
};

int cmd_split(const SplitArgs& a, std::ostream& err) {
  const auto catalog = read_class_catalog(a.catalog);
  RunManifest manifest;
  manifest.command = "split";
  manifest.seed = a.seed;
  manifest.inputs.push_back(a.catalog);
  manifest.config = {{"strategy", a.strategy}, {"k", a.k}};

  FoldPlan plan;
  if (a.strategy == "category") {
    if (a.categories.empty()) {
      throw ValidationError("--strategy category requires --categories");
    }
    const auto doc = parse_json_file(a.categories);
    if (!doc.is_object()) {
      throw ValidationError("category map must be a JSON object", a.categories.string());
    }
    std::map<std::string, std::string> category_map;
    for (const auto& [class_id, category] : doc.items()) {
      if (!category.is_string()) {
        throw ValidationError("category of '" + class_id + "' is not a string",
                              a.categories.string());
      }
      category_map[class_id] = category.get<std::string>();
    }
    plan = category_folds(catalog, category_map);
    manifest.inputs.push_back(a.categories);
  } else if (a.strategy == "random") {
    plan = random_folds(catalog, a.k, a.seed);
  } else if (a.strategy == "bins") {
    if (a.samples.empty()) throw ValidationError("--strategy bins requires --samples");
    auto samples = read_sample_set(a.samples);
    manifest.inputs.push_back(a.samples);
    if (a.undersample_cap > 0) {
      if (a.undersample_cap < a.undersample_threshold) {
        log_line(err, {{"event", "warning"},
                       {"message", "undersample cap is below the threshold"}});
      }
      samples = undersample(samples, a.undersample_cap, a.undersample_threshold, a.seed);
      manifest.config["undersample_cap"] = a.undersample_cap;
      manifest.config["undersample_threshold"] = a.undersample_threshold;
      if (!a.samples_out.empty()) write_sample_set(samples, a.samples_out);
    }
    BinSpec bins = BinSpec::defaults();
    if (!a.bins.empty()) {
      bins = parse_bin_spec(read_text_file(a.bins), a.bins.string());
      manifest.inputs.push_back(a.bins);
    }
    manifest.config["bins"] = bins.edges;
    plan = bin_stratified_folds(samples, catalog, bins, a.k, a.seed);
  } else {
    throw ValidationError("unknown strategy '" + a.strategy + "'");
  }

  if (!a.setting.empty()) {
    plan = make_data_setting(std::move(plan),
                             a.setting == "S1" ? DataSetting::S1 : DataSetting::S2);
    manifest.config["setting"] = a.setting;
  }
  write_fold_plan(plan, a.out);
  manifest.outputs.push_back(a.out);
  if (!a.samples_out.empty() && a.undersample_cap > 0) {
    manifest.outputs.push_back(a.samples_out);
  }
  manifest.write_next_to(a.out);
  for (const auto& fold : plan.folds()) {
    log_line(err, {{"event", "fold"}, {"name", fold.name}, {"classes", fold.classes.size()}});
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// assemble

struct AssembleArgs {
  fs::path catalog;
  fs::path specs;
  fs::path out;
};

int cmd_assemble(const AssembleArgs& a, std::ostream& err) {
  const auto catalog = read_class_catalog(a.catalog);
  const auto doc = parse_json_file(a.specs);
  if (!doc.is_array() || doc.empty()) {
    throw ValidationError("assembly specs must be a non-empty JSON array",
                          a.specs.string());
  }
  RunManifest manifest;
  manifest.command = "assemble";
  manifest.config = doc;
  manifest.inputs = {a.catalog, a.specs};

  const auto base = a.specs.parent_path();
  std::map<fs::path, std::shared_ptr<const EmbeddingTable>> tables;
  std::map<fs::path, std::set<std::string>> stopword_lists;
  std::vector<AssemblySpec> specs;
  for (const auto& entry : doc) {
    try {
      AssemblySpec spec;
      spec.name = entry.at("name").get<std::string>();
      const auto source = entry.value("source", std::string("label"));
      if (source == "label") {
        spec.source = TextSource::label;
      } else if (source == "description") {
        spec.source = TextSource::description;
      } else {
        throw ValidationError("spec '" + spec.name + "': unknown source '" + source + "'");
      }
      const fs::path table_path = base / entry.at("word_table").get<std::string>();
      auto& table = tables[table_path];
      if (!table) {
        table = std::make_shared<const EmbeddingTable>(read_embedding_table(table_path));
        manifest.inputs.push_back(table_path);
      }
      spec.word_table = table;
      spec.rule.lowercase = entry.value("lowercase", false);
      if (const auto it = entry.find("stopwords"); it != entry.end() && !it->is_null()) {
        const fs::path stop_path = base / it->get<std::string>();
        if (!stopword_lists.contains(stop_path)) {
          stopword_lists[stop_path] = read_stopwords(stop_path);
          manifest.inputs.push_back(stop_path);
        }
        spec.rule.stopwords = stopword_lists[stop_path];
      }
      spec.l2_normalize = entry.value("normalize", false);
      specs.push_back(std::move(spec));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("bad assembly spec: ") + e.what(),
                            a.specs.string());
    }
  }

  const auto result = build_class_semantic_table(catalog, specs);
  for (const auto& c : result.coverage) {
    log_line(err, {{"event", "coverage"},
                   {"class_id", c.class_id},
                   {"spec", c.spec},
                   {"resolved", c.resolved},
                   {"oov", c.oov.size()},
                   {"oov_tokens", c.oov}});
  }
  write_embedding_table(result.table, a.out);
  manifest.outputs.push_back(a.out);
  manifest.write_next_to(a.out);
  return kOk;
}

// ---------------------------------------------------------------------------
// train

struct ModelInputs {
  fs::path acoustic;
  fs::path samples;
  fs::path semantic;
  fs::path plan;
};

struct TrainArgs {
  ModelInputs in;
  fs::path config;
  std::optional<std::uint64_t> seed;
  fs::path out;
  fs::path log;
};

int cmd_train(const TrainArgs& a, std::ostream& err) {
  TrainConfig config;
  if (!a.config.empty()) {
    config = parse_train_config(read_text_file(a.config), a.config.string());
  }
  if (a.seed) config.seed = *a.seed;
  config.validate();

  const auto acoustic = read_embedding_table(a.in.acoustic);
  const auto samples = read_sample_set(a.in.samples);
  const auto semantic = read_embedding_table(a.in.semantic);
  const auto plan = read_fold_plan(a.in.plan);
  const auto train_classes = plan.classes_for(Role::zsl_train);
  const auto validation_classes = plan.classes_for(Role::zsl_validation);
  const auto train_set = samples_for(samples, acoustic, train_classes, "zsl-train");
  const auto validation_set =
      samples_for(samples, acoustic, validation_classes, "zsl-validation");

  std::unique_ptr<std::ofstream> log_file;
  if (!a.log.empty()) {
    log_file = std::make_unique<std::ofstream>(a.log, std::ios::binary | std::ios::trunc);
    if (!*log_file) throw IoError("cannot open '" + a.log.string() + "' for writing");
  }
  const auto emit = [&](const ordered_json& event) {
    log_line(err, event);
    if (log_file) log_line(*log_file, event);
  };

  const auto result = train(train_set, validation_set, semantic, train_classes,
                            validation_classes, config, [&](const EpochRecord& r) {
                              emit({{"event", "epoch"},
                                    {"lambda", r.lambda},
                                    {"epoch", r.epoch},
                                    {"train_objective", r.train_objective},
                                    {"validation_top1", r.validation_top1}});
                            });
  for (const auto& s : result.lambdas) {
    emit({{"event", "lambda"},
          {"lambda", s.lambda},
          {"best_epoch", s.best_epoch},
          {"epochs_run", s.epochs_run},
          {"best_validation_top1", s.best_validation_top1}});
  }
  emit({{"event", "selected"},
        {"lambda", result.model.lambda},
        {"validation_top1", result.validation_top1}});
  if (log_file) {
    log_file->close();
    if (!*log_file) throw IoError("failed writing '" + a.log.string() + "'");
  }

  write_model(result.model, a.out);
  RunManifest manifest;
  manifest.command = "train";
  manifest.seed = config.seed;
  manifest.config = ordered_json::parse(train_config_to_json(config));
  manifest.inputs = {a.in.acoustic, a.in.samples, a.in.semantic, a.in.plan};
  if (!a.config.empty()) manifest.inputs.push_back(a.config);
  manifest.outputs.push_back(a.out);
  if (!a.log.empty()) manifest.outputs.push_back(a.log);
  manifest.write_next_to(a.out);
  return kOk;
}

// ---------------------------------------------------------------------------
// predict / evaluate

struct ScoringArgs {
  fs::path model;
  ModelInputs in;
  std::string role = "zsl-test";
  fs::path predictions;
  bool per_sample = true;
  fs::path out;
};

struct ScoringContext {
  CompatibilityModel model;
  std::optional<EmbeddingTable> semantic;
  std::vector<std::string> candidates;
  LabeledData test_set;
};

ScoringContext load_scoring(const ScoringArgs& a) {
  ScoringContext ctx;
  ctx.model = read_model(a.model);
  const auto acoustic = read_embedding_table(a.in.acoustic);
  ctx.semantic = read_embedding_table(a.in.semantic);
  check_model_tables(ctx.model, acoustic, *ctx.semantic);
  const auto plan = read_fold_plan(a.in.plan);
  ctx.candidates = plan.classes_for(role_option(a.role));
  ctx.test_set = samples_for(read_sample_set(a.in.samples), acoustic, ctx.candidates,
                             a.role);
  return ctx;
}

RunManifest scoring_manifest(const char* command, const ScoringArgs& a) {
  RunManifest manifest;
  manifest.command = command;
  manifest.config = {{"role", a.role}};
  manifest.inputs = {a.model, a.in.acoustic, a.in.samples, a.in.semantic, a.in.plan};
  manifest.outputs.push_back(a.out);
  return manifest;
}

int cmd_predict(const ScoringArgs& a, std::ostream&) {
  const auto ctx = load_scoring(a);
  const auto candidates = CandidateSet::resolve(*ctx.semantic, ctx.candidates);
  SampleSet predictions;
  for (std::size_t i = 0; i < ctx.test_set.size(); ++i) {
    predictions.add({ctx.test_set.sample_ids[i],
                     classify(ctx.model, ctx.test_set.row(i), candidates)});
  }
  write_sample_set(predictions, a.out);
  scoring_manifest("predict", a).write_next_to(a.out);
  return kOk;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

int cmd_evaluate(const ScoringArgs& a, std::ostream& out) {
  if (!a.predictions.empty()) {
    // Top-1 straight from a predictions file; ranks are unknown, so no mAP.
    const auto truth = read_sample_set(a.in.samples);
    const auto predicted = read_sample_set(a.predictions);
    std::vector<std::string> preds;
    std::vector<std::string> truths;
    for (const auto& p : predicted.records()) {
      const auto* t = truth.find(p.sample_id);
      if (!t) throw ValidationError("prediction for unknown sample '" + p.sample_id + "'");
      preds.push_back(p.class_id);
      truths.push_back(t->class_id);
    }
    ordered_json doc;
    doc["n_samples"] = truths.size();
    doc["top1"] = top1(preds, truths);
    doc["map"] = nullptr;
    const auto text = doc.dump(2);
    if (!a.out.empty()) {
      write_text(a.out, text);
      RunManifest manifest;
      manifest.command = "evaluate";
      manifest.inputs = {a.predictions, a.in.samples};
      manifest.outputs.push_back(a.out);
      manifest.write_next_to(a.out);
    }
    out << text << '\n';
    return kOk;
  }

  const auto ctx = load_scoring(a);
  const auto report = evaluate(ctx.model, ctx.test_set, *ctx.semantic, ctx.candidates);
  const auto text = to_json(report, a.per_sample);
  if (!a.out.empty()) {
    write_text(a.out, text);
    scoring_manifest("evaluate", a).write_next_to(a.out);
  }
  out << to_json(report, false) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// mcnemar

struct McNemarArgs {
  std::vector<std::uint64_t> cells;
  fs::path predictions_a;
  fs::path predictions_b;
  fs::path truth;
  fs::path out;
};

int cmd_mcnemar(const McNemarArgs& a, std::ostream& out) {
  ContingencyTable table;
  RunManifest manifest;
  manifest.command = "mcnemar";
  if (!a.cells.empty()) {
    if (a.cells.size() != 4) throw ValidationError("--cells takes four integers");
    table = {a.cells[0], a.cells[1], a.cells[2], a.cells[3]};
    manifest.config = {{"cells", a.cells}};
  } else {
    if (a.predictions_a.empty() || a.predictions_b.empty() || a.truth.empty()) {
      throw ValidationError("give --cells or all of --a, --b and --truth");
    }
    const auto truth = read_sample_set(a.truth);
    const auto pa = read_sample_set(a.predictions_a);
    const auto pb = read_sample_set(a.predictions_b);
    std::vector<std::string> preds_a, preds_b, truths;
    for (const auto& t : truth.records()) {
      const auto* ra = pa.find(t.sample_id);
      const auto* rb = pb.find(t.sample_id);
      if (!ra || !rb) {
        throw ValidationError("sample '" + t.sample_id + "' lacks a prediction in " +
                              (ra ? a.predictions_b : a.predictions_a).string());
      }
      preds_a.push_back(ra->class_id);
      preds_b.push_back(rb->class_id);
      truths.push_back(t.class_id);
    }
    table = build_contingency(preds_a, preds_b, truths);
    manifest.inputs = {a.predictions_a, a.predictions_b, a.truth};
  }
  const auto result = mcnemar(table);
  ordered_json doc;
  doc["both_correct"] = table.both_correct;
  doc["a_only"] = table.a_only;
  doc["b_only"] = table.b_only;
  doc["both_wrong"] = table.both_wrong;
  doc["statistic"] = result.statistic;
  doc["p_value"] = result.p_value;
  const auto text = doc.dump(2);
  if (!a.out.empty()) {
    write_text(a.out, text);
    manifest.outputs.push_back(a.out);
    manifest.write_next_to(a.out);
  }
  out << text << '\n';
  return kOk;
}

int cmd_config_init(const fs::path& path, std::ostream& out) {
  const auto text = train_config_to_json(TrainConfig{});
  if (path.empty()) {
    out << text << '\n';
  } else {
    write_text(path, text);
  }
  return kOk;
}

void add_model_inputs(CLI::App* cmd, ModelInputs& in, bool need_plan = true) {
  cmd->add_option("--acoustic", in.acoustic, "Acoustic embedding table")->required();
  cmd->add_option("--samples", in.samples, "Sample set (sample_id<TAB>class_id)")
      ->required();
  cmd->add_option("--semantic", in.semantic, "Class semantic embedding table")
      ->required();
  auto* plan = cmd->add_option("--plan", in.plan, "Fold plan with roles");
  if (need_plan) plan->required();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-shot classification with a WARP-trained bilinear model"};
  app.name(args.empty() ? "warpzsl" : args.front());
  app.require_subcommand(1);

  SplitArgs split;
  auto* split_cmd = app.add_subcommand("split", "Partition classes into folds");
  split_cmd->add_option("--strategy", split.strategy, "category | random | bins")
      ->required()
      ->check(CLI::IsMember({"category", "random", "bins"}));
  split_cmd->add_option("--catalog", split.catalog, "Class catalog (JSON Lines)")
      ->required();
  split_cmd->add_option("--categories", split.categories, "class_id -> category JSON");
  split_cmd->add_option("--samples", split.samples, "Sample set (bins strategy)");
  split_cmd->add_option("--bins", split.bins, "JSON list of bin edges");
  split_cmd->add_option("--k", split.k, "Number of folds")->capture_default_str();
  split_cmd->add_option("--seed", split.seed, "Random seed")->capture_default_str();
  split_cmd->add_option("--setting", split.setting, "Assign S1 or S2 roles")
      ->check(CLI::IsMember({"S1", "S2"}));
  split_cmd->add_option("--undersample-cap", split.undersample_cap,
                        "Undersample classes above the threshold to this many samples");
  split_cmd->add_option("--undersample-threshold", split.undersample_threshold,
                        "Only classes with more samples than this are undersampled");
  split_cmd->add_option("--samples-out", split.samples_out,
                        "Where to write the undersampled sample set");
  split_cmd->add_option("--out", split.out, "Output fold plan")->required();

  AssembleArgs assemble;
  auto* assemble_cmd =
      app.add_subcommand("assemble", "Build class semantic embeddings from word vectors");
  assemble_cmd->add_option("--catalog", assemble.catalog, "Class catalog")->required();
  assemble_cmd->add_option("--specs", assemble.specs, "JSON array of assembly specs")
      ->required();
  assemble_cmd->add_option("--out", assemble.out, "Output embedding table")->required();

  TrainArgs train_args;
  std::uint64_t train_seed = 0;
  auto* train_cmd = app.add_subcommand("train", "Train W with the WARP objective");
  add_model_inputs(train_cmd, train_args.in);
  train_cmd->add_option("--config", train_args.config, "TrainConfig JSON");
  auto* seed_opt = train_cmd->add_option("--seed", train_seed, "Override the config seed");
  train_cmd->add_option("--out", train_args.out, "Output model file")->required();
  train_cmd->add_option("--log", train_args.log, "JSON-lines training log");

  ScoringArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Write top-1 predictions");
  predict_cmd->add_option("--model", predict_args.model, "Model file")->required();
  add_model_inputs(predict_cmd, predict_args.in);
  predict_cmd->add_option("--role", predict_args.role, "Role whose classes are candidates")
      ->capture_default_str();
  predict_cmd->add_option("--out", predict_args.out, "Predictions file")->required();

  ScoringArgs eval_args;
  bool no_per_sample = false;
  auto* eval_cmd = app.add_subcommand("evaluate", "Top-1 and mAP over a test role");
  eval_cmd->add_option("--model", eval_args.model, "Model file");
  eval_cmd->add_option("--acoustic", eval_args.in.acoustic, "Acoustic embedding table");
  eval_cmd->add_option("--samples", eval_args.in.samples, "Sample set with true classes")
      ->required();
  eval_cmd->add_option("--semantic", eval_args.in.semantic, "Class semantic table");
  eval_cmd->add_option("--plan", eval_args.in.plan, "Fold plan with roles");
  eval_cmd->add_option("--role", eval_args.role, "Role whose classes are candidates")
      ->capture_default_str();
  eval_cmd->add_option("--predictions", eval_args.predictions,
                       "Score a predictions file instead of a model (Top-1 only)");
  eval_cmd->add_flag("--no-per-sample", no_per_sample, "Omit per-sample rows");
  eval_cmd->add_option("--out", eval_args.out, "EvalReport JSON");

  McNemarArgs mc;
  auto* mc_cmd = app.add_subcommand("mcnemar", "McNemar's test between two classifiers");
  mc_cmd->add_option("--cells", mc.cells, "both_correct a_only b_only both_wrong")
      ->expected(4);
  mc_cmd->add_option("--a", mc.predictions_a, "Predictions of classifier A");
  mc_cmd->add_option("--b", mc.predictions_b, "Predictions of classifier B");
  mc_cmd->add_option("--truth", mc.truth, "Sample set with true classes");
  mc_cmd->add_option("--out", mc.out, "Result JSON");

  fs::path config_out;
  auto* config_cmd = app.add_subcommand("config", "Configuration helpers");
  config_cmd->require_subcommand(1);
  auto* init_cmd = config_cmd->add_subcommand("init", "Emit the default TrainConfig");
  init_cmd->add_option("--out", config_out, "Write to this file instead of stdout");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidationError;
  }

  try {
    if (*split_cmd) return cmd_split(split, err);
    if (*assemble_cmd) return cmd_assemble(assemble, err);
    if (*train_cmd) {
      if (*seed_opt) train_args.seed = train_seed;
      return cmd_train(train_args, err);
    }
    if (*predict_cmd) return cmd_predict(predict_args, err);
    if (*eval_cmd) {
      eval_args.per_sample = !no_per_sample;
      if (eval_args.predictions.empty() &&
          (eval_args.model.empty() || eval_args.in.acoustic.empty() ||
           eval_args.in.semantic.empty() || eval_args.in.plan.empty())) {
        throw ValidationError(
            "evaluate needs --model, --acoustic, --semantic and --plan "
            "(or --predictions)");
      }
      return cmd_evaluate(eval_args, out);
    }
    if (*mc_cmd) return cmd_mcnemar(mc, out);
    if (*init_cmd) return cmd_config_init(config_out, out);
  } catch (const ValidationError& e) {
    log_line(err, {{"event", "error"}, {"kind", "validation"}, {"message", e.what()}});
    return kValidationError;
  } catch (const IoError& e) {
    log_line(err, {{"event", "error"}, {"kind", "io"}, {"message", e.what()}});
    return kIoError;
  }
  return kValidationError;
}

}  // namespace warpzsl::cli
