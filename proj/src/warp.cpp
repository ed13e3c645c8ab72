#include "warpzsl/warp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "warpzsl/error.hpp"

namespace warpzsl {

namespace {

using ordered_json = nlohmann::ordered_json;

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

// Positive-hinge classes of one sample and the weight applied to their sum.
struct PairTerms {
  std::size_t rank = 0;
  double weight = 0.0;
  std::vector<std::size_t> positive;  // candidate positions, ascending
  double hinge_sum = 0.0;
};

PairTerms exact_terms(const Eigen::VectorXd& scores, std::size_t truth,
                      bool margin_rank) {
  PairTerms terms;
  const double true_score = scores[static_cast<Eigen::Index>(truth)];
  std::size_t above = 0;
  for (std::size_t y = 0; y < static_cast<std::size_t>(scores.size()); ++y) {
    if (y == truth) continue;
    const double s = scores[static_cast<Eigen::Index>(y)];
    const double h = 1.0 + s - true_score;
    if (h > 0.0) {
      terms.positive.push_back(y);
      terms.hinge_sum += h;
    }
    if (s > true_score) ++above;
  }
  terms.rank = margin_rank ? terms.positive.size() : above;
  terms.weight = terms.rank == 0 ? 0.0 : beta(terms.rank) / static_cast<double>(terms.rank);
  return terms;
}

// Draw other classes uniformly without replacement until one violates the
// margin or the cap is reached.
PairTerms sampled_terms(const Eigen::VectorXd& scores, std::size_t truth,
                        std::size_t cap, Rng& rng) {
  PairTerms terms;
  std::vector<std::size_t> pool;
  for (std::size_t y = 0; y < static_cast<std::size_t>(scores.size()); ++y) {
    if (y != truth) pool.push_back(y);
  }
  const double true_score = scores[static_cast<Eigen::Index>(truth)];
  const std::size_t others = pool.size();
  const std::size_t limit = std::min(cap, others);
  for (std::size_t draws = 1; draws <= limit; ++draws) {
    const auto pick = draws - 1 + static_cast<std::size_t>(rng.below(others - draws + 1));
    std::swap(pool[draws - 1], pool[pick]);
    const std::size_t y = pool[draws - 1];
    const double h = 1.0 + scores[static_cast<Eigen::Index>(y)] - true_score;
    if (h > 0.0) {
      terms.rank = others / draws;
      terms.positive.push_back(y);
      terms.hinge_sum = h;
      // One violator stands in for all r of them.
      terms.weight = beta(terms.rank);
      return terms;
    }
  }
  return terms;
}

PairTerms pair_terms(const Eigen::VectorXd& scores, std::size_t truth,
                     const RankOptions& options, Rng* rng) {
  if (options.mode == RankMode::sampled) {
    if (!rng) throw ValidationError("sampled rank mode needs a random generator");
    return sampled_terms(scores, truth, options.sample_cap, *rng);
  }
  return exact_terms(scores, truth, options.margin_rank);
}

std::size_t truth_position(const CandidateSet& classes, const std::string& class_id) {
  const auto pos = classes.position(class_id);
  if (pos < 0) {
    throw ValidationError("class '" + class_id + "' is not among the training classes");
  }
  return static_cast<std::size_t>(pos);
}

// Adds weight * x (sum_{y in positive} phi_y - |positive| phi_truth)^T to grad.
void add_pair_gradient(Eigen::MatrixXd& grad, const PairTerms& terms,
                       std::span<const double> acoustic, const CandidateSet& classes,
                       std::size_t truth) {
  if (terms.positive.empty() || terms.weight == 0.0) return;
  Eigen::VectorXd direction = Eigen::VectorXd::Zero(classes.embeddings.cols());
  for (std::size_t y : terms.positive) {
    direction += classes.embeddings.row(static_cast<Eigen::Index>(y)).transpose();
  }
  direction -= static_cast<double>(terms.positive.size()) *
               classes.embeddings.row(static_cast<Eigen::Index>(truth)).transpose();
  grad.noalias() += terms.weight * as_vector(acoustic) * direction.transpose();
}

void check_dims(const CompatibilityModel& model, const EmbeddingTable& semantic) {
  if (semantic.dim() != model.semantic_dim()) {
    throw ValidationError("semantic table has dimensionality " +
                          std::to_string(semantic.dim()) + ", model expects " +
                          std::to_string(model.semantic_dim()));
  }
}

double top1_on(const CompatibilityModel& model, const LabeledData& data,
               const CandidateSet& classes) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (classify(model, data.row(i), classes) == data.class_ids[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double exact_objective(const CompatibilityModel& model, const LabeledData& data,
                       const CandidateSet& classes,
                       const std::vector<std::size_t>& truths, double lambda,
                       bool margin_rank) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto scores = candidate_scores(model, data.row(i), classes);
    const auto terms = exact_terms(scores, truths[i], margin_rank);
    total += terms.weight * terms.hinge_sum;
  }
  return total / static_cast<double>(data.size()) +
         lambda * model.weights.squaredNorm();
}

std::vector<std::size_t> truth_positions(const LabeledData& data,
                                         const CandidateSet& classes) {
  std::vector<std::size_t> truths;
  truths.reserve(data.size());
  for (const auto& c : data.class_ids) truths.push_back(truth_position(classes, c));
  return truths;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void TrainConfig::validate() const {
  if (lambda_grid.empty()) throw ValidationError("lambda_grid is empty");
  for (double l : lambda_grid) {
    if (!std::isfinite(l) || l < 0.0) {
      throw ValidationError("lambda_grid entries must be finite and nonnegative");
    }
  }
  if (!std::isfinite(learning_rate) || learning_rate <= 0.0) {
    throw ValidationError("learning_rate must be positive");
  }
  if (epochs <= 0) throw ValidationError("epochs must be positive");
  if (sample_cap == 0) throw ValidationError("sample_cap must be positive");
  if (!std::isfinite(init_scale) || init_scale < 0.0) {
    throw ValidationError("init_scale must be nonnegative");
  }
  if (early_stop_patience <= 0) {
    throw ValidationError("early_stop_patience must be positive");
  }
}

std::string train_config_to_json(const TrainConfig& config) {
  ordered_json doc;
  doc["lambda_grid"] = config.lambda_grid;
  doc["learning_rate"] = config.learning_rate;
  doc["epochs"] = config.epochs;
  doc["seed"] = config.seed;
  doc["rank_mode"] = config.rank_mode == RankMode::exact ? "exact" : "sampled";
  doc["margin_rank"] = config.margin_rank;
  doc["sample_cap"] = config.sample_cap;
  doc["init_scale"] = config.init_scale;
  doc["early_stop_patience"] = config.early_stop_patience;
  return doc.dump(2);
}

TrainConfig parse_train_config(std::string_view json_text,
                               const std::string& source) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what(), source);
  }
  if (!doc.is_object()) throw ValidationError("config must be a JSON object", source);
  TrainConfig config;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "lambda_grid") {
        config.lambda_grid = value.get<std::vector<double>>();
      } else if (key == "learning_rate") {
        config.learning_rate = value.get<double>();
      } else if (key == "epochs") {
        config.epochs = value.get<int>();
      } else if (key == "seed") {
        if (!value.is_number_unsigned()) {
          throw ValidationError("'seed' must be a nonnegative integer");
        }
        config.seed = value.get<std::uint64_t>();
      } else if (key == "rank_mode") {
        const auto mode = value.get<std::string>();
        if (mode == "exact") {
          config.rank_mode = RankMode::exact;
        } else if (mode == "sampled") {
          config.rank_mode = RankMode::sampled;
        } else {
          throw ValidationError("rank_mode must be 'exact' or 'sampled'");
        }
      } else if (key == "margin_rank") {
        config.margin_rank = value.get<bool>();
      } else if (key == "sample_cap") {
        config.sample_cap = value.get<std::size_t>();
      } else if (key == "init_scale") {
        config.init_scale = value.get<double>();
      } else if (key == "early_stop_patience") {
        config.early_stop_patience = value.get<int>();
      } else {
        throw ValidationError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad config value: ") + e.what(), source);
  } catch (const ValidationError& e) {
    throw ValidationError(e.rule(), source);
  }
  try {
    config.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(e.rule(), source);
  }
  return config;
}

// ---------------------------------------------------------------------------
// Loss pieces

double beta(std::size_t rank) {
  double sum = 0.0;
  for (std::size_t i = 1; i <= rank; ++i) sum += 1.0 / static_cast<double>(i);
  return sum;
}

double hinge(const CompatibilityModel& model, std::span<const double> acoustic,
             const std::string& true_class, const std::string& other_class,
             const EmbeddingTable& semantic) {
  check_dims(model, semantic);
  const double margin = true_class == other_class ? 0.0 : 1.0;
  return margin + compatibility(model, acoustic, semantic.at(other_class)) -
         compatibility(model, acoustic, semantic.at(true_class));
}

RankResult rank_of(const CompatibilityModel& model,
                   std::span<const double> acoustic,
                   const std::string& true_class, const EmbeddingTable& semantic,
                   std::span<const std::string> train_classes,
                   const RankOptions& options, Rng& rng) {
  check_dims(model, semantic);
  const auto classes = CandidateSet::resolve(semantic, train_classes);
  const auto truth = truth_position(classes, true_class);
  const auto scores = candidate_scores(model, acoustic, classes);
  const auto terms = pair_terms(scores, truth, options, &rng);
  RankResult result;
  result.rank = terms.rank;
  for (std::size_t y : terms.positive) result.violators.push_back(classes.ids[y]);
  return result;
}

double objective(const CompatibilityModel& model, const LabeledData& data,
                 const EmbeddingTable& semantic,
                 std::span<const std::string> train_classes, double lambda,
                 bool margin_rank) {
  if (data.size() == 0) throw ValidationError("objective over an empty sample set");
  check_dims(model, semantic);
  const auto classes = CandidateSet::resolve(semantic, train_classes);
  return exact_objective(model, data, classes, truth_positions(data, classes),
                         lambda, margin_rank);
}

Eigen::MatrixXd subgradient(const CompatibilityModel& model,
                            std::span<const double> acoustic,
                            const std::string& true_class,
                            const EmbeddingTable& semantic,
                            std::span<const std::string> train_classes,
                            double lambda, bool margin_rank) {
  check_dims(model, semantic);
  const auto classes = CandidateSet::resolve(semantic, train_classes);
  const auto truth = truth_position(classes, true_class);
  const auto scores = candidate_scores(model, acoustic, classes);
  const auto terms = exact_terms(scores, truth, margin_rank);
  Eigen::MatrixXd grad = 2.0 * lambda * model.weights;
  add_pair_gradient(grad, terms, acoustic, classes, truth);
  return grad;
}

// ---------------------------------------------------------------------------
// Training

TrainResult train(const LabeledData& train_set, const LabeledData& validation_set,
                  const EmbeddingTable& semantic,
                  std::span<const std::string> train_classes,
                  std::span<const std::string> validation_classes,
                  const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  config.validate();
  if (train_set.size() == 0) throw ValidationError("no training samples");
  if (validation_set.size() == 0) throw ValidationError("no validation samples");
  if (validation_set.dim() != train_set.dim()) {
    throw ValidationError("training and validation acoustic dimensionality differ");
  }
  const auto classes = CandidateSet::resolve(semantic, train_classes);
  const auto validation_candidates =
      CandidateSet::resolve(semantic, validation_classes);
  const auto truths = truth_positions(train_set, classes);
  for (const auto& c : validation_set.class_ids) {
    if (validation_candidates.position(c) < 0) {
      throw ValidationError("validation sample class '" + c +
                            "' is not a validation class");
    }
  }

  const auto rows = static_cast<Eigen::Index>(train_set.dim());
  const auto cols = static_cast<Eigen::Index>(semantic.dim());
  const RankOptions rank_options = config.rank_options();

  TrainResult result;
  bool have_best = false;
  for (double lambda : config.lambda_grid) {
    Rng rng(config.seed);
    CompatibilityModel model;
    model.weights.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        model.weights(r, c) = config.init_scale == 0.0
                                  ? 0.0
                                  : rng.uniform(-config.init_scale, config.init_scale);
      }
    }
    model.lambda = lambda;
    model.seed = config.seed;

    Eigen::MatrixXd best_weights = model.weights;
    double best_top1 = -1.0;
    int best_epoch = 0;
    int last_improvement = 0;
    int epochs_run = 0;
    std::vector<std::size_t> order(train_set.size());
    Eigen::MatrixXd grad(rows, cols);

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      rng.shuffle(order);
      for (std::size_t i : order) {
        const auto x = train_set.row(i);
        const auto scores = candidate_scores(model, x, classes);
        const auto terms = pair_terms(scores, truths[i], rank_options, &rng);
        grad = 2.0 * lambda * model.weights;
        add_pair_gradient(grad, terms, x, classes, truths[i]);
        model.weights.noalias() -= config.learning_rate * grad;
      }
      if (!model.weights.allFinite()) {
        throw ValidationError("training diverged (non-finite weights) at lambda " +
                              format_double(lambda) + "; lower the learning rate");
      }
      epochs_run = epoch;
      const EpochRecord record{
          lambda, epoch,
          exact_objective(model, train_set, classes, truths, lambda,
                          config.margin_rank),
          top1_on(model, validation_set, validation_candidates)};
      result.epochs.push_back(record);
      if (on_epoch) on_epoch(record);
      // A plateau keeps the latest snapshot; patience counts from the last
      // strict improvement.
      if (record.validation_top1 >= best_top1) {
        if (record.validation_top1 > best_top1) last_improvement = epoch;
        best_top1 = record.validation_top1;
        best_weights = model.weights;
        best_epoch = epoch;
      }
      if (epoch - last_improvement >= config.early_stop_patience) break;
    }
    result.lambdas.push_back({lambda, best_epoch, epochs_run, best_top1});

    const bool better = !have_best || best_top1 > result.validation_top1 ||
                        (best_top1 == result.validation_top1 &&
                         lambda < result.model.lambda);
    if (better) {
      have_best = true;
      result.validation_top1 = best_top1;
      result.model.weights = best_weights;
      result.model.lambda = lambda;
      result.model.seed = config.seed;
      result.model.notes = "warp-sgd lambda=" + format_double(lambda) +
                           " best_epoch=" + std::to_string(best_epoch) +
                           " validation_top1=" + format_double(best_top1);
    }
  }
  return result;
}

}  // namespace warpzsl
