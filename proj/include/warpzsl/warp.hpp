#pragma once

// Weighted approximate-rank pairwise (WARP) objective for the bilinear model,
// its subgradient, and the SGD trainer with lambda selection.
//
// For a sample (x, y_n) over training classes Y:
//   hinge(y)  = [y != y_n] + F(x, y) - F(x, y_n)
//   rank r    = #{ y != y_n : hinge(y) > 0 }           (margin convention)
//   beta(r)   = 1 + 1/2 + ... + 1/r,  beta(0) = 0
//   loss      = beta(r)/r * sum_y max(0, hinge(y)),     0/0 := 0
//   objective = mean over samples of loss + lambda * ||W||_F^2

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "warpzsl/compat.hpp"
#include "warpzsl/corpus.hpp"
#include "warpzsl/rng.hpp"

namespace warpzsl {

enum class RankMode { exact, sampled };

struct RankOptions {
  RankMode mode = RankMode::exact;
  // Count classes with a positive hinge (true) or classes scored strictly
  // above the true class (false).
  bool margin_rank = true;
  std::size_t sample_cap = 100;
};

struct TrainConfig {
  std::vector<double> lambda_grid{0.0, 0.01, 1.0, 10.0};
  double learning_rate = 0.01;
  int epochs = 50;
  std::uint64_t seed = 0;
  RankMode rank_mode = RankMode::exact;
  bool margin_rank = true;
  std::size_t sample_cap = 100;
  double init_scale = 0.001;
  int early_stop_patience = 10;

  void validate() const;
  RankOptions rank_options() const { return {rank_mode, margin_rank, sample_cap}; }
};

/// JSON document with every field; parse accepts any subset and rejects
/// unknown keys.
std::string train_config_to_json(const TrainConfig& config);
TrainConfig parse_train_config(std::string_view json_text,
                               const std::string& source = "<config>");

struct RankResult {
  std::size_t rank = 0;
  std::vector<std::string> violators;
};

/// Harmonic partial sum H_rank.
double beta(std::size_t rank);

double hinge(const CompatibilityModel& model, std::span<const double> acoustic,
             const std::string& true_class, const std::string& other_class,
             const EmbeddingTable& semantic);

RankResult rank_of(const CompatibilityModel& model,
                   std::span<const double> acoustic,
                   const std::string& true_class, const EmbeddingTable& semantic,
                   std::span<const std::string> train_classes,
                   const RankOptions& options, Rng& rng);

/// Exact-rank objective over a labeled set.
double objective(const CompatibilityModel& model, const LabeledData& data,
                 const EmbeddingTable& semantic,
                 std::span<const std::string> train_classes, double lambda,
                 bool margin_rank = true);

/// Subgradient of the single-sample objective (loss + lambda ||W||^2) with
/// the beta(r)/r weight held constant.
Eigen::MatrixXd subgradient(const CompatibilityModel& model,
                            std::span<const double> acoustic,
                            const std::string& true_class,
                            const EmbeddingTable& semantic,
                            std::span<const std::string> train_classes,
                            double lambda, bool margin_rank = true);

struct EpochRecord {
  double lambda;
  int epoch;  // 1-based
  double train_objective;
  double validation_top1;
};

struct LambdaSummary {
  double lambda;
  int best_epoch;
  int epochs_run;
  double best_validation_top1;
};

struct TrainResult {
  CompatibilityModel model;
  double validation_top1 = 0.0;
  std::vector<EpochRecord> epochs;
  std::vector<LambdaSummary> lambdas;
};

/// Per-sample SGD for every lambda in the grid; returns the model with the
/// best validation Top-1 (ties: smaller lambda, then earlier grid entry).
/// Deterministic for a given config and input order.
TrainResult train(const LabeledData& train_set, const LabeledData& validation_set,
                  const EmbeddingTable& semantic,
                  std::span<const std::string> train_classes,
                  std::span<const std::string> validation_classes,
                  const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace warpzsl
