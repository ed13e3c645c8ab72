#pragma once

// Single-label evaluation: Top-1, per-sample average precision, McNemar's
// test between two classifiers, and random-guess baselines.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "warpzsl/compat.hpp"
#include "warpzsl/corpus.hpp"

namespace warpzsl {

double top1(std::span<const std::string> predictions,
            std::span<const std::string> truths);

/// 1 / (1-based position of `truth` in the ranked list).
double average_precision(const ScoredClassList& ranked, const std::string& truth);

struct SampleEvaluation {
  std::string sample_id;
  std::string truth;
  std::string predicted;
  std::size_t true_rank;  // 1-based
  double average_precision;
};

struct EvalReport {
  std::size_t n_samples = 0;
  double top1 = 0.0;
  double map = 0.0;
  std::vector<SampleEvaluation> per_sample;
};

EvalReport evaluate(const CompatibilityModel& model, const LabeledData& test_set,
                    const EmbeddingTable& semantic,
                    std::span<const std::string> candidates);

/// JSON object {n_samples, top1, map, per_sample?}.
std::string to_json(const EvalReport& report, bool include_per_sample = true);

struct Baseline {
  double map;
  double top1;
};

/// Expected mAP and Top-1 of a uniformly random ranking over k classes:
/// map = H_k / k, top1 = 1 / k.
Baseline random_baseline(std::size_t k);

struct ContingencyTable {
  std::uint64_t both_correct = 0;
  std::uint64_t a_only = 0;  // a correct, b wrong
  std::uint64_t b_only = 0;  // b correct, a wrong
  std::uint64_t both_wrong = 0;

  std::uint64_t total() const noexcept {
    return both_correct + a_only + b_only + both_wrong;
  }
  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;
};

ContingencyTable build_contingency(std::span<const std::string> predictions_a,
                                   std::span<const std::string> predictions_b,
                                   std::span<const std::string> truths);

struct McNemarResult {
  double statistic;
  double p_value;
};

/// Continuity-corrected statistic (max(|a_only - b_only| - 1, 0))^2 /
/// (a_only + b_only) with its chi-squared (1 dof) upper-tail p-value.
McNemarResult mcnemar(const ContingencyTable& table);

/// Upper tail of chi-squared with one degree of freedom: erfc(sqrt(x / 2)).
/// std::erfc is accurate to a few ulp, well beyond 6 significant digits for
/// x <= 200 (p >= ~1e-45, far above the double underflow range).
double chi_squared_1dof_upper_tail(double x);

}  // namespace warpzsl
