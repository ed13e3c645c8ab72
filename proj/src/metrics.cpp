#include "warpzsl/metrics.hpp"

#include <cmath>

#include <json.hpp>

#include "warpzsl/error.hpp"

namespace warpzsl {

double top1(std::span<const std::string> predictions,
            std::span<const std::string> truths) {
  if (predictions.size() != truths.size()) {
    throw ValidationError("prediction and truth lists differ in length (" +
                          std::to_string(predictions.size()) + " vs " +
                          std::to_string(truths.size()) + ")");
  }
  if (truths.empty()) throw ValidationError("top1 of an empty list");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (predictions[i] == truths[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(truths.size());
}

namespace {

std::size_t position_of(const ScoredClassList& ranked, const std::string& truth) {
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i].class_id == truth) return i + 1;
  }
  throw ValidationError("true class '" + truth + "' is not in the ranked list");
}

}  // namespace

double average_precision(const ScoredClassList& ranked, const std::string& truth) {
  return 1.0 / static_cast<double>(position_of(ranked, truth));
}

EvalReport evaluate(const CompatibilityModel& model, const LabeledData& test_set,
                    const EmbeddingTable& semantic,
                    std::span<const std::string> candidates) {
  if (test_set.size() == 0) throw ValidationError("empty test set");
  const auto candidate_set = CandidateSet::resolve(semantic, candidates);
  EvalReport report;
  report.n_samples = test_set.size();
  std::size_t correct = 0;
  double ap_sum = 0.0;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    const auto& truth = test_set.class_ids[i];
    if (candidate_set.position(truth) < 0) {
      throw ValidationError("sample '" + test_set.sample_ids[i] + "' has class '" +
                            truth + "' outside the candidate set");
    }
    const auto ranked = score_classes(model, test_set.row(i), candidate_set);
    const std::size_t rank = position_of(ranked, truth);
    const double ap = 1.0 / static_cast<double>(rank);
    if (ranked.front().class_id == truth) ++correct;
    ap_sum += ap;
    report.per_sample.push_back(
        {test_set.sample_ids[i], truth, ranked.front().class_id, rank, ap});
  }
  report.top1 = static_cast<double>(correct) / static_cast<double>(report.n_samples);
  report.map = ap_sum / static_cast<double>(report.n_samples);
  return report;
}

std::string to_json(const EvalReport& report, bool include_per_sample) {
  nlohmann::ordered_json doc;
  doc["n_samples"] = report.n_samples;
  doc["top1"] = report.top1;
  doc["map"] = report.map;
  if (include_per_sample) {
    auto& rows = doc["per_sample"] = nlohmann::ordered_json::array();
    for (const auto& s : report.per_sample) {
      rows.push_back({{"sample_id", s.sample_id},
                      {"truth", s.truth},
                      {"predicted", s.predicted},
                      {"true_rank", s.true_rank},
                      {"average_precision", s.average_precision}});
    }
  }
  return doc.dump(2);
}

Baseline random_baseline(std::size_t k) {
  if (k == 0) throw ValidationError("random baseline needs at least one class");
  double harmonic = 0.0;
  for (std::size_t i = 1; i <= k; ++i) harmonic += 1.0 / static_cast<double>(i);
  const double kd = static_cast<double>(k);
  return {harmonic / kd, 1.0 / kd};
}

ContingencyTable build_contingency(std::span<const std::string> predictions_a,
                                   std::span<const std::string> predictions_b,
                                   std::span<const std::string> truths) {
  if (predictions_a.size() != truths.size() || predictions_b.size() != truths.size()) {
    throw ValidationError("prediction lists and truths differ in length");
  }
  ContingencyTable table;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const bool a = predictions_a[i] == truths[i];
    const bool b = predictions_b[i] == truths[i];
    if (a && b) {
      ++table.both_correct;
    } else if (a) {
      ++table.a_only;
    } else if (b) {
      ++table.b_only;
    } else {
      ++table.both_wrong;
    }
  }
  return table;
}

double chi_squared_1dof_upper_tail(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

McNemarResult mcnemar(const ContingencyTable& table) {
  const std::uint64_t discordant = table.a_only + table.b_only;
  if (discordant == 0) {
    throw ValidationError("McNemar's test is undefined without discordant pairs");
  }
  const double difference =
      std::abs(static_cast<double>(table.a_only) - static_cast<double>(table.b_only));
  const double corrected = std::max(difference - 1.0, 0.0);
  const double statistic = corrected * corrected / static_cast<double>(discordant);
  return {statistic, chi_squared_1dof_upper_tail(statistic)};
}

}  // namespace warpzsl
