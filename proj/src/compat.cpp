#include "warpzsl/compat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "warpzsl/error.hpp"

namespace warpzsl {

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

void check_acoustic(const CompatibilityModel& model,
                    std::span<const double> acoustic) {
  if (acoustic.size() != model.acoustic_dim()) {
    throw ValidationError("acoustic vector has " + std::to_string(acoustic.size()) +
                          " components, model expects " +
                          std::to_string(model.acoustic_dim()));
  }
  if (!as_vector(acoustic).allFinite()) {
    throw ValidationError("acoustic vector is not finite");
  }
}

}  // namespace

std::ptrdiff_t CandidateSet::position(const std::string& class_id) const {
  const auto it = std::find(ids.begin(), ids.end(), class_id);
  return it == ids.end() ? -1 : it - ids.begin();
}

CandidateSet CandidateSet::resolve(const EmbeddingTable& semantic,
                                   std::span<const std::string> class_ids) {
  std::vector<std::size_t> rows;
  rows.reserve(class_ids.size());
  for (const auto& id : class_ids) {
    const auto row = semantic.find(id);
    if (!row) throw ValidationError("unknown candidate class '" + id + "'");
    rows.push_back(*row);
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

  CandidateSet set;
  set.table_rows = rows;
  set.embeddings.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(semantic.dim()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    set.ids.push_back(semantic.id(rows[i]));
    set.embeddings.row(static_cast<Eigen::Index>(i)) =
        as_vector(semantic.row(rows[i])).transpose();
  }
  return set;
}

Eigen::VectorXd project(const CompatibilityModel& model,
                        std::span<const double> acoustic) {
  check_acoustic(model, acoustic);
  return model.weights.transpose() * as_vector(acoustic);
}

double compatibility(const CompatibilityModel& model,
                     std::span<const double> acoustic,
                     std::span<const double> semantic) {
  check_acoustic(model, acoustic);
  if (semantic.size() != model.semantic_dim()) {
    throw ValidationError("semantic vector has " + std::to_string(semantic.size()) +
                          " components, model expects " +
                          std::to_string(model.semantic_dim()));
  }
  return as_vector(acoustic).dot(model.weights * as_vector(semantic));
}

Eigen::VectorXd candidate_scores(const CompatibilityModel& model,
                                 std::span<const double> acoustic,
                                 const CandidateSet& candidates) {
  if (static_cast<std::size_t>(candidates.embeddings.cols()) != model.semantic_dim()) {
    throw ValidationError("candidate embeddings have dimensionality " +
                          std::to_string(candidates.embeddings.cols()) +
                          ", model expects " + std::to_string(model.semantic_dim()));
  }
  return candidates.embeddings * project(model, acoustic);
}

std::vector<std::size_t> ranking_order(const Eigen::VectorXd& scores) {
  std::vector<std::size_t> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[static_cast<Eigen::Index>(a)] > scores[static_cast<Eigen::Index>(b)];
  });
  return order;
}

ScoredClassList score_classes(const CompatibilityModel& model,
                              std::span<const double> acoustic,
                              const CandidateSet& candidates) {
  if (candidates.size() == 0) throw ValidationError("candidate set is empty");
  const Eigen::VectorXd scores = candidate_scores(model, acoustic, candidates);
  ScoredClassList list;
  list.reserve(candidates.size());
  for (std::size_t i : ranking_order(scores)) {
    list.push_back({candidates.ids[i], scores[static_cast<Eigen::Index>(i)]});
  }
  return list;
}

ScoredClassList score_classes(const CompatibilityModel& model,
                              std::span<const double> acoustic,
                              const EmbeddingTable& semantic,
                              std::span<const std::string> candidates) {
  return score_classes(model, acoustic, CandidateSet::resolve(semantic, candidates));
}

std::string classify(const CompatibilityModel& model,
                     std::span<const double> acoustic,
                     const CandidateSet& candidates) {
  if (candidates.size() == 0) throw ValidationError("candidate set is empty");
  const Eigen::VectorXd scores = candidate_scores(model, acoustic, candidates);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return candidates.ids[static_cast<std::size_t>(best)];
}

std::string classify(const CompatibilityModel& model,
                     std::span<const double> acoustic,
                     const EmbeddingTable& semantic,
                     std::span<const std::string> candidates) {
  return classify(model, acoustic, CandidateSet::resolve(semantic, candidates));
}

}  // namespace warpzsl
