#pragma once

// Bilinear compatibility F(x, z) = theta(x)^T W phi(z) and the argmax
// classifier over a candidate class set.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "warpzsl/corpus.hpp"

namespace warpzsl {

struct ScoredClass {
  std::string class_id;
  double score;
};

/// Sorted by score descending; equal scores keep semantic-table order.
using ScoredClassList = std::vector<ScoredClass>;

/// Candidate classes resolved against a semantic table. `ids` and the rows of
/// `embeddings` follow semantic-table order, which is the tie-break order.
struct CandidateSet {
  std::vector<std::string> ids;
  std::vector<std::size_t> table_rows;
  Eigen::MatrixXd embeddings;  // |ids| x d_s

  std::size_t size() const noexcept { return ids.size(); }
  /// Position of `class_id` within `ids`, or -1.
  std::ptrdiff_t position(const std::string& class_id) const;

  /// Duplicates are dropped; unknown ids throw ValidationError.
  static CandidateSet resolve(const EmbeddingTable& semantic,
                              std::span<const std::string> class_ids);
};

/// W^T theta.
Eigen::VectorXd project(const CompatibilityModel& model,
                        std::span<const double> acoustic);

/// theta^T W phi.
double compatibility(const CompatibilityModel& model,
                     std::span<const double> acoustic,
                     std::span<const double> semantic);

/// Raw scores, one per candidate in candidate order.
Eigen::VectorXd candidate_scores(const CompatibilityModel& model,
                                 std::span<const double> acoustic,
                                 const CandidateSet& candidates);

/// Stable descending order of `scores` (indices into the candidate set).
std::vector<std::size_t> ranking_order(const Eigen::VectorXd& scores);

ScoredClassList score_classes(const CompatibilityModel& model,
                              std::span<const double> acoustic,
                              const CandidateSet& candidates);
ScoredClassList score_classes(const CompatibilityModel& model,
                              std::span<const double> acoustic,
                              const EmbeddingTable& semantic,
                              std::span<const std::string> candidates);

std::string classify(const CompatibilityModel& model,
                     std::span<const double> acoustic,
                     const CandidateSet& candidates);
std::string classify(const CompatibilityModel& model,
                     std::span<const double> acoustic,
                     const EmbeddingTable& semantic,
                     std::span<const std::string> candidates);

}  // namespace warpzsl
