#pragma once

// Class-fold partitions: category folds, random folds, sample-count-bin
// stratified folds, and undersampling of over-populated classes.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "warpzsl/corpus.hpp"

namespace warpzsl {

/// Sample-count bins given by strictly increasing edges; bin i covers
/// [edges[i], edges[i+1]). Counts below the first edge fall into the first
/// bin, counts at or above the last edge into the last.
struct BinSpec {
  std::vector<std::size_t> edges;

  static BinSpec defaults();
  void validate() const;
  std::size_t bin_count() const noexcept {
    return edges.size() < 2 ? 1 : edges.size() - 1;
  }
  std::size_t bin_of(std::size_t count) const;
};

BinSpec parse_bin_spec(std::string_view json_text,
                       const std::string& source = "<bins>");

/// One fold per category, in order of first appearance in the catalog.
FoldPlan category_folds(const ClassCatalog& catalog,
                        const std::map<std::string, std::string>& category_map);

/// Seeded shuffle, then round-robin into folds Fold0..Fold{k-1}.
FoldPlan random_folds(const ClassCatalog& catalog, std::size_t k,
                      std::uint64_t seed);

/// Classes with more than `threshold` samples keep a seeded uniform subset of
/// min(count, cap) samples; surviving samples keep their relative order.
SampleSet undersample(const SampleSet& samples, std::size_t cap,
                      std::size_t threshold, std::uint64_t seed);

/// Bins classes by sample count, splits each bin into k near-equal groups and
/// merges one group per bin into each fold Fold0..Fold{k-1}.
FoldPlan bin_stratified_folds(const SampleSet& samples,
                              const ClassCatalog& catalog, const BinSpec& bins,
                              std::size_t k, std::uint64_t seed);

enum class DataSetting { S1, S2 };

/// Assigns model-train / zsl-train / zsl-validation / zsl-test roles over
/// folds Fold0..Fold4.
FoldPlan make_data_setting(FoldPlan plan, DataSetting setting);

}  // namespace warpzsl
