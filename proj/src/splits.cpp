#include "warpzsl/splits.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "warpzsl/error.hpp"
#include "warpzsl/rng.hpp"

namespace warpzsl {

namespace {

std::string fold_name(std::size_t i) { return "Fold" + std::to_string(i); }

// Keeps each fold's classes in catalog order so plans read naturally.
void sort_by_catalog(std::vector<std::string>& classes,
                     const std::unordered_map<std::string, std::size_t>& order) {
  std::sort(classes.begin(), classes.end(),
            [&](const std::string& a, const std::string& b) {
              return order.at(a) < order.at(b);
            });
}

std::unordered_map<std::string, std::size_t> catalog_order(const ClassCatalog& catalog) {
  std::unordered_map<std::string, std::size_t> order;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    order.emplace(catalog.records()[i].class_id, i);
  }
  return order;
}

}  // namespace

BinSpec BinSpec::defaults() {
  return {{50, 75, 110, 170, 250, 380, 560, 850, 1280, 1501}};
}

void BinSpec::validate() const {
  if (edges.empty()) throw ValidationError("bin edges are empty");
  if (edges.front() < 1) throw ValidationError("lowest bin edge must be at least 1");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] <= edges[i - 1]) {
      throw ValidationError("bin edges must be strictly increasing");
    }
  }
}

std::size_t BinSpec::bin_of(std::size_t count) const {
  if (edges.size() < 2) return 0;
  const auto it = std::upper_bound(edges.begin(), edges.end(), count);
  if (it == edges.begin()) return 0;
  const auto index = static_cast<std::size_t>(it - edges.begin()) - 1;
  return std::min(index, bin_count() - 1);
}

BinSpec parse_bin_spec(std::string_view json_text, const std::string& source) {
  BinSpec spec;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    if (!doc.is_array()) throw ValidationError("bin spec must be a JSON array");
    for (const auto& edge : doc) {
      if (!edge.is_number_unsigned()) {
        throw ValidationError("bin edges must be positive integers");
      }
      spec.edges.push_back(edge.get<std::size_t>());
    }
    spec.validate();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed bin spec: ") + e.what(), source);
  } catch (const ValidationError& e) {
    throw ValidationError(e.rule(), source);
  }
  return spec;
}

FoldPlan category_folds(const ClassCatalog& catalog,
                        const std::map<std::string, std::string>& category_map) {
  std::vector<Fold> folds;
  for (const auto& record : catalog.records()) {
    const auto it = category_map.find(record.class_id);
    if (it == category_map.end()) {
      throw ValidationError("class '" + record.class_id + "' has no category");
    }
    auto fold = std::find_if(folds.begin(), folds.end(),
                             [&](const Fold& f) { return f.name == it->second; });
    if (fold == folds.end()) {
      folds.push_back({it->second, {}});
      fold = std::prev(folds.end());
    }
    fold->classes.push_back(record.class_id);
  }
  FoldPlan plan;
  for (auto& f : folds) plan.add_fold(std::move(f));
  plan.validate();
  return plan;
}

FoldPlan random_folds(const ClassCatalog& catalog, std::size_t k,
                      std::uint64_t seed) {
  if (k == 0) throw ValidationError("fold count must be positive");
  if (k > catalog.size()) {
    throw ValidationError("fold count " + std::to_string(k) + " exceeds class count " +
                          std::to_string(catalog.size()));
  }
  auto ids = catalog.class_ids();
  Rng rng(seed);
  rng.shuffle(ids);
  std::vector<std::vector<std::string>> groups(k);
  for (std::size_t i = 0; i < ids.size(); ++i) groups[i % k].push_back(ids[i]);

  const auto order = catalog_order(catalog);
  FoldPlan plan;
  for (std::size_t i = 0; i < k; ++i) {
    sort_by_catalog(groups[i], order);
    plan.add_fold({fold_name(i), std::move(groups[i])});
  }
  return plan;
}

SampleSet undersample(const SampleSet& samples, std::size_t cap,
                      std::size_t threshold, std::uint64_t seed) {
  if (cap == 0) throw ValidationError("undersampling cap must be positive");
  // Sample indices per class, classes in order of first appearance.
  std::vector<std::string> class_order;
  std::unordered_map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& c = samples.records()[i].class_id;
    auto [it, inserted] = members.try_emplace(c);
    if (inserted) class_order.push_back(c);
    it->second.push_back(i);
  }
  std::vector<bool> keep(samples.size(), true);
  Rng rng(seed);
  for (const auto& c : class_order) {
    auto& indices = members[c];
    if (indices.size() <= threshold || indices.size() <= cap) continue;
    rng.shuffle(indices);
    for (std::size_t j = cap; j < indices.size(); ++j) keep[indices[j]] = false;
  }
  SampleSet out(samples.binding());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (keep[i]) out.add(samples.records()[i]);
  }
  return out;
}

FoldPlan bin_stratified_folds(const SampleSet& samples,
                              const ClassCatalog& catalog, const BinSpec& bins,
                              std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("bin-stratified splitting needs k >= 2");
  bins.validate();
  samples.check_classes(catalog);

  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& r : samples.records()) ++counts[r.class_id];

  std::vector<std::vector<std::string>> by_bin(bins.bin_count());
  for (const auto& record : catalog.records()) {
    const auto it = counts.find(record.class_id);
    if (it == counts.end()) {
      throw ValidationError("class '" + record.class_id + "' has no samples");
    }
    by_bin[bins.bin_of(it->second)].push_back(record.class_id);
  }

  Rng rng(seed);
  std::vector<std::vector<std::string>> folds(k);
  for (auto& members : by_bin) {
    rng.shuffle(members);
    const std::size_t base = members.size() / k;
    const std::size_t extra = members.size() % k;

    // The `extra` larger groups go to the currently smallest folds; a seeded
    // permutation decides among folds of equal size.
    std::vector<std::size_t> fold_order(k);
    std::iota(fold_order.begin(), fold_order.end(), std::size_t{0});
    rng.shuffle(fold_order);
    std::stable_sort(fold_order.begin(), fold_order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return folds[a].size() < folds[b].size();
                     });

    std::size_t next = 0;
    for (std::size_t g = 0; g < k; ++g) {
      const std::size_t size = base + (g < extra ? 1 : 0);
      auto& fold = folds[fold_order[g]];
      fold.insert(fold.end(), members.begin() + static_cast<std::ptrdiff_t>(next),
                  members.begin() + static_cast<std::ptrdiff_t>(next + size));
      next += size;
    }
  }

  const auto order = catalog_order(catalog);
  FoldPlan plan;
  for (std::size_t i = 0; i < k; ++i) {
    sort_by_catalog(folds[i], order);
    plan.add_fold({fold_name(i), std::move(folds[i])});
  }
  plan.validate();
  return plan;
}

FoldPlan make_data_setting(FoldPlan plan, DataSetting setting) {
  for (std::size_t i = 0; i < 5; ++i) {
    if (!plan.find_fold(fold_name(i))) {
      throw ValidationError("data settings need fold '" + fold_name(i) + "'");
    }
  }
  plan.clear_roles();
  if (setting == DataSetting::S1) {
    plan.set_role(Role::model_train, {"Fold0", "Fold1"});
  } else {
    plan.set_role(Role::model_train, {"Fold2", "Fold3"});
  }
  plan.set_role(Role::zsl_train, {"Fold2"});
  plan.set_role(Role::zsl_validation, {"Fold3"});
  plan.set_role(Role::zsl_test, {"Fold4"});
  plan.validate();
  return plan;
}

}  // namespace warpzsl
