#pragma once

// In-memory data model and text file formats shared by every other module.
//
// File formats:
//   embedding table   `#dim=<n>` header, optional `#kind=acoustic|semantic`,
//                     then `<id>\t<v1>\t...\t<vn>` rows
//   class catalog     JSON Lines: {"class_id", "label", ["description"]}
//   sample set        `<sample_id>\t<class_id>` rows, optional `#binding=<name>`
//   fold plan         {"folds": {name: [class_id...]}, "roles": {role: [name...]}}
//   model             JSON header line, then acoustic_dim rows of
//                     semantic_dim tab-separated values (row-major W)

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace warpzsl {

enum class EmbeddingKind { acoustic, semantic };

std::string_view to_string(EmbeddingKind kind);

/// Ordered id -> vector map with a fixed dimensionality. Insertion order is
/// preserved and is the iteration order everywhere (ties, training order).
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim,
                          EmbeddingKind kind = EmbeddingKind::semantic);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  EmbeddingKind kind() const noexcept { return kind_; }

  /// Appends an entry. Throws ValidationError on a bad id, an arity
  /// mismatch, a non-finite component or a duplicate id.
  void add(std::string id, std::span<const double> values);

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(std::size_t index) const { return ids_.at(index); }
  std::span<const double> row(std::size_t index) const;
  std::optional<std::size_t> find(const std::string& id) const;
  bool contains(const std::string& id) const { return find(id).has_value(); }
  /// Vector for `id`; throws ValidationError if absent.
  std::span<const double> at(const std::string& id) const;

  friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
    return a.dim_ == b.dim_ && a.kind_ == b.kind_ && a.ids_ == b.ids_ &&
           a.values_ == b.values_;
  }

 private:
  std::size_t dim_;
  EmbeddingKind kind_;
  std::vector<std::string> ids_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct ClassRecord {
  std::string class_id;
  std::string label;
  std::optional<std::string> description;

  friend bool operator==(const ClassRecord&, const ClassRecord&) = default;
};

class ClassCatalog {
 public:
  void add(ClassRecord record);

  const std::vector<ClassRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  const ClassRecord* find(const std::string& class_id) const;
  std::vector<std::string> class_ids() const;

  friend bool operator==(const ClassCatalog& a, const ClassCatalog& b) {
    return a.records_ == b.records_;
  }

 private:
  std::vector<ClassRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct SampleRecord {
  std::string sample_id;
  std::string class_id;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

/// Labeled instances; `binding` names the acoustic table keyed by sample_id.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(std::string binding) : binding_(std::move(binding)) {}

  void add(SampleRecord record);

  const std::vector<SampleRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const std::string& binding() const noexcept { return binding_; }
  void set_binding(std::string binding) { binding_ = std::move(binding); }
  const SampleRecord* find(const std::string& sample_id) const;

  /// Throws ValidationError naming the first sample whose class is not in
  /// the catalog.
  void check_classes(const ClassCatalog& catalog) const;

  friend bool operator==(const SampleSet& a, const SampleSet& b) {
    return a.binding_ == b.binding_ && a.records_ == b.records_;
  }

 private:
  std::string binding_;
  std::vector<SampleRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class Role { model_train, zsl_train, zsl_validation, zsl_test };

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view text);

struct Fold {
  std::string name;
  std::vector<std::string> classes;

  friend bool operator==(const Fold&, const Fold&) = default;
};

/// Named disjoint class folds plus role assignments.
class FoldPlan {
 public:
  void add_fold(Fold fold);
  void set_role(Role role, std::vector<std::string> fold_names);
  void clear_roles() { roles_.clear(); }

  /// Disjointness, known fold references and the train/test separation
  /// (no zsl-test fold may also serve zsl-train or zsl-validation).
  void validate(const std::string& source = {}) const;

  const std::vector<Fold>& folds() const noexcept { return folds_; }
  const Fold* find_fold(const std::string& name) const;
  /// Role assignments in Role enum order.
  const std::vector<std::pair<Role, std::vector<std::string>>>& roles()
      const noexcept {
    return roles_;
  }
  const std::vector<std::string>* role(Role role) const;
  /// Union of the classes of every fold assigned to `role`, in fold order.
  /// Throws ValidationError if the role is unassigned.
  std::vector<std::string> classes_for(Role role) const;
  std::vector<std::string> all_classes() const;

  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;

 private:
  std::vector<Fold> folds_;
  std::vector<std::pair<Role, std::vector<std::string>>> roles_;
};

/// The learned projection matrix W (acoustic_dim x semantic_dim).
struct CompatibilityModel {
  Eigen::MatrixXd weights;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::string notes;

  std::size_t acoustic_dim() const noexcept {
    return static_cast<std::size_t>(weights.rows());
  }
  std::size_t semantic_dim() const noexcept {
    return static_cast<std::size_t>(weights.cols());
  }
  void validate() const;

  friend bool operator==(const CompatibilityModel& a,
                         const CompatibilityModel& b) {
    return a.weights.rows() == b.weights.rows() &&
           a.weights.cols() == b.weights.cols() && a.weights == b.weights &&
           a.lambda == b.lambda && a.seed == b.seed && a.notes == b.notes;
  }
};

/// A SampleSet joined with its acoustic vectors (row i of `features` belongs
/// to sample i).
struct LabeledData {
  std::vector<std::string> sample_ids;
  std::vector<std::string> class_ids;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      features;

  std::size_t size() const noexcept { return sample_ids.size(); }
  std::size_t dim() const noexcept {
    return static_cast<std::size_t>(features.cols());
  }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * dim(), dim()};
  }

  /// Throws ValidationError for any sample missing from `acoustic`.
  static LabeledData resolve(const SampleSet& samples,
                             const EmbeddingTable& acoustic);
  /// Keeps only samples whose class is in `classes`, order preserved.
  LabeledData restricted_to(const std::vector<std::string>& classes) const;
};

// Number formatting shared by every writer: shortest decimal that parses
// back to the same double.
std::string format_double(double value);
/// Parses a decimal or scientific literal (optional leading sign). Returns
/// nullopt on anything else, including inf/nan spellings.
std::optional<double> parse_double(std::string_view token);

EmbeddingTable read_embedding_table(std::istream& in,
                                    const std::string& source = "<stream>");
EmbeddingTable read_embedding_table(const std::filesystem::path& path);
void write_embedding_table(const EmbeddingTable& table, std::ostream& out);
void write_embedding_table(const EmbeddingTable& table,
                           const std::filesystem::path& path);

ClassCatalog read_class_catalog(std::istream& in,
                                const std::string& source = "<stream>");
ClassCatalog read_class_catalog(const std::filesystem::path& path);
void write_class_catalog(const ClassCatalog& catalog, std::ostream& out);
void write_class_catalog(const ClassCatalog& catalog,
                         const std::filesystem::path& path);

SampleSet read_sample_set(std::istream& in,
                          const std::string& source = "<stream>");
SampleSet read_sample_set(const std::filesystem::path& path);
void write_sample_set(const SampleSet& samples, std::ostream& out);
void write_sample_set(const SampleSet& samples,
                      const std::filesystem::path& path);

FoldPlan read_fold_plan(std::istream& in,
                        const std::string& source = "<stream>");
FoldPlan read_fold_plan(const std::filesystem::path& path);
void write_fold_plan(const FoldPlan& plan, std::ostream& out);
void write_fold_plan(const FoldPlan& plan, const std::filesystem::path& path);

CompatibilityModel read_model(std::istream& in,
                              const std::string& source = "<stream>");
CompatibilityModel read_model(const std::filesystem::path& path);
void write_model(const CompatibilityModel& model, std::ostream& out);
void write_model(const CompatibilityModel& model,
                 const std::filesystem::path& path);

/// Whole-file read; throws IoError.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace warpzsl
