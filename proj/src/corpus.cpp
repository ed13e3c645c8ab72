#include "warpzsl/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "warpzsl/error.hpp"

namespace warpzsl {

namespace {

using ordered_json = nlohmann::ordered_json;

// Identifiers live in tab-separated files, so they must be nonempty, free of
// tabs and line breaks, and must not look like a metadata line.
void check_identifier(const std::string& id, std::string_view what,
                      const std::string& source = {}, std::size_t line = 0) {
  if (id.empty()) {
    throw ValidationError(std::string(what) + " is empty", source, line);
  }
  if (id.find_first_of("\t\n\r") != std::string::npos) {
    throw ValidationError(
        std::string(what) + " '" + id + "' contains a tab or line break",
        source, line);
  }
  if (id.front() == '#') {
    throw ValidationError(std::string(what) + " '" + id + "' starts with '#'",
                          source, line);
  }
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

// Line reader that strips a trailing '\r' and counts lines from 1.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  std::size_t number() const noexcept { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::optional<std::size_t> parse_positive(std::string_view text) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || value == 0) return std::nullopt;
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

// Serialize fully in memory, then write, so nothing partial reaches disk
// when serialization throws.
template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ostringstream buffer;
  writer(buffer);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const std::string text = buffer.str();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_row(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << '\t';
    out << format_double(values[i]);
  }
}

ordered_json parse_json_line(const std::string& text, const std::string& source,
                             std::size_t line) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what(), source,
                          line);
  }
}

std::string required_string(const ordered_json& object, const char* key,
                            const std::string& source, std::size_t line) {
  const auto it = object.find(key);
  if (it == object.end()) {
    throw ValidationError(std::string("missing required field '") + key + "'",
                          source, line);
  }
  if (!it->is_string()) {
    throw ValidationError(std::string("field '") + key + "' is not a string",
                          source, line);
  }
  return it->get<std::string>();
}

}  // namespace

std::string_view to_string(EmbeddingKind kind) {
  return kind == EmbeddingKind::acoustic ? "acoustic" : "semantic";
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

std::optional<double> parse_double(std::string_view token) {
  if (!token.empty() && token.front() == '+') {
    token.remove_prefix(1);
    if (!token.empty() && (token.front() == '-' || token.front() == '+')) {
      return std::nullopt;
    }
  }
  if (token.empty()) return std::nullopt;
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] =
      std::from_chars(token.data(), end, value, std::chars_format::general);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// ---------------------------------------------------------------------------
// EmbeddingTable

EmbeddingTable::EmbeddingTable(std::size_t dim, EmbeddingKind kind)
    : dim_(dim), kind_(kind) {
  if (dim == 0) throw ValidationError("embedding dimensionality must be positive");
}

void EmbeddingTable::add(std::string id, std::span<const double> values) {
  check_identifier(id, "embedding id");
  if (values.size() != dim_) {
    throw ValidationError("arity mismatch for '" + id + "': expected " +
                          std::to_string(dim_) + " values, found " +
                          std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw ValidationError("non-finite component in '" + id + "'");
    }
  }
  if (index_.contains(id)) {
    throw ValidationError("duplicate embedding id '" + id + "'");
  }
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  values_.insert(values_.end(), values.begin(), values.end());
}

std::span<const double> EmbeddingTable::row(std::size_t index) const {
  if (index >= ids_.size()) throw std::out_of_range("embedding row index");
  return {values_.data() + index * dim_, dim_};
}

std::optional<std::size_t> EmbeddingTable::find(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> EmbeddingTable::at(const std::string& id) const {
  const auto index = find(id);
  if (!index) throw ValidationError("unknown embedding id '" + id + "'");
  return row(*index);
}

EmbeddingTable read_embedding_table(std::istream& in,
                                    const std::string& source) {
  LineReader reader(in);
  std::string line;
  std::optional<EmbeddingTable> table;
  std::vector<double> values;
  while (reader.next(line)) {
    if (is_blank(line)) continue;
    if (!table) {
      constexpr std::string_view prefix = "#dim=";
      if (!line.starts_with(prefix)) {
        throw ValidationError("first non-blank line must be '#dim=<n>'", source,
                              reader.number());
      }
      const auto dim = parse_positive(std::string_view(line).substr(prefix.size()));
      if (!dim) {
        throw ValidationError("malformed header '" + line + "'", source,
                              reader.number());
      }
      table.emplace(*dim);
      continue;
    }
    if (line.front() == '#') {
      constexpr std::string_view kind_prefix = "#kind=";
      if (line.starts_with(kind_prefix)) {
        const auto kind = std::string_view(line).substr(kind_prefix.size());
        if (!table->empty()) {
          throw ValidationError("'#kind=' must precede the data rows", source,
                                reader.number());
        }
        if (kind == "acoustic") {
          *table = EmbeddingTable(table->dim(), EmbeddingKind::acoustic);
        } else if (kind != "semantic") {
          throw ValidationError("unknown embedding kind '" + std::string(kind) + "'",
                                source, reader.number());
        }
      }
      continue;
    }
    const auto fields = split_tabs(line);
    if (fields.size() - 1 != table->dim()) {
      throw ValidationError("arity mismatch: expected " +
                                std::to_string(table->dim()) + " values, found " +
                                std::to_string(fields.size() - 1),
                            source, reader.number());
    }
    values.clear();
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto value = parse_double(fields[i]);
      if (!value) {
        throw ValidationError("non-finite or malformed number '" +
                                  std::string(fields[i]) + "'",
                              source, reader.number());
      }
      values.push_back(*value);
    }
    try {
      table->add(std::string(fields[0]), values);
    } catch (const ValidationError& e) {
      throw ValidationError(e.rule(), source, reader.number());
    }
  }
  if (!table) throw ValidationError("missing '#dim=<n>' header", source, 0);
  return std::move(*table);
}

EmbeddingTable read_embedding_table(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_embedding_table(in, path.string());
}

void write_embedding_table(const EmbeddingTable& table, std::ostream& out) {
  out << "#dim=" << table.dim() << '\n';
  out << "#kind=" << to_string(table.kind()) << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.id(i) << '\t';
    write_row(out, table.row(i));
    out << '\n';
  }
}

void write_embedding_table(const EmbeddingTable& table,
                           const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_embedding_table(table, out); });
}

// ---------------------------------------------------------------------------
// ClassCatalog

void ClassCatalog::add(ClassRecord record) {
  check_identifier(record.class_id, "class_id");
  if (record.label.empty()) {
    throw ValidationError("class '" + record.class_id + "' has an empty label");
  }
  if (index_.contains(record.class_id)) {
    throw ValidationError("duplicate class_id '" + record.class_id + "'");
  }
  index_.emplace(record.class_id, records_.size());
  records_.push_back(std::move(record));
}

const ClassRecord* ClassCatalog::find(const std::string& class_id) const {
  const auto it = index_.find(class_id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::vector<std::string> ClassCatalog::class_ids() const {
  std::vector<std::string> ids;
  ids.reserve(records_.size());
  for (const auto& r : records_) ids.push_back(r.class_id);
  return ids;
}

ClassCatalog read_class_catalog(std::istream& in, const std::string& source) {
  LineReader reader(in);
  std::string line;
  ClassCatalog catalog;
  while (reader.next(line)) {
    if (is_blank(line)) continue;
    const auto object = parse_json_line(line, source, reader.number());
    if (!object.is_object()) {
      throw ValidationError("catalog line is not a JSON object", source,
                            reader.number());
    }
    ClassRecord record;
    record.class_id = required_string(object, "class_id", source, reader.number());
    record.label = required_string(object, "label", source, reader.number());
    if (const auto it = object.find("description");
        it != object.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw ValidationError("field 'description' is not a string", source,
                              reader.number());
      }
      record.description = it->get<std::string>();
    }
    try {
      catalog.add(std::move(record));
    } catch (const ValidationError& e) {
      throw ValidationError(e.rule(), source, reader.number());
    }
  }
  return catalog;
}

ClassCatalog read_class_catalog(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_class_catalog(in, path.string());
}

void write_class_catalog(const ClassCatalog& catalog, std::ostream& out) {
  for (const auto& record : catalog.records()) {
    ordered_json object;
    object["class_id"] = record.class_id;
    object["label"] = record.label;
    if (record.description) object["description"] = *record.description;
    out << object.dump() << '\n';
  }
}

void write_class_catalog(const ClassCatalog& catalog,
                         const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_class_catalog(catalog, out); });
}

// ---------------------------------------------------------------------------
// SampleSet

void SampleSet::add(SampleRecord record) {
  check_identifier(record.sample_id, "sample_id");
  check_identifier(record.class_id, "class_id");
  if (index_.contains(record.sample_id)) {
    throw ValidationError("duplicate sample_id '" + record.sample_id + "'");
  }
  index_.emplace(record.sample_id, records_.size());
  records_.push_back(std::move(record));
}

const SampleRecord* SampleSet::find(const std::string& sample_id) const {
  const auto it = index_.find(sample_id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

void SampleSet::check_classes(const ClassCatalog& catalog) const {
  for (const auto& r : records_) {
    if (!catalog.find(r.class_id)) {
      throw ValidationError("sample '" + r.sample_id + "' has unknown class '" +
                            r.class_id + "'");
    }
  }
}

SampleSet read_sample_set(std::istream& in, const std::string& source) {
  LineReader reader(in);
  std::string line;
  SampleSet samples;
  while (reader.next(line)) {
    if (is_blank(line)) continue;
    if (line.front() == '#') {
      constexpr std::string_view prefix = "#binding=";
      if (line.starts_with(prefix)) samples.set_binding(line.substr(prefix.size()));
      continue;
    }
    const auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw ValidationError("expected '<sample_id>\\t<class_id>'", source,
                            reader.number());
    }
    try {
      samples.add({std::string(fields[0]), std::string(fields[1])});
    } catch (const ValidationError& e) {
      throw ValidationError(e.rule(), source, reader.number());
    }
  }
  return samples;
}

SampleSet read_sample_set(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_sample_set(in, path.string());
}

void write_sample_set(const SampleSet& samples, std::ostream& out) {
  if (!samples.binding().empty()) out << "#binding=" << samples.binding() << '\n';
  for (const auto& r : samples.records()) {
    out << r.sample_id << '\t' << r.class_id << '\n';
  }
}

void write_sample_set(const SampleSet& samples,
                      const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_sample_set(samples, out); });
}

// ---------------------------------------------------------------------------
// FoldPlan

std::string_view to_string(Role role) {
  switch (role) {
    case Role::model_train: return "model-train";
    case Role::zsl_train: return "zsl-train";
    case Role::zsl_validation: return "zsl-validation";
    case Role::zsl_test: return "zsl-test";
  }
  return "?";
}

std::optional<Role> parse_role(std::string_view text) {
  for (Role r : {Role::model_train, Role::zsl_train, Role::zsl_validation,
                 Role::zsl_test}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

void FoldPlan::add_fold(Fold fold) {
  if (fold.name.empty()) throw ValidationError("fold name is empty");
  if (find_fold(fold.name)) {
    throw ValidationError("duplicate fold name '" + fold.name + "'");
  }
  for (const auto& c : fold.classes) check_identifier(c, "class_id");
  folds_.push_back(std::move(fold));
}

void FoldPlan::set_role(Role role, std::vector<std::string> fold_names) {
  const auto it = std::lower_bound(
      roles_.begin(), roles_.end(), role,
      [](const auto& entry, Role r) { return entry.first < r; });
  if (it != roles_.end() && it->first == role) {
    it->second = std::move(fold_names);
  } else {
    roles_.insert(it, {role, std::move(fold_names)});
  }
}

const Fold* FoldPlan::find_fold(const std::string& name) const {
  for (const auto& f : folds_) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const std::vector<std::string>* FoldPlan::role(Role role) const {
  for (const auto& [r, names] : roles_) {
    if (r == role) return &names;
  }
  return nullptr;
}

void FoldPlan::validate(const std::string& source) const {
  std::unordered_map<std::string, std::string> owner;
  for (const auto& fold : folds_) {
    for (const auto& c : fold.classes) {
      const auto [it, inserted] = owner.emplace(c, fold.name);
      if (!inserted) {
        throw ValidationError("folds '" + it->second + "' and '" + fold.name +
                                  "' overlap on class '" + c + "'",
                              source);
      }
    }
  }
  for (const auto& [r, names] : roles_) {
    for (const auto& name : names) {
      if (!find_fold(name)) {
        throw ValidationError("role '" + std::string(to_string(r)) +
                                  "' references unknown fold '" + name + "'",
                              source);
      }
    }
  }
  if (const auto* test = role(Role::zsl_test)) {
    for (Role other : {Role::zsl_train, Role::zsl_validation}) {
      const auto* names = role(other);
      if (!names) continue;
      for (const auto& name : *test) {
        if (std::find(names->begin(), names->end(), name) != names->end()) {
          throw ValidationError("fold '" + name + "' is used for both zsl-test and " +
                                    std::string(to_string(other)),
                                source);
        }
      }
    }
  }
}

std::vector<std::string> FoldPlan::classes_for(Role r) const {
  const auto* names = role(r);
  if (!names) {
    throw ValidationError("fold plan has no '" + std::string(to_string(r)) +
                          "' role");
  }
  std::vector<std::string> classes;
  for (const auto& name : *names) {
    const auto* fold = find_fold(name);
    if (!fold) throw ValidationError("unknown fold '" + name + "'");
    for (const auto& c : fold->classes) {
      if (std::find(classes.begin(), classes.end(), c) == classes.end()) {
        classes.push_back(c);
      }
    }
  }
  return classes;
}

std::vector<std::string> FoldPlan::all_classes() const {
  std::vector<std::string> classes;
  for (const auto& f : folds_) {
    classes.insert(classes.end(), f.classes.begin(), f.classes.end());
  }
  return classes;
}

FoldPlan read_fold_plan(std::istream& in, const std::string& source) {
  ordered_json document;
  try {
    document = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what(), source);
  }
  if (!document.is_object()) {
    throw ValidationError("fold plan must be a JSON object", source);
  }
  FoldPlan plan;
  const auto folds = document.find("folds");
  if (folds == document.end() || !folds->is_object()) {
    throw ValidationError("fold plan needs a 'folds' object", source);
  }
  try {
    for (const auto& [name, classes] : folds->items()) {
      if (!classes.is_array()) {
        throw ValidationError("fold '" + name + "' must be an array");
      }
      Fold fold{name, {}};
      for (const auto& c : classes) {
        if (!c.is_string()) {
          throw ValidationError("fold '" + name + "' holds a non-string class");
        }
        fold.classes.push_back(c.get<std::string>());
      }
      plan.add_fold(std::move(fold));
    }
    if (const auto roles = document.find("roles"); roles != document.end()) {
      if (!roles->is_object()) throw ValidationError("'roles' must be an object");
      for (const auto& [role_name, names] : roles->items()) {
        const auto role = parse_role(role_name);
        if (!role) throw ValidationError("unknown role '" + role_name + "'");
        if (plan.role(*role)) {
          throw ValidationError("role '" + role_name + "' given twice");
        }
        if (!names.is_array()) {
          throw ValidationError("role '" + role_name + "' must be an array");
        }
        std::vector<std::string> fold_names;
        for (const auto& n : names) {
          if (!n.is_string()) {
            throw ValidationError("role '" + role_name + "' holds a non-string");
          }
          fold_names.push_back(n.get<std::string>());
        }
        plan.set_role(*role, std::move(fold_names));
      }
    }
  } catch (const ValidationError& e) {
    throw ValidationError(e.rule(), source);
  }
  plan.validate(source);
  return plan;
}

FoldPlan read_fold_plan(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_fold_plan(in, path.string());
}

void write_fold_plan(const FoldPlan& plan, std::ostream& out) {
  plan.validate();
  ordered_json document;
  document["folds"] = ordered_json::object();
  for (const auto& fold : plan.folds()) document["folds"][fold.name] = fold.classes;
  document["roles"] = ordered_json::object();
  for (const auto& [role, names] : plan.roles()) {
    document["roles"][std::string(to_string(role))] = names;
  }
  out << document.dump(2) << '\n';
}

void write_fold_plan(const FoldPlan& plan, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_fold_plan(plan, out); });
}

// ---------------------------------------------------------------------------
// CompatibilityModel

void CompatibilityModel::validate() const {
  if (weights.rows() == 0 || weights.cols() == 0) {
    throw ValidationError("model weights must be non-empty");
  }
  if (!weights.allFinite()) throw ValidationError("model weights are not finite");
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ValidationError("model lambda must be finite and nonnegative");
  }
}

CompatibilityModel read_model(std::istream& in, const std::string& source) {
  LineReader reader(in);
  std::string line;
  bool have_header = false;
  while (reader.next(line)) {
    if (!is_blank(line)) {
      have_header = true;
      break;
    }
  }
  if (!have_header) {
    throw ValidationError("missing model header", source, reader.number());
  }
  const auto header = parse_json_line(line, source, reader.number());
  const auto header_line = reader.number();
  CompatibilityModel model;
  std::size_t rows = 0;
  std::size_t cols = 0;
  try {
    if (!header.is_object()) throw ValidationError("model header is not an object");
    const auto dims = [&](const char* key) -> std::size_t {
      const auto it = header.find(key);
      if (it == header.end() || !it->is_number_unsigned() || it->get<std::uint64_t>() == 0) {
        throw ValidationError(std::string("header field '") + key +
                              "' must be a positive integer");
      }
      return it->get<std::size_t>();
    };
    rows = dims("acoustic_dim");
    cols = dims("semantic_dim");
    const auto lambda = header.find("lambda");
    if (lambda == header.end() || !lambda->is_number()) {
      throw ValidationError("header field 'lambda' must be a number");
    }
    model.lambda = lambda->get<double>();
    const auto seed = header.find("seed");
    if (seed == header.end() || !seed->is_number_unsigned()) {
      throw ValidationError("header field 'seed' must be a nonnegative integer");
    }
    model.seed = seed->get<std::uint64_t>();
    if (const auto notes = header.find("notes"); notes != header.end()) {
      if (!notes->is_string()) throw ValidationError("header field 'notes' must be a string");
      model.notes = notes->get<std::string>();
    }
  } catch (const ValidationError& e) {
    throw ValidationError(e.rule(), source, header_line);
  }

  model.weights.resize(static_cast<Eigen::Index>(rows),
                       static_cast<Eigen::Index>(cols));
  std::size_t row = 0;
  while (reader.next(line)) {
    if (is_blank(line)) continue;
    if (row == rows) {
      throw ValidationError("more than " + std::to_string(rows) + " weight rows",
                            source, reader.number());
    }
    const auto fields = split_tabs(line);
    if (fields.size() != cols) {
      throw ValidationError("arity mismatch: expected " + std::to_string(cols) +
                                " values, found " + std::to_string(fields.size()),
                            source, reader.number());
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const auto value = parse_double(fields[c]);
      if (!value) {
        throw ValidationError("non-finite or malformed number '" +
                                  std::string(fields[c]) + "'",
                              source, reader.number());
      }
      model.weights(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)) =
          *value;
    }
    ++row;
  }
  if (row != rows) {
    throw ValidationError("expected " + std::to_string(rows) +
                              " weight rows, found " + std::to_string(row),
                          source, reader.number());
  }
  try {
    model.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(e.rule(), source, header_line);
  }
  return model;
}

CompatibilityModel read_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_model(in, path.string());
}

void write_model(const CompatibilityModel& model, std::ostream& out) {
  model.validate();
  ordered_json header;
  header["acoustic_dim"] = model.acoustic_dim();
  header["semantic_dim"] = model.semantic_dim();
  header["lambda"] = model.lambda;
  header["seed"] = model.seed;
  header["notes"] = model.notes;
  out << header.dump() << '\n';
  std::vector<double> row(model.semantic_dim());
  for (Eigen::Index r = 0; r < model.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.weights.cols(); ++c) {
      row[static_cast<std::size_t>(c)] = model.weights(r, c);
    }
    write_row(out, row);
    out << '\n';
  }
}

void write_model(const CompatibilityModel& model,
                 const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_model(model, out); });
}

// ---------------------------------------------------------------------------
// LabeledData

LabeledData LabeledData::resolve(const SampleSet& samples,
                                 const EmbeddingTable& acoustic) {
  LabeledData data;
  data.features.resize(static_cast<Eigen::Index>(samples.size()),
                       static_cast<Eigen::Index>(acoustic.dim()));
  data.sample_ids.reserve(samples.size());
  data.class_ids.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& record = samples.records()[i];
    const auto index = acoustic.find(record.sample_id);
    if (!index) {
      throw ValidationError("sample '" + record.sample_id +
                            "' has no acoustic embedding");
    }
    const auto values = acoustic.row(*index);
    std::copy(values.begin(), values.end(),
              data.features.data() + i * acoustic.dim());
    data.sample_ids.push_back(record.sample_id);
    data.class_ids.push_back(record.class_id);
  }
  return data;
}

LabeledData LabeledData::restricted_to(
    const std::vector<std::string>& classes) const {
  const std::set<std::string> keep(classes.begin(), classes.end());
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < size(); ++i) {
    if (keep.contains(class_ids[i])) rows.push_back(i);
  }
  LabeledData out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.features.row(static_cast<Eigen::Index>(k)) =
        features.row(static_cast<Eigen::Index>(rows[k]));
    out.sample_ids.push_back(sample_ids[rows[k]]);
    out.class_ids.push_back(class_ids[rows[k]]);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return buffer.str();
}

}  // namespace warpzsl
