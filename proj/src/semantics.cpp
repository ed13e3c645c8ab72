#include "warpzsl/semantics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "warpzsl/error.hpp"

namespace warpzsl {

namespace {

std::string lowered(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

void accumulate(std::vector<double>& sum, std::span<const double> v) {
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
}

void finish_mean(Assembled& result, std::size_t count, bool normalize = false) {
  for (double& x : result.vector) x /= static_cast<double>(count);
  if (normalize) {
    double norm = 0.0;
    for (double x : result.vector) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (double& x : result.vector) x /= norm;
    }
  }
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

Assembled assemble_words(const std::vector<std::string>& tokens,
                         const EmbeddingTable& table) {
  Assembled result;
  result.vector.assign(table.dim(), 0.0);
  for (const auto& token : tokens) {
    if (const auto index = table.find(token)) {
      accumulate(result.vector, table.row(*index));
      result.units.push_back(token);
    } else {
      result.oov.push_back(token);
    }
  }
  return result;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenRule& rule) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (current.empty()) return;
    std::string token = rule.lowercase ? lowered(current) : current;
    if (!rule.stopwords.contains(lowered(token))) tokens.push_back(std::move(token));
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c) || (c < 0x80 && std::ispunct(c))) {
      flush();
    } else {
      current.push_back(ch);
    }
  }
  flush();
  return tokens;
}

std::set<std::string> read_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::string word;
    while (fields >> word) words.insert(lowered(word));
  }
  return words;
}

Assembled assemble_label_embedding(std::string_view label,
                                   const EmbeddingTable& word_table,
                                   const TokenRule& rule) {
  if (label.empty()) throw ValidationError("label is empty");
  const auto tokens = tokenize(label, rule);
  if (tokens.size() > 1) {
    const auto phrase = join(tokens, '_');
    if (const auto index = word_table.find(phrase)) {
      const auto v = word_table.row(*index);
      return {{v.begin(), v.end()}, {phrase}, {}};
    }
  }
  auto result = assemble_words(tokens, word_table);
  if (result.units.empty()) {
    throw NoCoverageError("no token of label '" + std::string(label) +
                          "' has a word vector");
  }
  finish_mean(result, result.units.size());
  return result;
}

Assembled assemble_sentence_embedding(std::string_view description,
                                      const EmbeddingTable& word_table,
                                      const TokenRule& rule) {
  if (description.empty()) throw ValidationError("description is empty");
  auto result = assemble_words(tokenize(description, rule), word_table);
  if (result.units.empty()) {
    throw NoCoverageError("no non-stopword token of description '" +
                          std::string(description) + "' has a word vector");
  }
  finish_mean(result, result.units.size());
  return result;
}

EmbeddingTable concat_embeddings(std::span<const EmbeddingTable* const> tables) {
  if (tables.empty()) throw ValidationError("no tables to concatenate");
  const EmbeddingTable& first = *tables.front();
  std::size_t dim = 0;
  for (const auto* t : tables) {
    dim += t->dim();
    std::vector<std::string> missing;
    for (const auto& id : first.ids()) {
      if (!t->contains(id)) missing.push_back(id);
    }
    for (const auto& id : t->ids()) {
      if (!first.contains(id)) missing.push_back(id);
    }
    if (!missing.empty()) {
      std::sort(missing.begin(), missing.end());
      throw ValidationError("id sets differ; symmetric difference: " +
                            join(missing, ' '));
    }
  }
  EmbeddingTable out(dim, first.kind());
  std::vector<double> row;
  row.reserve(dim);
  for (const auto& id : first.ids()) {
    row.clear();
    for (const auto* t : tables) {
      const auto v = t->at(id);
      row.insert(row.end(), v.begin(), v.end());
    }
    out.add(id, row);
  }
  return out;
}

std::vector<double> aggregate_clip_embedding(
    std::span<const std::vector<double>> segments) {
  if (segments.empty()) throw ValidationError("no segment embeddings to average");
  const std::size_t dim = segments.front().size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& s : segments) {
    if (s.size() != dim) {
      throw ValidationError("segment dimensionality mismatch: " +
                            std::to_string(dim) + " vs " + std::to_string(s.size()));
    }
    accumulate(mean, s);
  }
  for (double& x : mean) x /= static_cast<double>(segments.size());
  return mean;
}

ClassSemanticTable build_class_semantic_table(
    const ClassCatalog& catalog, std::span<const AssemblySpec> specs) {
  if (specs.empty()) throw ValidationError("no assembly specs given");
  std::size_t dim = 0;
  for (const auto& spec : specs) {
    if (spec.name.empty()) throw ValidationError("assembly spec has no name");
    if (!spec.word_table) {
      throw ValidationError("assembly spec '" + spec.name + "' has no word table");
    }
    dim += spec.word_table->dim();
  }

  ClassSemanticTable result{EmbeddingTable(dim, EmbeddingKind::semantic), {}};
  std::vector<std::string> failures;
  std::vector<double> row;
  for (const auto& record : catalog.records()) {
    row.clear();
    bool ok = true;
    for (const auto& spec : specs) {
      try {
        Assembled part;
        if (spec.source == TextSource::label) {
          part = assemble_label_embedding(record.label, *spec.word_table, spec.rule);
        } else {
          if (!record.description || record.description->empty()) {
            throw ValidationError("has no description (needed by spec '" +
                                  spec.name + "')");
          }
          part = assemble_sentence_embedding(*record.description,
                                             *spec.word_table, spec.rule);
        }
        if (spec.l2_normalize) finish_mean(part, 1, true);
        if (part.vector.size() != spec.word_table->dim()) {
          throw ValidationError("assembled dimensionality mismatch");
        }
        result.coverage.push_back(
            {record.class_id, spec.name, part.units.size(), std::move(part.oov)});
        row.insert(row.end(), part.vector.begin(), part.vector.end());
      } catch (const ValidationError& e) {
        failures.push_back("class '" + record.class_id + "' [" + spec.name +
                           "]: " + e.rule());
        ok = false;
      }
    }
    if (ok) result.table.add(record.class_id, row);
  }
  if (!failures.empty()) {
    std::string message = std::to_string(failures.size()) +
                          " class embedding(s) could not be assembled:";
    for (const auto& f : failures) message += "\n  " + f;
    throw ValidationError(message);
  }
  return result;
}

}  // namespace warpzsl
