#pragma once

// Class-level semantic embeddings from word vectors, and clip-level acoustic
// embeddings from segment vectors.

#include <filesystem>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "warpzsl/corpus.hpp"
#include "warpzsl/error.hpp"

namespace warpzsl {

/// How raw text becomes lookup tokens: ASCII punctuation acts as a separator,
/// tokens split on whitespace, optional lowercasing, stopwords dropped.
struct TokenRule {
  bool lowercase = false;
  std::set<std::string> stopwords;  // matched against the lowercased token
};

std::vector<std::string> tokenize(std::string_view text, const TokenRule& rule);

/// One line per stopword, `#` starts a comment, blank lines ignored.
/// Entries are lowercased.
std::set<std::string> read_stopwords(const std::filesystem::path& path);

enum class TextSource { label, description };

struct AssemblySpec {
  std::string name;  // e.g. "WLE", "GSE"
  TextSource source = TextSource::label;
  std::shared_ptr<const EmbeddingTable> word_table;
  TokenRule rule;
  bool l2_normalize = false;
};

struct Assembled {
  std::vector<double> vector;
  std::vector<std::string> units;  // resolved words or phrases, in order
  std::vector<std::string> oov;    // tokens with no vector
};

/// Mean of the word (or whole-phrase) vectors of a textual label. Throws
/// NoCoverageError when nothing resolves.
Assembled assemble_label_embedding(std::string_view label,
                                   const EmbeddingTable& word_table,
                                   const TokenRule& rule);

/// Mean of the word vectors of a sentence, stopwords excluded.
Assembled assemble_sentence_embedding(std::string_view description,
                                      const EmbeddingTable& word_table,
                                      const TokenRule& rule);

class NoCoverageError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Per-id concatenation in the given order; every table must hold the same
/// id set. Output order follows the first table.
EmbeddingTable concat_embeddings(
    std::span<const EmbeddingTable* const> tables);

/// Componentwise mean of per-segment vectors.
std::vector<double> aggregate_clip_embedding(
    std::span<const std::vector<double>> segments);

struct ClassCoverage {
  std::string class_id;
  std::string spec;
  std::size_t resolved = 0;
  std::vector<std::string> oov;
};

struct ClassSemanticTable {
  EmbeddingTable table;
  std::vector<ClassCoverage> coverage;
};

/// Assembles every spec for every class, then concatenates per class in spec
/// order. Collects every failing class before throwing, so a single error
/// lists them all.
ClassSemanticTable build_class_semantic_table(const ClassCatalog& catalog,
                                              std::span<const AssemblySpec> specs);

}  // namespace warpzsl
