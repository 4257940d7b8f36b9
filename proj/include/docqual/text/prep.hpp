#pragma once

#include "docqual/nn/tensor.hpp"
#include "docqual/rng.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace docqual::text {

// Rule-based sentence segmentation. Deterministic; abbreviation-, initial-
// and decimal-aware. Behaviour is frozen by the fixture corpus in the tests.
std::vector<std::string> split_sentences(const std::string& text);

// Rule-based word tokenizer: punctuation is split off, contractions are
// separated (don't -> do n't), in-word hyphens and abbreviation dots kept.
std::vector<std::string> tokenize(const std::string& sentence);

std::string lowercase(std::string s);

struct Vocabulary {
  std::vector<std::string> index_to_token;  // index 0 is the UNK slot
  std::unordered_map<std::string, int> token_to_index;
  int unk_index = 0;
  int min_count_exclusive = 20;

  int size() const { return static_cast<int>(index_to_token.size()); }

  // Tokens are lowercased before lookup; unknown tokens map to unk_index.
  int lookup(const std::string& token) const;

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  // Counts tokens over the training texts only and retains those with
  // count > min_count_exclusive. Everything else maps to UNK.
  static Vocabulary build(const std::vector<std::string>& train_texts,
                          int min_count_exclusive = 20);
};

struct EmbeddingTable {
  nn::Tensor vectors;  // [V, dim]
  int dim = 50;
  bool trainable = true;
};

// Seeds rows from a pretrained text resource (token + dim decimals per line);
// rows absent from the resource are drawn i.i.d. from U(-1, 1).
EmbeddingTable init_embeddings(const Vocabulary& vocab, const std::string& resource_path,
                               Rng& rng, int dim = 50);

struct EncodedDocument {
  std::vector<std::vector<int>> sentences;  // token indices, sentence-major
  std::vector<int> lengths;                 // per-sentence token counts

  int sentence_count() const { return static_cast<int>(sentences.size()); }
};

struct EncodeOptions {
  int max_sentences = 0;            // 0 = unlimited
  int max_tokens_per_sentence = 0;  // 0 = unlimited
};

// Always yields at least one sentence (an UNK singleton for empty text).
EncodedDocument encode_document(const std::string& text, const Vocabulary& vocab,
                                const EncodeOptions& opts = {});

}  // namespace docqual::text
