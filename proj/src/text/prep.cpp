#include "docqual/text/prep.hpp"

#include "docqual/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace docqual::text {

namespace {

const std::set<std::string>& abbreviations() {
  static const std::set<std::string> abbr = {
      "mr",   "mrs",  "ms",   "dr",   "prof", "sr",   "jr",  "st",  "vs",  "etc",
      "e.g",  "i.e",  "cf",   "al",   "fig",  "figs", "no",  "nos", "vol", "vols",
      "pp",   "inc",  "ltd",  "co",   "corp", "dept", "univ", "approx", "est",
      "jan",  "feb",  "mar",  "apr",  "jun",  "jul",  "aug",  "sep", "sept", "oct",
      "nov",  "dec",  "mt",   "ft"};
  return abbr;
}

bool is_term(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_open_quote(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

// Last whitespace-delimited token ending at position `end` (exclusive).
std::string token_before(const std::string& s, std::size_t end) {
  std::size_t start = end;
  while (start > 0 && !std::isspace(static_cast<unsigned char>(s[start - 1]))) --start;
  return s.substr(start, end - start);
}

bool looks_like_abbreviation(const std::string& raw) {
  // Strip the trailing dot and any leading opening punctuation.
  std::string t = raw;
  while (!t.empty() && is_open_quote(t.front())) t.erase(t.begin());
  if (t.empty() || t.back() != '.') return false;
  t.pop_back();
  if (t.empty()) return false;
  // Single capital letter: an initial ("J.").
  if (t.size() == 1 && std::isupper(static_cast<unsigned char>(t[0]))) return true;
  // Internal dots: "i.e.", "U.S.".
  if (t.find('.') != std::string::npos) return true;
  return abbreviations().count(lowercase(t)) > 0;
}

}  // namespace

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::size_t n = text.size();
  std::size_t start = 0;
  std::size_t i = 0;
  auto flush = [&](std::size_t end) {
    // Trim surrounding whitespace but keep interior bytes untouched.
    std::size_t a = start, b = end;
    while (a < b && std::isspace(static_cast<unsigned char>(text[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(text[b - 1]))) --b;
    if (b > a) out.push_back(text.substr(a, b - a));
    start = end;
  };
  while (i < n) {
    char c = text[i];
    if (c == '\n' && i + 1 < n && text[i + 1] == '\n') {
      // Paragraph break always ends a sentence.
      flush(i);
      while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      start = i;
      continue;
    }
    if (!is_term(c)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && is_term(text[j + 1])) ++j;  // absorb "..." / "?!"
    std::size_t close = j + 1;
    while (close < n && (text[close] == '"' || text[close] == '\'' || text[close] == ')' ||
                         text[close] == ']'))
      ++close;
    // Decimal numbers: "3.14" has no whitespace after the dot.
    if (close < n && !std::isspace(static_cast<unsigned char>(text[close]))) {
      i = close;
      continue;
    }
    if (c == '.' && j == i && looks_like_abbreviation(token_before(text, i + 1))) {
      i = close;
      continue;
    }
    // Peek the next non-space character; sentence ends only before an
    // upper-case letter, digit, or opening quote/bracket (or at EOF).
    std::size_t k = close;
    while (k < n && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
    if (k >= n) {
      flush(close);
      i = close;
      continue;
    }
    char next = text[k];
    bool boundary = std::isupper(static_cast<unsigned char>(next)) ||
                    std::isdigit(static_cast<unsigned char>(next)) || is_open_quote(next) ||
                    static_cast<unsigned char>(next) >= 0x80;
    if (boundary) {
      flush(close);
      i = k;
      start = k;
    } else {
      i = close;
    }
  }
  flush(n);
  return out;
}

std::vector<std::string> tokenize(const std::string& sentence) {
  std::vector<std::string> tokens;
  std::istringstream in(sentence);
  std::string raw;

  auto is_leading_punct = [](char c) {
    return c == '(' || c == '[' || c == '{' || c == '"' || c == '`' || c == '\'';
  };
  auto is_trailing_punct = [](char c) {
    return c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == '"' ||
           c == '\'' || c == ')' || c == ']' || c == '}' || c == '%';
  };

  while (in >> raw) {
    // Peel leading punctuation.
    std::size_t b = 0;
    while (b < raw.size() && is_leading_punct(raw[b])) {
      // Keep apostrophes that start contraction-like words ('tis) intact only
      // when followed by a letter and the token has no other quote; simple
      // rule: a single leading ' before letters is still peeled.
      tokens.push_back(std::string(1, raw[b]));
      ++b;
    }
    std::string core = raw.substr(b);
    // Peel trailing punctuation (kept in order after the core).
    std::vector<std::string> suffix;
    while (!core.empty()) {
      char last = core.back();
      if (is_trailing_punct(last)) {
        suffix.push_back(std::string(1, last));
        core.pop_back();
        continue;
      }
      if (last == '.') {
        // Split a final period unless the word has internal dots (U.S., i.e.)
        // or is a known abbreviation.
        std::string stem = core.substr(0, core.size() - 1);
        if (stem.find('.') != std::string::npos) break;
        if (abbreviations().count(lowercase(stem)) > 0) break;
        suffix.push_back(".");
        core.pop_back();
        continue;
      }
      break;
    }
    // Contraction endings on the remaining core.
    std::vector<std::string> parts;
    if (!core.empty()) {
      std::string low = lowercase(core);
      auto ends_with = [&](const std::string& suf) {
        return low.size() > suf.size() &&
               low.compare(low.size() - suf.size(), suf.size(), suf) == 0;
      };
      if (ends_with("n't")) {
        parts.push_back(core.substr(0, core.size() - 3));
        parts.push_back(core.substr(core.size() - 3));
      } else {
        bool split = false;
        for (const char* suf : {"'ll", "'ve", "'re"}) {
          if (ends_with(suf)) {
            parts.push_back(core.substr(0, core.size() - 3));
            parts.push_back(core.substr(core.size() - 3));
            split = true;
            break;
          }
        }
        if (!split) {
          for (const char* suf : {"'d", "'m", "'s"}) {
            if (ends_with(suf)) {
              parts.push_back(core.substr(0, core.size() - 2));
              parts.push_back(core.substr(core.size() - 2));
              split = true;
              break;
            }
          }
        }
        if (!split) parts.push_back(core);
      }
    }
    for (auto& p : parts) tokens.push_back(std::move(p));
    for (auto it = suffix.rbegin(); it != suffix.rend(); ++it) tokens.push_back(*it);
  }
  return tokens;
}

int Vocabulary::lookup(const std::string& token) const {
  auto it = token_to_index.find(lowercase(token));
  return it == token_to_index.end() ? unk_index : it->second;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write vocabulary: " + path);
  for (const auto& t : index_to_token) out << t << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary: " + path);
  Vocabulary v;
  std::string line;
  while (std::getline(in, line)) {
    v.token_to_index[line] = static_cast<int>(v.index_to_token.size());
    v.index_to_token.push_back(line);
  }
  if (v.index_to_token.empty() || v.index_to_token[0] != "<unk>")
    throw IoError("vocabulary must start with <unk>: " + path);
  return v;
}

Vocabulary Vocabulary::build(const std::vector<std::string>& train_texts,
                             int min_count_exclusive) {
  std::map<std::string, long> counts;
  for (const auto& text : train_texts) {
    for (const auto& sent : split_sentences(text)) {
      for (const auto& tok : tokenize(sent)) ++counts[lowercase(tok)];
    }
  }
  std::vector<std::pair<long, std::string>> kept;
  for (const auto& [tok, cnt] : counts) {
    if (cnt > min_count_exclusive) kept.push_back({cnt, tok});
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  Vocabulary v;
  v.min_count_exclusive = min_count_exclusive;
  v.index_to_token.push_back("<unk>");
  v.token_to_index["<unk>"] = 0;
  for (const auto& [cnt, tok] : kept) {
    v.token_to_index[tok] = static_cast<int>(v.index_to_token.size());
    v.index_to_token.push_back(tok);
  }
  return v;
}

EmbeddingTable init_embeddings(const Vocabulary& vocab, const std::string& resource_path,
                               Rng& rng, int dim) {
  std::ifstream in(resource_path);
  if (!in) throw ConfigError("embedding resource not found: " + resource_path);

  std::unordered_map<std::string, std::vector<double>> resource;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    std::vector<double> vec;
    double v;
    while (ls >> v) vec.push_back(v);
    if (static_cast<int>(vec.size()) != dim)
      throw ConfigError("embedding resource dimension " + std::to_string(vec.size()) +
                        " != expected " + std::to_string(dim) + " (token '" + tok + "')");
    resource[tok] = std::move(vec);
  }

  EmbeddingTable table;
  table.dim = dim;
  table.trainable = true;
  table.vectors = nn::Tensor({vocab.size(), dim});
  for (int i = 0; i < vocab.size(); ++i) {
    auto it = resource.find(vocab.index_to_token[static_cast<std::size_t>(i)]);
    if (it != resource.end()) {
      for (int j = 0; j < dim; ++j) table.vectors.at(i, j) = it->second[static_cast<std::size_t>(j)];
    } else {
      for (int j = 0; j < dim; ++j) table.vectors.at(i, j) = rng.uniform(-1.0, 1.0);
    }
  }
  return table;
}

EncodedDocument encode_document(const std::string& text, const Vocabulary& vocab,
                                const EncodeOptions& opts) {
  EncodedDocument doc;
  for (const auto& sent : split_sentences(text)) {
    if (opts.max_sentences > 0 && doc.sentence_count() >= opts.max_sentences) break;
    std::vector<int> ids;
    for (const auto& tok : tokenize(sent)) {
      if (opts.max_tokens_per_sentence > 0 &&
          static_cast<int>(ids.size()) >= opts.max_tokens_per_sentence)
        break;
      ids.push_back(vocab.lookup(tok));
    }
    if (ids.empty()) continue;
    doc.lengths.push_back(static_cast<int>(ids.size()));
    doc.sentences.push_back(std::move(ids));
  }
  if (doc.sentences.empty()) {
    doc.sentences.push_back({vocab.unk_index});
    doc.lengths.push_back(1);
  }
  return doc;
}

}  // namespace docqual::text
