#include "docqual/ingest/wikitext.hpp"

#include "docqual/error.hpp"
#include "docqual/text/prep.hpp"

#include <cctype>
#include <fstream>

namespace docqual::ingest {

namespace {

bool glob_match(const std::string& pattern, const std::string& s) {
  std::size_t p = 0, i = 0, star = std::string::npos, mark = 0;
  while (i < s.size()) {
    if (p < pattern.size() && (pattern[p] == s[i])) {
      ++p;
      ++i;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = i;
    } else if (star != std::string::npos) {
      p = star + 1;
      i = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

// Template name: bytes up to the first '|', '{', '}' or newline, trimmed,
// lowercased, underscores to spaces, whitespace runs collapsed.
std::string normalize_name(const std::string& content) {
  std::size_t end = content.find_first_of("|{}\n");
  std::string raw = content.substr(0, end == std::string::npos ? content.size() : end);
  std::string out;
  bool pending_space = false;
  for (char c : raw) {
    if (c == '_' || std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

struct Stripper {
  const std::string& src;
  const TemplatePatterns& patterns;

  std::size_t brace_run(std::size_t i, char c) const {
    std::size_t n = 0;
    while (i + n < src.size() && src[i + n] == c) ++n;
    return n;
  }

  // Emits src[i..end) into out, handling nested brace groups. When k > 0 we
  // are inside a group opened with k braces; returns the position just past
  // the group's closer, or end if unmatched.
  std::size_t emit(std::size_t i, std::size_t end, std::size_t k, std::string& out) const {
    while (i < end) {
      char c = src[i];
      if (c == '{') {
        std::size_t m = brace_run(i, '{');
        std::string inner;
        std::size_t after = emit(i + m, end, m, inner);
        if (after == std::string::npos) {
          // Unmatched opener: literal braces.
          out.append(m, '{');
          i += m;
          continue;
        }
        if (patterns.matches(normalize_name(inner))) {
          // Drop the whole invocation.
        } else {
          out.append(m, '{');
          out += inner;
          out.append(m, '}');
        }
        i = after;
        continue;
      }
      if (c == '}' && k > 0) {
        std::size_t m = brace_run(i, '}');
        if (m >= k) return i + k;  // group closes on the first k braces
        out.append(m, '}');
        i += m;
        continue;
      }
      out += c;
      ++i;
    }
    return k > 0 ? std::string::npos : end;
  }
};

}  // namespace

TemplatePatterns TemplatePatterns::defaults() {
  TemplatePatterns p;
  p.patterns = {"featured article", "good article", "fa",          "ga",
                "a-class*",         "b-class*",     "c-class*",    "start-class*",
                "stub-class*",      "stub",         "*-stub"};
  return p;
}

TemplatePatterns TemplatePatterns::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("pattern file not found: " + path);
  TemplatePatterns p;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    std::size_t b = line.find_last_not_of(" \t\r");
    std::string t = line.substr(a, b - a + 1);
    if (t.empty() || t[0] == '#') continue;
    p.patterns.push_back(text::lowercase(t));
  }
  return p;
}

bool TemplatePatterns::matches(const std::string& normalized_name) const {
  if (normalized_name.empty()) return false;
  for (const auto& pat : patterns)
    if (glob_match(pat, normalized_name)) return true;
  return false;
}

std::string strip_quality_markup(const std::string& wikitext,
                                 const TemplatePatterns& patterns) {
  // A removal can expose a new matching invocation in malformed markup, so
  // run to a fixed point; each pass only deletes bytes, so this terminates.
  std::string cur = wikitext;
  for (;;) {
    std::string out;
    out.reserve(cur.size());
    Stripper s{cur, patterns};
    s.emit(0, cur.size(), 0, out);
    if (out == cur) return out;
    cur = std::move(out);
  }
}

bool is_redirect(const std::string& wikitext) {
  std::size_t i = 0;
  // Skip BOM and leading whitespace.
  if (wikitext.size() >= 3 && static_cast<unsigned char>(wikitext[0]) == 0xEF &&
      static_cast<unsigned char>(wikitext[1]) == 0xBB &&
      static_cast<unsigned char>(wikitext[2]) == 0xBF)
    i = 3;
  while (i < wikitext.size() && std::isspace(static_cast<unsigned char>(wikitext[i]))) ++i;
  const std::string directive = "#redirect";
  if (wikitext.size() - i < directive.size()) return false;
  for (std::size_t j = 0; j < directive.size(); ++j) {
    if (std::tolower(static_cast<unsigned char>(wikitext[i + j])) != directive[j]) return false;
  }
  return true;
}

}  // namespace docqual::ingest
