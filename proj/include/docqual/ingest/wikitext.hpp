#pragma once

#include <string>
#include <vector>

namespace docqual::ingest {

// Patterns naming label-revealing template invocations. Lowercase, with `*`
// wildcards ("*-stub" covers {geo-stub} and friends). The shipped defaults
// cover the six grade templates plus stub markers; deployments can extend
// the list from a text file (one pattern per line, `#` comments).
struct TemplatePatterns {
  std::vector<std::string> patterns;

  static TemplatePatterns defaults();
  static TemplatePatterns from_file(const std::string& path);

  bool matches(const std::string& normalized_name) const;
};

// Removes template invocations whose name matches a quality-indicator
// pattern; all other bytes pass through untouched. Idempotent.
std::string strip_quality_markup(const std::string& wikitext, const TemplatePatterns& patterns);

// Leading redirect directive (#REDIRECT), case-insensitive.
bool is_redirect(const std::string& wikitext);

}  // namespace docqual::ingest
