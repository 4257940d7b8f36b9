#include "docqual/ingest/manifest.hpp"

#include "docqual/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>

namespace docqual::ingest {

LabelSet LabelSet::infer(const std::vector<std::string>& labels_seen) {
  auto covered_by = [&](const LabelSet& ls) {
    for (const auto& l : labels_seen)
      if (!ls.contains(l)) return false;
    return true;
  };
  LabelSet wiki = wikipedia();
  if (covered_by(wiki)) return wiki;
  LabelSet ax = arxiv();
  if (covered_by(ax)) return ax;
  LabelSet out;
  for (const auto& l : labels_seen)
    if (!out.contains(l)) out.names.push_back(l);
  return out;
}

int LabelSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

void LabelSet::validate() const {
  if (names.size() < 2) throw ConfigError("label set needs at least 2 classes");
  std::set<std::string> seen(names.begin(), names.end());
  if (seen.size() != names.size()) throw ConfigError("label set has duplicate names");
}

void Manifest::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest: " + path);
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["source"] = r.source;
    j["label"] = r.label;
    j["split"] = r.split;
    j["text_path"] = r.text_path;
    j["image_path"] = r.image_path;
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("short write: " + path);
}

Manifest Manifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("manifest not found: " + path);
  Manifest m;
  std::string line;
  std::vector<std::string> labels;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": bad record: " + e.what());
    }
    ManifestRecord r;
    r.id = j.at("id");
    r.source = j.at("source");
    r.label = j.at("label");
    r.split = j.at("split");
    r.text_path = j.at("text_path");
    r.image_path = j.at("image_path");
    labels.push_back(r.label);
    m.records.push_back(std::move(r));
  }
  m.label_set = LabelSet::infer(labels);
  m.validate();
  return m;
}

std::vector<const ManifestRecord*> Manifest::split(const std::string& name) const {
  std::vector<const ManifestRecord*> out;
  for (const auto& r : records)
    if (r.split == name) out.push_back(&r);
  return out;
}

void Manifest::validate() const {
  label_set.validate();
  std::set<std::pair<std::string, std::string>> ids;
  for (const auto& r : records) {
    if (!ids.insert({r.source, r.id}).second)
      throw IngestError(r.id, "duplicate id within source " + r.source);
    if (!label_set.contains(r.label))
      throw IngestError(r.id, "label '" + r.label + "' not in label set");
    if (r.split != "train" && r.split != "dev" && r.split != "test")
      throw IngestError(r.id, "bad split '" + r.split + "'");
  }
}

}  // namespace docqual::ingest
