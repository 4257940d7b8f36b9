#pragma once

#include <array>
#include <string>
#include <vector>

namespace docqual::ingest {

// Ordered class names. Wikipedia grades run FA..Stub in descending quality;
// the arXiv set is {accepted, rejected}.
struct LabelSet {
  std::vector<std::string> names;

  static LabelSet wikipedia() { return {{"FA", "GA", "B", "C", "Start", "Stub"}}; }
  static LabelSet arxiv() { return {{"accepted", "rejected"}}; }

  // Picks the canonical set covering the observed labels, else falls back to
  // first-appearance order.
  static LabelSet infer(const std::vector<std::string>& labels_seen);

  int size() const { return static_cast<int>(names.size()); }
  int index_of(const std::string& name) const;  // -1 when absent
  bool contains(const std::string& name) const { return index_of(name) >= 0; }
  void validate() const;  // unique names, size >= 2
};

struct ManifestRecord {
  std::string id;
  std::string source;  // "wikipedia" | "arxiv"
  std::string label;
  std::string split;  // "train" | "dev" | "test"
  std::string text_path;
  std::string image_path;
};

struct Manifest {
  std::vector<ManifestRecord> records;
  LabelSet label_set;
  std::array<int, 3> split_ratio{8, 1, 1};

  // Line-delimited records with fixed field order
  // {id, source, label, split, text_path, image_path}.
  void save(const std::string& path) const;
  static Manifest load(const std::string& path);

  std::vector<const ManifestRecord*> split(const std::string& name) const;
  void validate() const;  // ids unique per source, labels known, splits valid
};

}  // namespace docqual::ingest
