#include "docqual/ingest/split.hpp"

#include "docqual/error.hpp"
#include "docqual/rng.hpp"

#include <algorithm>

namespace docqual::ingest {

std::array<int, 3> split_counts(int n, std::array<int, 3> ratio) {
  long total = ratio[0] + ratio[1] + ratio[2];
  std::array<int, 3> counts{};
  std::array<double, 3> frac{};
  int assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double exact = static_cast<double>(n) * ratio[i] / static_cast<double>(total);
    counts[i] = static_cast<int>(exact);
    frac[i] = exact - counts[i];
    assigned += counts[i];
  }
  int remaining = n - assigned;
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frac[a] > frac[b]; });
  for (int r = 0; r < remaining; ++r) ++counts[order[static_cast<std::size_t>(r)]];
  return counts;
}

void split_dataset(std::vector<ManifestRecord>& records, const LabelSet& labels,
                   std::array<int, 3> ratio, std::uint64_t seed) {
  if (ratio[0] <= 0 || ratio[1] <= 0 || ratio[2] <= 0)
    throw ConfigError("split ratio components must be positive");
  if (records.size() < 3)
    throw IngestError(records.empty() ? "-" : records[0].id,
                      "need at least 3 documents to form train/dev/test splits");

  static const char* kNames[3] = {"train", "dev", "test"};
  for (const auto& name : labels.names) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < records.size(); ++i)
      if (records[i].label == name) idx.push_back(i);
    if (idx.empty()) continue;
    Rng rng = derived_rng(seed, "split:" + name);
    rng.shuffle(idx);
    auto counts = split_counts(static_cast<int>(idx.size()), ratio);
    std::size_t pos = 0;
    for (int part = 0; part < 3; ++part) {
      for (int k = 0; k < counts[static_cast<std::size_t>(part)]; ++k)
        records[idx[pos++]].split = kNames[part];
    }
  }
}

}  // namespace docqual::ingest
