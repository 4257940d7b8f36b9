#pragma once

#include "docqual/ingest/manifest.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace docqual::ingest {

// Seed-reproducible random partition at the given ratio, stratified by label
// (each class is partitioned separately with largest-remainder rounding).
// Splits are written into the records in place.
void split_dataset(std::vector<ManifestRecord>& records, const LabelSet& labels,
                   std::array<int, 3> ratio, std::uint64_t seed);

// Largest-remainder apportionment of n items over the ratio; ties go to the
// earlier part. Exposed for direct testing.
std::array<int, 3> split_counts(int n, std::array<int, 3> ratio);

}  // namespace docqual::ingest
