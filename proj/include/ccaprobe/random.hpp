#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace ccaprobe {

using Rng = std::mt19937_64;

// Mixes a master seed with a list of tags into an independent stream seed.
// Parallel jobs derive their seeds this way instead of sharing a generator.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags);

// n_pick distinct indices from [0, n), sorted ascending.
std::vector<int> sample_without_replacement(int n, int n_pick, Rng& rng);

}  // namespace ccaprobe
