#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "shufflebn/types.hpp"

namespace shufflebn {

using Rng = std::mt19937_64;

// Counter-based child seed: stream i of root is independent of how many
// other streams were drawn, so parallel results do not depend on scheduling.
std::uint64_t split_seed(std::uint64_t root, std::uint64_t stream);

std::vector<Index> identity_permutation(Index n);
std::vector<Index> random_permutation(Index n, Rng& rng);
std::vector<Index> random_permutation(Index n, std::uint64_t seed);

bool is_permutation_of(const std::vector<Index>& perm, Index n);

// Reads SHUFFLEBN_THREADS; falls back to hardware concurrency.
std::size_t worker_count();

// Runs fn(i) for i in [0, count) on up to worker_count() threads.
// The first exception thrown by any task is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace shufflebn
