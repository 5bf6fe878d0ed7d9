#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ncvcox {

using Rng = std::mt19937_64;

// Independent streams keyed by (seed, ids...). Parallel work units derive their
// own generator from their ids, so results never depend on scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> ids);
Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> ids = {});

}  // namespace ncvcox
