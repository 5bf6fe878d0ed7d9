#include "ncvcox/random.hpp"

#include <array>
#include <vector>

namespace ncvcox {

namespace {

std::seed_seq make_seq(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * ids.size());
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto id : ids) push(id);
  return std::seed_seq(words.begin(), words.end());
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
  auto seq = make_seq(seed, ids);
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
  auto seq = make_seq(seed, ids);
  return Rng(seq);
}

}  // namespace ncvcox
