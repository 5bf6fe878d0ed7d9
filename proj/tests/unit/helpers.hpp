#pragma once

#include "ncvcox/error.hpp"
#include "ncvcox/survival_data.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace testing {

inline ncvcox::SurvivalDataset to_dataset(const oracle::Instance& in) {
  return ncvcox::SurvivalDataset(in.x, in.times, in.status);
}

inline ncvcox::SurvivalDataset random_dataset(std::uint64_t seed, int n, int p, double censor = 0.3,
                                              bool ties = false, double signal = 0.5) {
  std::mt19937_64 rng(seed);
  return to_dataset(oracle::random_instance(rng, n, p, censor, ties, signal));
}

inline std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "ncvcox_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

inline std::filesystem::path write_text(const std::string& name, const std::string& text) {
  auto path = temp_file(name);
  std::ofstream(path) << text;
  return path;
}

inline ncvcox::ErrorKind error_kind_of(auto&& fn) {
  try {
    fn();
  } catch (const ncvcox::Error& e) {
    return e.kind();
  }
  FAIL("expected ncvcox::Error");
  return ncvcox::ErrorKind::config;
}

}  // namespace testing
