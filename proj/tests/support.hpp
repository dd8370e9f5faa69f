#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "monsoon/grid.hpp"
#include "monsoon/mrf_model.hpp"
#include "monsoon/rng.hpp"

namespace testing {

// rows x cols lattice, n_seasons seasons of `days` each, rain drawn from a
// seeded exponential with a few exact zeros.
inline monsoon::RainfallField tiny_field(int rows, int cols, int n_seasons, int days,
                                         std::uint64_t seed = 11) {
  monsoon::RainfallField f{monsoon::GridGeometry::lattice(rows, cols),
                           monsoon::CalendarIndex::seasons(2001, n_seasons, days), {}};
  const std::size_t S = static_cast<std::size_t>(rows * cols);
  const std::size_t D = static_cast<std::size_t>(n_seasons * days);
  f.x = monsoon::Matrix<double>(S, D, 0.0);
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> ex(0.2);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t t = 0; t < D; ++t) f.x(s, t) = unif(gen) < 0.25 ? 0.0 : ex(gen);
  return f;
}

inline monsoon::LatentState random_state(std::size_t S, std::size_t D, int ku, int kv,
                                         std::uint64_t seed) {
  monsoon::SplitMix64 g(seed);
  monsoon::LatentState st;
  st.z = monsoon::BinaryMatrix(S, D, 0);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t t = 0; t < D; ++t) st.z(s, t) = static_cast<unsigned char>(g.below(2));
  st.u.resize(D);
  st.v.resize(S);
  for (auto& l : st.u) l = static_cast<int>(g.below(static_cast<std::uint64_t>(ku)));
  for (auto& l : st.v) l = static_cast<int>(g.below(static_cast<std::uint64_t>(kv)));
  return st;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / ("monsoon_test_" + name)) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace testing
