#pragma once

#include <cascadex/cascade.hpp>
#include <cascadex/graph.hpp>
#include <cascadex/rng.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace testing_support {

using cascadex::NodeIndex;

inline cascadex::SocialGraph make_graph(std::size_t n, std::vector<std::pair<NodeIndex, NodeIndex>> edges) {
  return cascadex::SocialGraph::from_edges(n, edges);
}

// Erdos-Renyi G(n, q) from a Philox stream.
inline cascadex::SocialGraph random_graph(std::size_t n, double q, std::uint64_t seed) {
  cascadex::RandomStream rng(seed, 77);
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex j = i + 1; j < n; ++j)
      if (rng.next_uniform() < q) edges.emplace_back(i, j);
  return cascadex::SocialGraph::from_edges(n, edges);
}

// Activation windows in [0, T) or never (~25%), at least one activation in window 0.
inline cascadex::Cascade random_cascade(std::size_t n, std::size_t T, std::uint64_t seed,
                                        double never = 0.25) {
  cascadex::RandomStream rng(seed, 78);
  std::vector<std::int64_t> minutes(n);
  for (auto& m : minutes) {
    m = rng.next_uniform() < never ? -1 : static_cast<std::int64_t>(rng.next_below(T));
  }
  minutes[0] = 0;
  return cascadex::Cascade(minutes, 1.0, T);
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("cascadex_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Direct product 1 - prod(1 - q_j), no logs.
inline double naive_union(const std::vector<double>& q) {
  double keep = 1.0;
  for (double x : q) keep *= 1.0 - x;
  return 1.0 - keep;
}

}  // namespace testing_support
