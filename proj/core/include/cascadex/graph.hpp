#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cascadex {

using NodeIndex = std::uint32_t;
using ExternalId = std::int64_t;

/// Immutable undirected friendship network in compressed sparse row form.
///
/// Rows are users, columns are peers; the structure is symmetric, has no
/// self-loops and every peer list is sorted. External ids from input files
/// are densely re-indexed; `external_id()` / `index_of()` translate.
class SocialGraph {
 public:
  SocialGraph() = default;

  /// Builds from an undirected edge list over nodes [0, n). Self-loops are
  /// dropped and duplicates (in either orientation) collapsed. When `ids` is
  /// empty the external id of node i is i.
  static SocialGraph from_edges(std::size_t n,
                                std::span<const std::pair<NodeIndex, NodeIndex>> edges,
                                std::vector<ExternalId> ids = {});

  std::size_t n_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t n_edges() const noexcept { return peers_.size() / 2; }

  std::span<const NodeIndex> peers(NodeIndex i) const noexcept {
    return {peers_.data() + offsets_[i], peers_.data() + offsets_[i + 1]};
  }
  std::size_t degree(NodeIndex i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
  std::size_t max_degree() const noexcept;
  bool has_edge(NodeIndex i, NodeIndex j) const noexcept;

  ExternalId external_id(NodeIndex i) const noexcept { return ids_[i]; }
  std::span<const ExternalId> external_ids() const noexcept { return ids_; }
  std::optional<NodeIndex> index_of(ExternalId id) const;

  /// Copy with extra isolated nodes appended for ids not already present.
  SocialGraph with_nodes(std::span<const ExternalId> ids) const;

  /// Copy with node `i` moved to position `new_index[i]`. External ids follow
  /// their nodes.
  SocialGraph permuted(std::span<const NodeIndex> new_index) const;

  std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
  std::span<const NodeIndex> column_indices() const noexcept { return peers_; }

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeIndex> peers_;
  std::vector<ExternalId> ids_;
  std::unordered_map<ExternalId, NodeIndex> index_;
};

enum class GraphFormat { EdgeList, Gml };

/// Reads an edge list (two integer ids per line, `#` comments) or the
/// `node [ id N ]` / `edge [ source A target B ]` subset of GML.
SocialGraph load_graph(const std::filesystem::path& path, GraphFormat format);

/// Writes the graph as an edge list using external ids; isolated nodes are
/// listed as comment lines (`# node ID`) so that a reload keeps them.
void save_edge_list(const SocialGraph& g, const std::filesystem::path& path);

struct DegreeSequence {
  std::vector<std::size_t> degrees;
};

/// Uniform stub matching; self-loops and multi-edges produced by the matching
/// are discarded, so realized degrees never exceed the requested ones.
SocialGraph configuration_model(const DegreeSequence& degrees, std::uint64_t seed);

/// Holme-Kim growth with triad formation (same procedure as NetworkX
/// `powerlaw_cluster_graph`): each new node attaches `m` edges by
/// preferential attachment; after each attachment, with probability `p` the
/// next edge closes a triangle instead.
SocialGraph powerlaw_cluster_graph(std::size_t n, std::size_t m, double p, std::uint64_t seed);

/// a_i = number of peers j of i with active[j] set; one sparse mat-vec.
std::vector<std::uint32_t> active_peer_counts(const SocialGraph& g,
                                              std::span<const std::uint8_t> active);

}  // namespace cascadex
