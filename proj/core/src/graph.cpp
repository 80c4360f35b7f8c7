#include "cascadex/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cascadex/error.hpp"
#include "cascadex/rng.hpp"

namespace cascadex {

SocialGraph SocialGraph::from_edges(std::size_t n,
                                    std::span<const std::pair<NodeIndex, NodeIndex>> edges,
                                    std::vector<ExternalId> ids) {
  if (!ids.empty() && ids.size() != n) {
    throw std::invalid_argument("from_edges: id map size differs from node count");
  }
  std::vector<std::size_t> degree(n, 0);
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n) throw std::out_of_range("from_edges: endpoint out of range");
    if (a == b) continue;
    ++degree[a];
    ++degree[b];
  }

  SocialGraph g;
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
  std::vector<NodeIndex> scratch(g.offsets_[n]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [a, b] : edges) {
    if (a == b) continue;
    scratch[fill[a]++] = b;
    scratch[fill[b]++] = a;
  }

  // Sort + dedup each row, then compact.
  g.peers_.reserve(scratch.size());
  std::vector<std::size_t> compact(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto first = scratch.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]);
    auto last = scratch.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]);
    std::sort(first, last);
    last = std::unique(first, last);
    g.peers_.insert(g.peers_.end(), first, last);
    compact[i + 1] = g.peers_.size();
  }
  g.offsets_ = std::move(compact);
  g.peers_.shrink_to_fit();

  if (ids.empty()) {
    ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<ExternalId>(i);
  }
  g.ids_ = std::move(ids);
  g.index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!g.index_.emplace(g.ids_[i], static_cast<NodeIndex>(i)).second) {
      throw std::invalid_argument("from_edges: duplicate external id " + std::to_string(g.ids_[i]));
    }
  }
  return g;
}

std::size_t SocialGraph::max_degree() const noexcept {
  std::size_t best = 0;
  for (std::size_t i = 0; i < n_nodes(); ++i) best = std::max(best, degree(static_cast<NodeIndex>(i)));
  return best;
}

bool SocialGraph::has_edge(NodeIndex i, NodeIndex j) const noexcept {
  const auto row = peers(i);
  return std::binary_search(row.begin(), row.end(), j);
}

std::optional<NodeIndex> SocialGraph::index_of(ExternalId id) const {
  if (auto it = index_.find(id); it != index_.end()) return it->second;
  return std::nullopt;
}

SocialGraph SocialGraph::with_nodes(std::span<const ExternalId> ids) const {
  std::vector<ExternalId> all(ids_.begin(), ids_.end());
  std::unordered_map<ExternalId, NodeIndex> seen(index_);
  for (ExternalId id : ids) {
    if (seen.emplace(id, static_cast<NodeIndex>(all.size())).second) all.push_back(id);
  }
  SocialGraph g = *this;
  const std::size_t extra = all.size() - ids_.size();
  g.offsets_.insert(g.offsets_.end(), extra, g.offsets_.back());
  g.ids_ = std::move(all);
  g.index_ = std::move(seen);
  return g;
}

SocialGraph SocialGraph::permuted(std::span<const NodeIndex> new_index) const {
  const std::size_t n = n_nodes();
  if (new_index.size() != n) throw std::invalid_argument("permuted: permutation size mismatch");
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  edges.reserve(n_edges());
  std::vector<ExternalId> ids(n);
  std::vector<std::uint8_t> hit(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeIndex ni = new_index[i];
    if (ni >= n || hit[ni]) throw std::invalid_argument("permuted: not a permutation");
    hit[ni] = 1;
    ids[ni] = ids_[i];
    for (NodeIndex j : peers(static_cast<NodeIndex>(i))) {
      if (j > i) edges.emplace_back(ni, new_index[j]);
    }
  }
  return from_edges(n, edges, std::move(ids));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_id(std::string_view tok, ExternalId& out) {
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end && out >= 0;
}

/// Collects edges over external ids and assigns dense indices in order of
/// first appearance.
class EdgeCollector {
 public:
  NodeIndex node(ExternalId id) {
    auto [it, fresh] = index_.emplace(id, static_cast<NodeIndex>(ids_.size()));
    if (fresh) ids_.push_back(id);
    return it->second;
  }
  void edge(ExternalId a, ExternalId b) {
    const NodeIndex ia = node(a);
    const NodeIndex ib = node(b);
    edges_.emplace_back(ia, ib);
  }
  SocialGraph build() && {
    const std::size_t n = ids_.size();
    return SocialGraph::from_edges(n, edges_, std::move(ids_));
  }

 private:
  std::unordered_map<ExternalId, NodeIndex> index_;
  std::vector<ExternalId> ids_;
  std::vector<std::pair<NodeIndex, NodeIndex>> edges_;
};

SocialGraph load_edge_list_stream(std::istream& in, const std::string& source) {
  EdgeCollector collector;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      // "# node ID" declares an isolated node; any other comment is skipped.
      std::istringstream comment{std::string(body.substr(1))};
      std::string key, tok;
      ExternalId id = 0;
      if (comment >> key >> tok && key == "node" && parse_id(tok, id)) collector.node(id);
      continue;
    }
    std::istringstream tokens{std::string(body)};
    std::vector<std::string> parts;
    for (std::string tok; tokens >> tok;) parts.push_back(tok);
    if (parts.size() != 2) {
      throw ParseError(source, line_no,
                       "expected 2 node ids, found " + std::to_string(parts.size()) + " tokens");
    }
    ExternalId a = 0, b = 0;
    if (!parse_id(parts[0], a) || !parse_id(parts[1], b)) {
      throw ParseError(source, line_no, "node ids must be non-negative integers");
    }
    collector.edge(a, b);
  }
  return std::move(collector).build();
}

// Tokenizer for the GML subset: brackets, bare keys and values.
struct GmlToken {
  std::string text;
  std::size_t line;
};

std::vector<GmlToken> tokenize_gml(std::istream& in) {
  std::vector<GmlToken> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t i = 0;
    while (i < line.size()) {
      const char ch = line[i];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++i;
      } else if (ch == '#') {
        break;
      } else if (ch == '[' || ch == ']') {
        out.push_back({std::string(1, ch), line_no});
        ++i;
      } else if (ch == '"') {
        const auto close = line.find('"', i + 1);
        const auto stop = close == std::string::npos ? line.size() : close + 1;
        out.push_back({line.substr(i, stop - i), line_no});
        i = stop;
      } else {
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
               line[j] != '[' && line[j] != ']') {
          ++j;
        }
        out.push_back({line.substr(i, j - i), line_no});
        i = j;
      }
    }
  }
  return out;
}

SocialGraph load_gml_stream(std::istream& in, const std::string& source) {
  const auto tokens = tokenize_gml(in);
  EdgeCollector collector;
  std::vector<std::pair<ExternalId, ExternalId>> edges;

  // Reads one `key [ ... ]` record starting after the opening bracket;
  // returns the integer-valued keys found at depth one.
  auto read_record = [&](std::size_t& pos, std::size_t open_line) {
    std::unordered_map<std::string, ExternalId> values;
    int depth = 1;
    while (pos < tokens.size()) {
      const auto& tok = tokens[pos++];
      if (tok.text == "[") {
        ++depth;
      } else if (tok.text == "]") {
        if (--depth == 0) return values;
      } else if (depth == 1 && pos < tokens.size() && tokens[pos].text != "[" &&
                 tokens[pos].text != "]") {
        const auto& val = tokens[pos++];
        ExternalId v = 0;
        if (tok.text == "id" || tok.text == "source" || tok.text == "target") {
          if (!parse_id(val.text, v)) {
            throw ParseError(source, val.line, "'" + tok.text + "' must be a non-negative integer");
          }
          values[tok.text] = v;
        }
      }
    }
    throw ParseError(source, open_line, "unterminated record");
  };

  std::size_t pos = 0;
  while (pos < tokens.size()) {
    const auto& tok = tokens[pos++];
    if ((tok.text == "node" || tok.text == "edge") && pos < tokens.size() &&
        tokens[pos].text == "[") {
      ++pos;
      const auto values = read_record(pos, tok.line);
      if (tok.text == "node") {
        auto it = values.find("id");
        if (it == values.end()) throw ParseError(source, tok.line, "node record without id");
        collector.node(it->second);
      } else {
        auto s = values.find("source");
        auto t = values.find("target");
        if (s == values.end() || t == values.end()) {
          throw ParseError(source, tok.line, "edge record needs source and target");
        }
        edges.emplace_back(s->second, t->second);
      }
    }
  }
  for (const auto& [a, b] : edges) collector.edge(a, b);
  return std::move(collector).build();
}

}  // namespace

SocialGraph load_graph(const std::filesystem::path& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file " + path.string());
  return format == GraphFormat::Gml ? load_gml_stream(in, path.string())
                                    : load_edge_list_stream(in, path.string());
}

void save_edge_list(const SocialGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# undirected edge list, " << g.n_nodes() << " nodes, " << g.n_edges() << " edges\n";
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    const auto ni = static_cast<NodeIndex>(i);
    if (g.degree(ni) == 0) out << "# node " << g.external_id(ni) << '\n';
  }
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    const auto ni = static_cast<NodeIndex>(i);
    for (NodeIndex j : g.peers(ni)) {
      if (j > ni) out << g.external_id(ni) << ' ' << g.external_id(j) << '\n';
    }
  }
}

SocialGraph configuration_model(const DegreeSequence& seq, std::uint64_t seed) {
  std::size_t total = 0;
  for (std::size_t d : seq.degrees) total += d;
  if (total % 2 != 0) throw std::invalid_argument("configuration_model: degree sum is odd");

  std::vector<NodeIndex> stubs;
  stubs.reserve(total);
  for (std::size_t i = 0; i < seq.degrees.size(); ++i) {
    stubs.insert(stubs.end(), seq.degrees[i], static_cast<NodeIndex>(i));
  }
  RandomStream rng(seed, 0x434d);
  for (std::size_t i = stubs.size(); i > 1; --i) {
    std::swap(stubs[i - 1], stubs[rng.next_below(i)]);
  }
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  edges.reserve(total / 2);
  for (std::size_t k = 0; k + 1 < stubs.size(); k += 2) edges.emplace_back(stubs[k], stubs[k + 1]);
  return SocialGraph::from_edges(seq.degrees.size(), edges);
}

SocialGraph powerlaw_cluster_graph(std::size_t n, std::size_t m, double p, std::uint64_t seed) {
  if (m < 1 || n <= m) throw std::invalid_argument("powerlaw_cluster_graph: need n > m >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("powerlaw_cluster_graph: p outside [0, 1]");

  RandomStream rng(seed, 0x484b);
  std::vector<std::vector<NodeIndex>> adj(n);
  auto connected = [&](NodeIndex a, NodeIndex b) {
    const auto& row = adj[a];
    return std::find(row.begin(), row.end(), b) != row.end();
  };
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
  auto add_edge = [&](NodeIndex a, NodeIndex b) {
    if (a == b || connected(a, b)) return;
    adj[a].push_back(b);
    adj[b].push_back(a);
    edges.emplace_back(a, b);
  };

  std::vector<NodeIndex> repeated;
  for (std::size_t i = 0; i < m; ++i) repeated.push_back(static_cast<NodeIndex>(i));

  std::vector<NodeIndex> targets;
  std::vector<NodeIndex> neighborhood;
  for (auto source = static_cast<NodeIndex>(m); source < n; ++source) {
    // m distinct targets drawn from the degree-weighted pool.
    targets.clear();
    while (targets.size() < m) {
      const NodeIndex x = repeated[rng.next_below(repeated.size())];
      if (std::find(targets.begin(), targets.end(), x) == targets.end()) targets.push_back(x);
    }
    NodeIndex target = targets.back();
    targets.pop_back();
    add_edge(source, target);
    repeated.push_back(target);
    std::size_t count = 1;
    while (count < m) {
      if (rng.next_uniform() < p) {
        neighborhood.clear();
        for (NodeIndex nbr : adj[target]) {
          if (nbr != source && !connected(source, nbr)) neighborhood.push_back(nbr);
        }
        if (!neighborhood.empty()) {
          const NodeIndex nbr = neighborhood[rng.next_below(neighborhood.size())];
          add_edge(source, nbr);
          repeated.push_back(nbr);
          ++count;
          continue;
        }
      }
      target = targets.back();
      targets.pop_back();
      add_edge(source, target);
      repeated.push_back(target);
      ++count;
    }
    repeated.insert(repeated.end(), m, source);
  }
  return SocialGraph::from_edges(n, edges);
}

std::vector<std::uint32_t> active_peer_counts(const SocialGraph& g,
                                              std::span<const std::uint8_t> active) {
  if (active.size() != g.n_nodes()) {
    throw std::invalid_argument("active_peer_counts: mask length " + std::to_string(active.size()) +
                                " != node count " + std::to_string(g.n_nodes()));
  }
  std::vector<std::uint32_t> counts(g.n_nodes(), 0);
  const auto offsets = g.row_offsets();
  const auto cols = g.column_indices();
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    std::uint32_t a = 0;
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) a += active[cols[k]] != 0;
    counts[i] = a;
  }
  return counts;
}

}  // namespace cascadex
