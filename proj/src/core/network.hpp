#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dsg {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Undirected simple graph on nodes [0, n). Each edge is stored once as
/// (i, j) with i < j; edges are kept sorted.
class Graph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  /// Validates and canonicalizes the edge list. Throws on self-loops,
  /// out-of-range indices, or duplicates (in either orientation).
  Graph(std::size_t n, std::vector<Edge> edges,
        std::optional<std::vector<Point>> positions = std::nullopt);

  std::size_t node_count() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::optional<std::vector<Point>>& positions() const noexcept { return positions_; }

  /// O_i: neighbors of node i, ascending.
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adjacency_.at(i); }
  bool has_edge(std::size_t i, std::size_t j) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::optional<std::vector<Point>> positions_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Connected random geometric graph: n uniform points in the unit square,
/// edges between pairs at distance <= radius. Disconnected draws are redrawn
/// with seed + attempt; throws after `max_attempts` failures.
Graph generate_rgg(std::size_t n, double radius, std::uint64_t seed, int max_attempts = 100);

/// sqrt(ln n / n), the usual connectivity-threshold radius.
double default_rgg_radius(std::size_t n);

bool is_connected(const Graph& g);
std::vector<std::size_t> degrees(const Graph& g);

Graph path_graph(std::size_t n);
Graph ring_graph(std::size_t n);
/// Node 0 is the center.
Graph star_graph(std::size_t n);
Graph complete_graph(std::size_t n);

/// Plain-text edge list:
///   n <count>
///   i j            (one line per edge)
///   pos i x y      (optional, one per node)
/// Blank lines and '#' comments are ignored.
void write_edge_list(const Graph& g, std::ostream& out);
Graph read_edge_list(std::istream& in);
void save_edge_list(const Graph& g, const std::string& path);
Graph load_edge_list(const std::string& path);

}  // namespace dsg
