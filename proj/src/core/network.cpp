#include "network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace dsg {

Graph::Graph(std::size_t n, std::vector<Edge> edges, std::optional<std::vector<Point>> positions)
    : n_(n), edges_(std::move(edges)), positions_(std::move(positions)), adjacency_(n) {
  if (n_ == 0) throw Error(ErrorCode::kInvalidArgument, "graph must have at least one node");
  if (positions_ && positions_->size() != n_) {
    throw Error(ErrorCode::kInvalidArgument, "graph positions: expected one point per node");
  }
  for (auto& [i, j] : edges_) {
    if (i >= n_ || j >= n_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "edge {" + std::to_string(i) + "," + std::to_string(j) + "} out of range for n=" +
                      std::to_string(n_));
    }
    if (i == j) throw Error(ErrorCode::kInvalidArgument, "self-loop at node " + std::to_string(i));
    if (i > j) std::swap(i, j);
  }
  std::sort(edges_.begin(), edges_.end());
  const auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate edge {" + std::to_string(dup->first) + "," +
                                                 std::to_string(dup->second) + "}");
  }
  for (const auto& [i, j] : edges_) {
    adjacency_[i].push_back(j);
    adjacency_[j].push_back(i);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) return false;
  const auto& nb = adjacency_[i];
  return std::binary_search(nb.begin(), nb.end(), j);
}

double default_rgg_radius(std::size_t n) {
  const double nn = static_cast<double>(n);
  return std::sqrt(std::log(nn) / nn);
}

Graph generate_rgg(std::size_t n, double radius, std::uint64_t seed, int max_attempts) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "generate_rgg: need n >= 2");
  if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "generate_rgg: radius must be positive");
  if (max_attempts < 1) throw Error(ErrorCode::kInvalidArgument, "generate_rgg: max_attempts must be >= 1");

  const double r2 = radius * radius;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng(seed + static_cast<std::uint64_t>(attempt));
    std::vector<Point> pts(n);
    for (auto& p : pts) {
      p.x = rng.uniform();
      p.y = rng.uniform();
    }
    std::vector<Graph::Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = pts[i].x - pts[j].x;
        const double dy = pts[i].y - pts[j].y;
        if (dx * dx + dy * dy <= r2) edges.emplace_back(i, j);
      }
    Graph g(n, std::move(edges), std::move(pts));
    if (is_connected(g)) return g;
  }
  std::ostringstream msg;
  msg << "generate_rgg: no connected graph for n=" << n << ", radius=" << radius << " after "
      << max_attempts << " attempts";
  throw Error(ErrorCode::kNotConnected, msg.str());
}

bool is_connected(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j : g.neighbors(i)) {
      if (!seen[j]) {
        seen[j] = 1;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  return reached == n;
}

std::vector<std::size_t> degrees(const Graph& g) {
  std::vector<std::size_t> d(g.node_count());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = g.neighbors(i).size();
  return d;
}

Graph path_graph(std::size_t n) {
  std::vector<Graph::Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, std::move(e));
}

Graph ring_graph(std::size_t n) {
  if (n < 3) return path_graph(n);
  std::vector<Graph::Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(e));
}

Graph star_graph(std::size_t n) {
  std::vector<Graph::Edge> e;
  for (std::size_t i = 1; i < n; ++i) e.emplace_back(0, i);
  return Graph(n, std::move(e));
}

Graph complete_graph(std::size_t n) {
  std::vector<Graph::Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << "n " << g.node_count() << '\n';
  for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
  if (g.positions()) {
    out << std::setprecision(17);
    const auto& pts = *g.positions();
    for (std::size_t i = 0; i < pts.size(); ++i)
      out << "pos " << i << ' ' << pts[i].x << ' ' << pts[i].y << '\n';
  }
}

Graph read_edge_list(std::istream& in) {
  std::optional<std::size_t> n;
  std::vector<Graph::Edge> edges;
  std::vector<std::optional<Point>> pos;
  bool any_pos = false;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kParse, "edge list line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "n") {
      std::size_t count = 0;
      if (n || !(ls >> count) || count == 0) fail("expected a single 'n <count>' header");
      n = count;
      pos.assign(count, std::nullopt);
    } else if (!n) {
      fail("'n <count>' must come first");
    } else if (head == "pos") {
      std::size_t i = 0;
      Point p;
      if (!(ls >> i >> p.x >> p.y) || i >= *n) fail("malformed 'pos i x y'");
      pos[i] = p;
      any_pos = true;
    } else {
      std::size_t i = 0, j = 0;
      std::istringstream es(line);
      if (!(es >> i >> j)) fail("expected 'i j'");
      std::string rest;
      if (es >> rest) fail("trailing tokens after edge");
      edges.emplace_back(i, j);
    }
  }
  if (!n) throw Error(ErrorCode::kParse, "edge list: missing 'n <count>' header");
  std::optional<std::vector<Point>> positions;
  if (any_pos) {
    positions.emplace();
    for (std::size_t i = 0; i < *n; ++i) {
      if (!pos[i]) throw Error(ErrorCode::kParse, "edge list: missing position for node " + std::to_string(i));
      positions->push_back(*pos[i]);
    }
  }
  return Graph(*n, std::move(edges), std::move(positions));
}

void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  write_edge_list(g, out);
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return read_edge_list(in);
}

}  // namespace dsg
