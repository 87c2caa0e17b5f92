#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace escape {

using Vertex = std::uint32_t;

// Graph families. Every family is the Cayley graph of an explicit finite
// group; vertex ids are the canonical encoding of group elements and the
// identity element is vertex 0.

struct Cycle {  // Z_n, generators {+1, -1}
  std::size_t n = 0;
  bool operator==(const Cycle&) const = default;
};
struct Torus {  // Z_n^dim, generators {+e_i, -e_i}; id = sum x_i n^i
  std::size_t n = 0;
  std::size_t dim = 0;
  bool operator==(const Torus&) const = default;
};
struct Hypercube {  // Z_2^k, generators e_i; bit i of the id is coordinate i
  std::size_t k = 0;
  bool operator==(const Hypercube&) const = default;
};
struct Complete {  // Z_n, generators {1, ..., n-1}
  std::size_t n = 0;
  bool operator==(const Complete&) const = default;
};
struct Dihedral {  // D_n = <r, s>, generators {r, r^-1, s}; id = k + n*f for r^k s^f
  std::size_t n = 0;
  bool operator==(const Dihedral&) const = default;
};
struct Lamplighter {  // Z_2 wr Z_n, generators {move +1, move -1, flip lamp at cursor}
  std::size_t n = 0;  // id = cursor + n*lamps
  bool operator==(const Lamplighter&) const = default;
};
struct CayleyTable {  // explicit group by multiplication table
  std::vector<std::vector<std::uint32_t>> table;
  std::vector<std::uint32_t> generators;
  bool operator==(const CayleyTable&) const = default;
};

using Family = std::variant<Cycle, Torus, Hypercube, Complete, Dihedral, Lamplighter, CayleyTable>;

struct GraphSpec {
  Family family;
  std::size_t self_loops = 0;

  bool operator==(const GraphSpec&) const = default;
};

/// "cycle", "torus", ...
std::string family_name(const Family& family);
/// Human-readable description, e.g. "torus(32,2)" or "cycle(100)+6 loops".
std::string describe(const GraphSpec& spec);

/// A finite group whose elements are encoded as 0..order()-1.
class Group {
 public:
  virtual ~Group() = default;

  virtual std::size_t order() const = 0;
  virtual std::size_t identity() const = 0;
  virtual std::size_t multiply(std::size_t a, std::size_t b) const = 0;
  virtual std::size_t inverse(std::size_t a) const = 0;
  virtual std::string label(std::size_t a) const;
};

/// Immutable regular graph in CSR form. Each vertex has exactly `degree()`
/// slots; self-loops occupy slots like any other edge.
class Graph {
 public:
  /// Builds a graph without group structure from explicit neighbour lists.
  /// Validates regularity, symmetry of the edge multiset, and connectivity.
  static Graph from_neighbor_lists(const std::vector<std::vector<Vertex>>& lists);

  std::size_t size() const { return n_; }
  std::size_t degree() const { return degree_; }
  std::size_t self_loops() const { return self_loops_; }

  std::span<const Vertex> neighbors(Vertex x) const {
    return {adjacency_.data() + static_cast<std::size_t>(x) * degree_, degree_};
  }

  const std::optional<GraphSpec>& spec() const { return spec_; }
  const Group* group() const { return group_.get(); }

 private:
  friend Graph build_graph(const GraphSpec& spec);

  std::size_t n_ = 0;
  std::size_t degree_ = 0;
  std::size_t self_loops_ = 0;
  std::vector<Vertex> adjacency_;
  std::optional<GraphSpec> spec_;
  std::shared_ptr<const Group> group_;
};

struct DistanceField {
  Vertex source = 0;
  std::vector<std::uint32_t> dist;

  std::uint32_t eccentricity() const;
};

/// Cayley graph for `spec` with x ~ x*s for every generator s, plus
/// `spec.self_loops` loop slots per vertex.
Graph build_graph(const GraphSpec& spec);

/// Single-source shortest-path distances; loop slots are ignored.
DistanceField bfs_distances(const Graph& graph, Vertex source);

/// Left translation g.x. Requires group structure.
Vertex translation_action(const Graph& graph, Vertex g, Vertex x);

}  // namespace escape
