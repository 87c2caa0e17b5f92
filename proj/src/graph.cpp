#include "escape/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <sstream>

#include "escape/error.hpp"

namespace escape {
namespace {

constexpr std::size_t kMaxVertices = std::size_t{1} << 31;

std::size_t checked_pow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > kMaxVertices / base) {
      throw Error(Errc::size_limit, "group order exceeds 2^31 elements");
    }
    out *= base;
  }
  return out;
}

// Z_base^dim in mixed radix. Covers cycle, torus, hypercube and complete.
class ProductCyclic final : public Group {
 public:
  ProductCyclic(std::size_t base, std::size_t dim)
      : base_(base), dim_(dim), order_(checked_pow(base, dim)) {}

  std::size_t order() const override { return order_; }
  std::size_t identity() const override { return 0; }

  std::size_t multiply(std::size_t a, std::size_t b) const override {
    if (dim_ == 1) return (a + b) % base_;
    std::size_t out = 0, scale = 1;
    for (std::size_t i = 0; i < dim_; ++i) {
      out += ((a % base_ + b % base_) % base_) * scale;
      a /= base_;
      b /= base_;
      scale *= base_;
    }
    return out;
  }

  std::size_t inverse(std::size_t a) const override {
    std::size_t out = 0, scale = 1;
    for (std::size_t i = 0; i < dim_; ++i) {
      out += ((base_ - a % base_) % base_) * scale;
      a /= base_;
      scale *= base_;
    }
    return out;
  }

  std::string label(std::size_t a) const override {
    if (dim_ == 1) return std::to_string(a);
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < dim_; ++i) {
      if (i) os << ',';
      os << a % base_;
      a /= base_;
    }
    os << ')';
    return os.str();
  }

  std::size_t unit(std::size_t axis) const { return checked_pow(base_, axis); }

 private:
  std::size_t base_;
  std::size_t dim_;
  std::size_t order_;
};

class DihedralGroup final : public Group {
 public:
  explicit DihedralGroup(std::size_t n) : n_(n) {}

  std::size_t order() const override { return 2 * n_; }
  std::size_t identity() const override { return 0; }

  // (a, f)(b, g) = (a + (-1)^f b, f xor g)
  std::size_t multiply(std::size_t x, std::size_t y) const override {
    const std::size_t a = x % n_, f = x / n_;
    const std::size_t b = y % n_, g = y / n_;
    const std::size_t rot = f ? (a + n_ - b) % n_ : (a + b) % n_;
    return rot + n_ * (f ^ g);
  }

  std::size_t inverse(std::size_t x) const override {
    const std::size_t a = x % n_, f = x / n_;
    return f ? x : (n_ - a) % n_;
  }

  std::string label(std::size_t x) const override {
    return "r^" + std::to_string(x % n_) + (x / n_ ? " s" : "");
  }

 private:
  std::size_t n_;
};

class LamplighterGroup final : public Group {
 public:
  explicit LamplighterGroup(std::size_t n) : n_(n), mask_((std::size_t{1} << n) - 1) {}

  std::size_t order() const override { return n_ << n_; }
  std::size_t identity() const override { return 0; }

  // (L1, p1)(L2, p2) = (L1 xor rot(L2, p1), p1 + p2)
  std::size_t multiply(std::size_t x, std::size_t y) const override {
    const std::size_t p1 = x % n_, l1 = x / n_;
    const std::size_t p2 = y % n_, l2 = y / n_;
    return (p1 + p2) % n_ + n_ * (l1 ^ rotate(l2, p1));
  }

  std::size_t inverse(std::size_t x) const override {
    const std::size_t p = x % n_, l = x / n_;
    const std::size_t back = (n_ - p) % n_;
    return back + n_ * rotate(l, back);
  }

  std::string label(std::size_t x) const override {
    std::string lamps(n_, '0');
    for (std::size_t i = 0; i < n_; ++i) {
      if ((x / n_ >> i) & 1) lamps[i] = '1';
    }
    return "(" + lamps + "," + std::to_string(x % n_) + ")";
  }

 private:
  std::size_t rotate(std::size_t lamps, std::size_t by) const {
    if (by == 0) return lamps;
    return ((lamps << by) | (lamps >> (n_ - by))) & mask_;
  }

  std::size_t n_;
  std::size_t mask_;
};

class TableGroup final : public Group {
 public:
  explicit TableGroup(std::vector<std::vector<std::uint32_t>> table) : table_(std::move(table)) {
    const std::size_t m = table_.size();
    if (m < 2) throw Error(Errc::invalid_argument, "cayley table needs at least 2 elements");
    for (const auto& row : table_) {
      if (row.size() != m) throw Error(Errc::invalid_argument, "cayley table is not square");
      std::vector<bool> seen(m, false);
      for (auto v : row) {
        if (v >= m || seen[v]) {
          throw Error(Errc::invalid_argument, "cayley table row is not a permutation");
        }
        seen[v] = true;
      }
    }
    identity_ = m;
    for (std::size_t e = 0; e < m && identity_ == m; ++e) {
      bool ok = true;
      for (std::size_t x = 0; x < m && ok; ++x) {
        ok = table_[e][x] == x && table_[x][e] == x;
      }
      if (ok) identity_ = e;
    }
    if (identity_ == m) throw Error(Errc::invalid_argument, "cayley table has no identity element");
    inverse_.assign(m, m);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        if (table_[a][b] == identity_) inverse_[a] = b;
      }
      if (table_[inverse_[a]][a] != identity_) {
        throw Error(Errc::invalid_argument, "cayley table element " + std::to_string(a) +
                                                " has no two-sided inverse");
      }
    }
  }

  std::size_t order() const override { return table_.size(); }
  std::size_t identity() const override { return identity_; }
  std::size_t multiply(std::size_t a, std::size_t b) const override { return table_[a][b]; }
  std::size_t inverse(std::size_t a) const override { return inverse_[a]; }

 private:
  std::vector<std::vector<std::uint32_t>> table_;
  std::vector<std::size_t> inverse_;
  std::size_t identity_ = 0;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::invalid_argument, what);
}

struct GroupAndGenerators {
  std::shared_ptr<const Group> group;
  std::vector<std::size_t> generators;
};

GroupAndGenerators make_group(const Family& family) {
  GroupAndGenerators out;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Cycle>) {
          require(f.n >= 2, "cycle(n) requires n >= 2");
          out.group = std::make_shared<ProductCyclic>(f.n, 1);
          out.generators = {1, f.n - 1};
        } else if constexpr (std::is_same_v<T, Torus>) {
          require(f.n >= 2 && f.dim >= 1, "torus(n, dim) requires n >= 2 and dim >= 1");
          auto g = std::make_shared<ProductCyclic>(f.n, f.dim);
          for (std::size_t i = 0; i < f.dim; ++i) {
            out.generators.push_back(g->unit(i));
            out.generators.push_back(g->inverse(g->unit(i)));
          }
          out.group = std::move(g);
        } else if constexpr (std::is_same_v<T, Hypercube>) {
          require(f.k >= 1 && f.k <= 30, "hypercube(k) requires 1 <= k <= 30");
          auto g = std::make_shared<ProductCyclic>(2, f.k);
          for (std::size_t i = 0; i < f.k; ++i) out.generators.push_back(g->unit(i));
          out.group = std::move(g);
        } else if constexpr (std::is_same_v<T, Complete>) {
          require(f.n >= 2, "complete(n) requires n >= 2");
          out.group = std::make_shared<ProductCyclic>(f.n, 1);
          for (std::size_t s = 1; s < f.n; ++s) out.generators.push_back(s);
        } else if constexpr (std::is_same_v<T, Dihedral>) {
          require(f.n >= 2, "dihedral(n) requires n >= 2");
          out.group = std::make_shared<DihedralGroup>(f.n);
          out.generators = {1, f.n - 1, f.n};
        } else if constexpr (std::is_same_v<T, Lamplighter>) {
          require(f.n >= 2 && f.n <= 24, "lamplighter(n) requires 2 <= n <= 24");
          out.group = std::make_shared<LamplighterGroup>(f.n);
          out.generators = {1, f.n - 1, f.n};
        } else {
          auto g = std::make_shared<TableGroup>(f.table);
          for (auto s : f.generators) {
            require(s < g->order(), "cayley generator " + std::to_string(s) + " out of range");
            out.generators.push_back(s);
          }
          require(!out.generators.empty(), "cayley generator set is empty");
          // Left translation is a graph automorphism iff (a b) s = a (b s).
          const std::size_t m = g->order();
          for (auto s : out.generators) {
            for (std::size_t a = 0; a < m; ++a) {
              for (std::size_t b = 0; b < m; ++b) {
                require(g->multiply(g->multiply(a, b), s) == g->multiply(a, g->multiply(b, s)),
                        "cayley table is not associative on generator " + std::to_string(s));
              }
            }
          }
          out.group = std::move(g);
        }
      },
      family);
  return out;
}

void check_symmetric_generators(const Group& group, const std::vector<std::size_t>& gens) {
  std::map<std::size_t, std::size_t> count;
  for (auto s : gens) ++count[s];
  for (const auto& [s, c] : count) {
    const auto inv = group.inverse(s);
    auto it = count.find(inv);
    if (it == count.end() || it->second != c) {
      throw Error(Errc::invalid_argument, "generator set is not closed under inverses: " +
                                              group.label(s) + " lacks a matching inverse");
    }
  }
}

}  // namespace

std::string Group::label(std::size_t a) const { return std::to_string(a); }

std::string family_name(const Family& family) {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Cycle>) return "cycle";
        if constexpr (std::is_same_v<T, Torus>) return "torus";
        if constexpr (std::is_same_v<T, Hypercube>) return "hypercube";
        if constexpr (std::is_same_v<T, Complete>) return "complete";
        if constexpr (std::is_same_v<T, Dihedral>) return "dihedral";
        if constexpr (std::is_same_v<T, Lamplighter>) return "lamplighter";
        return "cayley";
      },
      family);
}

std::string describe(const GraphSpec& spec) {
  std::string out = family_name(spec.family);
  out += std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Torus>) {
          return "(" + std::to_string(f.n) + "," + std::to_string(f.dim) + ")";
        } else if constexpr (std::is_same_v<T, Hypercube>) {
          return "(" + std::to_string(f.k) + ")";
        } else if constexpr (std::is_same_v<T, CayleyTable>) {
          return "(order " + std::to_string(f.table.size()) + ")";
        } else {
          return "(" + std::to_string(f.n) + ")";
        }
      },
      spec.family);
  if (spec.self_loops) out += "+" + std::to_string(spec.self_loops) + " loops";
  return out;
}

Graph build_graph(const GraphSpec& spec) {
  auto [group, gens] = make_group(spec.family);
  check_symmetric_generators(*group, gens);

  const std::size_t n = group->order();
  const std::size_t degree = gens.size() + spec.self_loops;

  Graph g;
  g.n_ = n;
  g.degree_ = degree;
  g.self_loops_ = spec.self_loops;
  g.spec_ = spec;
  g.adjacency_.resize(n * degree);
  for (std::size_t x = 0; x < n; ++x) {
    Vertex* slot = g.adjacency_.data() + x * degree;
    for (auto s : gens) *slot++ = static_cast<Vertex>(group->multiply(x, s));
    for (std::size_t l = 0; l < spec.self_loops; ++l) *slot++ = static_cast<Vertex>(x);
  }
  g.group_ = std::move(group);

  // The generated subgroup is everything reached from the identity.
  const auto field = bfs_distances(g, static_cast<Vertex>(g.group_->identity()));
  for (std::size_t x = 0; x < n; ++x) {
    if (field.dist[x] == std::numeric_limits<std::uint32_t>::max()) {
      throw Error(Errc::non_generating,
                  "generator set does not generate the group: element " + g.group_->label(x) +
                      " is unreached from the identity");
    }
  }
  return g;
}

Graph Graph::from_neighbor_lists(const std::vector<std::vector<Vertex>>& lists) {
  require(lists.size() >= 2, "graph needs at least 2 vertices");
  const std::size_t n = lists.size();
  const std::size_t degree = lists.front().size();
  require(degree >= 1, "graph degree must be positive");

  Graph g;
  g.n_ = n;
  g.degree_ = degree;
  g.adjacency_.reserve(n * degree);
  std::map<std::pair<Vertex, Vertex>, long> balance;
  std::size_t loops0 = 0;
  for (std::size_t x = 0; x < n; ++x) {
    require(lists[x].size() == degree, "graph is not regular at vertex " + std::to_string(x));
    std::size_t loops = 0;
    for (auto y : lists[x]) {
      require(y < n, "neighbour id out of range");
      g.adjacency_.push_back(y);
      if (y == x) {
        ++loops;
        continue;
      }
      const auto v = static_cast<Vertex>(x);
      balance[{std::min(v, y), std::max(v, y)}] += (v < y) ? 1 : -1;
    }
    if (x == 0) loops0 = loops;
  }
  for (const auto& [edge, b] : balance) {
    require(b == 0, "adjacency is not symmetric on edge {" + std::to_string(edge.first) + "," +
                        std::to_string(edge.second) + "}");
  }
  g.self_loops_ = loops0;
  const auto field = bfs_distances(g, 0);
  for (std::size_t x = 0; x < n; ++x) {
    if (field.dist[x] == std::numeric_limits<std::uint32_t>::max()) {
      throw Error(Errc::disconnected, "graph is disconnected: vertex " + std::to_string(x) +
                                          " is unreachable from vertex 0");
    }
  }
  return g;
}

std::uint32_t DistanceField::eccentricity() const {
  return dist.empty() ? 0 : *std::max_element(dist.begin(), dist.end());
}

DistanceField bfs_distances(const Graph& graph, Vertex source) {
  if (source >= graph.size()) {
    throw Error(Errc::invalid_argument, "bfs source " + std::to_string(source) + " out of range");
  }
  constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
  DistanceField field{source, std::vector<std::uint32_t>(graph.size(), unset)};
  std::vector<Vertex> queue;
  queue.reserve(graph.size());
  field.dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex x = queue[head];
    for (Vertex y : graph.neighbors(x)) {
      if (field.dist[y] == unset) {
        field.dist[y] = field.dist[x] + 1;
        queue.push_back(y);
      }
    }
  }
  return field;
}

Vertex translation_action(const Graph& graph, Vertex g, Vertex x) {
  const Group* group = graph.group();
  if (!group) throw Error(Errc::unsupported, "graph has no group structure to act by");
  if (g >= group->order() || x >= graph.size()) {
    throw Error(Errc::invalid_argument, "translation_action argument out of range");
  }
  return static_cast<Vertex>(group->multiply(g, x));
}

}  // namespace escape
