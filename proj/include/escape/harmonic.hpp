#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "escape/checks.hpp"
#include "escape/graph.hpp"
#include "escape/kernel.hpp"

namespace escape {

/// Largest n * m accepted by `embed`.
inline constexpr std::size_t kEmbeddingEntryLimit = 100'000'000;

/// Psi(x)[g] = psi(g.x) / norm_const, stored row-major as an n x m matrix
/// (m = group order = n for Cayley graphs). The convention g.x rather than
/// g^-1.x only permutes columns, so every norm is unchanged.
struct Embedding {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> matrix;
  double norm_const = 0.0;  // sqrt(2 <psi,(I-P)psi>)
  std::vector<double> source_psi;

  std::span<const double> row(Vertex x) const {
    return {matrix.data() + static_cast<std::size_t>(x) * m, m};
  }
  double at(Vertex x, std::size_t g) const { return matrix[static_cast<std::size_t>(x) * m + g]; }
};

Embedding embed(const Graph& graph, const Kernel& kernel, std::span<const double> psi);

/// ||Psi(x) - Psi(y)||^2
double embedded_sq_distance(const Embedding& emb, Vertex x, Vertex y);

struct DefectReport {
  std::vector<double> local_energy;  // sum_y P(x,y) ||Psi(x) - Psi(y)||^2
  double defect = 0.0;               // ||Psi(0) - sum_y P(0,y) Psi(y)||^2
  std::vector<Vertex> sampled_vertices;
  std::vector<double> sampled_defects;
  double lipschitz = 0.0;  // max over edges of ||Psi(x) - Psi(y)||

  /// Largest |local_energy[x] - 1|.
  double energy_deviation() const;
  /// Largest relative deviation of a sampled defect from `defect`.
  double defect_spread() const;
};

DefectReport defect_report(const Graph& graph, const Kernel& kernel, const Embedding& emb,
                           std::uint64_t seed = 0x0def'ec75'eed0'0001ULL);

/// ||Psi(x) - sum_y P(x,y) Psi(y)||^2 at one vertex.
double harmonic_defect_at(const Kernel& kernel, const Embedding& emb, Vertex x);

/// One line per vertex: id followed by the m coordinates.
void write_embedding_csv(std::ostream& out, const Embedding& emb);

/// Checks for the walk image Psi(X_t):
///  - the kernel-weighted neighbour average equals the slot average of the
///    graph at every vertex (the conditional mean, evaluated exhaustively);
///  - with `lambda`, sum_y P(x,y) Psi(y) = lambda Psi(x) within 1e-9 relative;
///  - for the sampled endpoints of t-step walks from x0, the mean of
///    ||Psi(X_t) - Psi(X_0)||^2 matches the exact <psi,(I-P^t)psi>/<psi,(I-P)psi>
///    and lies in [t (1 - R t / 2), t].
NamedCheck embedded_martingale_check(const Graph& graph, const Kernel& kernel,
                                     const Embedding& emb, Vertex x0,
                                     std::span<const Vertex> endpoints, std::size_t t,
                                     std::optional<double> lambda, double sigmas = 3.0);

}  // namespace escape
