#include <gtest/gtest.h>

#include <omp.h>

#include <random>

#include "escape/error.hpp"
#include "escape/kernel.hpp"
#include "oracles/oracles.hpp"

using namespace escape;

namespace {

std::vector<double> random_mean_zero(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  double mean = 0.0;
  for (auto& x : v) mean += (x = nd(gen));
  mean /= static_cast<double>(n);
  for (auto& x : v) x -= mean;
  return v;
}

double half_edge_energy(const Graph& g, const std::vector<double>& psi) {
  double s = 0.0;
  const double w = 1.0 / static_cast<double>(g.degree());
  for (Vertex x = 0; x < g.size(); ++x) {
    for (Vertex y : g.neighbors(x)) s += 0.5 * w * (psi[x] - psi[y]) * (psi[x] - psi[y]);
  }
  return s;
}

}  // namespace

TEST(Kernel, RowsAreStochasticAndSymmetric) {
  for (GraphSpec spec : {GraphSpec{Cycle{5}, 0}, GraphSpec{Torus{4, 2}, 1},
                         GraphSpec{Dihedral{4}, 0}, GraphSpec{Cycle{2}, 0}}) {
    const Graph g = build_graph(spec);
    const Kernel k = srw_kernel(g);
    const auto P = oracle::dense_srw(g);
    for (Vertex x = 0; x < g.size(); ++x) {
      double s = 0.0;
      for (double p : k.probs(x)) s += p;
      EXPECT_NEAR(s, 1.0, 1e-15);
      for (Vertex y = 0; y < g.size(); ++y) {
        EXPECT_EQ(k.entry(x, y), k.entry(y, x));
        EXPECT_NEAR(k.entry(x, y), P(x, y), 1e-15);
      }
    }
  }
}

TEST(Kernel, PStar) {
  EXPECT_DOUBLE_EQ(srw_kernel(build_graph({Cycle{6}, 0})).p_star(), 0.5);
  EXPECT_DOUBLE_EQ(srw_kernel(build_graph({Cycle{100}, 6})).p_star(), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(srw_kernel(build_graph({Hypercube{6}, 0})).p_star(), 1.0 / 6.0);
  // Both generators of Z_2 land on the same vertex: a double edge.
  EXPECT_DOUBLE_EQ(srw_kernel(build_graph({Cycle{2}, 0})).p_star(), 1.0);
}

TEST(Kernel, FromRowsValidation) {
  using Rows = std::vector<std::vector<std::pair<Vertex, double>>>;
  EXPECT_NO_THROW(Kernel::from_rows(Rows{{{0, 0.5}, {1, 0.5}}, {{0, 0.5}, {1, 0.5}}}));
  EXPECT_THROW(Kernel::from_rows(Rows{{{0, 0.5}, {1, 0.4}}, {{0, 0.5}, {1, 0.5}}}), Error);
  EXPECT_THROW(Kernel::from_rows(Rows{{{0, 0.7}, {1, 0.3}}, {{0, 0.5}, {1, 0.5}}}), Error);
  EXPECT_THROW(Kernel::from_rows(Rows{{{0, 1.5}, {1, -0.5}}, {{0, -0.5}, {1, 1.5}}}), Error);
}

TEST(Kernel, ApplyMatchesDenseAndSerial) {
  const Graph g = build_graph({Torus{80, 2}, 1});
  const Kernel k = srw_kernel(g);
  const auto v = random_mean_zero(g.size(), 5);
  omp_set_num_threads(4);
  const auto par = escape::apply(k, v);
  const auto ser = apply_serial(k, v);
  ASSERT_EQ(par.size(), ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) ASSERT_EQ(par[i], ser[i]);  // bitwise
  const Graph small = build_graph({Dihedral{7}, 0});
  const Kernel ks = srw_kernel(small);
  const auto w = random_mean_zero(small.size(), 6);
  const Eigen::VectorXd ref = oracle::dense_srw(small) * oracle::to_eigen(w);
  const auto got = escape::apply(ks, w);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], ref(i), 1e-14);
}

TEST(Kernel, DirichletFormExamples) {
  const Graph g = build_graph({Cycle{4}, 0});
  const Kernel k = srw_kernel(g);
  const std::vector<double> psi{1, 0, -1, 0};
  EXPECT_DOUBLE_EQ(dirichlet_form(k, psi), 2.0);
  EXPECT_DOUBLE_EQ(laplacian_norm_sq(k, psi), 2.0);
  EXPECT_DOUBLE_EQ(rayleigh_ratio(k, psi), 1.0);
  const std::vector<double> flat(4, 3.0);
  EXPECT_EQ(dirichlet_form(k, flat), 0.0);
  try {
    rayleigh_ratio(k, flat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_potential);
  }
}

TEST(Kernel, DirichletFormIsHalfEdgeEnergy) {
  for (GraphSpec spec : {GraphSpec{Lamplighter{3}, 0}, GraphSpec{Torus{6, 2}, 2},
                         GraphSpec{Hypercube{5}, 0}}) {
    const Graph g = build_graph(spec);
    const Kernel k = srw_kernel(g);
    const auto psi = random_mean_zero(g.size(), 11);
    const double e = half_edge_energy(g, psi);
    EXPECT_NEAR(dirichlet_form(k, psi), e, 1e-12 * e);
    const auto P = oracle::dense_srw(g);
    const Eigen::VectorXd v = oracle::to_eigen(psi);
    const Eigen::VectorXd lap = v - P * v;
    EXPECT_NEAR(laplacian_norm_sq(k, psi), lap.squaredNorm(), 1e-12 * lap.squaredNorm());
  }
}

TEST(Kernel, QuadraticUnderPowerMatchesDense) {
  const Graph g = build_graph({Torus{5, 2}, 0});
  const Kernel k = srw_kernel(g);
  const auto psi = random_mean_zero(g.size(), 3);
  const auto P = oracle::dense_srw(g);
  std::vector<std::size_t> times{0, 1, 2, 3, 7, 20, 5};
  const auto many = quadratic_under_powers(k, psi, times);
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double ref = oracle::quadratic(P, psi, static_cast<int>(times[j]));
    EXPECT_NEAR(quadratic_under_power(k, psi, times[j]), ref, 1e-12);
    EXPECT_NEAR(many[j], ref, 1e-12);
  }
  EXPECT_EQ(quadratic_under_power(k, psi, 0), 0.0);
  EXPECT_DOUBLE_EQ(quadratic_under_power(k, psi, 1), dirichlet_form(k, psi));
}
