#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "escape/error.hpp"
#include "escape/spectral.hpp"
#include "oracles/oracles.hpp"

using namespace escape;

namespace {

std::vector<GraphSpec> families_up_to_64() {
  return {{Cycle{6}, 0},      {Cycle{7}, 0},     {Cycle{64}, 0},     {Cycle{10}, 3},
          {Torus{4, 2}, 0},   {Torus{8, 2}, 0},  {Torus{4, 3}, 0},   {Hypercube{3}, 0},
          {Hypercube{6}, 0},  {Complete{4}, 0},  {Complete{9}, 0},   {Dihedral{5}, 0},
          {Dihedral{16}, 0},  {Lamplighter{3}, 0}, {Lamplighter{2}, 1}};
}

void expect_eigenpair(const Kernel& k, const SpectralResult& r, double lambda) {
  EXPECT_NEAR(r.lambda, lambda, 1e-8);
  const auto Ppsi = escape::apply(k, r.psi);
  double res = 0.0, mean = 0.0, nrm = 0.0;
  for (std::size_t i = 0; i < r.psi.size(); ++i) {
    res += (Ppsi[i] - r.lambda * r.psi[i]) * (Ppsi[i] - r.lambda * r.psi[i]);
    mean += r.psi[i];
    nrm += r.psi[i] * r.psi[i];
  }
  EXPECT_LE(std::sqrt(res), 1e-9);
  EXPECT_NEAR(mean, 0.0, 1e-9);
  EXPECT_NEAR(nrm, 1.0, 1e-12);
}

}  // namespace

TEST(Spectral, MatchesDenseOracleOnSmallFamilies) {
  for (const auto& spec : families_up_to_64()) {
    const Graph g = build_graph(spec);
    const Kernel k = srw_kernel(g);
    const double ref = oracle::second_eigenvalue(g);
    for (EigenMethod m : {EigenMethod::power, EigenMethod::lobpcg, EigenMethod::automatic}) {
      SCOPED_TRACE(describe(spec) + " " + std::string(to_string(m)));
      const auto r = second_eigenpair(k, SpectralOptions{1e-10, 1'000'000, m});
      expect_eigenpair(k, r, ref);
    }
  }
}

TEST(Spectral, NamedExamples) {
  const auto lam = [](GraphSpec s) { return second_eigenpair(srw_kernel(build_graph(s))).lambda; };
  EXPECT_NEAR(lam({Cycle{6}, 0}), 0.5, 1e-8);
  EXPECT_NEAR(lam({Hypercube{3}, 0}), 1.0 / 3.0, 1e-8);
  EXPECT_NEAR(lam({Complete{4}, 0}), -1.0 / 3.0, 1e-8);
}

TEST(Spectral, RelaxationTime) {
  const auto r = second_eigenpair(srw_kernel(build_graph({Cycle{6}, 0})));
  EXPECT_NEAR(r.relaxation_time(), 2.0, 1e-7);
}

TEST(Spectral, LargeCycleWithLobpcg) {
  const Graph g = build_graph({Cycle{4096}, 0});
  const Kernel k = srw_kernel(g);
  const auto r = second_eigenpair(k, SpectralOptions{1e-10, 1'000'000, EigenMethod::automatic});
  EXPECT_EQ(r.method, EigenMethod::lobpcg);
  EXPECT_NEAR(r.lambda, std::cos(2.0 * std::numbers::pi / 4096.0), 1e-8);
  EXPECT_LE(r.residual, 1e-10);
}

TEST(Spectral, Deterministic) {
  const Kernel k = srw_kernel(build_graph({Torus{8, 2}, 0}));
  const auto a = second_eigenpair(k);
  const auto b = second_eigenpair(k);
  EXPECT_EQ(a.psi, b.psi);
  EXPECT_EQ(a.lambda, b.lambda);
}

TEST(Spectral, Errors) {
  const Kernel k = srw_kernel(build_graph({Cycle{64}, 0}));
  try {
    second_eigenpair(k, 1e-10, 2);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.code(), Errc::not_converged);
    EXPECT_EQ(e.iterations(), 2);
    EXPECT_GT(e.residual(), 1e-10);
  }
  using Rows = std::vector<std::vector<std::pair<Vertex, double>>>;
  const Kernel one = Kernel::from_rows(Rows{{{0, 1.0}}});
  try {
    second_eigenpair(one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::no_second_eigenvalue);
  }
  EXPECT_EQ(parse_eigen_method("lobpcg"), EigenMethod::lobpcg);
  EXPECT_THROW(parse_eigen_method("qr"), Error);
}
