#include <gtest/gtest.h>

#include <cmath>

#include "escape/error.hpp"
#include "escape/martingale.hpp"
#include "escape/spectral.hpp"
#include "oracles/oracles.hpp"

using namespace escape;

namespace {

MartingaleParams small(std::size_t n) {
  MartingaleParams p;
  p.n_samples = n;
  p.seed = 5;
  return p;
}

}  // namespace

TEST(Martingale, FamilyNames) {
  EXPECT_EQ(parse_martingale_family("srw"), MartingaleFamily::srw);
  EXPECT_EQ(parse_martingale_family("srw_on_integers"), MartingaleFamily::srw);
  EXPECT_EQ(parse_martingale_family("lazy_srw"), MartingaleFamily::lazy);
  EXPECT_EQ(parse_martingale_family("embedded"), MartingaleFamily::embedded);
  EXPECT_EQ(to_string(MartingaleFamily::lazy), "lazy");
  try {
    parse_martingale_family("brownian");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::config);
  }
}

TEST(Martingale, StepBoundsAndConditionalVariance) {
  EXPECT_DOUBLE_EQ(MartingaleSpec::srw().step_bound(), 1.0);
  const auto lazy = MartingaleSpec::lazy(0.75);
  EXPECT_DOUBLE_EQ(lazy.step_bound(), 2.0);
  EXPECT_LE(conditional_second_moment_error(lazy), 1e-14);
  EXPECT_LE(conditional_second_moment_error(MartingaleSpec::srw()), 1e-14);
  EXPECT_THROW(MartingaleSpec::lazy(1.0).validate(), Error);
  MartingaleSpec broken;
  broken.family = MartingaleFamily::embedded;
  EXPECT_THROW(broken.validate(), Error);

  const Graph g = build_graph({Torus{6, 2}, 0});
  const Kernel k = srw_kernel(g);
  const auto sp = second_eigenpair(k);
  const auto e = embed(g, k, sp.psi);
  const auto emb = MartingaleSpec::embedded(g, k, e);
  EXPECT_EQ(emb.dimension(), 36u);
  EXPECT_LE(conditional_second_moment_error(emb), 1e-10);
  EXPECT_GE(emb.step_bound(), 1.0);
}

TEST(Martingale, SrwMoments) {
  const auto s = simulate_martingale(MartingaleSpec::srw(), 100, 20000, 3);
  for (std::size_t t : {1, 10, 100}) {
    EXPECT_NEAR(s.mean_sq_increment[t], static_cast<double>(t), 4.0 * s.se_sq_increment[t]);
  }
  EXPECT_EQ(s.mean_sq_increment[1], 1.0);
  EXPECT_NEAR(s.mean_increment[100], oracle::mean_abs_srw(100), 4.0 * s.se_increment[100]);
}

TEST(Martingale, LazyAndEmbeddedHaveUnitVarianceIncrements) {
  const auto lazy = simulate_martingale(MartingaleSpec::lazy(0.5), 50, 20000, 3);
  EXPECT_NEAR(lazy.mean_sq_increment[50], 50.0, 4.0 * lazy.se_sq_increment[50]);

  const Graph g = build_graph({Cycle{32}, 0});
  const Kernel k = srw_kernel(g);
  const auto e = embed(g, k, second_eigenpair(k).psi);
  const auto s = simulate_martingale(MartingaleSpec::embedded(g, k, e), 20, 20000, 3);
  EXPECT_NEAR(s.mean_sq_increment[1], 1.0, 1e-9);
  // ||Psi(X_t) - Psi(X_0)||^2 is below t and close to it for small t.
  EXPECT_LE(s.mean_sq_increment[20], 20.0 + 4.0 * s.se_sq_increment[20]);
  EXPECT_GE(s.mean_sq_increment[20], 15.0);
}

TEST(Martingale, IndependentOfThreadCount) {
  const auto a = simulate_martingale(MartingaleSpec::lazy(0.3), 30, 1000, 9, 1);
  const auto b = simulate_martingale(MartingaleSpec::lazy(0.3), 30, 1000, 9, 3);
  EXPECT_TRUE(a == b);
  const auto p = small(600);
  const auto c1 = verify_martingale_lemmas(MartingaleSpec::srw(), p);
  const auto c2 = verify_martingale_lemmas(MartingaleSpec::srw(), p);
  ASSERT_EQ(c1.size(), 4u);
  for (std::size_t i = 0; i < c1.size(); ++i) {
    ASSERT_EQ(c1[i].items.size(), c2[i].items.size());
    for (std::size_t j = 0; j < c1[i].items.size(); ++j) {
      EXPECT_EQ(c1[i].items[j].measured, c2[i].items[j].measured);
    }
  }
}

TEST(Lemmas, SrwHittingTimeMatchesExitOracle) {
  auto p = small(20000);
  const auto c = check_mghit(MartingaleSpec::srw(), p);
  EXPECT_EQ(c.verdict, Verdict::pass);
  ASSERT_EQ(c.items.size(), 4u);
  // Items come in (>= R^2, <= (R+B)^2) pairs; ci is 3 standard errors.
  EXPECT_NEAR(c.items[0].measured, oracle::exit_time_srw(5), 4.0 / 3.0 * c.items[0].ci);
  EXPECT_NEAR(c.items[2].measured, oracle::exit_time_srw(10), 4.0 / 3.0 * c.items[2].ci);
}

TEST(Lemmas, SrwL1AndYuval) {
  auto p = small(20000);
  const auto l1 = check_l1mg(MartingaleSpec::srw(), p);
  EXPECT_EQ(l1.verdict, Verdict::pass);
  EXPECT_NEAR(l1.items[0].measured, oracle::mean_abs_srw(100), 4.0 / 3.0 * l1.items[0].ci);
  EXPECT_DOUBLE_EQ(l1.items[0].bound, std::sqrt(99.0 / 8.0));

  const auto y = check_yuval(MartingaleSpec::srw(), p);
  EXPECT_EQ(y.verdict, Verdict::pass);
  EXPECT_NEAR(y.items[0].measured, oracle::ruin_up(5, 10, 15), 4.0 / 3.0 * y.items[0].ci);
  EXPECT_DOUBLE_EQ(y.items[0].bound, 5.0 / 11.0);
}

TEST(Lemmas, SrwOccupation) {
  auto p = small(3000);
  const auto c = check_mgocc(MartingaleSpec::srw(), p);
  EXPECT_EQ(c.verdict, Verdict::pass);
  ASSERT_EQ(c.items.size(), 3u);
  const std::size_t radii[] = {5, 10, 20};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(c.items[i].measured, oracle::occupation_on_z(10000, radii[i]),
                4.0 / 3.0 * c.items[i].ci);
  }
  EXPECT_NE(c.note.find("fraction/eps"), std::string::npos);
}

TEST(Lemmas, CensoringAndSmallRadiusAreInconclusive) {
  auto p = small(500);
  p.hit_radii = {10.0};
  p.hit_horizon = 20;
  EXPECT_EQ(check_mghit(MartingaleSpec::srw(), p).verdict, Verdict::inconclusive);
  p.occ_horizon = 100;
  p.occ_epsilons = {0.05};  // radius 0.5 < B
  EXPECT_EQ(check_mgocc(MartingaleSpec::srw(), p).verdict, Verdict::inconclusive);
  p.yuval_r_prime = 6.0;
  EXPECT_THROW(check_yuval(MartingaleSpec::srw(), p), Error);
}

TEST(Lemmas, EmbeddedSuitePasses) {
  const Graph g = build_graph({Cycle{64}, 0});
  const Kernel k = srw_kernel(g);
  const auto e = embed(g, k, second_eigenpair(k).psi);
  auto p = small(2000);
  p.occ_horizon = 400;
  p.occ_epsilons = {0.2, 0.4};
  p.hit_radii = {3.0};
  p.yuval_offset = 4.0;
  p.yuval_r = 2.0;
  p.yuval_r_prime = 2.0;
  const auto checks = verify_martingale_lemmas(MartingaleSpec::embedded(g, k, e), p);
  for (const auto& c : checks) EXPECT_NE(c.verdict, Verdict::fail) << c.name;
}
