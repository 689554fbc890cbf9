#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "bragg/cases.hpp"
#include "bragg/dualsets.hpp"

using namespace bragg;

namespace {

constexpr double kPi = std::numbers::pi;

PointSet integers(double half) { return generate_lattice(cases::diag({1.0}), Box::interval(-half, half)); }

// brute membership: max over x of |e^{2 pi i k x} - 1| < eps
bool oracle_member(double k, const std::vector<double>& xs, double eps) {
  double worst = 0;
  for (double x : xs) worst = std::max(worst, std::abs(std::polar(1.0, 2 * kPi * k * x) - 1.0));
  return worst < eps - 1e-12;
}

std::vector<double> coords(const PointSet& ps) {
  std::vector<double> out;
  for (const auto& p : ps.points) out.push_back(p[0]);
  return out;
}

bool subset(const GridRegion& a, const GridRegion& b) {
  for (std::size_t i = 0; i < a.mask.size(); ++i)
    if (a.mask[i] && !b.mask[i]) return false;
  return true;
}

}  // namespace

TEST(EpsDual, OriginGivesEverything) {
  const auto ps = PointSet::from_points(1, {Point{0.0}}, Box::interval(-1, 1));
  const auto g = eps_dual(ps, 0.5, Box::interval(-5, 5), 0.01);
  EXPECT_TRUE(g.full());
  EXPECT_EQ(g.representatives.size(), 1u);
}

TEST(EpsDual, IntegerWindowMatchesOracle) {
  for (int M : {3, 10}) {
    const auto ps = integers(M);
    const auto xs = coords(ps);
    const double eps = 0.5;
    const auto g = eps_dual(ps, eps, Box::interval(-3, 3), 1e-3);
    for (std::size_t i = 0; i < g.node_count(); ++i)
      EXPECT_EQ(g.mask[i] != 0, oracle_member(g.node(i)[0], xs, eps)) << g.node(i)[0];
    // one component per integer, each of half-width asin(eps/2) / (pi M)
    EXPECT_EQ(g.representatives.size(), 7u);
    const double half = std::asin(eps / 2) / (kPi * M);
    for (std::size_t c = 0; c < g.representatives.size(); ++c) {
      // components cut by the domain edge are truncated
      if (std::abs(g.representatives[c][0]) > 2.5) continue;
      EXPECT_NEAR(g.representatives[c][0], std::round(g.representatives[c][0]), 1e-3);
      EXPECT_NEAR(double(g.component_sizes[c]) * 1e-3, 2 * half, 2e-3) << "M=" << M;
    }
  }
}

TEST(EpsDual, ZeroAlwaysInside) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-20, 20), e(0.05, 1.9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point> pts;
    for (int i = 0; i < 15; ++i) pts.push_back(Point{u(rng)});
    const auto ps = PointSet::from_points(1, pts, Box::interval(-20, 20));
    const auto g = eps_dual(ps, e(rng), Box::interval(-2, 2), 1e-3);
    EXPECT_TRUE(g.at(Point{0.0}));
  }
}

TEST(EpsDual, Antitone) {
  const auto ps = generate_fibonacci(Box::interval(-15, 15));
  const Box dom = Box::interval(-4, 4);
  GridRegion prev = eps_dual(ps, 0.1, dom, 1e-3);
  for (double eps : {0.3, 0.6, 1.0, 1.5}) {
    const auto g = eps_dual(ps, eps, dom, 1e-3);
    EXPECT_TRUE(subset(prev, g)) << eps;
    prev = g;
  }
}

TEST(EpsDual, MonotoneInTheSet) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Point> small, big;
    for (int i = 0; i < 8; ++i) small.push_back(Point{u(rng)});
    big = small;
    for (int i = 0; i < 8; ++i) big.push_back(Point{u(rng)});
    const Box w = Box::interval(-10, 10), dom = Box::interval(-3, 3);
    const auto gs = eps_dual(PointSet::from_points(1, small, w), 0.7, dom, 1e-3);
    const auto gb = eps_dual(PointSet::from_points(1, big, w), 0.7, dom, 1e-3);
    EXPECT_TRUE(subset(gb, gs));
  }
}

TEST(EpsDual, SymmetricForRealSets) {
  const auto ps = generate_fibonacci(Box::interval(-12, 12));
  const auto g = eps_dual(ps, 0.8, Box::interval(-3, 3), 1e-3);
  const std::size_t n = g.node_count();
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(g.mask[i], g.mask[n - 1 - i]) << g.node(i)[0];
}

TEST(EpsDual, PlaneLattice) {
  const auto ps = generate_lattice(cases::diag({1.0, 2.0}), Box::cube(2, 3));
  const auto g = eps_dual(ps, 0.5, Box::cube(2, 1.2), 0.01);
  EXPECT_TRUE(g.at(Point{0.0, 0.0}));
  EXPECT_TRUE(g.at(Point{1.0, 0.5}));
  EXPECT_FALSE(g.at(Point{0.5, 0.0}));
  // dual lattice Z x (1/2)Z inside the domain: 3 x 5 components
  EXPECT_EQ(g.representatives.size(), 15u);
}

TEST(EpsDual, Preconditions) {
  const auto ps = integers(2);
  EXPECT_THROW(eps_dual(ps, 0.0, Box::interval(-1, 1), 0.01), Error);
  EXPECT_THROW(eps_dual(ps, 2.0, Box::interval(-1, 1), 0.01), Error);
  EXPECT_THROW(eps_dual(PointSet::from_points(1, {}, Box::interval(-1, 1)), 0.5, Box::interval(-1, 1), 0.01), Error);
}

TEST(EpsDualBack, Examples) {
  GridRegion only_zero = eps_dual(integers(50), 0.01, Box::interval(-0.4, 0.4), 1e-3);
  ASSERT_EQ(only_zero.representatives.size(), 1u);
  EXPECT_TRUE(eps_dual_back(only_zero, 0.5, Box::interval(-5, 5), 1e-2).full());

  const auto first = eps_dual(integers(5), 0.5, Box::interval(-3, 3), 1e-3);
  const auto back = eps_dual_back(first, 0.5, Box::interval(-3, 3), 1e-3);
  for (int n = -3; n <= 3; ++n) EXPECT_TRUE(back.at(Point{double(n)}));
  EXPECT_FALSE(back.at(Point{0.5}));
  for (const auto& r : back.representatives) {
    if (std::abs(r[0]) > 2.5) continue;
    EXPECT_NEAR(r[0], std::round(r[0]), 6e-3);
  }
}

TEST(DoubleDual, IntegersReproduceIntegers) {
  const auto dd = double_dual(integers(10), 0.5, Box::interval(-10, 10), Box::interval(-10, 10), 1e-3, 1e-3);
  EXPECT_FALSE(dd.degenerate);
  EXPECT_TRUE(dd.contains_input);
  EXPECT_EQ(dd.result.size(), 21u);
  for (const auto& p : dd.result.points) EXPECT_NEAR(p[0], std::round(p[0]), 6e-3);
}

TEST(DoubleDual, FibonacciSupersetStillMeyer) {
  const auto ps = generate_fibonacci(Box::interval(-10, 10));
  const auto dd = double_dual(ps, 0.5, Box::interval(-10, 10), Box::interval(-10, 10), 1e-3, 1e-3);
  EXPECT_TRUE(dd.contains_input);
  EXPECT_GE(dd.result.size(), ps.size());
  const auto& rs = dd.result;
  const auto scales = nested_scales(rs.window);
  const auto rep = meyer_check(
      [&rs](const Box& b) {
        std::vector<Point> in;
        for (const auto& p : rs.points)
          if (b.contains(p)) in.push_back(p);
        return PointSet::from_points(1, in, b);
      },
      scales, Box::interval(0, 1), MeyerOptions{.resolution = 1e-3});
  EXPECT_TRUE(rep.relatively_dense);
  EXPECT_TRUE(rep.counts_bounded);
  EXPECT_EQ(rep.verdict, Verdict::pass);
}

TEST(DoubleDual, SinglePointIsDegenerate) {
  const auto ps = PointSet::from_points(1, {Point{0.0}}, Box::interval(-5, 5));
  const auto dd = double_dual(ps, 0.5, Box::interval(-5, 5), Box::interval(-5, 5), 1e-2, 1e-2);
  EXPECT_TRUE(dd.first.full());
  EXPECT_TRUE(dd.degenerate);
}

TEST(DoubleDual, ContainsInputForRandomDeloneSets) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<Point> pts{Point{0.0}};
    for (int i = 1; i <= 6; ++i) {
      pts.push_back(Point{i + jitter(rng)});
      pts.push_back(Point{-i + jitter(rng)});
    }
    const auto ps = PointSet::from_points(1, pts, Box::interval(-7, 7));
    const auto dd = double_dual(ps, 0.6, Box::interval(-6, 6), Box::interval(-7, 7), 1e-3, 1e-3);
    EXPECT_TRUE(dd.contains_input) << trial;
  }
}

TEST(Theorem2, IntegersHalf) {
  const auto rep = theorem2_verify(integers(10), 0.5);
  EXPECT_TRUE(rep.hypothesis_verified);
  EXPECT_TRUE(rep.lambda_in_lambda_prime);
  EXPECT_EQ(rep.gamma.size(), 21u);
  for (const auto& g : rep.gamma.points) EXPECT_NEAR(g[0], std::round(g[0]), 6e-3);
  ASSERT_EQ(rep.checks.size(), 21u);
  for (const auto& c : rep.checks) {
    EXPECT_TRUE(c.ok) << c.y[0];
    EXPECT_NEAR(c.peak.intensity / rep.zero.intensity, 1.0, 0.05);
  }
  EXPECT_TRUE(rep.delta_tension.empty());
  EXPECT_EQ(rep.verdict, Verdict::pass);
}

TEST(Theorem2, IntegersTight) {
  const auto rep = theorem2_verify(integers(10), 0.9);
  EXPECT_EQ(rep.verdict, Verdict::pass);
  for (const auto& c : rep.checks) EXPECT_GE(c.peak.intensity, 0.9 * rep.zero.intensity - 2 * c.peak.stderr_proxy);
}

TEST(Theorem2, UnverifiedHypothesisIsNoted) {
  const auto ps = PointSet::from_points(1, {Point{-3.0}, Point{0.0}, Point{5.0}}, Box::interval(-10, 10));
  Theorem2Options opt;
  opt.dual_spacing = opt.phys_spacing = 1e-2;
  try {
    const auto rep = theorem2_verify(ps, 0.5, opt);
    EXPECT_FALSE(rep.hypothesis_verified);
    ASSERT_FALSE(rep.notes.empty());
    EXPECT_NE(rep.notes.front().find("Meyer hypothesis unverified"), std::string::npos);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate Gamma"), std::string::npos);
  }
}

TEST(Theorem2, DegenerateGammaThrows) {
  const auto ps = PointSet::from_points(1, {Point{0.0}}, Box::interval(-5, 5));
  Theorem2Options opt;
  opt.dual_domain = opt.phys_domain = Box::interval(-5, 5);
  opt.dual_spacing = opt.phys_spacing = 1e-2;
  try {
    theorem2_verify(ps, 0.5, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate Gamma"), std::string::npos);
  }
}
