#include <gtest/gtest.h>

#include <complex>
#include <numbers>
#include <random>

#include "bragg/cases.hpp"
#include "bragg/measure.hpp"
#include "bragg/posdef.hpp"

using namespace bragg;

namespace {

AtomicMeasure comb_of(const PointSet& ps) { return dirac_comb(ps); }

PointSet z_union_third(double half) { return realize(cases::z_union_third(), Box::interval(-half, half)); }

AtomicMeasure random_complex_comb(std::mt19937_64& rng, std::size_t n, double half) {
  std::uniform_real_distribution<double> x(-half, half), u(-1, 1);
  std::vector<Atom> a;
  for (std::size_t i = 0; i < n; ++i) a.push_back({Point{std::round(x(rng) * 8) / 8}, cplx(u(rng), u(rng))});
  return AtomicMeasure::from_atoms(1, Box::interval(-half, half), a);
}

AtomicMeasure self_convolution(const AtomicMeasure& w) {
  const double h = 2 * std::max(std::abs(w.window().lo[0]), std::abs(w.window().hi[0]));
  return convolve(w, reflect(w), Box::interval(-h, h));
}

}  // namespace

TEST(Gram, EvenIntegersConsistent) {
  const auto mu = comb_of(generate_lattice(cases::diag({2.0}), Box::interval(-20, 20)));
  ConfigSampler s;
  s.region = Box::interval(-8, 8);
  const auto rep = gram_psd_check(mu, s);
  EXPECT_FALSE(rep.refuted());
  EXPECT_STREQ(rep.verdict(), "consistent-with-PD");
  EXPECT_GT(rep.configurations, 100u);
}

TEST(Gram, ShiftedUnionHermitianViolation) {
  const auto mu = comb_of(z_union_third(10));
  ConfigSampler s;
  s.candidates = {Point{0.0}, Point{1.0 / 3.0}};
  s.random_count = 0;
  s.exhaustive_candidates = 2;
  const auto rep = gram_psd_check(mu, s);
  ASSERT_TRUE(rep.hermitian_violation.has_value());
  const auto& w = *rep.hermitian_violation;
  const double frac = w.x[0] - std::floor(w.x[0]);
  EXPECT_TRUE(std::abs(frac - 1.0 / 3.0) < 1e-12 || std::abs(frac - 2.0 / 3.0) < 1e-12);
  EXPECT_EQ(w.f_x, mu.at(w.x));
  EXPECT_EQ(w.f_minus_x, mu.at(-w.x));
  EXPECT_NE(w.f_x, std::conj(w.f_minus_x));
  EXPECT_EQ(mu.at(Point{1.0 / 3.0}), cplx(1));
  EXPECT_EQ(mu.at(Point{-1.0 / 3.0}), cplx(0));
  EXPECT_STREQ(rep.verdict(), "refuted");
}

TEST(Gram, AutocorrelationConsistent) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = self_convolution(random_complex_comb(rng, 30, 6));
    ConfigSampler s;
    s.seed = std::uint64_t(trial);
    EXPECT_FALSE(gram_psd_check(g, s).refuted());
  }
}

TEST(Gram, NegativeEigenvalueWitness) {
  // f(0) = 1, f(+-1) = 1, f(+-2) = -1 is Hermitian but the 3x3 Gram matrix on {0,1,2} is indefinite
  std::vector<Atom> a{{Point{-2.0}, -1}, {Point{-1.0}, 1}, {Point{0.0}, 1}, {Point{1.0}, 1}, {Point{2.0}, -1}};
  const auto mu = AtomicMeasure::from_atoms(1, Box::interval(-5, 5), a);
  ConfigSampler s;
  s.region = Box::interval(-1, 3);
  const auto rep = gram_psd_check(mu, s);
  EXPECT_FALSE(rep.hermitian_violation.has_value());
  ASSERT_TRUE(rep.witness.has_value());
  EXPECT_LT(rep.witness->min_eigenvalue, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rep.witness->matrix);
  EXPECT_NEAR(es.eigenvalues().minCoeff(), rep.witness->min_eigenvalue, 1e-12);
}

TEST(Gram, RejectsOversizedConfigurations) {
  ConfigSampler s;
  s.max_size = 65;
  EXPECT_THROW(gram_psd_check(AtomicMeasure::zero(1, Box::interval(-1, 1)), s), Error);
}

TEST(Krein, IntegerCombEquality) {
  const auto mu = comb_of(generate_lattice(cases::diag({1.0}), Box::interval(-50, 50)));
  const auto rep = krein_check(mu, PairSampler{});
  EXPECT_EQ(rep.verdict, Verdict::pass);
  EXPECT_GT(rep.pairs, 0u);
  EXPECT_LE(rep.max_violation, 0.0);
}

TEST(Krein, RandomAutocorrelationPasses) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = self_convolution(random_complex_comb(rng, 40, 5));
    PairSampler s;
    s.seed = std::uint64_t(trial);
    const auto rep = krein_check(g, s, 1e-9);
    EXPECT_EQ(rep.verdict, Verdict::pass) << rep.note;
  }
}

TEST(Krein, BrokenMeasureFails) {
  std::vector<Atom> a{{Point{0.0}, 1}, {Point{1.0}, 2}};
  const auto rep = krein_check(AtomicMeasure::from_atoms(1, Box::interval(-5, 5), a), PairSampler{});
  EXPECT_EQ(rep.verdict, Verdict::fail);
  ASSERT_TRUE(rep.bound_witness.has_value());
  EXPECT_EQ((*rep.bound_witness)[0], 1.0);
}

TEST(Krein, ZeroAtOriginRefutes) {
  std::vector<Atom> a{{Point{1.0}, 0.5}};
  const auto rep = krein_check(AtomicMeasure::from_atoms(1, Box::interval(-5, 5), a), PairSampler{});
  EXPECT_EQ(rep.verdict, Verdict::fail);
  EXPECT_NE(rep.note.find("Krein refutes PD"), std::string::npos);
}

TEST(Krein, ViolatingPairWitness) {
  // |f(x)| <= f(0) everywhere, but f(1) = 1 with f(2) = 0 breaks the inequality at x = 1, t = 1
  std::vector<Atom> a{{Point{-1.0}, 1}, {Point{0.0}, 1}, {Point{1.0}, 1}};
  const auto rep = krein_check(AtomicMeasure::from_atoms(1, Box::interval(-5, 5), a), PairSampler{});
  EXPECT_EQ(rep.verdict, Verdict::fail);
  ASSERT_TRUE(rep.witness.has_value());
  EXPECT_GT(rep.witness->lhs, rep.witness->rhs);
}

TEST(SparseThreshold, Examples) {
  EXPECT_NEAR(sparse_threshold_b(1.0, 2.0), -1.0, 1e-15);
  EXPECT_NEAR(sparse_threshold_b(1.5, 2.0), 1.5 - std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(sparse_threshold_b(1.5, 2.0), 0.0857864376, 1e-10);
  EXPECT_DOUBLE_EQ(sparse_threshold_b(2.0, 2.0), 2.0);
  EXPECT_THROW(sparse_threshold_b(2.5, 2.0), Error);
  EXPECT_THROW(sparse_threshold_b(0.0, 2.0), Error);
}

TEST(SparseThreshold, SignMatchesThreshold) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> mu0s(1e-3, 100), frac(1e-9, 1);
  for (int i = 0; i < 10000; ++i) {
    const double mu0 = mu0s(rng), a = frac(rng) * mu0;
    const double b = sparse_threshold_b(a, mu0);
    const double naive = a - std::sqrt(2 * mu0 * (mu0 - a));
    EXPECT_NEAR(b, naive, 1e-12 * mu0);
    const double side = a - (std::sqrt(3.0) - 1) * mu0;
    if (std::abs(side) > 1e-12 * mu0) {
      EXPECT_EQ(b > 0, side > 0) << a << " " << mu0;
    }
  }
}

TEST(HighIntensity, ZPlusPiZ) {
  const auto mu = cases::zpz_measure(Box::interval(-20, 20));
  const auto i12 = high_intensity_set(mu, 1.2);
  ASSERT_EQ(i12.size(), 1u);
  EXPECT_EQ(i12.points[0][0], 0.0);
  const auto i10 = high_intensity_set(mu, 1.0);
  EXPECT_EQ(i10.size(), realize(cases::z_union_pi_z(), Box::interval(-20, 20)).size());
  EXPECT_EQ(i10.size(), 41u + 12u);
}

TEST(HighIntensity, SmallLevelKeepsAllPositiveAtoms) {
  std::vector<Atom> a{{Point{0.0}, 2}, {Point{1.0}, 1e-6}, {Point{2.0}, 0.5}};
  const auto mu = AtomicMeasure::from_atoms(1, Box::interval(-5, 5), a);
  EXPECT_EQ(high_intensity_set(mu, 1e-300).size(), 3u);
}

TEST(HighIntensity, RequiresPositiveMeasure) {
  std::vector<Atom> a{{Point{0.0}, 1}, {Point{1.0}, -1}};
  try {
    high_intensity_set(AtomicMeasure::from_atoms(1, Box::interval(-5, 5), a), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("requires positive measure"), std::string::npos);
  }
}

TEST(HighIntensity, Monotone) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Atom> a{{Point{0.0}, 1.0}};
  for (int i = 1; i < 200; ++i) a.push_back({Point{double(i) * 0.37}, u(rng)});
  const auto mu = AtomicMeasure::from_atoms(1, Box::interval(-100, 100), a);
  for (int i = 0; i < 200; ++i) {
    double lo = u(rng) + 1e-9, hi = u(rng) + 1e-9;
    if (lo > hi) std::swap(lo, hi);
    const auto big = high_intensity_set(mu, lo), small = high_intensity_set(mu, hi);
    for (const auto& p : small.points) EXPECT_TRUE(big.contains(p));
  }
}

TEST(Sparseness, IntegerCombAsOwnDiffraction) {
  const auto mu = comb_of(generate_lattice(cases::diag({1.0}), Box::interval(-60, 60)));
  const auto rep = sparseness_verify(mu, 0.9, Box::interval(0, 1));
  EXPECT_TRUE(rep.hypothesis_met);
  ASSERT_TRUE(rep.b.has_value());
  EXPECT_NEAR(*rep.b, 0.9 - std::sqrt(0.2), 1e-12);
  EXPECT_DOUBLE_EQ(rep.translation_constant, 2.0);
  ASSERT_TRUE(rep.count_bound.has_value());
  EXPECT_NEAR(*rep.count_bound, 2.0 / (0.9 - std::sqrt(0.2)), 1e-9);
  EXPECT_EQ(rep.measured_count, 2u);
  EXPECT_TRUE(rep.containment);
  EXPECT_EQ(rep.verdict, Verdict::pass);
}

TEST(Sparseness, ZPlusPiZHypothesisUnmet) {
  const auto small = sparseness_verify(cases::zpz_measure(cases::zpz_window(6)), 1.0, Box::interval(0, 1));
  const auto large = sparseness_verify(cases::zpz_measure(cases::zpz_window(24)), 1.0, Box::interval(0, 1));
  EXPECT_FALSE(small.hypothesis_met);
  EXPECT_EQ(small.verdict, Verdict::inconclusive);
  EXPECT_NE(small.note.find("hypothesis unmet"), std::string::npos);
  EXPECT_GT(large.measured_count, small.measured_count);
}

TEST(Sparseness, ZPlusPiZAboveThreshold) {
  const auto rep = sparseness_verify(cases::zpz_measure(cases::zpz_window(12)), 1.5, Box::interval(0, 1));
  EXPECT_TRUE(rep.hypothesis_met);
  EXPECT_EQ(rep.high_set.size(), 1u);
  EXPECT_EQ(rep.verdict, Verdict::pass);
}

TEST(Sparseness, GuardBandAtThreshold) {
  const auto mu = comb_of(generate_lattice(cases::diag({1.0}), Box::interval(-10, 10)));
  EXPECT_FALSE(sparseness_verify(mu, std::sqrt(3.0) - 1, Box::interval(0, 1)).hypothesis_met);
  EXPECT_TRUE(sparseness_verify(mu, std::sqrt(3.0) - 1 + 1e-9, Box::interval(0, 1)).hypothesis_met);
}

TEST(Sparseness, DifferencesOfHighSetLieInThresholdSet) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> x(-4, 4), u(0.2, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Atom> a;
    for (int i = 0; i < 12; ++i) a.push_back({Point{std::round(x(rng) * 2) / 2}, u(rng)});
    const auto g = self_convolution(AtomicMeasure::from_atoms(1, Box::interval(-4, 4), a));
    ASSERT_TRUE(is_positive(g));
    ASSERT_EQ(krein_check(g, PairSampler{}).verdict, Verdict::pass);
    const double mu0 = g.at(Point{0.0}).real();
    const auto rep = sparseness_verify(g, 0.75 * mu0, Box::interval(0, 1));
    EXPECT_TRUE(rep.hypothesis_met);
    EXPECT_TRUE(rep.containment);
    for (const auto& p : rep.high_set.points)
      for (const auto& q : rep.high_set.points) EXPECT_GE(g.at(p - q).real(), *rep.b - 1e-9 * mu0);
  }
}

TEST(Rigidity, Examples) {
  const auto sqrt2 = generate_lattice(cases::diag({std::sqrt(2.0)}), Box::interval(-20, 20));
  auto rep = rigidity_check(sqrt2);
  EXPECT_TRUE(rep.subgroup);
  EXPECT_FALSE(rep.gram.refuted());
  EXPECT_EQ(rep.verdict, Verdict::pass);

  rep = rigidity_check(z_union_third(20));
  EXPECT_FALSE(rep.subgroup);
  EXPECT_TRUE(rep.gram.refuted());
  EXPECT_TRUE(rep.agree);
  EXPECT_EQ(rep.verdict, Verdict::fail);

  rep = rigidity_check(PointSet::from_points(1, {Point{0.0}}, Box::interval(-20, 20)));
  EXPECT_TRUE(rep.subgroup);
  EXPECT_TRUE(rep.agree);
  EXPECT_EQ(rep.verdict, Verdict::pass);
}

TEST(Rigidity, MissingOriginDetected) {
  const auto ps = translate(generate_lattice(cases::diag({1.0}), Box::interval(-10, 10)), Point{0.5});
  const auto rep = rigidity_check(ps);
  EXPECT_FALSE(rep.subgroup);
  ASSERT_TRUE(rep.subgroup_witness.has_value());
  EXPECT_TRUE(rep.subgroup_witness->missing_origin);
  EXPECT_TRUE(rep.agree);
}

TEST(Rigidity, PlaneLattice) {
  Eigen::MatrixXd b(2, 2);
  b << 1, 0.5, 0, std::sqrt(3.0) / 2;
  const auto rep = rigidity_check(generate_lattice(b, Box::cube(2, 6)));
  EXPECT_EQ(rep.verdict, Verdict::pass);
  EXPECT_GE(rep.unit_box_count, 1u);
}

TEST(PosdefInvariants, AtomsBoundedByOriginAfterKrein) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = self_convolution(random_complex_comb(rng, 25, 5));
    ASSERT_EQ(krein_check(g, PairSampler{}).verdict, Verdict::pass);
    const double f0 = g.at(Point{0.0}).real();
    for (const auto& a : g.atoms()) EXPECT_LE(std::abs(a.w), f0 * (1 + 1e-12));
  }
}
