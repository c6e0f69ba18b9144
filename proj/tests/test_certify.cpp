#include <gtest/gtest.h>

#include <random>

#include "tfcert/tfcert.hpp"

using namespace tfcert;

namespace {

const double kGaussR3 = std::sqrt(std::log(2.0) / kPi);

PointSet times_with_freqs(const std::vector<double>& times, const std::vector<double>& freqs) {
  std::vector<TFPoint> pts;
  for (std::size_t i = 0; i < times.size(); ++i) pts.emplace_back(times[i], freqs[i]);
  return PointSet(std::move(pts));
}

PointSet times_only(const std::vector<double>& times) {
  std::vector<double> freqs(times.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) freqs[i] = 0.37 * static_cast<double>(i);
  return times_with_freqs(times, freqs);
}

std::vector<Vec> as_vecs(const std::vector<double>& v) {
  std::vector<Vec> out;
  for (double x : v) out.push_back({x});
  return out;
}

void expect_well_formed(const Certificate& c) {
  if (c.certified()) {
    for (double m : c.margins) EXPECT_GT(m, 0.0);
  }
  if (c.N >= 2 && std::isfinite(c.peak)) {
    EXPECT_EQ(c.bound, c.peak / static_cast<double>(c.N - 1));
  }
  if (c.theorem == Theorem::Thm1 || c.theorem == Theorem::Cor1) {
    if (c.N >= 2) {
      EXPECT_EQ(c.M > c.R, c.certified());
    }
  }
}

}  // namespace

TEST(DecayRadius, Examples) {
  EXPECT_NEAR(decay_radius(make_example1(8, 5), 4, {0.0}).radius, 3.0 / 8.0, 2e-9);
  EXPECT_EQ(decay_radius(make_gaussian(1), 2, {0.0}).radius, 0.0);
  EXPECT_NEAR(decay_radius(make_gaussian(1), 3, {0.0}).radius, kGaussR3, 2e-9);
  EXPECT_EQ(decay_radius(make_gaussian(1), 3, {0.0}).method, SupMethod::Envelope);
}

TEST(DecayRadius, Errors) {
  EXPECT_THROW(decay_radius(make_gaussian(1), 1, {0.0}), InvalidInput);
  // cos(pi t / 2) / |t| style zero: example1 with omega chosen so f(anchor) = 0
  const auto f = make_example1(1.0, kPi / 2);
  EXPECT_THROW(decay_radius(f, 3, {1.0}), NumericalRefusal);
  // An envelope that never decays.
  const auto flat = make_gaussian(1).with_envelope([](double) { return 2.0; });
  EXPECT_THROW(decay_radius(flat, 3, {0.0}), NumericalRefusal);
}

TEST(DecayRadius, DenseSampleFallbackAndRigorousRefusal) {
  const auto g = make_gaussian(1).without_envelope();
  const auto est = decay_radius(g, 3, {0.0});
  EXPECT_EQ(est.method, SupMethod::DenseSample);
  EXPECT_NEAR(est.radius, kGaussR3, 1e-8);
  CertifyOptions rig;
  rig.rigorous = true;
  EXPECT_THROW(decay_radius(g, 3, {0.0}, rig), NumericalRefusal);
  EXPECT_THROW(check_theorem1(g, times_only({0, 1}), rig), NumericalRefusal);
}

TEST(Lemma1, Examples) {
  const auto single = check_lemma1(make_gaussian(1), as_vecs({0.7}));
  EXPECT_TRUE(single.certified());
  EXPECT_TRUE(single.margins.empty());
  const auto e1 = check_lemma1(make_example1(8, 0), as_vecs({0, 1, 2, 3}));
  EXPECT_TRUE(e1.certified());
  EXPECT_EQ(e1.margins.size(), 12u);
  const auto g = check_lemma1(make_gaussian(1), as_vecs({0, 0.1, 0.2}));
  EXPECT_FALSE(g.certified());
  expect_well_formed(e1);
  expect_well_formed(g);
}

TEST(Lemma1, SingularDifferenceThrows) {
  // Anchor 0.5 plus difference -0.5 lands on the singularity at 0.
  EXPECT_THROW(check_lemma1(make_example2(0), as_vecs({0, 0.5}), Vec{0.5}), SingularityHit);
}

TEST(Theorem1, Examples) {
  const auto c = check_theorem1(make_example1(8, 5), times_only({0, 1, 2, 3}));
  EXPECT_TRUE(c.certified());
  EXPECT_NEAR(c.R, 0.375, 2e-9);
  EXPECT_EQ(c.M, 1.0);
  expect_well_formed(c);
  EXPECT_TRUE(check_theorem1(make_gaussian(1), times_only({4.0})).certified());
  const double s = std::sqrt(2.0);
  const auto lp = PointSet::from_pairs({{0, 0}, {1, 0}, {0, 1}, {s, s}});
  const auto d = check_theorem1(make_example1(100, 0), lp);
  EXPECT_FALSE(d.certified());
  EXPECT_EQ(d.M, 0.0);
  EXPECT_NE(d.note.find("duplicate time"), std::string::npos);
}

TEST(Theorem1, RejectsSingularFunctions) {
  EXPECT_THROW(check_theorem1(make_example2(0), times_only({0, 2})), InvalidInput);
}

TEST(Theorem1, Example1ThresholdIsStrict) {
  const auto lam = times_only({0, 1, 2, 3});
  for (double C : {3.01, 4.0, 8.0, 3.0 + 1e-6})
    EXPECT_TRUE(check_theorem1(make_example1(C, 1.0), lam).certified()) << C;
  for (double C : {2.99, 2.0, 1.0, 3.0})
    EXPECT_FALSE(check_theorem1(make_example1(C, 1.0), lam).certified()) << C;
}

TEST(BestTranslate, Examples) {
  const auto S = as_vecs({0, 1, 2, 3});
  const GridSpec grid{8.0, 4097, 0.0};
  const auto a0 = best_translate(make_example1(8, 0), S, grid);
  ASSERT_TRUE(a0.has_value());
  EXPECT_EQ((*a0)[0], 0.0);
  const auto a5 = best_translate(translate(make_example1(8, 0), 5.0), S, grid);
  ASSERT_TRUE(a5.has_value());
  EXPECT_NEAR((*a5)[0], 5.0, 0.2);
  EXPECT_TRUE(check_lemma1(translate(make_example1(8, 0), 5.0), S, *a5).certified());
  EXPECT_FALSE(best_translate(make_gaussian(1), as_vecs({0, 0.1, 0.2}), grid).has_value());
}

TEST(DilationThreshold, Examples) {
  const auto g = make_gaussian(1);
  EXPECT_NEAR(dilation_threshold(g, times_only({0, 1, 2})), 1.0 / kGaussR3, 1e-6);
  // M = R: times spaced by the Gaussian N = 3 radius.
  const auto lam = times_only({0, kGaussR3, 2 * kGaussR3 + 1});
  EXPECT_NEAR(dilation_threshold(g, lam), 1.0, 1e-8);
  const auto f = make_example1(1, 0);
  const auto l4 = times_only({0, 1, 2, 3});
  EXPECT_NEAR(dilation_threshold(f, l4), 1.0 / 3.0, 1e-8);
  EXPECT_TRUE(check_theorem1(dilate_by_scale(f, 0.3), l4).certified());
  EXPECT_FALSE(check_theorem1(dilate_by_scale(f, 0.34), l4).certified());
  EXPECT_THROW(dilation_threshold(g, PointSet::from_pairs({{0, 0}, {0, 1}})), InvalidInput);
}

TEST(Corollary1, DefaultScaleCertifies) {
  const auto c = check_corollary1(make_example1(1, 0), times_only({0, 1, 2, 3}));
  EXPECT_TRUE(c.certified());
  EXPECT_EQ(c.theorem, Theorem::Cor1);
  ASSERT_TRUE(c.threshold_r.has_value());
  EXPECT_NEAR(*c.threshold_r, 1.0 / 3.0, 1e-8);
  const auto above = check_corollary1(make_example1(1, 0), times_only({0, 1, 2, 3}), 0.5);
  EXPECT_FALSE(above.certified());
  expect_well_formed(c);
  expect_well_formed(above);
}

TEST(Properties, Corollary1ContractAcrossFamilies) {
  const auto lam = times_only({0, 1.5, 3.25, 4.0});
  const std::vector<FunctionEvaluator> families{make_example1(2.0, 1.0), make_example1(0.5, 3.0),
                                                make_gaussian(1), make_bump(0.4)};
  for (const auto& f : families) {
    const double thr = dilation_threshold(f, lam);
    const double top = std::isfinite(thr) ? thr : 100.0;
    for (int k = 0; k < 20; ++k) {
      const double r = top * std::pow(10.0, -3.0 + 3.0 * k / 20.0) * (1.0 - 1e-9);
      EXPECT_TRUE(check_theorem1(dilate_by_scale(f, r), lam).certified())
          << f.label() << " r=" << r << " threshold=" << thr;
    }
  }
}

TEST(Corollary2, GaussianFrequencySeparation) {
  const GridSpec grid{6.0, 4096, 0.0};
  const auto lam = times_with_freqs({0.1, 0.1 + 1e-3, 0.1 + 2e-3}, {0, 1, 2});
  const auto c = check_corollary2(make_gaussian(1), lam, grid);
  EXPECT_TRUE(c.certified());
  EXPECT_EQ(c.theorem, Theorem::Cor2);
  EXPECT_EQ(c.sup_method, SupMethod::DenseSample);
  EXPECT_NEAR(c.R, kGaussR3, 1e-6);
  const auto t1 = check_theorem1(make_gaussian(1), times_only({0, 1, 2}));
  EXPECT_NEAR(c.R, t1.R, 1e-6);
  EXPECT_TRUE(check_corollary2(make_gaussian(1), times_only({3.0}), grid).certified());
  const auto dup = check_corollary2(make_gaussian(1), times_with_freqs({0, 1}, {0.5, 0.5}), grid);
  EXPECT_FALSE(dup.certified());
  EXPECT_EQ(dup.M, 0.0);
}

TEST(Corollary2, AnalyticEnvelopeMakesItRigorous) {
  const GridSpec grid{6.0, 4096, 0.0};
  const auto lam = times_with_freqs({0, 0, 0}, {0, 1, 2});
  Envelope env{[](double r) { return std::pow(2.0, 0.25) * std::exp(-kPi * r * r) + 1e-9; }, {0.0}};
  CertifyOptions rig;
  rig.rigorous = true;
  const auto c = check_corollary2(make_gaussian(1), lam, grid, rig, env);
  EXPECT_TRUE(c.certified());
  EXPECT_EQ(c.sup_method, SupMethod::Envelope);
}

TEST(Corollary3, ThresholdAndBothSides) {
  const GridSpec grid{6.0, 4096, 0.0};
  const auto lam = times_with_freqs({0, 0, 0}, {0, 1, 2});
  const double thr = dilation_threshold_freq(make_gaussian(1), lam, grid);
  EXPECT_NEAR(thr, kGaussR3, 1e-6);
  EXPECT_TRUE(check_corollary3(make_gaussian(1), lam, grid, 2 * thr).certified());
  EXPECT_FALSE(check_corollary3(make_gaussian(1), lam, grid, thr / 2).certified());
  const auto c = check_corollary3(make_gaussian(1), lam, grid);
  EXPECT_TRUE(c.certified());
  EXPECT_EQ(c.theorem, Theorem::Cor3);
  EXPECT_THROW(dilation_threshold_freq(make_gaussian(1), times_with_freqs({0, 1}, {1, 1}), grid),
               InvalidInput);
}

TEST(Theorem2, SingularCos) {
  const auto lam = times_only({0, 2, 4, 6});
  const auto c = check_theorem2(make_singular_cos(1.0), lam);
  ASSERT_TRUE(c.certified());
  ASSERT_TRUE(c.translate_x.has_value());
  EXPECT_LT(std::abs((*c.translate_x)[0]), 1.0 / 3.0);
  EXPECT_EQ(c.R, 2.0);
  expect_well_formed(c);
}

TEST(Theorem2, Example2) {
  const auto lam = times_only({0, 2, 4, 6});
  const auto c = check_theorem2(make_example2(0), lam);
  ASSERT_TRUE(c.certified());
  const double x = (*c.translate_x)[0];
  EXPECT_LT(std::abs(x), 1.0 / 81.0 + GridSpec::defaults(1).step());
  EXPECT_GT(std::pow(std::abs(x), -0.25), 3.0);
  EXPECT_TRUE(check_lemma1(make_example2(0), lam.times(), *c.translate_x).certified());
}

TEST(Theorem2, EdgeCases) {
  const auto one = check_theorem2(make_example2(0), times_only({1.0}));
  EXPECT_TRUE(one.certified());
  ASSERT_TRUE(one.translate_x.has_value());
  EXPECT_NE((*one.translate_x)[0], 0.0);
  EXPECT_THROW(check_theorem2(make_example2(0), PointSet::from_pairs({{0, 0}, {0, 1}})),
               InvalidInput);
  EXPECT_THROW(check_theorem2(make_gaussian(1), times_only({0, 1})), InvalidInput);
}

TEST(Properties, Theorem2WitnessPassesLemma1) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> gap(0.5, 3.0), w(0.0, 4.0), shift(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> ts{0.0};
    const int N = 2 + trial % 5;
    for (int k = 1; k < N; ++k) ts.push_back(ts.back() + gap(rng));
    const auto f = trial % 2 ? make_singular_cos(w(rng)) : translate(make_example2(w(rng)), shift(rng));
    const auto c = check_theorem2(f, times_only(ts));
    ASSERT_TRUE(c.certified()) << trial;
    EXPECT_TRUE(check_lemma1(f, times_only(ts).times(), *c.translate_x).certified());
    expect_well_formed(c);
  }
}

TEST(Theorem3, GaussianRadiusAndLambdaPrime) {
  const auto g = make_gaussian(1);
  const double s = std::sqrt(2.0);
  const auto lp = PointSet::from_pairs({{0, 0}, {1, 0}, {0, 1}, {s, s}});
  const auto c = check_theorem3(g, g, lp, GridSpec::defaults(1));
  EXPECT_NEAR(c.R, std::sqrt(2 * std::log(3.0) / kPi), 1e-3);
  EXPECT_TRUE(c.certified());
  EXPECT_EQ(c.M, 1.0);
  EXPECT_EQ(c.sup_method, SupMethod::DenseSample);
  EXPECT_TRUE(check_theorem3(g, g, times_only({2.0}), GridSpec::defaults(1)).certified());
}

TEST(Theorem3, EnvelopeModeAndRefusal) {
  const auto g = make_gaussian(1);
  const auto lam = times_with_freqs({0, 0.9, 0}, {0, 0, 0.9});
  const auto c = check_theorem3(g, g, lam, GridSpec::defaults(1), default_stft_lattice(), {},
                                [](double r) { return std::exp(-kPi * r * r / 2); });
  EXPECT_EQ(c.sup_method, SupMethod::Envelope);
  EXPECT_NEAR(c.R, std::sqrt(2 * std::log(2.0) / kPi), 1e-8);
  EXPECT_TRUE(c.certified());
  const auto odd = hermite_window({1.0, {0.0, 1.0}});
  EXPECT_THROW(check_theorem3(g, odd, lam, GridSpec::defaults(1)), NumericalRefusal);
}

TEST(Properties, TranslationInvariance) {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> eighths(-40, 40);
  for (int trial = 0; trial < 30; ++trial) {
    const double a = eighths(rng) / 8.0;
    std::vector<double> ts;
    for (int k = 0; k < 4; ++k) ts.push_back(eighths(rng) / 8.0);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    if (ts.size() < 2) continue;
    std::vector<double> shifted;
    for (double t : ts) shifted.push_back(t + a);
    const auto f = trial % 2 ? make_example1(0.5 + trial, 1.0) : make_gaussian(1);
    const auto c0 = check_theorem1(f, times_only(ts));
    const auto c1 = check_theorem1(translate(f, a), times_only(shifted));
    EXPECT_EQ(c0.verdict, c1.verdict);
    EXPECT_EQ(c0.R, c1.R);
    EXPECT_EQ(c0.M, c1.M);
  }
}

TEST(Properties, DecayRadiusMonotoneInN) {
  for (const auto& f : {make_gaussian(1), make_example1(3, 1), make_bump(0.4)}) {
    double prev = 0.0;
    for (std::size_t N = 2; N <= 12; ++N) {
      const double r = decay_radius(f, N, {0.0}).radius;
      EXPECT_GE(r, prev);
      prev = r;
    }
  }
}

TEST(Properties, CertifiedConfigurationsAreGramIndependent) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const GridSpec grid = GridSpec::defaults(1);
  int certified = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = trial % 2 ? make_example1(2.0 + 4 * u(rng), 3 * u(rng)) : make_gaussian(1);
    const std::size_t N = 2 + trial % 4;
    const double R = decay_radius(f, N, {0.0}).radius;
    std::vector<double> ts{0.0}, ws{0.0};
    for (std::size_t k = 1; k < N; ++k) {
      ts.push_back(ts.back() + R + 0.01 + u(rng));
      ws.push_back(4 * u(rng) - 2);
    }
    const auto lam = times_with_freqs(ts, ws);
    const auto c = check_theorem1(f, lam);
    ASSERT_TRUE(c.certified());
    ++certified;
    const auto rep = gram_matrix(f, lam, grid);
    EXPECT_EQ(rep.verdict, IndependenceVerdict::Independent);
    EXPECT_GT(rep.relative_gap, 1e-6);
  }
  EXPECT_EQ(certified, 10);
}
