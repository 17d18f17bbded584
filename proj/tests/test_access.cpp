#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "corra/access.hpp"
#include "corra/oracles.hpp"
#include "test_support.hpp"

namespace corra {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(PilotBook, SingleSymbol) {
  const auto b = make_pilot_book(1);
  ASSERT_EQ(b.length(), 1);
  EXPECT_NEAR(std::abs(b.sequence(0)(0) - Complex(1.0, 0.0)), 0.0, 1e-15);
}

TEST(PilotBook, OrthogonalUnitModulus) {
  for (int tau : {2, 4, 7, 20}) {
    const auto b = make_pilot_book(tau);
    const CMatrix g = b.sequences().adjoint() * b.sequences();
    EXPECT_LE((g - tau * CMatrix::Identity(tau, tau)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((b.sequences().cwiseAbs().array() - 1.0).abs().maxCoeff(), 1e-12);
  }
  const auto b4 = make_pilot_book(4);
  EXPECT_NEAR(b4.sequence(0).squaredNorm(), 4.0, 1e-12);
  EXPECT_NEAR(std::abs(b4.sequence(0).dot(b4.sequence(1))), 0.0, 1e-12);
}

TEST(SampleActiveSet, DegenerateProbabilities) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    EXPECT_TRUE(sample_active_set(10, 0.0, rng).empty());
    const auto all = sample_active_set(10, 1.0, rng);
    ASSERT_EQ(all.size(), 10u);
    for (int d = 0; d < 10; ++d) EXPECT_EQ(all[d], d);
  }
  EXPECT_THROW(sample_active_set(3, 1.5, rng), std::invalid_argument);
}

TEST(SampleActiveSet, ChiSquaredAgainstBinomial) {
  const int k = 120;
  const double p = 1.0 / 3.0;
  const int n = 100000;
  Rng rng(2024);
  std::vector<long> hist(k + 1, 0);
  for (int t = 0; t < n; ++t) ++hist[sample_active_set(k, p, rng).size()];

  // Pool tail bins so that every expected count is at least 5.
  const boost::math::binomial_distribution<double> binom(k, p);
  std::vector<double> expected, observed;
  double e_acc = 0.0, o_acc = 0.0;
  for (int c = 0; c <= k; ++c) {
    e_acc += n * boost::math::pdf(binom, c);
    o_acc += static_cast<double>(hist[c]);
    if (e_acc >= 5.0 && n * boost::math::cdf(boost::math::complement(binom, c)) >= 5.0) {
      expected.push_back(e_acc);
      observed.push_back(o_acc);
      e_acc = o_acc = 0.0;
    }
  }
  expected.back() += e_acc;
  observed.back() += o_acc;

  double chi2 = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i)
    chi2 += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(expected.size() - 1));
  EXPECT_LT(chi2, boost::math::quantile(dist, 0.99)) << "bins " << expected.size();
}

TEST(AssignPilots, StaysInGroupAndPartitionsActiveSet) {
  const GroupingPattern p{{{0, 2, 4}, {1, 3, 5}}, {{0, 1}, {2, 3, 4}}, {0, 1, 0, 1, 0, 1}};
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto active = sample_active_set(6, 0.6, rng);
    const auto ev = assign_pilots(active, p, rng);
    std::vector<int> covered;
    for (const auto& set : ev.distinct_collision_sets()) covered.insert(covered.end(), set.begin(), set.end());
    std::sort(covered.begin(), covered.end());
    EXPECT_EQ(covered, active);
    for (int d : active) {
      const auto& pilots = p.pilots_of(d);
      EXPECT_NE(std::find(pilots.begin(), pilots.end(), ev.pilot_of[d]), pilots.end());
      const auto& c = ev.collision_set(d);
      EXPECT_NE(std::find(c.begin(), c.end(), d), c.end());
      for (int j : c) {
        EXPECT_EQ(ev.pilot_of[j], ev.pilot_of[d]);
        const auto& back = ev.collision_set(j);
        EXPECT_NE(std::find(back.begin(), back.end(), d), back.end());
      }
    }
  }
}

TEST(AssignPilots, SinglePilotGroupAlwaysCollides) {
  const GroupingPattern p{{{0, 1}}, {{0}}, {0, 0}};
  Rng rng(4);
  for (int t = 0; t < 20; ++t) EXPECT_EQ(assign_pilots({0, 1}, p, rng).colliders(0), (IndexSet{1}));
}

TEST(AssignPilots, TwoPilotCollisionFrequencyIsHalf) {
  const GroupingPattern p = traditional_pattern(2, 2);
  Rng rng(5);
  const int n = 100000;
  long hits = 0;
  for (int t = 0; t < n; ++t) hits += assign_pilots({0, 1}, p, rng).colliders(0).empty() ? 0 : 1;
  const double f = static_cast<double>(hits) / n;
  EXPECT_LE(std::abs(f - 0.5), 3.0 * std::sqrt(0.25 / n));
}

TEST(ColliderPmf, SingleActiveDevice) {
  const auto pmf = collider_count_pmf(10, 4, 2, 1);
  ASSERT_EQ(pmf.size(), 1u);
  EXPECT_DOUBLE_EQ(pmf[0], 1.0);
}

TEST(ColliderPmf, SmallHandEnumeration) {
  const auto pmf = collider_count_pmf(3, 2, 1, 2);
  ASSERT_EQ(pmf.size(), 2u);
  EXPECT_NEAR(pmf[0], 0.5, 1e-15);
  EXPECT_NEAR(pmf[1], 0.5, 1e-15);
}

TEST(ColliderPmf, MatchesBruteForceUpToEightDevices) {
  for (int k = 1; k <= 8; ++k)
    for (int u = 1; u <= k; ++u)
      for (int w = 1; w <= 3; ++w)
        for (int ka = 1; ka <= k; ++ka) {
          const auto f = collider_count_pmf(k, u, w, ka);
          const auto b = oracle::brute_force_collider_pmf(k, u, w, ka);
          ASSERT_EQ(f.size(), b.size());
          for (std::size_t c = 0; c < f.size(); ++c)
            EXPECT_NEAR(f[c], b[c], 1e-12) << k << ' ' << u << ' ' << w << ' ' << ka << " c=" << c;
        }
}

TEST(ColliderPmf, NormalisedOnSweepGrid) {
  for (int k = 1; k <= 20; ++k)
    for (int u = 1; u <= k; ++u)
      for (int w = 1; w <= 4; ++w)
        for (int ka = 1; ka <= k; ++ka) {
          const auto f = collider_count_pmf(k, u, w, ka);
          EXPECT_NEAR(std::accumulate(f.begin(), f.end(), 0.0), 1.0, 1e-9);
          for (double x : f) EXPECT_GE(x, 0.0);
        }
}

TEST(ColliderPmf, LargeArgumentsStayFinite) {
  const auto f = collider_count_pmf(120, 60, 2, 60);
  EXPECT_NEAR(std::accumulate(f.begin(), f.end(), 0.0), 1.0, 1e-9);
}

TEST(ColliderPmf, MatchesGenerativeProcessAtScale) {
  const auto chk = oracle::collider_pmf_frequencies(120, 6, 2, 40, 200000, 77);
  EXPECT_LE(chk.max_z, 3.0);
}

TEST(ColliderPmf, RejectsOutOfRange) {
  EXPECT_THROW(collider_count_pmf(5, 6, 1, 2), std::invalid_argument);
  EXPECT_THROW(collider_count_pmf(5, 2, 0, 2), std::invalid_argument);
  EXPECT_THROW(collider_count_pmf(5, 2, 1, 0), std::invalid_argument);
  EXPECT_THROW(collider_count_pmf(5, 2, 1, 6), std::invalid_argument);
}

TEST(ReceivedPilotSignal, NoDevicesNoNoise) {
  Rng rng(6);
  const auto ev = make_access_event({}, {}, 3);
  const CMatrix y = received_pilot_signal(ev, {}, make_pilot_book(4), kInf, rng, 5);
  EXPECT_EQ(y.rows(), 5);
  EXPECT_EQ(y.cols(), 4);
  EXPECT_EQ(y.norm(), 0.0);
}

TEST(ReceivedPilotSignal, SingleDeviceIsRankOne) {
  Rng rng(7);
  const auto book = make_pilot_book(4);
  const CVector h = rng.complex_normal_vector(6);
  const auto ev = make_access_event({1}, {2}, 3);
  const CMatrix y = received_pilot_signal(ev, {h}, book, kInf, rng);
  EXPECT_LE((y - h * book.sequence(2).transpose()).norm(), 1e-14);
}

TEST(ReceivedPilotSignal, NoisePowerIsInverseSnr) {
  Rng rng(8);
  const double rho = 4.0;
  const auto book = make_pilot_book(2);
  const auto ev = make_access_event({}, {}, 1);
  double acc = 0.0;
  const int n = 100000;
  for (int t = 0; t < n; ++t) acc += received_pilot_signal(ev, {}, book, rho, rng, 1).squaredNorm() / 2.0;
  EXPECT_NEAR(acc / n, 1.0 / rho, 0.02 / rho);
}

TEST(Decorrelate, ScalesSingleChannelByPilotLength) {
  Rng rng(9);
  const auto book = make_pilot_book(5);
  const CVector h = rng.complex_normal_vector(4);
  const auto ev = make_access_event({0}, {3}, 2);
  const CMatrix y = received_pilot_signal(ev, {h}, book, kInf, rng);
  EXPECT_LE((decorrelate(y, book.sequence(3)) - 5.0 * h).norm(), 1e-13);
  EXPECT_LE(decorrelate(y, book.sequence(1)).norm(), 1e-13);
}

TEST(Decorrelate, SumsCollidingChannels) {
  Rng rng(10);
  const auto book = make_pilot_book(3);
  const CVector h0 = rng.complex_normal_vector(4), h1 = rng.complex_normal_vector(4),
                h2 = rng.complex_normal_vector(4);
  const auto ev = make_access_event({0, 1, 2}, {1, 1, 2}, 3);
  const CMatrix y = received_pilot_signal(ev, {h0, h1, h2}, book, kInf, rng);
  EXPECT_LE((decorrelate(y, book.sequence(1)) - 3.0 * (h0 + h1)).norm(), 1e-13);
}

TEST(Decorrelate, NoiseCovariance) {
  Rng rng(11);
  const int m = 4, tau = 3;
  const double rho = 2.0;
  const auto book = make_pilot_book(tau);
  const auto ev = make_access_event({}, {}, 1);
  CMatrix acc = CMatrix::Zero(m, m);
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    const CVector y = decorrelate(received_pilot_signal(ev, {}, book, rho, rng, m), book.sequence(0));
    acc += y * y.adjoint();
  }
  const CMatrix target = CMatrix::Identity(m, m) * (tau / rho);
  EXPECT_LE(test::rel_frobenius(acc / n, target), 0.03);
}

TEST(Decorrelate, LinearInReceivedSignal) {
  Rng rng(12);
  const auto book = make_pilot_book(4);
  CMatrix a(3, 4), b(3, 4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) {
      a(i, j) = rng.complex_normal();
      b(i, j) = rng.complex_normal();
    }
  const Complex s(0.3, -1.2);
  const CVector lhs = decorrelate(a + s * b, book.sequence(2));
  const CVector rhs = decorrelate(a, book.sequence(2)) + s * decorrelate(b, book.sequence(2));
  EXPECT_LE((lhs - rhs).norm(), 1e-13);
}

TEST(PatternCapacity, Examples) {
  EXPECT_TRUE(pattern_capacity_check(4, 2, 2));
  EXPECT_FALSE(pattern_capacity_check(5, 2, 2));
  for (long l : {1L, 3L, 40L}) EXPECT_TRUE(pattern_capacity_check(1, 1, l));
  EXPECT_FALSE(pattern_capacity_check(2, 1, 100));
  EXPECT_TRUE(pattern_capacity_check(1000000000000L, 2, 64));
  EXPECT_THROW(pattern_capacity_check(0, 2, 2), std::invalid_argument);
}

TEST(SimConfig, RejectsInconsistentKnobs) {
  SimConfig c;
  EXPECT_NO_THROW(c.validate());
  c.tau_u = c.tau_p - 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SimConfig{};
  c.groups = 3;  // does not divide tau_p = 20
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SimConfig{};
  c.p_a = -0.1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace corra
