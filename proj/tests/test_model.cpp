#include <chiprobe/model.hpp>

#include <doctest.h>

#include <limits>
#include <numbers>

using namespace chiprobe;

namespace {

// 1/(e^x - 1) = sum_k e^{-kx}, summed in long double.
long double bose_series(long double x) {
  long double sum = 0, term = 1;
  for (int k = 1; k < 20000; ++k) {
    term *= std::exp(-x);
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("thermal occupation from the energy ratio") {
  CHECK(nbar_from_ratio(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(nbar_from_ratio(1.0) == doctest::Approx(double(bose_series(1.0L))).epsilon(1e-15));
  CHECK(nbar_from_ratio(1.0) == doctest::Approx(0.58197670686932642).epsilon(1e-15));
  CHECK(nbar_from_ratio(50.0) < 1e-21);
  CHECK(nbar_from_ratio(std::numeric_limits<double>::infinity()) == 0.0);
  for (double x : {0.01, 0.3, 2.0, 7.5})
    CHECK(nbar_from_ratio(x) == doctest::Approx(double(bose_series(x))).epsilon(1e-12));
  CHECK_THROWS_AS(nbar_from_ratio(0.0), Error);
  CHECK_THROWS_AS(nbar_from_ratio(-1.0), Error);
}

TEST_CASE("family expansion") {
  const double t0 = 0.37;
  SUBCASE("equidistant") {
    const auto seq = expand_family(Equidistant{t0, 3});
    CHECK(seq == PulseSequence({t0, t0, t0}));
    CHECK(seq.total_time() == doctest::Approx(6 * t0));
  }
  SUBCASE("linear is palindromic with 2N - 1 segments and T = 2 N^2 tau0") {
    CHECK(expand_family(Linear{t0, 3}) == PulseSequence({t0, 2 * t0, 3 * t0, 2 * t0, t0}));
    for (int n = 1; n <= 25; ++n) {
      const auto seq = expand_family(Linear{t0, n});
      CHECK(seq.size() == std::size_t(2 * n - 1));
      CHECK(seq.total_time() == doctest::Approx(2.0 * n * n * t0).epsilon(1e-14));
    }
  }
  SUBCASE("random draws are reproducible and stream separated") {
    const auto a = expand_family(RandomFamily{5, 42, 7});
    CHECK(a == expand_family(RandomFamily{5, 42, 7}));
    CHECK_FALSE(a == expand_family(RandomFamily{5, 42, 8}));
    CHECK_FALSE(a == expand_family(RandomFamily{5, 43, 7}));
    for (double t : a.taus()) {
      CHECK(t > 0);
      CHECK(t < 2 * std::numbers::pi);
    }
    const auto ranged = expand_family(RandomFamily{50, 1, 1, 2.0, 3.0});
    for (double t : ranged.taus()) {
      CHECK(t >= 2.0);
      CHECK(t < 3.0);
    }
    const auto slow = expand_family(RandomFamily{50, 1, 1}, 0.5);
    for (double t : slow.taus()) CHECK(t < 4 * std::numbers::pi);
  }
  SUBCASE("random family averages T = 2 N pi / nu") {
    const int n = 10, draws = 20000;
    double mean = 0;
    for (int k = 0; k < draws; ++k) mean += expand_family(RandomFamily{n, 3, std::uint64_t(k)}).total_time();
    mean /= draws;
    // each tau is U(0, 2 pi): sd of T is 2 sqrt(N) * 2 pi / sqrt(12)
    const double sd = 2 * std::sqrt(double(n)) * 2 * std::numbers::pi / std::sqrt(12.0) / std::sqrt(double(draws));
    CHECK(std::abs(mean - 2 * n * std::numbers::pi) < 5 * sd);
  }
  SUBCASE("invalid members") {
    CHECK_THROWS_AS(expand_family(Equidistant{t0, 0}), Error);
    CHECK_THROWS_AS(expand_family(Linear{-1.0, 2}), Error);
    CHECK_THROWS_AS(expand_family(RandomFamily{0, 1, 1}), Error);
    try {
      expand_family(Equidistant{t0, 0});
    } catch (const Error& e) {
      CHECK(e.code() == Errc::empty_sequence);
    }
  }
  CHECK(family_kind(Linear{t0, 2}) == FamilyKind::linear);
  for (auto k : {FamilyKind::equidistant, FamilyKind::random, FamilyKind::linear})
    CHECK(parse_family_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_family_kind("geometric"), Error);
}

TEST_CASE("pulse sequence") {
  CHECK(PulseSequence({1.0, 2.0}).total_time() == 6.0);
  CHECK(total_time(PulseSequence({0.5})) == 1.0);
  CHECK_THROWS_AS(PulseSequence(std::vector<double>{}), Error);
  CHECK_THROWS_AS(PulseSequence({1.0, 0.0}), Error);
  CHECK_THROWS_AS(PulseSequence({1.0, std::numeric_limits<double>::quiet_NaN()}), Error);
  const auto ld = PulseSequence({0.1, 0.2}).cast<long double>();
  CHECK(ld.size() == 2);
}

TEST_CASE("probe amplitudes stay normalized") {
  const ProbeAmplitudes def;
  CHECK(std::norm(def.plus()) + std::norm(def.minus()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(def.coherence() - 0.5) < 1e-15);
  const auto n = ProbeAmplitudes::normalized({3.0, 1.0}, {0.0, 4.0});
  CHECK(std::abs(std::norm(n.plus()) + std::norm(n.minus()) - 1) < 1e-12);
  CHECK_THROWS_AS(ProbeAmplitudes({1.0, 0.0}, {1.0, 0.0}), Error);
  CHECK_THROWS_AS(ProbeAmplitudes::normalized(0.0, 0.0), Error);
  const ProbeAmplitudes up({1.0, 0.0}, {0.0, 0.0});
  CHECK(std::abs(up.coherence()) == 0.0);
}

TEST_CASE("oscillator parameter validation") {
  CHECK_NOTHROW(OscillatorParams{1, 0, 0, 0}.validate());
  CHECK_THROWS_AS((OscillatorParams{0, 0, 0, 0}.validate()), Error);
  CHECK_THROWS_AS((OscillatorParams{1, -1e-3, 0, 0}.validate()), Error);
  CHECK_THROWS_AS((OscillatorParams{1, 0, -0.1, 0}.validate()), Error);
  CHECK_THROWS_AS((OscillatorParams{1, 0, 0, std::numeric_limits<double>::infinity()}.validate()), Error);
}
