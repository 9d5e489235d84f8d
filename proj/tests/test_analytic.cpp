#include <chiprobe/analytic.hpp>
#include <chiprobe/states.hpp>

#include <doctest.h>

#include <numbers>
#include <random>

using namespace chiprobe;
using namespace chiprobe::analytic;
using cd = std::complex<double>;
using cld = std::complex<long double>;

namespace {

constexpr double pi = std::numbers::pi;

OscillatorParams weak(double gamma, double nbar = 0) { return {1.0, gamma, nbar, 0.075}; }

PulseSequence random_sequence(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.05, 2 * pi);
  std::vector<double> t(static_cast<std::size_t>(n));
  for (auto& x : t) x = u(rng);
  return PulseSequence(t);
}

OscillatorParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {0.5 + u(rng), 0.2 * u(rng), 2 * u(rng), 0.3 * u(rng)};
}

// The displacement sum written with coupling c and frequency w as free
// parameters: c sum_n (1 - e^{-i w tau_n})^2 e^{-2 i w R_n}, R_n = sum_{k>n} tau_k.
cd displacement_sum(cd c, cd w, const PulseSequence& seq) {
  cd acc = 0;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    double rest = 0;
    for (std::size_t k = n + 1; k < seq.size(); ++k) rest += seq[k];
    const cd d = 1.0 - std::exp(cd(0, -1) * w * seq[n]);
    acc += d * d * std::exp(cd(0, -2) * w * rest);
  }
  return c * acc;
}

bool near(cd a, cd b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("complex frequency and coupling") {
  CHECK(complex_frequency(OscillatorParams{1, 0, 0, 0}) == cd(1, 0));
  CHECK(near(complex_frequency(OscillatorParams{1, 0.01, 0, 0}), cd(1, -0.005), 1e-17));
  const OscillatorParams p{1.3, 0.07, 0, 0};
  CHECK(frequency_norm2(p) == doctest::Approx(std::norm(complex_frequency(p))).epsilon(1e-15));

  CHECK(near(epsilon(weak(0)), cd(0.0375, 0), 1e-17));
  CHECK(epsilon(OscillatorParams{1, 0.01, 0, 0}) == cd(0, 0));
  const cld ref = 0.075L / (2.0L * cld(1.0L, -0.005L));
  const cd eps = epsilon(weak(0.01));
  CHECK(std::abs(eps - cd(ref)) < 1e-17);
  CHECK(near(eps, cd(0.0374991, 1.87495e-4), 1e-7));
}

TEST_CASE("interference decay") {
  CHECK(gamma_interference(weak(0)) == 0.0);
  CHECK(gamma_interference(OscillatorParams{1, 0.01, 0.4, 0}) == 0.0);
  const auto p = weak(0.01);
  CHECK(gamma_interference(p) > 0);  // finite at zero temperature
  const cd via_xi1 = cd(0, 1) * p.g * skew_params(p).xi1 / 2.0;
  CHECK(std::abs(via_xi1.imag()) < 1e-18);
  CHECK(gamma_interference(p) == doctest::Approx(via_xi1.real()).epsilon(1e-14));
  CHECK(gamma_interference(p) == doctest::Approx(2.81243e-5).epsilon(1e-5));
}

TEST_CASE("skew displacement parameters") {
  SUBCASE("undamped reduction") {
    const auto xi = skew_params(OscillatorParams{1.0, 0.0, 0.7, 0.3});
    CHECK(xi.xi1 == cd(0, 0));
    CHECK(near(xi.xi2, cd(0.15, 0), 1e-16));
    CHECK(near(xi.xi3, cd(-0.15, 0), 1e-16));
  }
  SUBCASE("weak damping value") {
    const auto xi = skew_params(weak(0.01));
    CHECK(std::abs(xi.xi1.real()) < 1e-18);
    CHECK(xi.xi1.imag() == doctest::Approx(-7.49981e-4).epsilon(1e-5));
    // -i g gamma / |nu~|^2 at nbar = 0
    CHECK(xi.xi1.imag() == doctest::Approx(-0.075 * 0.01 / (1 + 0.01 * 0.01 / 4)).epsilon(1e-14));
  }
  SUBCASE("relations hold over random parameters") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
      const auto p = random_params(rng);
      const auto xi = skew_params(p);
      CHECK(near(xi.xi2 - xi.xi3, 2.0 * std::conj(epsilon(p)), 1e-15));
      const cd gam = cd(0, 1) * p.g * xi.xi1 / 2.0;
      CHECK(std::abs(gam.imag()) < 1e-15);
      CHECK(std::abs(gam.real() - gamma_interference(p)) < 1e-15);
      CHECK(gamma_interference(p) >= 0);
    }
  }
}

TEST_CASE("time-dependent occupation") {
  const OscillatorParams p{1, 0.1, 0.5, 0};
  CHECK(nbar_t(p, 0.0) == 0.0);
  long double series = 0, term = -1;
  for (int k = 1; k < 30; ++k) {
    term *= -0.1L / k;
    series += term;
  }
  CHECK(nbar_t(p, 1.0) == doctest::Approx(double(series)).epsilon(1e-14));
  CHECK(nbar_t(p, 1.0) == doctest::Approx(0.0951626).epsilon(1e-6));
  CHECK(nbar_t(p, 1e4) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(nbar_t(p, -1.0), Error);
}

TEST_CASE("probe-diagonal displacement") {
  CHECK(std::abs(upsilon(weak(0), PulseSequence({2 * pi, 2 * pi, 2 * pi}))) < 1e-15);
  CHECK(upsilon(OscillatorParams{1, 0.01, 0, 0}, PulseSequence({0.4, 1.1})) == cd(0, 0));
  CHECK(near(upsilon(weak(0), PulseSequence({pi})), cd(0.15, 0), 1e-15));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_params(rng);
    const auto seq = random_sequence(rng, 1 + i % 7);
    CHECK(near(upsilon(p, seq), displacement_sum(epsilon(p), complex_frequency(p), seq), 1e-13));
  }
}

TEST_CASE("accessible point") {
  SUBCASE("decoupled probe") { CHECK(zeta(OscillatorParams{1, 0.01, 0, 0}, PulseSequence({0.3, 0.9})) == cd(0, 0)); }
  SUBCASE("half-period spacing reaches 4 N g / nu") {
    for (int n : {1, 2, 7, 20}) {
      const auto z = zeta(weak(0), PulseSequence(std::vector<double>(std::size_t(n), pi)));
      CHECK(std::abs(std::abs(z) - 4 * n * 0.075) < 1e-12);
    }
  }
  SUBCASE("mirror of the displacement sum") {
    // zeta = e^{i nu~* T} times the displacement sum with (eps, nu~) -> (2 eps*, nu~*)
    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
      const auto p = random_params(rng);
      const auto seq = random_sequence(rng, 1 + i % 9);
      const cd wc = std::conj(complex_frequency(p));
      const cd mirrored = std::exp(cd(0, 1) * wc * seq.total_time()) *
                          displacement_sum(2.0 * std::conj(epsilon(p)), wc, seq);
      CHECK(near(zeta(p, seq), mirrored, 1e-12));
    }
  }
  SUBCASE("closed form for equal spacing") {
    const auto p = weak(1e-4);
    const double t0 = 0.3 * 2 * pi;
    const cd closed = zeta_equidistant_closed(p, t0, 5);
    const cd summed = zeta(p, PulseSequence(std::vector<double>(5, t0)));
    CHECK(std::abs(closed - summed) <= 1e-10 * std::abs(summed));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.01, 2 * pi - 0.01);
    for (int i = 0; i < 300; ++i) {
      const double tau = u(rng);
      if (std::abs(tau - pi) < 1e-3) continue;
      const int n = 1 + i % 20;
      const auto q = weak(i % 2 ? 0.0 : 0.01);
      const cd s = zeta(q, PulseSequence(std::vector<double>(std::size_t(n), tau)));
      CHECK(std::abs(zeta_equidistant_closed(q, tau, n) - s) <= 1e-10 * std::max(std::abs(s), 1e-3));
    }
    CHECK(std::abs(zeta_equidistant_closed(p, 1e-9, 3)) < 1e-15);
  }
  SUBCASE("tangent pole falls back to the sum") {
    CHECK_THROWS_AS(zeta_equidistant_closed(weak(0), pi, 20), Error);
    try {
      zeta_equidistant_closed(weak(0), pi, 20);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::pole);
    }
    CHECK(std::abs(std::abs(zeta_equidistant(weak(0), pi, 20)) - 6.0) < 1e-12);
    CHECK_THROWS_AS(zeta_equidistant_closed(weak(0), 1.0, 0), Error);
  }
  SUBCASE("long double evaluation agrees") {
    const auto seq = PulseSequence({0.4, 2.2, 5.1, 0.9});
    const auto p = weak(0.02, 0.3);
    const auto zl = zeta(p.cast<long double>(), seq.cast<long double>());
    CHECK(near(zeta(p, seq), cd(double(zl.real()), double(zl.imag())), 1e-15));
  }
}

TEST_CASE("segment displacement arguments") {
  const cd beta(0.3, -0.7);
  const auto seq = PulseSequence({0.5, 1.7, 3.0});
  SUBCASE("first segment carries -+beta") {
    CHECK(near(beta_n(weak(0.01), seq, beta, 1, +1), -beta, 1e-16));
    CHECK(near(beta_n(weak(0.01), seq, beta, 1, -1), beta, 1e-16));
  }
  SUBCASE("decoupled probe rotates beta") {
    const OscillatorParams p{1, 0.05, 0.2, 0};
    const cd wc = std::conj(complex_frequency(p));
    for (std::size_t n = 1; n <= 3; ++n) {
      cd rot = 1;
      for (std::size_t j = 1; j < n; ++j) rot *= std::exp(cd(0, -2) * wc * seq[j - 1]);
      CHECK(near(beta_n(p, seq, beta, n, +1), -beta * rot, 1e-15));
      CHECK(near(beta_n(p, seq, beta, n, -1), beta * rot, 1e-15));
      CHECK(phi_n(p, seq, n) == cd(0, 0));
    }
  }
  SUBCASE("phi_n is beta_+ at +zeta and beta_- at -zeta") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 200; ++i) {
      const auto p = random_params(rng);
      const auto s = random_sequence(rng, 1 + i % 8);
      const cd z = zeta(p, s);
      for (std::size_t n = 1; n <= s.size(); ++n) {
        CHECK(near(phi_n(p, s, n), beta_n(p, s, z, n, +1), 1e-12));
        CHECK(near(phi_n(p, s, n), beta_n(p, s, -z, n, -1), 1e-12));
      }
    }
  }
  SUBCASE("single segment") {
    const auto p = weak(0.01);
    const double tau = 1.3;
    const cd wc = std::conj(complex_frequency(p));
    const cd d = std::exp(cd(0, 1) * wc * tau) - 1.0;
    CHECK(near(phi_n(p, PulseSequence({tau}), 1), -2.0 * std::conj(epsilon(p)) * d * d, 1e-15));
  }
  CHECK_THROWS_AS(beta_n(weak(0), seq, beta, 0, 1), Error);
  CHECK_THROWS_AS(phi_n(weak(0), seq, 4), Error);
}

TEST_CASE("segment exponent") {
  CHECK(f_exponent(OscillatorParams{1, 0, 0, 0.075}, 0.7, cd(0.2, 0.1)) == 0.0);
  CHECK(f_exponent(OscillatorParams{1, 0.05, 0.4, 0}, 0.7, cd(0, 0)) == 0.0);
  CHECK(std::isfinite(f_exponent(OscillatorParams{1, 0.01, 0.3, 0.075}, 0.7, cd(0.2, 0.1))));
  CHECK_THROWS_AS(f_exponent(weak(0.01), -0.1, cd(0, 0)), Error);
}

TEST_CASE("scaling factors and measurement inversion") {
  const ProbeAmplitudes probe;
  const auto seq = PulseSequence({0.8, 0.8});
  SUBCASE("decoupled probe") {
    const OscillatorParams p{1, 0.05, 0.3, 0};
    const auto c = scaling_factor(p, probe, seq);
    CHECK(near(c.plus, cd(1, 0), 1e-15));
    CHECK(near(c.minus, cd(1, 0), 1e-15));
    const auto m = invert_measurement(p, probe, seq, cd(1, 0), cd(1, 0));
    CHECK(m.zeta == cd(0, 0));
    CHECK(near(m.chi_plus, cd(1, 0), 1e-15));
    CHECK(near(m.chi_minus, cd(1, 0), 1e-15));
    const ProbeAmplitudes tilted = ProbeAmplitudes::normalized({0.8, 0}, {0.6, 0});
    CHECK(near(scaling_factor(p, tilted, seq).plus, cd(1 / (2 * 0.48), 0), 1e-14));
  }
  SUBCASE("probe phase rotation") {
    const auto p = weak(0.01, 0.2);
    const double theta = 0.9;
    const ProbeAmplitudes rotated(std::polar(std::sqrt(0.5), theta), std::sqrt(0.5));
    const auto c0 = scaling_factor(p, probe, seq), c1 = scaling_factor(p, rotated, seq);
    CHECK(near(c1.plus, c0.plus * std::polar(1.0, -theta), 1e-15));
    CHECK(near(c1.minus, c0.minus * std::polar(1.0, theta), 1e-15));
    const ReferenceState state(Coherent{});
    const cd z = zeta(p, seq);
    for (const auto* pr : {&probe, &rotated}) {
      const auto [minus, plus] = forward_pauli(p, *pr, seq, state.chi(z));
      const auto m = invert_measurement(p, *pr, seq, minus, plus);
      CHECK(near(m.chi_plus, state.chi(z), 1e-14));
      CHECK(near(m.chi_minus, state.chi(-z), 1e-14));
      CHECK(m.hermiticity_residual < 1e-10);
    }
  }
  SUBCASE("degenerate probe") {
    const ProbeAmplitudes up({1.0, 0.0}, {0.0, 0.0});
    try {
      scaling_factor(weak(0.01), up, seq);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::degenerate_probe);
    }
  }
  CHECK_THROWS_AS(invert_measurement(weak(0.01), probe, seq, cd(std::nan(""), 0), cd(1, 0)), Error);
}

TEST_CASE("dephasing compensation") {
  CHECK(dephasing_compensation(0.0, 12.0) == 1.0);
  CHECK(dephasing_compensation(std::log(2.0) / 4, 4.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(dephasing_compensation(-1e-3, 1.0), Error);
  const auto p = weak(0.01);
  const auto seq = PulseSequence({0.4, 0.9});
  const double gd = 1e-3;
  const auto c0 = scaling_factor(p, ProbeAmplitudes{}, seq);
  const auto c1 = scaling_factor(p, ProbeAmplitudes{}, seq, gd);
  CHECK(near(c1.plus, c0.plus * std::exp(gd * seq.total_time()), 1e-15));
}

TEST_CASE("compensated summation") {
  CompensatedSum<double> s;
  s.add(cd(1e16, -1e16));
  for (int i = 0; i < 10; ++i) s.add(cd(1, 1));
  s.add(cd(-1e16, 1e16));
  CHECK(s.value() == cd(10, 10));
  CHECK(near(cexpm1(cd(1e-10, 2e-10)), cd(1e-10, 2e-10), 1e-19));
}
