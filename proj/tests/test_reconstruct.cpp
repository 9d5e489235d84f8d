#include <chiprobe/reconstruct/tomography.hpp>

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace chiprobe;
using namespace chiprobe::reconstruct;

namespace {

std::vector<Point> random_cloud(std::size_t n, unsigned seed, double radius = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<Point> pts;
  while (pts.size() < n) {
    const Point p{u(rng), u(rng)};
    if (p.x * p.x + p.y * p.y <= radius * radius) pts.push_back(p);
  }
  return pts;
}

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Monotone chain hull area.
double hull_area(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  std::vector<Point> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  double area = 0;
  for (std::size_t i = 0; i + 1 < k; ++i) area += h[i].x * h[i + 1].y - h[i + 1].x * h[i].y;
  return area / 2;
}

double triangle_area(const Triangulation& tri, const std::array<int, 3>& t) {
  const auto& p = tri.points();
  return cross(p[std::size_t(t[0])], p[std::size_t(t[1])], p[std::size_t(t[2])]) / 2;
}

std::vector<CharacteristicSample> samples_of(const ReferenceState& s, const std::vector<Point>& pts) {
  std::vector<CharacteristicSample> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const cdouble b(pts[i].x, pts[i].y);
    out.push_back({b, s.chi(b), SampleSource::external, 0, i});
  }
  return out;
}

ChiGrid exact_grid(const ReferenceState& s, GridSpec spec) {
  return sample_grid(spec, [&](cdouble b) { return s.chi(b); });
}

}  // namespace

TEST_CASE("Delaunay triangulation properties") {
  const auto pts = random_cloud(3000, 1);
  const Triangulation tri(pts);
  REQUIRE_FALSE(tri.degenerate());
  const auto& tris = tri.triangles();
  const auto& nbr = tri.neighbors();

  double area = 0;
  std::set<int> used;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    CHECK(triangle_area(tri, tris[t]) > 0);
    area += triangle_area(tri, tris[t]);
    for (int k = 0; k < 3; ++k) {
      used.insert(tris[t][std::size_t(k)]);
      const int n = nbr[t][std::size_t(k)];
      if (n < 0) continue;
      const auto& back = nbr[std::size_t(n)];
      CHECK(std::count(back.begin(), back.end(), int(t)) == 1);
    }
  }
  CHECK(used.size() == pts.size());
  CHECK(area == doctest::Approx(hull_area(tri.points())).epsilon(1e-12));
  // Euler: T = 2 n - 2 - h, so T < 2 n
  CHECK(tris.size() < 2 * pts.size());

  SUBCASE("empty circumcircles") {
    const auto& p = tri.points();
    for (std::size_t t = 0; t < tris.size(); t += 7) {
      const Point a = p[std::size_t(tris[t][0])], b = p[std::size_t(tris[t][1])], c = p[std::size_t(tris[t][2])];
      const double d = 2 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
      const double ux = ((a.x * a.x + a.y * a.y) * (b.y - c.y) + (b.x * b.x + b.y * b.y) * (c.y - a.y) +
                         (c.x * c.x + c.y * c.y) * (a.y - b.y)) / d;
      const double uy = ((a.x * a.x + a.y * a.y) * (c.x - b.x) + (b.x * b.x + b.y * b.y) * (a.x - c.x) +
                         (c.x * c.x + c.y * c.y) * (b.x - a.x)) / d;
      const double r2 = (a.x - ux) * (a.x - ux) + (a.y - uy) * (a.y - uy);
      for (const Point& q : p) CHECK((q.x - ux) * (q.x - ux) + (q.y - uy) * (q.y - uy) >= r2 * (1 - 1e-9));
    }
  }
  SUBCASE("point location") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int i = 0; i < 500; ++i) {
      const Point q{u(rng), u(rng)};
      const auto loc = tri.locate(q);
      REQUIRE(loc.triangle >= 0);
      const auto& t = tris[std::size_t(loc.triangle)];
      double x = 0, y = 0, sum = 0;
      for (int k = 0; k < 3; ++k) {
        CHECK(loc.bary[std::size_t(k)] >= -1e-12);
        sum += loc.bary[std::size_t(k)];
        x += loc.bary[std::size_t(k)] * tri.points()[std::size_t(t[std::size_t(k)])].x;
        y += loc.bary[std::size_t(k)] * tri.points()[std::size_t(t[std::size_t(k)])].y;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(x - q.x) < 1e-9);
      CHECK(std::abs(y - q.y) < 1e-9);
    }
    CHECK(tri.locate({3.0, 0.0}).triangle == -1);
    CHECK(tri.locate({-0.7, -0.9}, 0).triangle == -1);
  }
  SUBCASE("vertex neighbors are symmetric") {
    const auto vn = tri.vertex_neighbors();
    for (std::size_t i = 0; i < vn.size(); i += 13)
      for (int j : vn[i]) CHECK(std::count(vn[std::size_t(j)].begin(), vn[std::size_t(j)].end(), int(i)) == 1);
  }
}

TEST_CASE("triangulation edge cases") {
  CHECK(Triangulation({{0, 0}, {1, 1}, {2, 2}, {3, 3}}).degenerate());
  CHECK(Triangulation({{0, 0}, {1, 0}}).degenerate());
  const Triangulation square({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {1, 0}});
  CHECK(square.triangles().size() == 4);
  // a regular lattice is cocircular everywhere
  std::vector<Point> grid;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) grid.push_back({double(i), double(j)});
  const Triangulation lat(grid);
  CHECK(lat.triangles().size() == 2 * 19 * 19);
  for (const auto& t : lat.triangles()) CHECK(triangle_area(lat, t) == doctest::Approx(0.5));
  CHECK(orient({0, 0}, {1, 0}, {0, 1}) > 0);
  CHECK(orient({0, 0}, {1, 0}, {2, 0}) == 0);
  CHECK_THROWS_AS(Triangulation({{0, 0}, {1, std::nan("")}, {1, 1}}), Error);
}

TEST_CASE("Clough-Tocher element") {
  // complex quadratic with exact gradients
  auto f = [](Point p) { return cdouble(1 + 2 * p.x - p.y + 0.5 * p.x * p.x - p.x * p.y, 0.3 * p.y * p.y - p.x); };
  auto grad = [](Point p) {
    return std::array<cdouble, 2>{cdouble(2 + p.x - p.y, -1), cdouble(-1 - p.x, 0.6 * p.y)};
  };
  const auto pts = random_cloud(200, 7);
  const Triangulation tri(pts);
  std::vector<cdouble> values;
  std::vector<std::array<cdouble, 2>> grads;
  for (const auto& p : tri.points()) {
    values.push_back(f(p));
    grads.push_back(grad(p));
  }
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < 300; ++i) {
    const Point q{u(rng), u(rng)};
    const auto loc = tri.locate(q);
    REQUIRE(loc.triangle >= 0);
    CHECK(std::abs(clough_tocher(tri, loc.triangle, loc.bary, values, grads) - f(q)) < 1e-12);
  }
  SUBCASE("estimated gradients are exact for linear data") {
    std::vector<cdouble> lin;
    for (const auto& p : tri.points()) lin.push_back(cdouble(3 * p.x - 2 * p.y, p.x + p.y));
    int iterations = 0;
    const auto g = estimate_gradients(tri, lin, 400, 1e-6, &iterations);
    CHECK(iterations >= 1);
    for (const auto& gi : g) {
      CHECK(std::abs(gi[0] - cdouble(3, 1)) < 1e-6);
      CHECK(std::abs(gi[1] - cdouble(-2, 1)) < 1e-6);
    }
  }
}

TEST_CASE("scattered interpolant") {
  const auto pts = random_cloud(400, 3);
  std::vector<cdouble> vals;
  for (const auto& p : pts) vals.push_back(cdouble(p.x + 2 * p.y, -p.x));
  for (auto method : {InterpolationMethod::linear, InterpolationMethod::cubic}) {
    const ScatteredInterpolant f(pts, vals, method);
    CHECK_FALSE(f.radial_fallback());
    CHECK(std::abs(f({0.1, 0.2}) - cdouble(0.5, -0.1)) < 1e-6);
    CHECK(f({5.0, 5.0}) == cdouble(0, 0));
  }
  SUBCASE("samples on a single line use the radial fallback") {
    std::vector<Point> line;
    std::vector<cdouble> v;
    for (int i = 0; i <= 50; ++i) {
      line.push_back({-1 + 0.04 * i, 0});
      v.push_back(std::exp(-line.back().x * line.back().x));
    }
    const ScatteredInterpolant f(line, v, InterpolationMethod::cubic);
    CHECK(f.radial_fallback());
    CHECK(std::abs(f({0.2, 0}) - std::exp(-0.04)) < 1e-3);
  }
  CHECK(parse_interpolation_method(to_string(InterpolationMethod::linear)) == InterpolationMethod::linear);
  CHECK_THROWS_AS(parse_interpolation_method("nearest"), Error);
}

TEST_CASE("gridding the characteristic function") {
  const GridSpec spec{4.0, 0.1};
  CHECK(spec.size() == 81);
  CHECK(spec.coordinate(40) == doctest::Approx(0.0));
  CHECK_THROWS_AS((GridSpec{-1, 0.1}.validate()), Error);
  const ReferenceState coh(Coherent{});

  SUBCASE("dense disc of exact samples") {
    InterpolationReport report;
    const auto chi = interpolate_chi(samples_of(coh, random_cloud(80000, 5, 5.0)), spec, {}, &report);
    const auto ref = exact_grid(coh, spec);
    CHECK((chi.values - ref.values).cwiseAbs().maxCoeff() < 1e-3);
    CHECK(report.distinct_points > 80000);  // Hermitian completion doubles the cloud
    CHECK_FALSE(report.radial_fallback);
  }
  SUBCASE("Hermitian symmetry by construction") {
    const auto chi = interpolate_chi(samples_of(coh, random_cloud(2000, 6, 3.0)), spec);
    const int n = spec.size();
    double worst = 0;
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        worst = std::max(worst, std::abs(chi.values(iy, ix) - std::conj(chi.values(n - 1 - iy, n - 1 - ix))));
    CHECK(worst < 1e-12);
    CHECK(chi.values(40, 40) == cdouble(1, 0));
  }
  SUBCASE("origin alone does not cover the plane") {
    std::vector<CharacteristicSample> one{{0.0, 1.0, SampleSource::analytic, 0, 0}};
    try {
      interpolate_chi(one, spec);
      FAIL("expected a coverage error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::coverage);
    }
  }
}

TEST_CASE("density matrix reconstruction") {
  const GridSpec spec{4.0, 0.1};
  SUBCASE("coherent state") {
    const ReferenceState coh(Coherent{});
    const auto r = reconstruct_rho(exact_grid(coh, spec), 30);
    CHECK(pure_state_fidelity(coh, r.rho_tilde) >= 0.9999);
    CHECK(r.residuals.path_difference < 1e-6);
    CHECK(r.residuals.trace_error < 1e-3);
    CHECK(r.residuals.hermiticity < 1e-10);
  }
  SUBCASE("Fock pair populations") {
    const ReferenceState pair(FockPair{});
    const auto r = reconstruct_rho(exact_grid(pair, GridSpec{6.0, 0.1}), 30);
    const double expected[6] = {0, 0.5, 0, 0.5, 0, 0};
    for (int n = 0; n < 6; ++n) CHECK(std::abs(r.rho_tilde(n, n).real() - expected[n]) < 1e-4);
    CHECK(std::abs(r.rho_tilde(1, 3) - 0.5) < 1e-4);
    CHECK(r.residuals.path_difference < 1e-6);
  }
  SUBCASE("cat state paths agree") {
    // the cross terms peak at +-2 alpha, so the tail needs a wider grid
    const auto r = reconstruct_rho(exact_grid(ReferenceState(Cat{}), GridSpec{7.0, 0.1}), 30);
    CHECK(r.residuals.path_difference < 1e-6);
    CHECK(pure_state_fidelity(ReferenceState(Cat{}), r.rho_tilde) >= 0.9999);
  }
  SUBCASE("zero grid") {
    ChiGrid zero{spec, Eigen::MatrixXcd::Zero(spec.size(), spec.size())};
    const auto r = reconstruct_rho(zero, 10);
    CHECK(r.rho_tilde.norm() == 0.0);
    CHECK(r.residuals.nonphysical);
  }
  SUBCASE("truncated grid is rejected") {
    try {
      reconstruct_rho(exact_grid(ReferenceState(Coherent{}), GridSpec{1.5, 0.1}), 30);
      FAIL("expected a coverage error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::coverage);
    }
  }
  SUBCASE("displacement series matches the Fock matrix") {
    const cdouble b(0.7, -0.4);
    const auto series = displacement_dagger_series(b, 20);
    double worst = 0;
    for (int m = 0; m < 20; ++m)
      for (int n = 0; n < 20; ++n) worst = std::max(worst, std::abs(series(m, n) - displacement_element(m, n, -b)));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("fidelity") {
  const GridSpec spec{7.0, 0.08};
  const ReferenceState coh(Coherent{}), vac(Coherent{0.0});
  for (const auto& s : {ReferenceState(FockPair{}), coh, ReferenceState(Cat{})}) {
    const auto g = exact_grid(s, spec);
    CHECK(std::abs(chi_overlap(g, g) - 1) < 1e-4);
    const auto r = reconstruct_rho(g, 30);
    const auto f = fidelity(s, g, &r.rho_tilde);
    CHECK(std::abs(*f.pure_state - f.chi_overlap) < 1e-3);
  }
  const double expected = std::exp(-2.25);
  CHECK(std::abs(chi_overlap(exact_grid(coh, spec), exact_grid(vac, spec)) - expected) < 1e-6);
  CHECK(std::abs(pure_state_fidelity(coh, vac.density_matrix(30)) - expected) < 1e-6);
  CHECK_THROWS_AS(chi_overlap(exact_grid(coh, spec), exact_grid(coh, GridSpec{6.0, 0.08})), Error);

  SUBCASE("wider grids never lose fidelity") {
    for (const auto& s : {ReferenceState(FockPair{}), coh, ReferenceState(Cat{})}) {
      double previous = -1;
      for (double extent : {2.0, 3.0, 4.0, 5.0, 6.0}) {
        const GridSpec g{extent, 0.08};
        const double f = chi_overlap(exact_grid(s, g), exact_grid(s, g));
        CHECK(f >= previous - 1e-9);
        previous = f;
      }
    }
  }
  SUBCASE("projection to a density matrix") {
    Eigen::MatrixXcd rho = coh.density_matrix(12);
    rho(0, 0) -= 0.05;
    rho(5, 5) += 0.02;
    const auto p = nearest_density_matrix(rho);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    CHECK(std::abs(p.trace() - 1.0) < 1e-12);
  }
}

TEST_CASE("sample collection") {
  const OscillatorParams p{1, 1e-4, 0, 0.075};
  const ProbeAmplitudes probe;
  const ReferenceState coh(Coherent{});
  SUBCASE("decoupled probe yields chi(0) once") {
    SamplingPlan plan;
    plan.sequences.push_back(Equidistant{0.9, 2});
    const auto s = collect_samples(OscillatorParams{1, 1e-4, 0, 0}, probe, plan, coh, {});
    REQUIRE(s.size() == 1);
    CHECK(s[0].beta == cdouble(0, 0));
    CHECK(std::abs(s[0].value - 1.0) < 1e-15);
  }
  SUBCASE("conjugate pairs in plan order") {
    const auto plan = SamplingPlan::random(3, 20, 4);
    const auto s = collect_samples(p, probe, plan, coh, {});
    REQUIRE(s.size() == 2 * plan.size());
    for (std::size_t i = 0; i < s.size(); i += 2) {
      CHECK(s[i].sequence_id == i / 2);
      CHECK(s[i + 1].beta == -s[i].beta);
      CHECK(std::abs(s[i + 1].value - std::conj(s[i].value)) < 1e-12);
      CHECK(std::abs(s[i].value - coh.chi(s[i].beta)) < 1e-10);
      CHECK((s[i + 1].flags & kConjugate));
    }
    CollectOptions threaded;
    threaded.jobs = 3;
    const auto t = collect_samples(p, probe, plan, coh, threaded);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(t[i].beta == s[i].beta);
      CHECK(t[i].value == s[i].value);
    }
  }
  SUBCASE("oracle and analytic modes agree") {
    SamplingPlan plan = SamplingPlan::equidistant(3, 4);
    plan.append(SamplingPlan::linear(2, 3));
    plan.append(SamplingPlan::random(2, 3, 9));
    const OscillatorParams damped{1, 1e-2, 0, 0.075};
    const auto a = collect_samples(damped, probe, plan, coh, {});
    CollectOptions oracle;
    oracle.mode = SampleMode::oracle;
    oracle.fock_dim = 30;
    const auto o = collect_samples(damped, probe, plan, coh, oracle);
    REQUIRE(a.size() == o.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].beta == o[i].beta);
      CHECK(std::abs(a[i].value - o[i].value) < 1e-4);
      CHECK(o[i].source == SampleSource::oracle);
    }
  }
  SUBCASE("accessible points") {
    const auto plan = SamplingPlan::equidistant(20, 200);
    const auto z = accessible_points(OscillatorParams{1, 0, 0, 0.075}, plan);
    double worst = 0;
    for (const auto& v : z) worst = std::max(worst, std::abs(v));
    CHECK(std::abs(worst - 6.0) < 1e-6);
    const auto pole = accessible_point(OscillatorParams{1, 0, 0, 0.075}, Equidistant{std::numbers::pi, 3});
    CHECK((pole.flags & kPole));
    CHECK(std::abs(std::abs(pole.zeta) - 0.9) < 1e-12);
  }
  SUBCASE("plans") {
    const auto r = SamplingPlan::random(2, 3, 5);
    REQUIRE(r.size() == 6);
    CHECK(std::get<RandomFamily>(r.sequences[4]).stream == ((std::uint64_t(2) << 32) | 1));
    CHECK_THROWS_AS(SamplingPlan{}.validate(), Error);
    CHECK_THROWS_AS(SamplingPlan::equidistant(0, 5), Error);
  }
  CHECK_THROWS_AS(collect_samples(p, ProbeAmplitudes({1.0, 0.0}, {0.0, 0.0}), SamplingPlan::equidistant(1, 2), coh, {}),
                  Error);
}
