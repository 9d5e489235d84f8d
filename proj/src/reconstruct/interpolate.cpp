#include <chiprobe/reconstruct/interpolate.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>

namespace chiprobe::reconstruct {

std::string to_string(InterpolationMethod method) { return method == InterpolationMethod::linear ? "linear" : "cubic"; }

InterpolationMethod parse_interpolation_method(const std::string& name) {
  if (name == "linear") return InterpolationMethod::linear;
  if (name == "cubic") return InterpolationMethod::cubic;
  throw Error(Errc::config, "unknown interpolation method '" + name + "' (expected linear or cubic)");
}

int GridSpec::size() const { return int(std::lround(2 * extent / spacing)) + 1; }

void GridSpec::validate() const {
  if (!(extent > 0) || !(spacing > 0) || !std::isfinite(extent) || !std::isfinite(spacing))
    throw Error(Errc::domain, "grid extent and spacing must be positive");
  if (size() > 20001) throw Error(Errc::domain, "grid too fine: more than 20001 points per axis");
}

bool GridSpec::operator==(const GridSpec& other) const {
  return size() == other.size() && std::abs(extent - other.extent) <= 1e-12 * extent &&
         std::abs(spacing - other.spacing) <= 1e-12 * spacing;
}

ChiGrid sample_grid(const GridSpec& spec, const std::function<cdouble(cdouble)>& chi) {
  spec.validate();
  const int n = spec.size();
  ChiGrid grid{spec, Eigen::MatrixXcd(n, n)};
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) grid.values(iy, ix) = chi(spec.point(ix, iy));
  return grid;
}

std::vector<std::array<cdouble, 2>> estimate_gradients(const Triangulation& tri, const std::vector<cdouble>& values,
                                                       int max_iterations, double tolerance, int* iterations) {
  const auto& pts = tri.points();
  const auto adj = tri.vertex_neighbors();
  std::vector<std::array<cdouble, 2>> grad(pts.size(), {cdouble(0), cdouble(0)});
  int it = 0;
  for (; it < max_iterations; ++it) {
    double err = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (adj[i].empty()) continue;
      // Minimize sum over edges of the squared second derivative of the
      // edge cubic with respect to grad[i], holding the neighbours fixed.
      double q00 = 0, q01 = 0, q11 = 0;
      cdouble s0 = 0, s1 = 0;
      for (int j : adj[i]) {
        const double ex = pts[std::size_t(j)].x - pts[i].x;
        const double ey = pts[std::size_t(j)].y - pts[i].y;
        const double l = std::hypot(ex, ey);
        const double l3 = l * l * l;
        const cdouble df2 = -ex * grad[std::size_t(j)][0] - ey * grad[std::size_t(j)][1];
        const cdouble rhs = 6.0 * (values[i] - values[std::size_t(j)]) - 2.0 * df2;
        q00 += 4 * ex * ex / l3;
        q01 += 4 * ex * ey / l3;
        q11 += 4 * ey * ey / l3;
        s0 += rhs * ex / l3;
        s1 += rhs * ey / l3;
      }
      const double det = q00 * q11 - q01 * q01;
      if (!(std::abs(det) > 0)) continue;
      const cdouble r0 = (q11 * s0 - q01 * s1) / det;
      const cdouble r1 = (-q01 * s0 + q00 * s1) / det;
      double change = std::max(std::abs(grad[i][0] + r0), std::abs(grad[i][1] + r1));
      change /= std::max(1.0, std::max(std::abs(r0), std::abs(r1)));
      grad[i] = {-r0, -r1};
      err = std::max(err, change);
    }
    if (err < tolerance) {
      ++it;
      break;
    }
  }
  if (iterations) *iterations = it;
  return grad;
}

cdouble clough_tocher(const Triangulation& tri, int t, const std::array<double, 3>& b,
                      const std::vector<cdouble>& f, const std::vector<std::array<cdouble, 2>>& grad) {
  const auto& pts = tri.points();
  const auto& v = tri.triangles()[std::size_t(t)];
  const Point p0 = pts[std::size_t(v[0])], p1 = pts[std::size_t(v[1])], p2 = pts[std::size_t(v[2])];
  const double e12x = p1.x - p0.x, e12y = p1.y - p0.y;
  const double e23x = p2.x - p1.x, e23y = p2.y - p1.y;
  const double e31x = p0.x - p2.x, e31y = p0.y - p2.y;
  const auto& g0 = grad[std::size_t(v[0])];
  const auto& g1 = grad[std::size_t(v[1])];
  const auto& g2 = grad[std::size_t(v[2])];
  const cdouble f1 = f[std::size_t(v[0])], f2 = f[std::size_t(v[1])], f3 = f[std::size_t(v[2])];

  const cdouble df12 = g0[0] * e12x + g0[1] * e12y;
  const cdouble df21 = -(g1[0] * e12x + g1[1] * e12y);
  const cdouble df23 = g1[0] * e23x + g1[1] * e23y;
  const cdouble df32 = -(g2[0] * e23x + g2[1] * e23y);
  const cdouble df31 = g2[0] * e31x + g2[1] * e31y;
  const cdouble df13 = -(g0[0] * e31x + g0[1] * e31y);

  const cdouble c3000 = f1, c0300 = f2, c0030 = f3;
  const cdouble c2100 = (df12 + 3.0 * c3000) / 3.0;
  const cdouble c2010 = (df13 + 3.0 * c3000) / 3.0;
  const cdouble c1200 = (df21 + 3.0 * c0300) / 3.0;
  const cdouble c0210 = (df23 + 3.0 * c0300) / 3.0;
  const cdouble c1020 = (df31 + 3.0 * c0030) / 3.0;
  const cdouble c0120 = (df32 + 3.0 * c0030) / 3.0;

  const cdouble c2001 = (c2100 + c2010 + c3000) / 3.0;
  const cdouble c0201 = (c1200 + c0300 + c0210) / 3.0;
  const cdouble c0021 = (c1020 + c0120 + c0030) / 3.0;

  // Cross-boundary derivative kept linear along each edge; g[k] locates the
  // centroid of the neighbour across edge k (a hull edge uses the midpoint rule).
  std::array<double, 3> g{};
  for (int k = 0; k < 3; ++k) {
    const int nb = tri.neighbors()[std::size_t(t)][std::size_t(k)];
    if (nb < 0) {
      g[std::size_t(k)] = -0.5;
      continue;
    }
    const auto& w = tri.triangles()[std::size_t(nb)];
    const Point c{(pts[std::size_t(w[0])].x + pts[std::size_t(w[1])].x + pts[std::size_t(w[2])].x) / 3,
                  (pts[std::size_t(w[0])].y + pts[std::size_t(w[1])].y + pts[std::size_t(w[2])].y) / 3};
    const double area = orient(p0, p1, p2);
    const double c0 = orient(p1, p2, c) / area, c1 = orient(p2, p0, c) / area, c2 = 1 - c0 - c1;
    if (k == 0) g[0] = (2 * c2 + c1 - 1) / (2 - 3 * c2 - 3 * c1);
    if (k == 1) g[1] = (2 * c0 + c2 - 1) / (2 - 3 * c0 - 3 * c2);
    if (k == 2) g[2] = (2 * c1 + c0 - 1) / (2 - 3 * c1 - 3 * c0);
  }

  const cdouble c0111 =
      (g[0] * (-c0300 + 3.0 * c0210 - 3.0 * c0120 + c0030) + (-c0300 + 2.0 * c0210 - c0120 + c0021 + c0201)) / 2.0;
  const cdouble c1011 =
      (g[1] * (-c0030 + 3.0 * c1020 - 3.0 * c2010 + c3000) + (-c0030 + 2.0 * c1020 - c2010 + c2001 + c0021)) / 2.0;
  const cdouble c1101 =
      (g[2] * (-c3000 + 3.0 * c2100 - 3.0 * c1200 + c0300) + (-c3000 + 2.0 * c2100 - c1200 + c2001 + c0201)) / 2.0;

  const cdouble c1002 = (c1101 + c1011 + c2001) / 3.0;
  const cdouble c0102 = (c1101 + c0111 + c0201) / 3.0;
  const cdouble c0012 = (c1011 + c0111 + c0021) / 3.0;
  const cdouble c0003 = (c1002 + c0102 + c0012) / 3.0;

  // Coordinates within the micro-triangle that contains b.
  const double lo = std::min({b[0], b[1], b[2]});
  const double b1 = b[0] - lo, b2 = b[1] - lo, b3 = b[2] - lo, b4 = 3 * lo;

  return b1 * b1 * b1 * c3000 + 3 * b1 * b1 * b2 * c2100 + 3 * b1 * b1 * b3 * c2010 + 3 * b1 * b1 * b4 * c2001 +
         3 * b1 * b2 * b2 * c1200 + 6 * b1 * b2 * b4 * c1101 + 3 * b1 * b3 * b3 * c1020 + 6 * b1 * b3 * b4 * c1011 +
         3 * b1 * b4 * b4 * c1002 + b2 * b2 * b2 * c0300 + 3 * b2 * b2 * b3 * c0210 + 3 * b2 * b2 * b4 * c0201 +
         3 * b2 * b3 * b3 * c0120 + 6 * b2 * b3 * b4 * c0111 + 3 * b2 * b4 * b4 * c0102 + b3 * b3 * b3 * c0030 +
         3 * b3 * b3 * b4 * c0021 + 3 * b3 * b4 * b4 * c0012 + b4 * b4 * b4 * c0003;
}

namespace {

constexpr std::size_t kRadialMaxPoints = 3000;

}  // namespace

struct ScatteredInterpolant::Impl {
  InterpolationMethod method;
  std::vector<cdouble> values;
  std::unique_ptr<Triangulation> tri;
  std::vector<std::array<cdouble, 2>> grad;
  int grad_iterations = 0;
  // radial fallback
  std::vector<Point> centers;
  Eigen::VectorXcd weights;
  double width = 1.0;
};

ScatteredInterpolant::ScatteredInterpolant(std::vector<Point> points, std::vector<cdouble> values,
                                           InterpolationMethod method)
    : impl_(std::make_unique<Impl>()) {
  if (points.size() != values.size()) throw Error(Errc::domain, "points and values differ in length");
  if (points.empty()) throw Error(Errc::coverage, "no sample points to interpolate");
  impl_->method = method;
  impl_->values = std::move(values);
  if (points.size() >= 3) {
    impl_->tri = std::make_unique<Triangulation>(points);
    if (impl_->tri->degenerate()) impl_->tri.reset();
  }
  if (impl_->tri) {
    if (method == InterpolationMethod::cubic)
      impl_->grad = estimate_gradients(*impl_->tri, impl_->values, 400, 1e-6, &impl_->grad_iterations);
    return;
  }

  // Collinear cloud: Gaussian radial basis functions on an even subsample.
  const std::size_t stride = (points.size() + kRadialMaxPoints - 1) / kRadialMaxPoints;
  std::vector<cdouble> vals;
  for (std::size_t i = 0; i < points.size(); i += stride) {
    impl_->centers.push_back(points[i]);
    vals.push_back(impl_->values[i]);
  }
  const auto n = Eigen::Index(impl_->centers.size());
  double span = 0;
  for (const auto& c : impl_->centers) span = std::max(span, std::hypot(c.x, c.y));
  impl_->width = std::max(1e-3, std::min(1.0, 2 * span / double(n)));
  Eigen::MatrixXd phi(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double r = std::hypot(impl_->centers[std::size_t(i)].x - impl_->centers[std::size_t(j)].x,
                                  impl_->centers[std::size_t(i)].y - impl_->centers[std::size_t(j)].y);
      phi(i, j) = std::exp(-(r / impl_->width) * (r / impl_->width));
    }
  phi.diagonal().array() += 1e-10;
  const Eigen::VectorXcd rhs = Eigen::Map<const Eigen::VectorXcd>(vals.data(), n);
  impl_->weights = phi.cast<cdouble>().ldlt().solve(rhs);
}

ScatteredInterpolant::~ScatteredInterpolant() = default;
ScatteredInterpolant::ScatteredInterpolant(ScatteredInterpolant&&) noexcept = default;
ScatteredInterpolant& ScatteredInterpolant::operator=(ScatteredInterpolant&&) noexcept = default;

bool ScatteredInterpolant::radial_fallback() const { return !impl_->tri; }
int ScatteredInterpolant::gradient_iterations() const { return impl_->grad_iterations; }
const std::vector<std::array<cdouble, 2>>& ScatteredInterpolant::gradients() const { return impl_->grad; }

cdouble ScatteredInterpolant::operator()(Point p, int& hint) const {
  if (!impl_->tri) {
    cdouble sum = 0;
    for (std::size_t i = 0; i < impl_->centers.size(); ++i) {
      const double r = std::hypot(p.x - impl_->centers[i].x, p.y - impl_->centers[i].y) / impl_->width;
      if (r < 8) sum += impl_->weights(Eigen::Index(i)) * std::exp(-r * r);
    }
    return sum;
  }
  const auto loc = impl_->tri->locate(p, hint);
  if (loc.triangle < 0) return 0;
  hint = loc.triangle;
  if (impl_->method == InterpolationMethod::cubic)
    return clough_tocher(*impl_->tri, loc.triangle, loc.bary, impl_->values, impl_->grad);
  const auto& v = impl_->tri->triangles()[std::size_t(loc.triangle)];
  return loc.bary[0] * impl_->values[std::size_t(v[0])] + loc.bary[1] * impl_->values[std::size_t(v[1])] +
         loc.bary[2] * impl_->values[std::size_t(v[2])];
}

namespace {

std::string uncovered_annuli(const std::vector<Point>& pts, const GridSpec& grid, double width) {
  const double reach = grid.extent * std::numbers::sqrt2;
  const int count = std::max(1, int(std::ceil(reach / width)));
  std::vector<char> hit(std::size_t(count), 0);
  for (const auto& p : pts) {
    const int k = int(std::hypot(p.x, p.y) / width);
    if (k < count) hit[std::size_t(k)] = 1;
  }
  std::ostringstream out;
  bool any = false;
  for (int k = 0; k < count; ++k)
    if (!hit[std::size_t(k)]) {
      out << (any ? ", " : "") << '[' << k * width << ", " << (k + 1) * width << ')';
      any = true;
    }
  return any ? out.str() : std::string("none");
}

}  // namespace

ChiGrid interpolate_chi(const std::vector<CharacteristicSample>& samples, const GridSpec& grid,
                        const InterpolateOptions& options, InterpolationReport* report) {
  grid.validate();
  if (!(options.dedupe_tolerance > 0)) throw Error(Errc::domain, "dedupe tolerance must be positive");

  // Hermitian completion, then merge points closer than the tolerance. The
  // origin is pinned to chi(0) = 1.
  struct Keyed {
    std::int64_t kx, ky;
    std::size_t order;
    Point p;
    cdouble v;
  };
  const double tol = options.dedupe_tolerance;
  std::vector<Keyed> all;
  all.reserve(2 * samples.size() + 1);
  auto push = [&](cdouble beta, cdouble value) {
    if (!std::isfinite(beta.real()) || !std::isfinite(beta.imag()))
      throw Error(Errc::domain, "sample location is not finite");
    const auto kx = std::int64_t(std::llround(beta.real() / tol));
    const auto ky = std::int64_t(std::llround(beta.imag() / tol));
    if (kx == 0 && ky == 0) return;
    all.push_back({kx, ky, all.size(), {beta.real(), beta.imag()}, value});
  };
  for (const auto& s : samples) {
    push(s.beta, s.value);
    push(-s.beta, std::conj(s.value));
  }
  std::sort(all.begin(), all.end(), [](const Keyed& a, const Keyed& b) {
    if (a.kx != b.kx) return a.kx < b.kx;
    if (a.ky != b.ky) return a.ky < b.ky;
    return a.order < b.order;
  });
  std::vector<Point> pts{{0.0, 0.0}};
  std::vector<cdouble> vals{cdouble(1)};
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i > 0 && all[i].kx == all[i - 1].kx && all[i].ky == all[i - 1].ky) continue;
    pts.push_back(all[i].p);
    vals.push_back(all[i].v);
  }
  if (pts.size() < 4) {
    std::ostringstream msg;
    msg << "only " << pts.size() << " distinct sample point(s) after Hermitian completion; uncovered annuli |beta| in "
        << uncovered_annuli(pts, grid, options.annulus_width);
    throw Error(Errc::coverage, msg.str());
  }

  const std::size_t distinct = pts.size();
  const ScatteredInterpolant interp(std::move(pts), std::move(vals), options.method);
  const int n = grid.size();
  ChiGrid out{grid, Eigen::MatrixXcd::Zero(n, n)};
  std::size_t inside = 0;
  int row_hint = -1;
  for (int iy = 0; iy < n; ++iy) {
    int hint = row_hint;
    for (int ix = 0; ix < n; ++ix) {
      const cdouble beta = grid.point(ix, iy);
      const cdouble v = interp({beta.real(), beta.imag()}, hint);
      out.values(iy, ix) = v;
      if (v != cdouble(0)) ++inside;
      if (ix == n / 2) row_hint = hint;
    }
  }
  // Ties in the triangulation and the iterative gradients break the mirror
  // symmetry at the 1e-8 level; restore chi(-beta) = conj chi(beta) exactly.
  if (std::abs(grid.coordinate(n - 1) - grid.extent) <= 1e-9 * grid.extent) {
    const Eigen::MatrixXcd mirrored = out.values.reverse().conjugate();
    out.values = (out.values + mirrored) / 2.0;
  }
  // The grid may not contain the origin exactly; pin it where it does.
  const double i0 = grid.extent / grid.spacing;
  if (std::abs(i0 - std::round(i0)) < 1e-9) out.values(int(std::lround(i0)), int(std::lround(i0))) = 1;

  if (report) {
    report->input_samples = samples.size();
    report->distinct_points = distinct;
    report->radial_fallback = interp.radial_fallback();
    report->gradient_iterations = interp.gradient_iterations();
    report->grid_points_inside = inside;
  }
  return out;
}

}  // namespace chiprobe::reconstruct
