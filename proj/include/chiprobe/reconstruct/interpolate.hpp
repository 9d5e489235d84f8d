#pragma once

// Scattered-data interpolation of characteristic-function samples onto a
// regular grid in reciprocal phase space.

#include <chiprobe/reconstruct/samples.hpp>
#include <chiprobe/reconstruct/triangulation.hpp>

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace chiprobe::reconstruct {

enum class InterpolationMethod { linear, cubic };

std::string to_string(InterpolationMethod method);
InterpolationMethod parse_interpolation_method(const std::string& name);

/// Square grid over [-extent, extent]^2 with the given spacing.
struct GridSpec {
  double extent = 6.0;
  double spacing = 0.08;

  /// Points per axis.
  int size() const;
  /// Coordinate of index i along either axis.
  double coordinate(int i) const { return -extent + spacing * i; }
  cdouble point(int ix, int iy) const { return {coordinate(ix), coordinate(iy)}; }
  void validate() const;
  bool operator==(const GridSpec& other) const;
};

/// Gridded complex field; values(iy, ix) sits at beta = x_ix + i y_iy.
struct ChiGrid {
  GridSpec spec;
  Eigen::MatrixXcd values;
};

/// Grid filled with an exact characteristic function.
ChiGrid sample_grid(const GridSpec& spec, const std::function<cdouble(cdouble)>& chi);

/// Interpolant over a fixed point cloud. Values vanish outside the convex hull.
/// A collinear cloud has no triangulation and falls back to Gaussian radial
/// basis functions.
class ScatteredInterpolant {
 public:
  ScatteredInterpolant(std::vector<Point> points, std::vector<cdouble> values, InterpolationMethod method);
  ~ScatteredInterpolant();
  ScatteredInterpolant(ScatteredInterpolant&&) noexcept;
  ScatteredInterpolant& operator=(ScatteredInterpolant&&) noexcept;

  /// `hint` carries the last containing triangle between calls; pass the same
  /// variable for neighbouring query points.
  cdouble operator()(Point p, int& hint) const;
  cdouble operator()(Point p) const {
    int hint = -1;
    return (*this)(p, hint);
  }

  bool radial_fallback() const;
  /// Gauss-Seidel sweeps used by the gradient estimate (cubic only).
  int gradient_iterations() const;
  /// Per-vertex gradients (d/dx, d/dy); empty unless cubic.
  const std::vector<std::array<cdouble, 2>>& gradients() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Per-vertex gradients minimizing the global curvature of the piecewise cubic
/// interpolant, by Gauss-Seidel over vertex neighbourhoods.
std::vector<std::array<cdouble, 2>> estimate_gradients(const Triangulation& tri, const std::vector<cdouble>& values,
                                                       int max_iterations, double tolerance, int* iterations = nullptr);

/// Clough-Tocher cubic on triangle t at barycentric coordinates b, from vertex
/// values and gradients. Reproduces quadratics when the gradients are exact.
cdouble clough_tocher(const Triangulation& tri, int t, const std::array<double, 3>& b,
                      const std::vector<cdouble>& values, const std::vector<std::array<cdouble, 2>>& gradients);

struct InterpolateOptions {
  InterpolationMethod method = InterpolationMethod::cubic;
  double dedupe_tolerance = 1e-12;
  /// Width of the annuli reported by a coverage error.
  double annulus_width = 1.0;
};

struct InterpolationReport {
  std::size_t input_samples = 0;
  std::size_t distinct_points = 0;  ///< after Hermitian completion and deduplication
  bool radial_fallback = false;
  int gradient_iterations = 0;
  std::size_t grid_points_inside = 0;
};

/// Hermitian-completes the samples, merges coincident points, pins chi(0) = 1
/// and interpolates onto the grid. Fewer than four distinct points is a
/// coverage error naming the annuli |beta| in [r, r + w) that hold no sample.
ChiGrid interpolate_chi(const std::vector<CharacteristicSample>& samples, const GridSpec& grid,
                        const InterpolateOptions& options = {}, InterpolationReport* report = nullptr);

}  // namespace chiprobe::reconstruct
