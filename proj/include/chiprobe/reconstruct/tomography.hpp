#pragma once

// Density-matrix reconstruction from a gridded characteristic function and
// fidelity scores.

#include <chiprobe/reconstruct/interpolate.hpp>
#include <chiprobe/states.hpp>

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace chiprobe::reconstruct {

struct ReconstructOptions {
  /// Largest allowed |chi| on the outer grid ring relative to the peak.
  double tail_tolerance = 1e-3;
  /// Required agreement of the two quadrature paths.
  double path_tolerance = 1e-6;
  /// Evaluate the extended-precision path and compare against the first.
  bool cross_check = true;
};

struct ReconstructionDiagnostics {
  double hermiticity = 0;     ///< ||rho - rho^dagger||_max before symmetrization
  double trace_error = 0;     ///< |Tr rho - 1|
  double min_eigenvalue = 0;  ///< negative values signal a nonphysical estimate
  double tail_ratio = 0;      ///< outer-ring max |chi| over peak |chi|
  double path_difference = 0; ///< max elementwise gap between the two quadrature paths
  bool nonphysical = false;
};

struct ReconstructionResult {
  Eigen::MatrixXcd rho_tilde;
  GridSpec grid;
  ReconstructionDiagnostics residuals;
  /// Set by attach_fidelity when a target is known.
  std::optional<double> fidelity;
};

/// rho = (h^2 / pi) sum_j chi(beta_j) D^dagger(beta_j), truncated to `dim`
/// levels and Hermitized. Grid points with chi = 0 are skipped. A zero grid
/// returns the zero matrix flagged nonphysical. An outer ring above the tail
/// tolerance is a coverage error; disagreeing paths are a convergence error.
ReconstructionResult reconstruct_rho(const ChiGrid& chi, int dim, const ReconstructOptions& options = {});

/// Matrix elements <m|D^dagger(beta)|n> from the explicit finite sum in
/// extended precision, the second quadrature path.
Eigen::MatrixXcd displacement_dagger_series(cdouble beta, int dim);

/// (1/pi) integral of chi_a chi_b^* over the common grid (real part).
double chi_overlap(const ChiGrid& a, const ChiGrid& b);

/// <phi| rho |phi> for a pure target, with phi truncated to rho's dimension.
double pure_state_fidelity(const ReferenceState& target, const Eigen::MatrixXcd& rho);

struct FidelityReport {
  double chi_overlap = 0;
  std::optional<double> pure_state;
};

/// Both fidelity forms against a pure reference: the chi overlap on the
/// grid of `estimate`, and <phi|rho|phi> when a reconstruction is given.
FidelityReport fidelity(const ReferenceState& target, const ChiGrid& estimate,
                        const Eigen::MatrixXcd* rho = nullptr);

/// Closest density matrix in the 2-norm: eigenvalues are shifted to unit
/// trace with negatives zeroed.
Eigen::MatrixXcd nearest_density_matrix(const Eigen::MatrixXcd& rho);

}  // namespace chiprobe::reconstruct
