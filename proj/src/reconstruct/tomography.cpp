#include <chiprobe/fock/space.hpp>
#include <chiprobe/reconstruct/tomography.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace chiprobe::reconstruct {

namespace {

// <m|D(b)|n> = e^{-|b|^2/2} sum_k sqrt(m! n!) / (k! (m-k)! (n-k)!) b^{m-k} (-b^*)^{n-k}
// in extended precision. The combinatorial weights depend only on the
// dimension and are tabulated once.
class DisplacementSeries {
 public:
  using LReal = long double;
  using LCx = std::complex<LReal>;

  explicit DisplacementSeries(int dim) : dim_(dim) {
    if (dim < 1) throw Error(Errc::domain, "dimension must be positive");
    std::vector<LReal> log_fact(std::size_t(dim) + 1, 0);
    for (int k = 1; k <= dim; ++k) log_fact[std::size_t(k)] = log_fact[std::size_t(k - 1)] + std::log(LReal(k));
    for (int m = 0; m < dim; ++m)
      for (int n = 0; n < dim; ++n)
        for (int k = 0; k <= std::min(m, n); ++k)
          weights_.push_back(std::exp((log_fact[std::size_t(m)] + log_fact[std::size_t(n)]) / 2 -
                                      log_fact[std::size_t(k)] - log_fact[std::size_t(m - k)] -
                                      log_fact[std::size_t(n - k)]));
  }

  /// Matrix of <m|D^dagger(beta)|n> = <m|D(-beta)|n>.
  Eigen::MatrixXcd dagger(cdouble beta) const {
    const LCx b(-LReal(beta.real()), -LReal(beta.imag()));
    const LCx nb = -std::conj(b);
    std::vector<LCx> pow_b(std::size_t(dim_), 1), pow_nb(std::size_t(dim_), 1);
    for (int k = 1; k < dim_; ++k) {
      pow_b[std::size_t(k)] = pow_b[std::size_t(k - 1)] * b;
      pow_nb[std::size_t(k)] = pow_nb[std::size_t(k - 1)] * nb;
    }
    const LReal envelope = std::exp(-std::norm(b) / 2);
    Eigen::MatrixXcd out(dim_, dim_);
    std::size_t w = 0;
    for (int m = 0; m < dim_; ++m)
      for (int n = 0; n < dim_; ++n) {
        LCx sum = 0;
        for (int k = 0; k <= std::min(m, n); ++k) sum += weights_[w++] * pow_b[std::size_t(m - k)] * pow_nb[std::size_t(n - k)];
        sum *= envelope;
        out(m, n) = cdouble(double(sum.real()), double(sum.imag()));
      }
    return out;
  }

 private:
  int dim_;
  std::vector<LReal> weights_;
};

}  // namespace

Eigen::MatrixXcd displacement_dagger_series(cdouble beta, int dim) { return DisplacementSeries(dim).dagger(beta); }

namespace {

double outer_ring_max(const Eigen::MatrixXcd& v) {
  const Eigen::Index n = v.rows();
  double m = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    m = std::max({m, std::abs(v(0, i)), std::abs(v(n - 1, i)), std::abs(v(i, 0)), std::abs(v(i, n - 1))});
  return m;
}

}  // namespace

ReconstructionResult reconstruct_rho(const ChiGrid& chi, int dim, const ReconstructOptions& options) {
  chi.spec.validate();
  if (dim < 1) throw Error(Errc::domain, "output dimension must be positive");
  const int n = chi.spec.size();
  if (chi.values.rows() != n || chi.values.cols() != n)
    throw Error(Errc::grid_mismatch, "grid values do not match the grid specification");

  ReconstructionResult result{Eigen::MatrixXcd::Zero(dim, dim), chi.spec, {}, std::nullopt};
  auto& diag = result.residuals;
  const double peak = chi.values.cwiseAbs().maxCoeff();
  if (!(peak > 0)) {
    diag.nonphysical = true;
    diag.trace_error = 1;
    return result;
  }
  diag.tail_ratio = outer_ring_max(chi.values) / peak;
  if (diag.tail_ratio > options.tail_tolerance) {
    std::ostringstream msg;
    msg << "characteristic function has not decayed at the grid edge: outer ring reaches " << diag.tail_ratio
        << " of the peak (limit " << options.tail_tolerance << "); enlarge the grid extent";
    throw Error(Errc::coverage, msg.str());
  }

  const fock::FockSpace space(dim);
  const double weight = chi.spec.spacing * chi.spec.spacing / std::numbers::pi;
  Eigen::MatrixXcd second = Eigen::MatrixXcd::Zero(dim, dim);
  std::optional<DisplacementSeries> series;
  if (options.cross_check) series.emplace(dim);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const cdouble v = chi.values(iy, ix);
      if (v == cdouble(0)) continue;
      const cdouble beta = chi.spec.point(ix, iy);
      result.rho_tilde += (weight * v) * fock::displacement_matrix(space, -beta).matrix;
      if (options.cross_check) second += (weight * v) * series->dagger(beta);
    }
  if (options.cross_check) {
    diag.path_difference = (result.rho_tilde - second).cwiseAbs().maxCoeff();
    if (diag.path_difference > options.path_tolerance) {
      std::ostringstream msg;
      msg << "quadrature paths disagree by " << diag.path_difference;
      throw Error(Errc::convergence, msg.str());
    }
  }
  diag.hermiticity = (result.rho_tilde - result.rho_tilde.adjoint()).cwiseAbs().maxCoeff();
  result.rho_tilde = (result.rho_tilde + result.rho_tilde.adjoint()) / 2.0;
  diag.trace_error = std::abs(result.rho_tilde.trace() - cdouble(1));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(result.rho_tilde, Eigen::EigenvaluesOnly);
  diag.min_eigenvalue = eig.eigenvalues().minCoeff();
  diag.nonphysical = diag.min_eigenvalue < -1e-6 || diag.trace_error > 1e-2;
  return result;
}

double chi_overlap(const ChiGrid& a, const ChiGrid& b) {
  if (!(a.spec == b.spec) || a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
    throw Error(Errc::grid_mismatch, "fidelity needs both characteristic functions on a common grid");
  const double weight = a.spec.spacing * a.spec.spacing / std::numbers::pi;
  return weight * (a.values.array() * b.values.array().conjugate()).sum().real();
}

double pure_state_fidelity(const ReferenceState& target, const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols() || rho.rows() < 1) throw Error(Errc::domain, "density matrix must be square");
  const Eigen::VectorXcd phi = target.state_vector(int(rho.rows()));
  return (phi.adjoint() * rho * phi)(0, 0).real();
}

FidelityReport fidelity(const ReferenceState& target, const ChiGrid& estimate, const Eigen::MatrixXcd* rho) {
  const ChiGrid exact = sample_grid(estimate.spec, [&](cdouble beta) { return target.chi(beta); });
  FidelityReport report{chi_overlap(exact, estimate), std::nullopt};
  if (rho) report.pure_state = pure_state_fidelity(target, *rho);
  return report;
}

Eigen::MatrixXcd nearest_density_matrix(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols() || rho.rows() < 1) throw Error(Errc::domain, "density matrix must be square");
  const Eigen::MatrixXcd h = (rho + rho.adjoint()) / 2.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  const auto n = h.rows();
  // Eigenvalues ascending; zero the smallest while spreading their mass evenly
  // over the rest (Smolin, Gambetta and Smith).
  if (!(h.trace().real() > 0)) throw Error(Errc::domain, "projection needs a positive trace");
  Eigen::VectorXd lambda = eig.eigenvalues() / h.trace().real();
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
  double acc = 0;
  Eigen::Index k = 0;
  for (; k < n; ++k) {
    const double remaining = double(n - k);
    if (lambda(k) + acc / remaining >= 0) break;
    acc += lambda(k);
  }
  for (Eigen::Index j = k; j < n; ++j) mu(j) = lambda(j) + acc / double(n - k);
  return eig.eigenvectors() * mu.cast<cdouble>().asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace chiprobe::reconstruct
