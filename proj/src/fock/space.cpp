#include <chiprobe/fock/space.hpp>
#include <chiprobe/states.hpp>

#include <cmath>
#include <numbers>
#include <vector>

namespace chiprobe::fock {

FockSpace::FockSpace(int dim) : dim_(dim) {
  if (dim < 2) throw Error(Errc::domain, "Fock truncation must be at least 2");
}

Matrix FockSpace::annihilation() const {
  Matrix a = Matrix::Zero(dim_, dim_);
  for (int n = 1; n < dim_; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Matrix FockSpace::creation() const { return annihilation().adjoint(); }

Matrix FockSpace::number() const {
  Matrix n = Matrix::Zero(dim_, dim_);
  for (int k = 0; k < dim_; ++k) n(k, k) = double(k);
  return n;
}

Matrix FockSpace::position() const {
  const Matrix a = annihilation();
  return a + a.adjoint();
}

SparseMatrix FockSpace::sparse_annihilation() const {
  std::vector<Eigen::Triplet<cdouble>> t;
  for (int n = 1; n < dim_; ++n) t.emplace_back(n - 1, n, std::sqrt(double(n)));
  SparseMatrix a(dim_, dim_);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

bool truncation_safe(const FockSpace& space, cdouble beta) { return 4 * std::norm(beta) <= space.dim(); }

DisplacementMatrix displacement_matrix(const FockSpace& space, cdouble beta) {
  const int d = space.dim();
  DisplacementMatrix out{Matrix::Zero(d, d), !truncation_safe(space, beta)};
  const double r2 = std::norm(beta);
  if (r2 == 0) {
    out.matrix.setIdentity();
    return out;
  }
  // Same elements as displacement_element, one diagonal k = |m - n| at a time
  // so the Laguerre recurrence in the lower label is shared along it.
  std::vector<double> log_fact(std::size_t(d) + 1, 0.0);
  for (int k = 1; k <= d; ++k) log_fact[std::size_t(k)] = log_fact[std::size_t(k - 1)] + std::log(double(k));
  const double arg = std::arg(beta), log_r2 = std::log(r2);
  for (int k = 0; k < d; ++k) {
    const cdouble below = std::polar(1.0, k * arg);                  // m >= n: beta^k
    const cdouble above = std::polar(1.0, k * (std::numbers::pi - arg));  // m < n: (-beta^*)^k
    double prev = 1, cur = 1 + k - r2;
    for (int lo = 0; lo + k < d; ++lo) {
      double lag;
      if (lo == 0) {
        lag = 1;
      } else if (lo == 1) {
        lag = cur;
      } else {
        const double next = ((2 * (lo - 1) + 1 + k - r2) * cur - (lo - 1 + k) * prev) / double(lo);
        prev = cur;
        cur = next;
        lag = cur;
      }
      const double mag =
          std::exp((log_fact[std::size_t(lo)] - log_fact[std::size_t(lo + k)]) / 2 + k * log_r2 / 2 - r2 / 2) * lag;
      out.matrix(lo + k, lo) = mag * below;
      if (k > 0) out.matrix(lo, lo + k) = mag * above;
    }
  }
  return out;
}

Matrix exp_annihilation(const FockSpace& space, cdouble xi) {
  // e^{xi a}|m> = sum_k xi^k / k! sqrt(m! / (m-k)!) |m-k>
  const int d = space.dim();
  Matrix e = Matrix::Zero(d, d);
  for (int m = 0; m < d; ++m) {
    cdouble coeff = 1;
    for (int k = 0; k <= m; ++k) {
      e(m - k, m) = coeff;
      coeff *= xi * std::sqrt(double(m - k)) / double(k + 1);
    }
  }
  return e;
}

cdouble fock_trace_chi(const FockSpace& space, const Matrix& rho, cdouble beta) {
  if (rho.rows() != space.dim() || rho.cols() != space.dim())
    throw Error(Errc::domain, "density matrix does not match the Fock space");
  const Matrix d = displacement_matrix(space, beta).matrix;
  return (d.transpose().array() * rho.array()).sum();
}

Vector vec(const Matrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); }

Matrix unvec(const Vector& v, int dim) { return Eigen::Map<const Matrix>(v.data(), dim, dim); }

double top_population(const Matrix& rho, int levels) {
  double p = 0;
  for (int k = std::max<int>(0, int(rho.rows()) - levels); k < rho.rows(); ++k) p += rho(k, k).real();
  return p;
}

}  // namespace chiprobe::fock
