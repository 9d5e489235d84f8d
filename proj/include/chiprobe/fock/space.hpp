#pragma once

// Truncated Fock space of the oscillator and its basic operators.

#include <chiprobe/errors.hpp>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>

namespace chiprobe::fock {

using cdouble = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cdouble>;

/// Levels |0> .. |d-1>.
class FockSpace {
 public:
  explicit FockSpace(int dim);

  int dim() const { return dim_; }

  Matrix annihilation() const;
  Matrix creation() const;
  Matrix number() const;
  Matrix identity() const { return Matrix::Identity(dim_, dim_); }
  /// a + a^dagger.
  Matrix position() const;

  SparseMatrix sparse_annihilation() const;

 private:
  int dim_;
};

/// Matrix of <n|D(beta)|m> restricted to the space, from the exact infinite
/// dimensional elements.
struct DisplacementMatrix {
  Matrix matrix;
  bool truncation_warning = false;  ///< |beta|^2 > d / 4
};

DisplacementMatrix displacement_matrix(const FockSpace& space, cdouble beta);

/// |beta|^2 <= d / 4.
bool truncation_safe(const FockSpace& space, cdouble beta);

/// e^{xi a}, which is exact in the truncated space because a is nilpotent there.
Matrix exp_annihilation(const FockSpace& space, cdouble xi);

/// Tr{D(beta) rho}.
cdouble fock_trace_chi(const FockSpace& space, const Matrix& rho, cdouble beta);

/// Column-major vectorization, vec(A X B) = (B^T kron A) vec(X).
Vector vec(const Matrix& x);
Matrix unvec(const Vector& v, int dim);

/// Population of the top `levels` Fock states of an oscillator density matrix.
double top_population(const Matrix& rho, int levels = 2);

}  // namespace chiprobe::fock
