#pragma once

// Superoperators on vectorized d x d operators.
//
// Generators are sparse d^2 x d^2 matrices. Dense-product maps such as the
// superdisplacements are kept matrix free as SuperOperator objects, which also
// carry their adjoint so restricted operator norms can be estimated.

#include <chiprobe/analytic.hpp>
#include <chiprobe/fock/space.hpp>
#include <chiprobe/model.hpp>

#include <functional>

namespace chiprobe::fock {

/// I kron A: X -> A X.
SparseMatrix spre(const SparseMatrix& a);
/// B^T kron I: X -> X B.
SparseMatrix spost(const SparseMatrix& b);
/// B^T kron A: X -> A X B.
SparseMatrix sandwich(const SparseMatrix& a, const SparseMatrix& b);

/// Thermalizing Liouvillian with truncated products, so it is exactly trace
/// preserving on the truncated space.
SparseMatrix liouvillian(const FockSpace& space, const OscillatorParams& p);

/// L -+ (i g / 2)[a + a^dagger, .], sign = +1 or -1.
SparseMatrix generator_c(const FockSpace& space, const OscillatorParams& p, int sign);

/// L -+ (i g / 2){a + a^dagger, .}, sign = +1 or -1.
SparseMatrix generator_a(const FockSpace& space, const OscillatorParams& p, int sign);

/// Generator of the (p, q) probe block, with p, q = +1 for |+> and -1 for |->.
/// Probe dephasing at rate gamma_d damps the off-diagonal blocks at that rate.
SparseMatrix block_generator(const FockSpace& space, const OscillatorParams& p, int row_sign, int col_sign,
                             double dephasing_rate = 0);

/// Matrix-free linear map on vec(X) together with its adjoint.
class SuperOperator {
 public:
  using Fn = std::function<Vector(const Vector&)>;

  SuperOperator(int dim, Fn apply, Fn adjoint);

  static SuperOperator identity(int dim);
  /// X -> M X N.
  static SuperOperator sandwich(const Matrix& m, const Matrix& n);
  /// v -> G v.
  static SuperOperator from_sparse(const SparseMatrix& g, int dim);
  /// e^{G t}, applied by Taylor expmv.
  static SuperOperator propagator(const SparseMatrix& g, double t, int dim);

  int dim() const { return dim_; }

  Vector operator()(const Vector& v) const { return apply_(v); }
  Vector adjoint(const Vector& v) const { return adjoint_(v); }
  Matrix operator()(const Matrix& x) const { return unvec(apply_(vec(x)), dim_); }

  /// (this * rhs)(v) = this(rhs(v)).
  SuperOperator operator*(const SuperOperator& rhs) const;
  SuperOperator operator-(const SuperOperator& rhs) const;
  SuperOperator scaled(cdouble s) const;

  /// Full d^2 x d^2 matrix; intended for small d.
  Matrix to_dense() const;

 private:
  int dim_;
  Fn apply_;
  Fn adjoint_;
};

/// rho -> D(eps) rho D^dagger(eps).
SuperOperator superdisplacement_sym(const FockSpace& space, cdouble eps);

/// rho -> e^{s xi1 a} D(s xi2) rho D^dagger(s xi3) e^{-s xi1 a}, s = sign.
SuperOperator superdisplacement_skew(const FockSpace& space, const analytic::SkewParams& xi, int sign);

/// Spectral norm of P A P, with P the projector onto operators supported on
/// the lowest `bulk` Fock levels. Estimated by deterministic power iteration.
double restricted_norm(const SuperOperator& a, int bulk, int iterations = 12);

/// Default bulk size used for identity residuals.
int default_bulk(const FockSpace& space);

}  // namespace chiprobe::fock
