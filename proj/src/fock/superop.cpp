#include <chiprobe/fock/expmv.hpp>
#include <chiprobe/fock/superop.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace chiprobe::fock {

namespace {

using Triplet = Eigen::Triplet<cdouble>;

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Triplet> t;
  t.reserve(std::size_t(a.nonZeros()) * std::size_t(b.nonZeros()));
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib)
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(), ia.value() * ib.value());
  SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseMatrix sparse_identity(Eigen::Index n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

SparseMatrix sparse_position(const FockSpace& space) {
  const SparseMatrix a = space.sparse_annihilation();
  return SparseMatrix(a + SparseMatrix(a.adjoint()));
}

}  // namespace

SparseMatrix spre(const SparseMatrix& a) { return kron(sparse_identity(a.rows()), a); }

SparseMatrix spost(const SparseMatrix& b) { return kron(SparseMatrix(b.transpose()), sparse_identity(b.rows())); }

SparseMatrix sandwich(const SparseMatrix& a, const SparseMatrix& b) { return kron(SparseMatrix(b.transpose()), a); }

SparseMatrix liouvillian(const FockSpace& space, const OscillatorParams& p) {
  p.validate();
  const SparseMatrix a = space.sparse_annihilation();
  const SparseMatrix ad = a.adjoint();
  const SparseMatrix n = ad * a;
  const SparseMatrix aad = a * ad;
  const cdouble i(0, 1);
  const double down = (p.nbar + 1) * p.gamma / 2;
  const double up = p.nbar * p.gamma / 2;
  SparseMatrix l = -i * p.nu * (spre(n) - spost(n));
  if (down != 0) l += down * (2.0 * sandwich(a, ad) - spre(n) - spost(n));
  if (up != 0) l += up * (2.0 * sandwich(ad, a) - spre(aad) - spost(aad));
  l.prune(cdouble(0));
  return l;
}

SparseMatrix generator_c(const FockSpace& space, const OscillatorParams& p, int sign) {
  return block_generator(space, p, sign, sign);
}

SparseMatrix generator_a(const FockSpace& space, const OscillatorParams& p, int sign) {
  return block_generator(space, p, sign, -sign);
}

SparseMatrix block_generator(const FockSpace& space, const OscillatorParams& p, int row_sign, int col_sign,
                             double dephasing_rate) {
  if (std::abs(row_sign) != 1 || std::abs(col_sign) != 1) throw Error(Errc::domain, "probe signs must be +1 or -1");
  if (!(dephasing_rate >= 0)) throw Error(Errc::domain, "dephasing rate must be nonnegative");
  SparseMatrix g = liouvillian(space, p);
  const SparseMatrix x = sparse_position(space);
  const cdouble coupling(0, -p.g / 2);
  if (p.g != 0) g += coupling * (double(row_sign) * spre(x) - double(col_sign) * spost(x));
  if (row_sign != col_sign && dephasing_rate != 0) g -= dephasing_rate * sparse_identity(g.rows());
  return g;
}

SuperOperator::SuperOperator(int dim, Fn apply, Fn adjoint)
    : dim_(dim), apply_(std::move(apply)), adjoint_(std::move(adjoint)) {}

SuperOperator SuperOperator::identity(int dim) {
  auto id = [](const Vector& v) { return v; };
  return {dim, id, id};
}

SuperOperator SuperOperator::sandwich(const Matrix& m, const Matrix& n) {
  const int d = int(m.rows());
  const Matrix mh = m.adjoint(), nh = n.adjoint();
  return {d, [=](const Vector& v) { return vec(m * unvec(v, d) * n); },
          [=](const Vector& v) { return vec(mh * unvec(v, d) * nh); }};
}

SuperOperator SuperOperator::from_sparse(const SparseMatrix& g, int dim) {
  const SparseMatrix gh = g.adjoint();
  return {dim, [g](const Vector& v) { return Vector(g * v); }, [gh](const Vector& v) { return Vector(gh * v); }};
}

SuperOperator SuperOperator::propagator(const SparseMatrix& g, double t, int dim) {
  const SparseMatrix gh = g.adjoint();
  return {dim, [g, t](const Vector& v) { return expmv(g, t, v); },
          [gh, t](const Vector& v) { return expmv(gh, t, v); }};
}

SuperOperator SuperOperator::operator*(const SuperOperator& rhs) const {
  const Fn a = apply_, ah = adjoint_, b = rhs.apply_, bh = rhs.adjoint_;
  return {dim_, [a, b](const Vector& v) { return a(b(v)); }, [ah, bh](const Vector& v) { return bh(ah(v)); }};
}

SuperOperator SuperOperator::operator-(const SuperOperator& rhs) const {
  const Fn a = apply_, ah = adjoint_, b = rhs.apply_, bh = rhs.adjoint_;
  return {dim_, [a, b](const Vector& v) { return Vector(a(v) - b(v)); },
          [ah, bh](const Vector& v) { return Vector(ah(v) - bh(v)); }};
}

SuperOperator SuperOperator::scaled(cdouble s) const {
  const Fn a = apply_, ah = adjoint_;
  return {dim_, [a, s](const Vector& v) { return Vector(s * a(v)); },
          [ah, s](const Vector& v) { return Vector(std::conj(s) * ah(v)); }};
}

Matrix SuperOperator::to_dense() const {
  const int n = dim_ * dim_;
  Matrix out(n, n);
  Vector e = Vector::Zero(n);
  for (int k = 0; k < n; ++k) {
    e(k) = 1;
    out.col(k) = apply_(e);
    e(k) = 0;
  }
  return out;
}

SuperOperator superdisplacement_sym(const FockSpace& space, cdouble eps) {
  const Matrix d = displacement_matrix(space, eps).matrix;
  return SuperOperator::sandwich(d, d.adjoint());
}

SuperOperator superdisplacement_skew(const FockSpace& space, const analytic::SkewParams& xi, int sign) {
  if (std::abs(sign) != 1) throw Error(Errc::domain, "sign must be +1 or -1");
  const double s = sign;
  const Matrix left = exp_annihilation(space, s * xi.xi1) * displacement_matrix(space, s * xi.xi2).matrix;
  const Matrix right =
      displacement_matrix(space, s * xi.xi3).matrix.adjoint() * exp_annihilation(space, -s * xi.xi1);
  return SuperOperator::sandwich(left, right);
}

int default_bulk(const FockSpace& space) { return std::min(20, space.dim() / 2); }

double restricted_norm(const SuperOperator& a, int bulk, int iterations) {
  const int d = a.dim();
  if (bulk < 1 || bulk > d) throw Error(Errc::domain, "bulk size must lie in [1, d]");
  auto project = [&](Vector& v) {
    for (int c = 0; c < d; ++c)
      for (int r = 0; r < d; ++r)
        if (r >= bulk || c >= bulk) v(c * d + r) = 0;
  };
  // Fixed pseudo-random start so estimates are reproducible.
  Vector v = Vector::Zero(d * d);
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  auto next = [&]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return double(state >> 11) * 0x1.0p-53 - 0.5;
  };
  for (int c = 0; c < bulk; ++c)
    for (int r = 0; r < bulk; ++r) v(c * d + r) = cdouble(next(), next());
  v.normalize();
  double sigma = 0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = a(v);
    project(w);
    const double nw = w.norm();
    if (nw == 0) return 0;
    Vector u = a.adjoint(w);
    project(u);
    const double nu = u.norm();
    const double estimate = nw;
    if (nu == 0) return estimate;
    const bool settled = it > 2 && std::abs(estimate - sigma) <= 1e-2 * estimate;
    sigma = std::max(sigma, estimate);
    v = u / nu;
    if (settled) break;
  }
  return sigma;
}

}  // namespace chiprobe::fock
