#include <chiprobe/fock/expmv.hpp>

#include <cmath>

namespace chiprobe::fock {

namespace {

constexpr double kStepNorm = 4.0;
constexpr int kMaxTerms = 80;
constexpr double kRoundoff = 0x1.0p-53;

}  // namespace

double norm1(const SparseMatrix& g) {
  double best = 0;
  for (int k = 0; k < g.outerSize(); ++k) {
    double col = 0;
    for (SparseMatrix::InnerIterator it(g, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

Vector expmv(const SparseMatrix& g, double t, const Vector& v) {
  if (!std::isfinite(t)) throw Error(Errc::domain, "propagation time must be finite");
  if (t == 0) return v;
  const double scale = norm1(g) * std::abs(t);
  const int steps = std::max(1, int(std::ceil(scale / kStepNorm)));
  const double h = t / steps;
  Vector x = v;
  Vector term(v.size());
  for (int s = 0; s < steps; ++s) {
    term = x;
    Vector sum = x;
    int quiet = 0;
    int k = 1;
    for (; k <= kMaxTerms && quiet < 2; ++k) {
      term = (g * term) * (h / k);
      sum += term;
      const double tn = term.cwiseAbs().maxCoeff();
      const double sn = sum.cwiseAbs().maxCoeff();
      quiet = tn <= kRoundoff * sn ? quiet + 1 : 0;
    }
    if (quiet < 2) throw Error(Errc::convergence, "Taylor propagation did not converge");
    x = std::move(sum);
    if (!x.allFinite()) throw Error(Errc::convergence, "propagation produced non-finite values");
  }
  return x;
}

}  // namespace chiprobe::fock
