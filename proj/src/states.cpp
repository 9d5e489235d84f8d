#include <chiprobe/states.hpp>

#include <algorithm>
#include <cmath>

namespace chiprobe {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

cdouble chi_fock_pair(cdouble beta) {
  const double x = std::norm(beta);
  const cdouble cross = beta * beta + std::conj(beta * beta);
  return std::exp(-x / 2) / 2 *
         (laguerre(1, 0, x) + laguerre(3, 0, x) + cross * laguerre(1, 2, x) / std::sqrt(6.0));
}

cdouble chi_coherent(cdouble alpha, cdouble beta) {
  return std::exp(-std::norm(beta) / 2) * std::exp(std::conj(alpha) * beta - alpha * std::conj(beta));
}

double cat_norm2(cdouble alpha) { return 2 * (1 + std::exp(-2 * std::norm(alpha))); }

cdouble chi_cat(cdouble alpha, cdouble beta) {
  const cdouble odd = alpha * std::conj(beta) - std::conj(alpha) * beta;
  const cdouble even = alpha * std::conj(beta) + std::conj(alpha) * beta;
  return 2 * std::exp(-std::norm(beta) / 2) / cat_norm2(alpha) *
         (std::cosh(odd) + std::exp(-2 * std::norm(alpha)) * std::cosh(even));
}

Eigen::VectorXcd coherent_amplitudes(cdouble alpha, int dim) {
  Eigen::VectorXcd v(dim);
  if (dim == 0) return v;
  v(0) = std::exp(-std::norm(alpha) / 2);
  for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(double(n));
  return v;
}

ReferenceState::ReferenceState(Kind kind) : kind_(std::move(kind)) {
  if (const auto* fp = std::get_if<FockPair>(&kind_)) {
    if (fp->n1 < 0 || fp->n2 < 0) throw Error(Errc::domain, "Fock labels must be nonnegative");
    if (fp->n1 == fp->n2) throw Error(Errc::domain, "Fock pair needs two distinct levels");
    if (std::abs(std::norm(fp->c1) + std::norm(fp->c2) - 1) > 1e-12)
      throw Error(Errc::domain, "Fock pair amplitudes must be normalized");
  }
}

std::string ReferenceState::name() const {
  return std::visit(overloaded{[](const FockPair&) { return std::string("fock"); },
                               [](const Coherent&) { return std::string("coherent"); },
                               [](const Cat&) { return std::string("cat"); }},
                    kind_);
}

cdouble ReferenceState::chi(cdouble beta) const {
  return std::visit(
      overloaded{[&](const FockPair& f) {
                   const int n[2] = {f.n1, f.n2};
                   const cdouble c[2] = {f.c1, f.c2};
                   cdouble sum = 0;
                   for (int i = 0; i < 2; ++i)
                     for (int j = 0; j < 2; ++j)
                       sum += c[i] * std::conj(c[j]) * displacement_element(n[j], n[i], beta);
                   // dividing by the norm keeps chi(0) = 1 exact in floating point
                   return sum / (std::norm(f.c1) + std::norm(f.c2));
                 },
                 [&](const Coherent& s) { return chi_coherent(s.alpha, beta); },
                 [&](const Cat& s) { return chi_cat(s.alpha, beta); }},
      kind_);
}

Eigen::VectorXcd ReferenceState::state_vector(int dim) const {
  if (dim < 1) throw Error(Errc::domain, "dimension must be positive");
  return std::visit(overloaded{[&](const FockPair& f) {
                                 Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
                                 if (f.n1 < dim) v(f.n1) = f.c1;
                                 if (f.n2 < dim) v(f.n2) = f.c2;
                                 return v;
                               },
                               [&](const Coherent& s) { return coherent_amplitudes(s.alpha, dim); },
                               [&](const Cat& s) {
                                 Eigen::VectorXcd v = coherent_amplitudes(s.alpha, dim) +
                                                      coherent_amplitudes(-s.alpha, dim);
                                 return Eigen::VectorXcd(v / std::sqrt(cat_norm2(s.alpha)));
                               }},
                    kind_);
}

Eigen::MatrixXcd ReferenceState::density_matrix(int dim) const {
  const Eigen::VectorXcd v = state_vector(dim);
  return v * v.adjoint();
}

int ReferenceState::support_hint() const {
  return std::visit(overloaded{[](const FockPair& f) { return std::max(f.n1, f.n2) + 1; },
                               [](const Coherent& s) {
                                 const double m = std::norm(s.alpha);
                                 return int(std::ceil(m + 8 * std::sqrt(m) + 10));
                               },
                               [](const Cat& s) {
                                 const double m = std::norm(s.alpha);
                                 return int(std::ceil(m + 8 * std::sqrt(m) + 10));
                               }},
                    kind_);
}

}  // namespace chiprobe
