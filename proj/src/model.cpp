#include <chiprobe/model.hpp>

#include <cmath>
#include <numbers>

namespace chiprobe {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_count(int n) {
  if (n < 1) throw Error(Errc::empty_sequence, "sequence family needs N >= 1");
}

void require_tau0(double tau0) {
  if (!(tau0 > 0) || !std::isfinite(tau0))
    throw Error(Errc::domain, "sequence family needs tau0 > 0");
}

}  // namespace

UniformStream::UniformStream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream),
                    std::uint32_t(stream >> 32)};
  engine_.seed(seq);
}

FamilyKind family_kind(const SequenceFamily& f) {
  return std::visit(overloaded{[](const Equidistant&) { return FamilyKind::equidistant; },
                               [](const RandomFamily&) { return FamilyKind::random; },
                               [](const Linear&) { return FamilyKind::linear; }},
                    f);
}

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::equidistant: return "equidistant";
    case FamilyKind::random: return "random";
    case FamilyKind::linear: return "linear";
  }
  return "unknown";
}

FamilyKind parse_family_kind(const std::string& name) {
  if (name == "equidistant") return FamilyKind::equidistant;
  if (name == "random") return FamilyKind::random;
  if (name == "linear") return FamilyKind::linear;
  throw Error(Errc::config, "unknown sequence family '" + name + "'");
}

PulseSequence expand_family(const SequenceFamily& f, double nu) {
  return std::visit(
      overloaded{
          [](const Equidistant& e) {
            require_count(e.n);
            require_tau0(e.tau0);
            return PulseSequence(std::vector<double>(std::size_t(e.n), e.tau0));
          },
          [nu](const RandomFamily& r) {
            require_count(r.n);
            double lo = r.lo, hi = r.hi;
            if (!(hi > lo)) {
              lo = 0;
              hi = 2 * std::numbers::pi / nu;
            }
            if (!(lo >= 0)) throw Error(Errc::domain, "random range must be nonnegative");
            UniformStream rng(r.seed, r.stream);
            std::vector<double> taus(std::size_t(r.n));
            for (auto& t : taus) {
              do t = lo + (hi - lo) * rng.next();
              while (!(t > 0));
            }
            return PulseSequence(std::move(taus));
          },
          [](const Linear& l) {
            require_count(l.n);
            require_tau0(l.tau0);
            std::vector<double> taus;
            taus.reserve(std::size_t(2 * l.n - 1));
            for (int k = 1; k <= l.n; ++k) taus.push_back(k * l.tau0);
            for (int k = l.n - 1; k >= 1; --k) taus.push_back(k * l.tau0);
            return PulseSequence(std::move(taus));
          }},
      f);
}

double nbar_from_ratio(double x) {
  if (!(x > 0)) throw Error(Errc::domain, "hbar nu / kB Theta must be positive");
  return 1.0 / std::expm1(x);
}

}  // namespace chiprobe
