#pragma once

#include <chiprobe/fock/space.hpp>

namespace chiprobe::fock {

/// Action of e^{G t} on v by a scaled Taylor series.
///
/// The interval is split so that each step has h ||G||_1 <= 4; each step sums
/// terms until two consecutive ones fall below unit roundoff relative to the
/// partial sum. Throws Errc::convergence if a step does not settle.
Vector expmv(const SparseMatrix& g, double t, const Vector& v);

/// ||G||_1, the largest absolute column sum.
double norm1(const SparseMatrix& g);

}  // namespace chiprobe::fock
