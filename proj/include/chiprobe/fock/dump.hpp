#pragma once

// Offline inspection dumps: NPY arrays (complex128, Fortran order) plus a JSON
// sidecar with dimensions, parameters and time.

#include <chiprobe/fock/space.hpp>
#include <chiprobe/model.hpp>

#include <string>

namespace chiprobe::fock {

/// Writes a complex matrix as a version 1.0 .npy file with dtype '<c16'.
void write_npy(const std::string& path, const Matrix& m);

/// Reads back a file written by write_npy.
Matrix read_npy(const std::string& path);

/// Writes <stem>.npy and <stem>.json describing the array.
void dump_matrix(const std::string& stem, const Matrix& m, const std::string& kind, const OscillatorParams& p,
                 int fock_dim, double time);

}  // namespace chiprobe::fock
