#pragma once

#include <stdexcept>
#include <string>

namespace chiprobe {

/// Failure categories. The CLI maps these onto process exit codes.
enum class Errc {
  domain,            // argument outside the mathematical domain
  empty_sequence,    // pulse sequence or family with no segments
  pole,              // closed form evaluated at a singular point
  index,             // segment index out of range
  degenerate_probe,  // psi_+ psi_-^* == 0, no interference to read out
  coverage,          // reciprocal phase space not covered well enough
  grid_mismatch,
  convergence,       // numerical method failed or truncation violated
  config,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace chiprobe
