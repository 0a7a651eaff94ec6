#pragma once

#include <stdexcept>
#include <string>

namespace bdfp {

// Machine-readable failure codes. The string form is stable and is what the
// CLI reports in error messages and warning records.
enum class Errc {
  invalid_parameter,
  no_convergence,
  representation_mismatch,
  cutoff_exceeds_grid,
  table_range,
  grid_mismatch,
  too_large_grid,
  not_a_projector,
  not_in_tangent_domain,
  not_c_symmetric,
  cluster_ambiguous,
  degenerate_grid,
  resolution_insufficient,
  unnormalized_input,
  sign_flip,
  parse_error,
  validation_error,
  io_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::no_convergence: return "no-convergence";
    case Errc::representation_mismatch: return "representation-mismatch";
    case Errc::cutoff_exceeds_grid: return "cutoff-exceeds-grid";
    case Errc::table_range: return "table-range";
    case Errc::grid_mismatch: return "grid-mismatch";
    case Errc::too_large_grid: return "too-large-grid";
    case Errc::not_a_projector: return "not-a-projector";
    case Errc::not_in_tangent_domain: return "not-in-m_P";
    case Errc::not_c_symmetric: return "not-c-symmetric";
    case Errc::cluster_ambiguous: return "cluster-ambiguous";
    case Errc::degenerate_grid: return "degenerate-grid";
    case Errc::resolution_insufficient: return "resolution-insufficient";
    case Errc::unnormalized_input: return "unnormalized-input";
    case Errc::sign_flip: return "sign-flip";
    case Errc::parse_error: return "parse-error";
    case Errc::validation_error: return "validation-error";
    case Errc::io_error: return "io-error";
  }
  return "unknown-error";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace bdfp
