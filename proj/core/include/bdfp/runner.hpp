#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bdfp/dispersion.hpp"
#include "bdfp/model_params.hpp"

namespace bdfp {

// Resolved batch-run configuration. Sources, in increasing precedence:
// defaults, config file (flat key=value), BDFP_CACHE_DIR, command-line flags.
struct RunConfig {
  std::string command;  // dispersion | pekar | energy | sweep | structure-check
  ModelParams model;

  int cartesian_points = 64;
  double box_length = 0.0;  // 0 = auto: max(box_scale·λ*, min_box)
  double box_scale = 40.0;
  double min_box = 12.0;

  double pekar_r_max = 40.0;
  std::size_t pekar_nodes = 4000;
  double pekar_tol = 1e-8;
  double pekar_init_width = 3.0;

  double scan_span_lo = 0.3;
  double scan_span_hi = 3.0;
  std::size_t scan_points = 21;

  std::vector<double> sweep_alphas;

  std::string cache_dir = ".bdfp-cache";
  std::string output_path;       // empty: payload printed to stdout
  std::string format = "json";   // json | csv
  std::uint64_t seed = 0;

  int structure_instances = 200;
  int structure_max_dim = 64;

  void validate() const;  // validation-error naming the offending field
};

// Flat key=value config file; '#' starts a comment. Throws parse-error with
// the line number.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

// Applies key=value pairs in order (later wins) on top of defaults; the
// caller passes file pairs first, then flag pairs. BDFP_CACHE_DIR (if set)
// is applied between the two.
RunConfig build_config(const std::string& command,
                       const std::vector<std::pair<std::string, std::string>>& file_kv,
                       const std::vector<std::pair<std::string, std::string>>& flag_kv);

struct RunReport {
  std::string payload_json;  // deterministic; what --out receives for json format
  std::string output_path;   // file written, if any
  std::vector<std::pair<std::string, std::string>> warnings;  // code, message
  std::vector<std::pair<std::string, double>> timings;        // stage, seconds (stderr only)
};

RunReport run(const RunConfig& config);

// Dispersion cache: load-or-solve keyed by (alpha, cutoff, n, tol); files are
// written atomically (write-then-rename) and reused byte-for-byte.
std::string dispersion_cache_path(const std::string& cache_dir, const ModelParams& params);
DispersionTable load_or_solve_dispersion(const ModelParams& params, const std::string& cache_dir,
                                         bool* was_cached = nullptr);

// Randomized projector-algebra verification (seeded, deterministic): random
// projector pairs in dims 4..max_dim, structure/round-trip/trace identities,
// C-symmetric classification stability and mod-4 spectral dimensions.
struct StructureCheckReport {
  int instances = 0;
  double max_reconstruct_residual = 0.0;
  double max_roundtrip_residual = 0.0;
  double max_eqq_residual = 0.0;
  double max_trace_integer_deviation = 0.0;
  double max_full_flip_roundtrip_residual = 0.0;
  bool vacuum_classified_e1 = false;
  bool pair_classified_e_minus_1 = false;
  bool classification_stable = false;
  bool mod4_ok = false;
  bool pass = false;
};

StructureCheckReport structure_check_suite(std::uint64_t seed, int instances, int max_dim = 64);

}  // namespace bdfp
