#pragma once

#include "lingan/experiments.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lingan::config {

// Plain-text `key = value` configuration. Blank lines and lines starting
// with '#' are skipped. The key set is closed: unknown or duplicate keys are
// rejected with ConfigError. Recognized keys:
//   d, m, n, sigma, gamma_kind, trials, base_seed, k_grid, n_ps_list,
//   variant, alpha, test_convention, test_target, max_iters, init_std,
//   step_init, grad_stop, move_tol, stall_limit, workers
// Integer lists accept either a comma form "1,3,5" or an inclusive range
// "start:step:end".
experiments::ExperimentConfig parse_stream(std::istream& in, const std::string& source);
experiments::ExperimentConfig parse_file(const std::string& path);

// "1,3,5" or "start:step:end" (inclusive, step >= 1).
std::vector<Index> parse_index_list(const std::string& text);

// WORKERS environment variable overrides cfg.workers when set.
void apply_env_overrides(experiments::ExperimentConfig& cfg);

// Renders the fully resolved configuration (defaults expanded, lists
// materialized) in the same key = value syntax.
std::string render(const experiments::ExperimentConfig& cfg);

} // namespace lingan::config
