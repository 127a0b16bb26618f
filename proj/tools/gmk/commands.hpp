#pragma once

#include "config.hpp"

namespace gmk::cli {

// Each command writes its outputs and returns false when an enabled assertion fails.
bool run_generate(const RunConfig& cfg);
bool run_bundle(const RunConfig& cfg);
bool run_decompose(const RunConfig& cfg);
bool run_conecurve(const RunConfig& cfg);
bool run_nondiff(const RunConfig& cfg);
bool run_difftest(const RunConfig& cfg);
bool run_verify_currents(const RunConfig& cfg);

}  // namespace gmk::cli
