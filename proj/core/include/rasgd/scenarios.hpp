#pragma once

#include <string>

#include "rasgd/config.hpp"

namespace rasgd {

/* Named experiment sweeps.  Each renders a complete CSV: header row, '.'
 * decimal separator, no locale, rows in deterministic sweep order.  Every
 * row carries the master seed and the canonical parameter hash, so any row
 * can be reproduced from the spec alone.
 *
 *   mse-vs-minibatch   K_bar,scheme,mse_empirical,mse_theoretical,stderr,
 *                      round_time_symbols,trials,seed,param_hash
 *   mse-vs-devices     K,scheme,... (same tail)
 *   mse-vs-sublength   L_bar,D,mse_empirical,mse_theoretical,stderr,seed,
 *                      param_hash
 *   train              round,scheme,cost,cumulative_symbols,seed,param_hash
 *   quantizer-check    check,L_bar,draws,observed,expected,tolerance,pass,
 *                      seed,param_hash
 */
std::string scenario_csv(const ExperimentSpec& spec);

/// Renders scenario_csv(spec) and writes it to spec.out.
void run_scenario(const ExperimentSpec& spec);

}  // namespace rasgd
