// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "arraydpd/config.hpp"
#include "arraydpd/sweep.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace arraydpd::harness {

struct SingleReport {
    std::vector<metrics::PointResult> points;  ///< one per requested mode, in mode order
};

/// Linearize at cfg.drive_db for each mode and write, under cfg.output_dir:
///   config_resolved.json   the exact configuration used
///   metrics.csv            mode,aclr_db,aclr_lower_db,aclr_upper_db,evm_percent,eirp_proxy_db,train_nmse_db
///   psd.csv                freq_hz,input_dbhz,<mode>_dbhz...
///   learn_<mode>.csv       iteration,nmse_db,condition_estimate
///   beta_<mode>.gmp        learned predistorter (GMP text format)
///   input.csig, received_<mode>.csig
SingleReport run_single(const ExperimentConfig& cfg, const std::vector<metrics::DpdMode>& modes);

/// Drive sweep over cfg.sweep; writes config_resolved.json, sweep.csv and
/// sweep_summary.csv (dpd_mode,max_compliant_drive_db).
metrics::SweepResult run_sweep_cmd(const ExperimentConfig& cfg, const std::vector<metrics::DpdMode>& modes);

/// Compact invariant checks over small random instances; one line per
/// check to `log`. Returns true when all pass.
bool run_selftest(std::ostream& log, std::uint64_t seed);

}  // namespace arraydpd::harness
