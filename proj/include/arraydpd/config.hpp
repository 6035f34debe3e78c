// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "arraydpd/array.hpp"
#include "arraydpd/dpd.hpp"
#include "arraydpd/metrics.hpp"
#include "arraydpd/pa_bank.hpp"
#include "arraydpd/sweep.hpp"
#include "arraydpd/waveform.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace arraydpd::harness {

struct BankConfig {
    std::string model = "nominal";  ///< "nominal" or "identity"
    GmpStructure structure = kNominalPaStructure;
    DispersionSpec dispersion{0.5, 5.0, 0.1, 7};
    int elements = 64;
    double backoff_db = 0.0;
};

struct WeightsConfig {
    bool matched = true;            ///< steering vector for steer_deg
    double steer_deg = 0.0;
    std::vector<double> phases_deg; ///< used when matched is false
};

/// Drive levels of the default EIRP sweep, dB relative to the nominal
/// operating point.
std::vector<double> default_sweep_levels();

struct ExperimentConfig {
    waveform::NrCarrierConfig waveform;
    BankConfig bank;
    WeightsConfig weights;
    array::ObservationConfig observation{45.0, 11};
    dpd::DpdConfig dpd;
    metrics::AclrSpec aclr;
    double drive_db = 0.0;                        ///< operating point of `single`
    std::vector<double> sweep = default_sweep_levels();
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";
    int threads = 1;

    /// Cross-module checks; throws Error(invalid_config).
    void validate() const;
};

/// Parse a JSON document; missing keys take their defaults, unknown keys are
/// rejected. Throws Error(config_parse).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved JSON, readable by parse_config.
std::string dump_config(const ExperimentConfig& cfg);

metrics::Scenario build_scenario(const ExperimentConfig& cfg);

}  // namespace arraydpd::harness
