// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "arraydpd/array.hpp"
#include "arraydpd/dpd.hpp"
#include "arraydpd/metrics.hpp"
#include "arraydpd/pa_bank.hpp"
#include "arraydpd/waveform.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace arraydpd::metrics {

enum class DpdMode { off, mp, gmp };

std::string_view mode_name(DpdMode mode) noexcept;
DpdMode parse_mode(std::string_view name);

inline constexpr DpdMode kAllModes[] = {DpdMode::off, DpdMode::mp, DpdMode::gmp};

/// FR2 conformance limits.
inline constexpr double kAclrLimitDb = 28.0;
inline constexpr double kEvmLimitPercent = 8.0;

struct Scenario {
    waveform::NrCarrierConfig waveform;
    PaBank bank;
    array::BeamWeights weights;
    array::ObservationConfig observation;
    dpd::DpdConfig dpd;  ///< GMP learner; the MP learner drops the envelope lags
    AclrSpec aclr;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct PointResult {
    DpdMode mode = DpdMode::off;
    double drive_db = 0.0;
    double eirp_proxy_db = 0.0;
    AclrResult aclr;
    double evm_percent = 0.0;        ///< NaN when the received signal cannot be demodulated
    std::optional<dpd::LearnResult> learn;  ///< absent for DpdMode::off
    std::optional<ComplexSignal> received;  ///< combined held-out observation
};

/// Training and held-out carriers for one scenario. Training data covers
/// one fresh block per ILA iteration; held-out data uses an independent
/// bit seed and is never seen by the learner.
class Experiment {
public:
    explicit Experiment(Scenario scenario);

    const Scenario& scenario() const noexcept { return scenario_; }
    const waveform::Carrier& training() const noexcept { return training_; }
    const waveform::Carrier& held_out() const noexcept { return held_out_; }
    const waveform::NrCarrierConfig& training_config() const noexcept { return training_cfg_; }

    /// Observation path: transmit through the bank, then phase-align and
    /// combine with noise drawn from `noise_seed`.
    ComplexSignal chain(const ComplexSignal& u, std::uint64_t noise_seed) const;

    /// Scale both data sets by drive_db, learn (unless off) and measure ACLR,
    /// EVM and output power on the held-out data.
    PointResult measure(double drive_db, DpdMode mode, bool keep_signal = false) const;

private:
    Scenario scenario_;
    waveform::NrCarrierConfig training_cfg_;
    waveform::Carrier training_;
    waveform::Carrier held_out_;
};

struct SweepRow {
    double drive_level_db = 0.0;
    double eirp_proxy_db = 0.0;
    double aclr_db = 0.0;
    double evm_percent = 0.0;
    DpdMode dpd_mode = DpdMode::off;

    bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
    std::vector<SweepRow> rows;  ///< ascending drive level, modes in call order within a level
};

/// Fresh learning at every drive level.
SweepResult run_sweep(const Scenario& scenario, std::vector<double> drive_levels_db,
                      const std::vector<DpdMode>& modes = {kAllModes[0], kAllModes[1], kAllModes[2]});
SweepResult run_sweep(const Experiment& experiment, std::vector<double> drive_levels_db,
                      const std::vector<DpdMode>& modes);

/// Highest drive level up to which every row of `mode` meets both limits;
/// nullopt when even the lowest level fails.
std::optional<double> max_compliant_drive(const SweepResult& result, DpdMode mode,
                                          double aclr_limit_db = kAclrLimitDb,
                                          double evm_limit_percent = kEvmLimitPercent);

/// CSV with the FR2 limits as '#' header lines, then
/// drive_level_db,eirp_proxy_db,aclr_db,evm_percent,dpd_mode.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
SweepResult read_sweep_csv(std::istream& in);

}  // namespace arraydpd::metrics
