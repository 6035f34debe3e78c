// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "arraydpd/gmp.hpp"

#include <cstdint>
#include <vector>

namespace arraydpd {

/// L amplifier models sharing one GmpStructure.
class PaBank {
public:
    explicit PaBank(std::vector<GmpModel> models);

    std::size_t size() const noexcept { return models_.size(); }
    const GmpModel& operator[](std::size_t l) const noexcept { return models_[l]; }
    const std::vector<GmpModel>& models() const noexcept { return models_; }
    const GmpStructure& structure() const noexcept { return models_.front().structure(); }

    /// Per-element small-signal (DC, linear-term) complex gain.
    const std::vector<cd>& small_signal_gain() const noexcept { return small_signal_gain_; }

private:
    std::vector<GmpModel> models_;
    std::vector<cd> small_signal_gain_;
};

/// Sum of the p = 1 coefficients over all lags and taps.
cd small_signal_gain(const GmpModel& model);

struct DispersionSpec {
    double gain_std_db = 0.0;
    double phase_std_deg = 0.0;
    double nonlinear_coeff_rel_std = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Element l is `nominal` with its linear coefficients scaled by a random
/// complex gain (log-normal amplitude, normal phase) and every p >= 3
/// coefficient scaled by (1 + delta), delta ~ N(0, nonlinear_coeff_rel_std).
PaBank synthesize_bank(const GmpModel& nominal, const DispersionSpec& disp, int count);

/// Backoff at which the nominal PA sees a unit-power input when the caller
/// asks for backoff_db = 0, in dB below the saturation input amplitude.
inline constexpr double kNominalReferenceBackoffDb = 12.0;

/// RMS input amplitude of a unit-power signal, normalized to the soft
/// limiter's saturation amplitude, for the given extra backoff.
double nominal_drive_amplitude(double backoff_db) noexcept;

/// The fixed reference amplifier. Memoryless part: least-squares 13th-order
/// odd polynomial fit of a Rapp soft limiter (smoothness 2, unit saturation)
/// with AM/PM 1.5 a^2 / (1 + a^2) rad, over normalized input amplitude
/// [0, 2.5]. Memory part: four small linear and cross-envelope taps. Every
/// coefficient is rescaled so a unit-power input drives the polynomial at
/// nominal_drive_amplitude(backoff_db) with unit small-signal memoryless
/// gain. Terms the structure cannot hold are dropped.
GmpModel default_nominal_pa(const GmpStructure& structure, double backoff_db);

/// Smallest structure holding every term of default_nominal_pa.
inline constexpr GmpStructure kNominalPaStructure{13, 1, 3};

}  // namespace arraydpd
