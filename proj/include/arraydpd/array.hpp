// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "arraydpd/pa_bank.hpp"
#include "arraydpd/signal.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace arraydpd::array {

/// Unit-modulus beamforming coefficients w_l.
class BeamWeights {
public:
    explicit BeamWeights(std::vector<cd> weights);

    /// Weights from phases in degrees.
    static BeamWeights from_phases_deg(const std::vector<double>& phases_deg);

    /// Half-wavelength uniform linear array steered to `steer_deg` from
    /// broadside: w_l = exp(-j pi l sin(theta)). Broadside gives all ones.
    static BeamWeights matched(int count, double steer_deg = 0.0);

    std::size_t size() const noexcept { return weights_.size(); }
    const cd& operator[](std::size_t l) const noexcept { return weights_[l]; }
    const std::vector<cd>& values() const noexcept { return weights_; }

private:
    std::vector<cd> weights_;
};

struct ObservationConfig {
    /// SNR of the combined observation relative to its own mean power;
    /// nullopt means noiseless.
    std::optional<double> noise_snr_db;
    std::uint64_t seed = 0;
};

/// Element outputs y_l = PA_l(w_l x). Elements are independent; `threads`
/// caps the number of worker threads used to evaluate them.
std::vector<ComplexSignal> transmit(const ComplexSignal& x, const BeamWeights& w, const PaBank& bank,
                                    int threads = 1);

/// Phase-aligned combination r(n) = sum_l conj(w_l) y_l(n), summed in
/// element order, plus complex white Gaussian noise when configured.
ComplexSignal combine(const std::vector<ComplexSignal>& outputs, const BeamWeights& w,
                      const ObservationConfig& obs);

/// Coefficient-wise sum over the bank's elements.
GmpModel equivalent_model(const PaBank& bank);

/// Complex white Gaussian noise at `snr_db` below the signal's mean power.
ComplexSignal add_noise(const ComplexSignal& sig, double snr_db, std::uint64_t seed);

}  // namespace arraydpd::array
