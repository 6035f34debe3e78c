// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "arraydpd/signal.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace arraydpd::waveform {

/// CP-OFDM numerology. Defaults are the 200 MHz / 60 kHz FR2 carrier
/// (3168 active of 4096 subcarriers, 64-QAM, 4x oversampling).
struct NrCarrierConfig {
    double subcarrier_spacing_hz = 60e3;
    int fft_size = 4096;
    int active_subcarriers = 3168;
    double cp_fraction = 288.0 / 4096.0;
    int qam_order = 64;
    int num_symbols = 14;
    int oversampling = 4;

    /// Throws Error(invalid_config) when any invariant is violated.
    void validate() const;

    double sample_rate_hz() const noexcept
    {
        return static_cast<double>(oversampling) * fft_size * subcarrier_spacing_hz;
    }
    double occupied_bandwidth_hz() const noexcept { return active_subcarriers * subcarrier_spacing_hz; }

    // Lengths below are in samples at the oversampled rate.
    std::size_t ifft_length() const noexcept { return static_cast<std::size_t>(fft_size) * oversampling; }
    std::size_t cp_length() const noexcept;
    /// Raised-cosine edge taper overlapped between neighbouring symbols.
    std::size_t ramp_length() const noexcept { return cp_length() / 8; }
    std::size_t symbol_length() const noexcept { return cp_length() + ifft_length(); }
    std::size_t signal_length() const noexcept { return symbol_length() * static_cast<std::size_t>(num_symbols); }

    bool operator==(const NrCarrierConfig&) const = default;
};

/// Signed subcarrier index of active cell j: j - floor(K/2).
long subcarrier_index(int j, int active_subcarriers) noexcept;

/// Square QAM alphabet with unit average power, index = i + sqrt(Q) * q.
std::vector<cd> qam_alphabet(int order);

/// Transmitted frequency-domain cells, row-major (symbol, active subcarrier).
struct ConstellationGrid {
    int num_symbols = 0;
    int active_subcarriers = 0;
    std::uint64_t bit_source_seed = 0;
    std::vector<cd> symbols;

    const cd& at(int symbol, int carrier) const
    {
        return symbols[static_cast<std::size_t>(symbol) * active_subcarriers + carrier];
    }
};

struct Carrier {
    ComplexSignal signal;
    ConstellationGrid grid;
};

/// Random QAM grid; cell values are a pure function of (seed, cell index).
ConstellationGrid random_grid(const NrCarrierConfig& cfg, std::uint64_t seed);

/// Time-domain CP-OFDM signal for `grid`, normalized to unit mean power.
ComplexSignal modulate(const ConstellationGrid& grid, const NrCarrierConfig& cfg);

Carrier generate_carrier(const NrCarrierConfig& cfg, std::uint64_t seed);

/// Band-limited rational resampling. The rate ratio must be expressible as
/// up/down with both at most kMaxResampleFactor.
ComplexSignal resample(const ComplexSignal& sig, double target_rate_hz);

inline constexpr int kMaxResampleFactor = 1024;

struct Demodulation {
    double evm_percent = 0.0;
    long timing_offset = 0;        ///< samples; received = ideal delayed by this
    double correlation_peak = 0.0; ///< normalized, in [0, 1]
    cd scalar_gain{};
};

/// Correlation peaks below this are reported as sync-failure.
inline constexpr double kSyncThreshold = 0.5;

Demodulation demodulate(const ComplexSignal& received, const ConstellationGrid& ref,
                        const NrCarrierConfig& cfg);

inline double demodulate_evm(const ComplexSignal& received, const ConstellationGrid& ref,
                             const NrCarrierConfig& cfg)
{
    return demodulate(received, ref, cfg).evm_percent;
}

}  // namespace arraydpd::waveform
