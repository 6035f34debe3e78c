// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "arraydpd/signal.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace arraydpd::metrics {

/// Two-sided power spectral density, bins ascending from -fs/2.
struct Psd {
    std::vector<double> freq_hz;
    std::vector<double> density;  ///< power per Hz
    double bin_width_hz = 0.0;

    /// Integral of the density over the whole band.
    double total_power() const noexcept;
};

inline constexpr std::size_t kDefaultSegment = 4096;
inline constexpr double kDefaultOverlap = 0.5;

/// Welch averaged periodogram with a periodic Hann window, scaled so the
/// density integrates to the signal's mean power.
Psd psd(const ComplexSignal& sig, std::size_t segment_len = kDefaultSegment, double overlap = kDefaultOverlap);

/// Power within [centre - bw/2, centre + bw/2], edge bins weighted by their
/// overlap with the band.
double band_power(const Psd& spectrum, double centre_hz, double bandwidth_hz);

struct AclrSpec {
    enum class Side { lower, upper, worst };

    double channel_bw_hz = 200e6;
    double measurement_bw_hz = 190.08e6;
    double adjacent_offset_hz = 200e6;
    Side side = Side::worst;

    void validate() const;
};

struct AclrResult {
    double lower_db = 0.0;
    double upper_db = 0.0;
    double worst_db() const noexcept { return lower_db < upper_db ? lower_db : upper_db; }
};

AclrResult aclr_sides(const ComplexSignal& sig, const AclrSpec& spec = {},
                      std::size_t segment_len = kDefaultSegment);

/// Main-channel over adjacent-channel power in dB for spec.side.
double aclr(const ComplexSignal& sig, const AclrSpec& spec = {}, std::size_t segment_len = kDefaultSegment);

/// CSV: freq_hz then one <name>_dbhz column per spectrum (10 log10 of the
/// density). All spectra must share one frequency grid.
void write_psd_csv(std::ostream& out, const std::vector<std::pair<std::string, Psd>>& spectra);

/// Shortest round-trip decimal representation.
std::string format_number(double v);

}  // namespace arraydpd::metrics
