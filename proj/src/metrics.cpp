// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/metrics.hpp"

#include "arraydpd/error.hpp"
#include "arraydpd/fft.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>

namespace arraydpd::metrics {

double Psd::total_power() const noexcept
{
    double acc = 0.0;
    for (double d : density)
        acc += d;
    return acc * bin_width_hz;
}

Psd psd(const ComplexSignal& sig, std::size_t segment_len, double overlap)
{
    if (segment_len < 2)
        throw Error(ErrorCategory::invalid_argument, "psd: segment length must be >= 2");
    if (!(overlap >= 0.0 && overlap < 1.0))
        throw Error(ErrorCategory::invalid_argument, "psd: overlap must lie in [0, 1)");
    if (sig.size() < 2 * segment_len)
        throw Error(ErrorCategory::signal_too_short, "psd: signal must hold at least two segments");

    const std::size_t hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(segment_len * (1.0 - overlap))));
    std::vector<double> window(segment_len);
    double window_energy = 0.0;
    for (std::size_t n = 0; n < segment_len; ++n) {
        window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(segment_len));
        window_energy += window[n] * window[n];
    }

    Fft forward(segment_len, Fft::Direction::forward);
    std::vector<cd> buf(segment_len);
    std::vector<double> acc(segment_len, 0.0);
    std::size_t segments = 0;
    const auto x = sig.samples();
    for (std::size_t start = 0; start + segment_len <= x.size(); start += hop) {
        for (std::size_t n = 0; n < segment_len; ++n)
            buf[n] = x[start + n] * window[n];
        forward.execute(buf, buf);
        for (std::size_t k = 0; k < segment_len; ++k)
            acc[k] += std::norm(buf[k]);
        ++segments;
    }

    const double fs = sig.sample_rate_hz();
    const double scale = 1.0 / (static_cast<double>(segments) * fs * window_energy);
    Psd out;
    out.bin_width_hz = fs / static_cast<double>(segment_len);
    out.freq_hz.resize(segment_len);
    out.density.resize(segment_len);
    const long half = static_cast<long>(segment_len / 2);
    for (std::size_t i = 0; i < segment_len; ++i) {
        const long k = static_cast<long>(i) - half;
        out.freq_hz[i] = static_cast<double>(k) * out.bin_width_hz;
        out.density[i] = acc[bin_position(k, segment_len)] * scale;
    }
    return out;
}

double band_power(const Psd& spectrum, double centre_hz, double bandwidth_hz)
{
    const double lo = centre_hz - 0.5 * bandwidth_hz;
    const double hi = centre_hz + 0.5 * bandwidth_hz;
    const double df = spectrum.bin_width_hz;
    double acc = 0.0;
    for (std::size_t i = 0; i < spectrum.freq_hz.size(); ++i) {
        const double b_lo = spectrum.freq_hz[i] - 0.5 * df;
        const double b_hi = spectrum.freq_hz[i] + 0.5 * df;
        const double overlap = std::min(hi, b_hi) - std::max(lo, b_lo);
        if (overlap > 0.0)
            acc += spectrum.density[i] * overlap;
    }
    return acc;
}

void AclrSpec::validate() const
{
    const auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!pos(channel_bw_hz) || !pos(measurement_bw_hz) || !pos(adjacent_offset_hz))
        throw Error(ErrorCategory::invalid_config, "AclrSpec: bandwidths and offset must be positive");
    if (adjacent_offset_hz < measurement_bw_hz)
        throw Error(ErrorCategory::invalid_config, "AclrSpec: adjacent offset must be >= measurement bandwidth");
}

AclrResult aclr_sides(const ComplexSignal& sig, const AclrSpec& spec, std::size_t segment_len)
{
    spec.validate();
    if (sig.sample_rate_hz() < 2.0 * (spec.adjacent_offset_hz + 0.5 * spec.measurement_bw_hz))
        throw Error(ErrorCategory::bandwidth_exceeds_nyquist,
                    "aclr: adjacent channel extends beyond the Nyquist frequency");
    const Psd s = psd(sig, segment_len);
    const double main = band_power(s, 0.0, spec.measurement_bw_hz);
    const double lower = band_power(s, -spec.adjacent_offset_hz, spec.measurement_bw_hz);
    const double upper = band_power(s, spec.adjacent_offset_hz, spec.measurement_bw_hz);
    return AclrResult{10.0 * std::log10(main / lower), 10.0 * std::log10(main / upper)};
}

double aclr(const ComplexSignal& sig, const AclrSpec& spec, std::size_t segment_len)
{
    const AclrResult r = aclr_sides(sig, spec, segment_len);
    switch (spec.side) {
    case AclrSpec::Side::lower: return r.lower_db;
    case AclrSpec::Side::upper: return r.upper_db;
    case AclrSpec::Side::worst: break;
    }
    return r.worst_db();
}

std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_psd_csv(std::ostream& out, const std::vector<std::pair<std::string, Psd>>& spectra)
{
    if (spectra.empty())
        return;
    const auto& grid = spectra.front().second.freq_hz;
    for (const auto& [name, s] : spectra) {
        if (s.freq_hz != grid)
            throw Error(ErrorCategory::size_mismatch, "write_psd_csv: spectra use different frequency grids");
    }
    out << "freq_hz";
    for (const auto& [name, s] : spectra)
        out << ',' << name << "_dbhz";
    out << '\n';
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << format_number(grid[i]);
        for (const auto& [name, s] : spectra)
            out << ',' << format_number(10.0 * std::log10(s.density[i]));
        out << '\n';
    }
}

}  // namespace arraydpd::metrics
