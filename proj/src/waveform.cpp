// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/waveform.hpp"

#include "arraydpd/error.hpp"
#include "arraydpd/fft.hpp"
#include "arraydpd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace arraydpd::waveform {

namespace {

[[noreturn]] void invalid(const std::string& what)
{
    throw Error(ErrorCategory::invalid_config, "NrCarrierConfig: " + what);
}

int isqrt_exact(int n)
{
    const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    return r * r == n ? r : -1;
}

}  // namespace

void NrCarrierConfig::validate() const
{
    if (!(subcarrier_spacing_hz > 0.0) || !std::isfinite(subcarrier_spacing_hz))
        invalid("subcarrier_spacing_hz must be positive");
    if (fft_size <= 0)
        invalid("fft_size must be positive");
    if (active_subcarriers <= 0 || active_subcarriers >= fft_size)
        invalid("active_subcarriers must lie in [1, fft_size)");
    if (!(cp_fraction > 0.0 && cp_fraction < 1.0))
        invalid("cp_fraction must lie in (0, 1)");
    if (qam_order != 4 && qam_order != 16 && qam_order != 64 && qam_order != 256)
        invalid("qam_order must be one of 4, 16, 64, 256");
    if (num_symbols <= 0)
        invalid("num_symbols must be positive");
    if (oversampling <= 0)
        invalid("oversampling must be positive");
    if (cp_length() == 0)
        invalid("cyclic prefix rounds to zero samples");
}

std::size_t NrCarrierConfig::cp_length() const noexcept
{
    return static_cast<std::size_t>(std::lround(cp_fraction * fft_size)) * static_cast<std::size_t>(oversampling);
}

long subcarrier_index(int j, int active_subcarriers) noexcept
{
    return static_cast<long>(j) - active_subcarriers / 2;
}

std::vector<cd> qam_alphabet(int order)
{
    const int side = isqrt_exact(order);
    if (side < 2)
        throw Error(ErrorCategory::invalid_config, "qam_alphabet: order must be a square >= 4");
    const double norm = std::sqrt(2.0 * (order - 1) / 3.0);
    std::vector<cd> points;
    points.reserve(static_cast<std::size_t>(order));
    for (int q = 0; q < side; ++q) {
        for (int i = 0; i < side; ++i)
            points.emplace_back((2 * i - (side - 1)) / norm, (2 * q - (side - 1)) / norm);
    }
    return points;
}

ConstellationGrid random_grid(const NrCarrierConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    const auto alphabet = qam_alphabet(cfg.qam_order);
    CounterRng bits(seed, /*stream=*/1);

    ConstellationGrid grid;
    grid.num_symbols = cfg.num_symbols;
    grid.active_subcarriers = cfg.active_subcarriers;
    grid.bit_source_seed = seed;
    grid.symbols.resize(static_cast<std::size_t>(cfg.num_symbols) * cfg.active_subcarriers);
    for (auto& s : grid.symbols)
        s = alphabet[bits.below(alphabet.size())];
    return grid;
}

ComplexSignal modulate(const ConstellationGrid& grid, const NrCarrierConfig& cfg)
{
    cfg.validate();
    if (grid.num_symbols != cfg.num_symbols || grid.active_subcarriers != cfg.active_subcarriers)
        throw Error(ErrorCategory::size_mismatch, "modulate: grid does not match carrier configuration");

    const std::size_t n_fft = cfg.ifft_length();
    const std::size_t n_cp = cfg.cp_length();
    const std::size_t n_ramp = cfg.ramp_length();
    const std::size_t n_sym = cfg.symbol_length();
    const std::size_t total = cfg.signal_length();

    std::vector<double> ramp(n_ramp);
    for (std::size_t t = 0; t < n_ramp; ++t)
        ramp[t] = 0.5 * (1.0 - std::cos(std::numbers::pi * (static_cast<double>(t) + 0.5) / static_cast<double>(n_ramp)));

    Fft inverse(n_fft, Fft::Direction::inverse);
    std::vector<cd> freq(n_fft), body(n_fft);
    std::vector<cd> out(total, cd{});

    for (int s = 0; s < grid.num_symbols; ++s) {
        std::fill(freq.begin(), freq.end(), cd{});
        for (int j = 0; j < grid.active_subcarriers; ++j)
            freq[bin_position(subcarrier_index(j, grid.active_subcarriers), n_fft)] = grid.at(s, j);
        inverse.execute(freq, body);

        // cyclic prefix + body + cyclic suffix, tapered at both ends; the
        // suffix of the last symbol wraps onto the start of the frame
        const std::size_t start = static_cast<std::size_t>(s) * n_sym;
        const std::size_t ext = n_cp + n_fft + n_ramp;
        for (std::size_t t = 0; t < ext; ++t) {
            double w = 1.0;
            if (t < n_ramp)
                w = ramp[t];
            else if (t >= ext - n_ramp)
                w = ramp[ext - 1 - t];
            const std::size_t src = (t + n_fft - n_cp) % n_fft;
            out[(start + t) % total] += w * body[src];
        }
    }

    const double scale = 1.0 / std::sqrt(mean_power(out));
    for (auto& v : out)
        v *= scale;
    return ComplexSignal(std::move(out), cfg.sample_rate_hz());
}

Carrier generate_carrier(const NrCarrierConfig& cfg, std::uint64_t seed)
{
    auto grid = random_grid(cfg, seed);
    auto signal = modulate(grid, cfg);
    return Carrier{std::move(signal), std::move(grid)};
}

Demodulation demodulate(const ComplexSignal& received, const ConstellationGrid& ref,
                        const NrCarrierConfig& cfg)
{
    cfg.validate();
    if (std::abs(received.sample_rate_hz() - cfg.sample_rate_hz()) > 1e-9 * cfg.sample_rate_hz())
        throw Error(ErrorCategory::invalid_argument, "demodulate: sample rate does not match carrier configuration");

    const auto ideal = modulate(ref, cfg);
    const std::size_t n_r = received.size();
    const std::size_t n_i = ideal.size();
    if (n_r < cfg.symbol_length())
        throw Error(ErrorCategory::insufficient_length, "demodulate: received signal shorter than one OFDM symbol");

    // full linear cross-correlation c[lag] = sum_n r[n + lag] conj(i[n])
    std::size_t n_corr = 1;
    while (n_corr < n_r + n_i - 1)
        n_corr <<= 1;
    std::vector<cd> rp(n_corr, cd{}), ip(n_corr, cd{});
    std::copy(received.samples().begin(), received.samples().end(), rp.begin());
    std::copy(ideal.samples().begin(), ideal.samples().end(), ip.begin());
    Fft fwd(n_corr, Fft::Direction::forward);
    Fft inv(n_corr, Fft::Direction::inverse);
    fwd.execute(rp, rp);
    fwd.execute(ip, ip);
    for (std::size_t k = 0; k < n_corr; ++k)
        rp[k] *= std::conj(ip[k]);
    inv.execute(rp, rp);

    long best_lag = 0;
    double best = -1.0;
    const long min_lag = -static_cast<long>(n_i) + 1;
    const long max_lag = static_cast<long>(n_r) - 1;
    for (long lag = min_lag; lag <= max_lag; ++lag) {
        const double m = std::abs(rp[bin_position(lag, n_corr)]);
        if (m > best) {
            best = m;
            best_lag = lag;
        }
    }

    // normalize by the energies of the overlapping stretches
    const long r_begin = std::max<long>(0, best_lag);
    const long r_end = std::min<long>(static_cast<long>(n_r), best_lag + static_cast<long>(n_i));
    const auto rs = received.samples().subspan(static_cast<std::size_t>(r_begin),
                                               static_cast<std::size_t>(std::max<long>(0, r_end - r_begin)));
    const auto is = ideal.samples().subspan(static_cast<std::size_t>(r_begin - best_lag), rs.size());
    const double denom = std::sqrt(energy(rs) * energy(is));
    const double peak = denom > 0.0 ? best / denom : 0.0;
    if (!(peak >= kSyncThreshold)) {
        std::ostringstream msg;
        msg << "demodulate: correlation peak " << peak << " below threshold " << kSyncThreshold;
        throw Error(ErrorCategory::sync_failure, msg.str());
    }

    const std::size_t n_fft = cfg.ifft_length();
    const std::size_t n_cp = cfg.cp_length();
    const std::size_t n_sym = cfg.symbol_length();
    const int n_act = cfg.active_subcarriers;
    const long last_end = best_lag + static_cast<long>((ref.num_symbols - 1) * n_sym + n_cp + n_fft);
    if (best_lag + static_cast<long>(n_cp) < 0 || last_end > static_cast<long>(n_r))
        throw Error(ErrorCategory::insufficient_length,
                    "demodulate: received signal does not cover all reference symbols");

    Fft forward(n_fft, Fft::Direction::forward);
    std::vector<cd> cells(ref.symbols.size());
    std::vector<cd> spectrum(n_fft);
    for (int s = 0; s < ref.num_symbols; ++s) {
        const auto first = static_cast<std::size_t>(best_lag + static_cast<long>(s * n_sym + n_cp));
        forward.execute(received.samples().subspan(first, n_fft), spectrum);
        for (int j = 0; j < n_act; ++j)
            cells[static_cast<std::size_t>(s) * n_act + j] = spectrum[bin_position(subcarrier_index(j, n_act), n_fft)];
    }

    // complex scalar gain
    cd num{};
    double den = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        num += cells[c] * std::conj(ref.symbols[c]);
        den += std::norm(ref.symbols[c]);
    }
    const cd gain = num / den;
    for (auto& c : cells)
        c /= gain;

    // one-tap least-squares equalizer per subcarrier, fitted over all symbols
    for (int j = 0; j < n_act; ++j) {
        cd h_num{};
        double h_den = 0.0;
        for (int s = 0; s < ref.num_symbols; ++s) {
            const auto c = static_cast<std::size_t>(s) * n_act + j;
            h_num += cells[c] * std::conj(ref.symbols[c]);
            h_den += std::norm(ref.symbols[c]);
        }
        const cd h = h_num / h_den;
        if (std::abs(h) == 0.0)
            continue;
        for (int s = 0; s < ref.num_symbols; ++s)
            cells[static_cast<std::size_t>(s) * n_act + j] /= h;
    }

    double err = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c)
        err += std::norm(cells[c] - ref.symbols[c]);

    Demodulation result;
    result.evm_percent = 100.0 * std::sqrt(err / den);
    result.timing_offset = best_lag;
    result.correlation_peak = peak;
    result.scalar_gain = gain;
    return result;
}

}  // namespace arraydpd::waveform
