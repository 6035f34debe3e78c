// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/waveform.hpp"

#include "arraydpd/error.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace arraydpd::waveform {

namespace {

struct Ratio {
    long up;
    long down;
};

Ratio rational_ratio(double ratio)
{
    for (long down = 1; down <= kMaxResampleFactor; ++down) {
        const long up = std::lround(ratio * static_cast<double>(down));
        if (up < 1 || up > kMaxResampleFactor)
            continue;
        if (std::abs(static_cast<double>(up) / static_cast<double>(down) - ratio) <= 1e-9 * ratio) {
            const long g = std::gcd(up, down);
            return {up / g, down / g};
        }
    }
    std::ostringstream msg;
    msg << "resample: rate ratio " << ratio << " is not a ratio of integers <= " << kMaxResampleFactor;
    throw Error(ErrorCategory::incommensurable_rates, msg.str());
}

double bessel_i0(double x)
{
    double sum = 1.0, term = 1.0;
    const double q = 0.25 * x * x;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    return sum;
}

// Kaiser-windowed sinc lowpass at the upsampled rate. Passband edge sits at
// 0.8x the lower Nyquist frequency, stopband at the lower Nyquist frequency,
// 80 dB stopband attenuation. DC gain equals `up`.
std::vector<double> design_lowpass(long up, long down)
{
    constexpr double atten_db = 80.0;
    const double nyq = 0.5 / static_cast<double>(std::max(up, down));  // cycles/sample at the upsampled rate
    const double pass = 0.8 * nyq;
    const double cutoff = 0.5 * (pass + nyq);
    const double transition = 2.0 * std::numbers::pi * (nyq - pass);
    const double beta = 0.1102 * (atten_db - 8.7);
    auto taps = static_cast<long>(std::ceil((atten_db - 7.95) / (2.285 * transition))) + 1;
    if (taps % 2 == 0)
        ++taps;

    std::vector<double> h(static_cast<std::size_t>(taps));
    const double centre = 0.5 * static_cast<double>(taps - 1);
    const double i0_beta = bessel_i0(beta);
    for (long n = 0; n < taps; ++n) {
        const double t = static_cast<double>(n) - centre;
        const double arg = 2.0 * cutoff * t;
        const double sinc = t == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
        const double r = t / centre;
        const double window = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
        h[static_cast<std::size_t>(n)] = 2.0 * cutoff * sinc * window;
    }
    const double dc = std::accumulate(h.begin(), h.end(), 0.0);
    for (auto& v : h)
        v *= static_cast<double>(up) / dc;
    return h;
}

}  // namespace

ComplexSignal resample(const ComplexSignal& sig, double target_rate_hz)
{
    if (!(target_rate_hz > 0.0) || !std::isfinite(target_rate_hz))
        throw Error(ErrorCategory::invalid_argument, "resample: target rate must be positive");
    const double ratio = target_rate_hz / sig.sample_rate_hz();
    const auto [up, down] = rational_ratio(ratio);
    if (up == 1 && down == 1)
        return sig;

    const auto h = design_lowpass(up, down);
    const long taps = static_cast<long>(h.size());
    const long centre = (taps - 1) / 2;
    const long n_in = static_cast<long>(sig.size());
    const long n_out = (n_in * up + down - 1) / down;

    // y[k] = sum_n x[n] h[k*down - n*up + centre]
    std::vector<cd> out(static_cast<std::size_t>(n_out));
    const auto x = sig.samples();
    for (long k = 0; k < n_out; ++k) {
        const long t = k * down + centre;
        long n_lo = t - (taps - 1);
        n_lo = n_lo <= 0 ? 0 : (n_lo + up - 1) / up;
        const long n_hi = std::min(n_in - 1, t / up);
        cd acc{};
        for (long n = n_lo; n <= n_hi; ++n)
            acc += x[static_cast<std::size_t>(n)] * h[static_cast<std::size_t>(t - n * up)];
        out[static_cast<std::size_t>(k)] = acc;
    }
    return ComplexSignal(std::move(out), sig.sample_rate_hz() * static_cast<double>(up) / static_cast<double>(down));
}

}  // namespace arraydpd::waveform
