// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/array.hpp"

#include "arraydpd/error.hpp"
#include "arraydpd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace arraydpd::array {

BeamWeights::BeamWeights(std::vector<cd> weights) : weights_(std::move(weights))
{
    if (weights_.empty())
        throw Error(ErrorCategory::invalid_argument, "BeamWeights: at least one weight required");
    for (const auto& w : weights_) {
        if (!(std::abs(std::abs(w) - 1.0) < 1e-12))
            throw Error(ErrorCategory::invalid_argument, "BeamWeights: weights must have unit modulus");
    }
}

BeamWeights BeamWeights::from_phases_deg(const std::vector<double>& phases_deg)
{
    std::vector<cd> w;
    w.reserve(phases_deg.size());
    for (double ph : phases_deg)
        w.push_back(std::polar(1.0, ph * std::numbers::pi / 180.0));
    return BeamWeights(std::move(w));
}

BeamWeights BeamWeights::matched(int count, double steer_deg)
{
    if (count < 1)
        throw Error(ErrorCategory::invalid_argument, "BeamWeights::matched: count must be >= 1");
    const double s = std::sin(steer_deg * std::numbers::pi / 180.0);
    std::vector<cd> w(static_cast<std::size_t>(count));
    for (int l = 0; l < count; ++l)
        w[static_cast<std::size_t>(l)] = std::polar(1.0, -std::numbers::pi * l * s);
    return BeamWeights(std::move(w));
}

std::vector<ComplexSignal> transmit(const ComplexSignal& x, const BeamWeights& w, const PaBank& bank,
                                    int threads)
{
    if (w.size() != bank.size())
        throw Error(ErrorCategory::size_mismatch, "transmit: weight count does not match bank size");

    const std::size_t count = bank.size();
    std::vector<std::optional<ComplexSignal>> slots(count);
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t l = begin; l < end; ++l)
            slots[l].emplace(gmp_evaluate(bank[l], x.scaled(w[l])));
    };

    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, count);
    if (workers == 1) {
        run(0, count);
    } else {
        std::vector<std::jthread> pool;
        std::vector<std::exception_ptr> errors(workers);
        const std::size_t chunk = (count + workers - 1) / workers;
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                try {
                    run(t * chunk, std::min(count, (t + 1) * chunk));
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    std::vector<ComplexSignal> out;
    out.reserve(count);
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

ComplexSignal combine(const std::vector<ComplexSignal>& outputs, const BeamWeights& w,
                      const ObservationConfig& obs)
{
    if (outputs.empty() || outputs.size() != w.size())
        throw Error(ErrorCategory::size_mismatch, "combine: output count does not match weight count");
    const std::size_t n = outputs.front().size();
    const double rate = outputs.front().sample_rate_hz();
    for (const auto& y : outputs) {
        if (y.size() != n || y.sample_rate_hz() != rate)
            throw Error(ErrorCategory::size_mismatch, "combine: element outputs differ in length or rate");
    }

    std::vector<cd> r(n, cd{});
    for (std::size_t l = 0; l < outputs.size(); ++l) {
        const cd wc = std::conj(w[l]);
        const auto y = outputs[l].samples();
        for (std::size_t i = 0; i < n; ++i)
            r[i] += wc * y[i];
    }
    ComplexSignal combined(std::move(r), rate);
    if (obs.noise_snr_db && std::isfinite(*obs.noise_snr_db))
        return add_noise(combined, *obs.noise_snr_db, obs.seed);
    return combined;
}

GmpModel equivalent_model(const PaBank& bank)
{
    std::vector<cd> sum(bank.structure().term_count(), cd{});
    for (const auto& m : bank.models())
        for (std::size_t i = 0; i < sum.size(); ++i)
            sum[i] += m.coeffs()[i];
    return GmpModel(bank.structure(), std::move(sum));
}

ComplexSignal add_noise(const ComplexSignal& sig, double snr_db, std::uint64_t seed)
{
    const double variance = mean_power(sig.samples()) * std::pow(10.0, -snr_db / 10.0);
    CounterRng rng(seed, /*stream=*/3);
    std::vector<cd> out(sig.data());
    for (auto& v : out)
        v += rng.complex_normal(variance);
    return ComplexSignal(std::move(out), sig.sample_rate_hz());
}

}  // namespace arraydpd::array
