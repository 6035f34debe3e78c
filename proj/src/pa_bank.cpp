// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/pa_bank.hpp"

#include "arraydpd/error.hpp"
#include "arraydpd/rng.hpp"

#include <cmath>
#include <numbers>

namespace arraydpd {

PaBank::PaBank(std::vector<GmpModel> models) : models_(std::move(models))
{
    if (models_.empty())
        throw Error(ErrorCategory::invalid_argument, "PaBank: at least one element required");
    for (const auto& m : models_) {
        if (!(m.structure() == models_.front().structure()))
            throw Error(ErrorCategory::size_mismatch, "PaBank: elements must share one structure");
        small_signal_gain_.push_back(arraydpd::small_signal_gain(m));
    }
}

cd small_signal_gain(const GmpModel& model)
{
    const auto& s = model.structure();
    cd acc{};
    for (int g = -s.envelope_lag; g <= s.envelope_lag; ++g)
        for (int m = 0; m < s.memory_depth; ++m)
            acc += model.at(1, g, m);
    return acc;
}

void DispersionSpec::validate() const
{
    const auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!ok(gain_std_db) || !ok(phase_std_deg) || !ok(nonlinear_coeff_rel_std))
        throw Error(ErrorCategory::invalid_config, "DispersionSpec: standard deviations must be finite and >= 0");
}

PaBank synthesize_bank(const GmpModel& nominal, const DispersionSpec& disp, int count)
{
    if (count < 1)
        throw Error(ErrorCategory::invalid_argument, "synthesize_bank: count must be >= 1");
    disp.validate();

    const auto& s = nominal.structure();
    CounterRng rng(disp.seed, /*stream=*/2);
    std::vector<GmpModel> models;
    models.reserve(static_cast<std::size_t>(count));
    for (int l = 0; l < count; ++l) {
        const double gain_db = disp.gain_std_db * rng.normal();
        const double phase = disp.phase_std_deg * rng.normal() * std::numbers::pi / 180.0;
        const cd gain = std::polar(std::pow(10.0, gain_db / 20.0), phase);

        GmpModel element = nominal;
        for (int p = 1; p <= s.max_order; p += 2) {
            for (int g = -s.envelope_lag; g <= s.envelope_lag; ++g) {
                for (int m = 0; m < s.memory_depth; ++m) {
                    if (p == 1) {
                        element.set(p, g, m, nominal.at(p, g, m) * gain);
                    } else {
                        // always draw so the stream layout does not depend on coefficient values
                        const double delta = disp.nonlinear_coeff_rel_std * rng.normal();
                        element.set(p, g, m, nominal.at(p, g, m) * (1.0 + delta));
                    }
                }
            }
        }
        models.push_back(std::move(element));
    }
    return PaBank(std::move(models));
}

double nominal_drive_amplitude(double backoff_db) noexcept
{
    return std::pow(10.0, -(kNominalReferenceBackoffDb + backoff_db) / 20.0);
}

namespace {

struct Term {
    int p, g, m;
    cd value;
};

// Normalized-amplitude coefficients (saturation input = 1).
const Term kNominalTerms[] = {
    {1, 0, 0, {1.0, 0.0}},
    {3, 0, 0, {-0.2621770920036297, 1.3755562757716544}},
    {5, 0, 0, {-0.2961549452154494, -1.2327346583088983}},
    {7, 0, 0, {0.24112928198136366, 0.5362878653824796}},
    {9, 0, 0, {-0.07144392351821191, -0.12406207279592218}},
    {11, 0, 0, {0.009586938255505285, 0.014537465415542284}},
    {13, 0, 0, {-0.0004862654675029493, -0.0006769659923007475}},
    // linear memory
    {1, 0, 1, std::polar(0.08, -0.5)},
    {1, 0, 2, {-0.02, 0.0}},
    // lagging and leading envelope cross terms
    {3, 1, 0, {-0.03, 0.02}},
    {3, -1, 0, {0.0, 0.02}},
};

}  // namespace

GmpModel default_nominal_pa(const GmpStructure& structure, double backoff_db)
{
    structure.validate();
    const double a = nominal_drive_amplitude(backoff_db);
    GmpModel model(structure);
    for (const auto& t : kNominalTerms) {
        if (t.p > structure.max_order || std::abs(t.g) > structure.envelope_lag || t.m >= structure.memory_depth)
            continue;
        model.set(t.p, t.g, t.m, t.value * std::pow(a, t.p - 1));
    }
    return model;
}

}  // namespace arraydpd
