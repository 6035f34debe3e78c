// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/sweep.hpp"

#include "arraydpd/error.hpp"
#include "arraydpd/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace arraydpd::metrics {

std::string_view mode_name(DpdMode mode) noexcept
{
    switch (mode) {
    case DpdMode::off: return "off";
    case DpdMode::mp: return "mp";
    case DpdMode::gmp: return "gmp";
    }
    return "off";
}

DpdMode parse_mode(std::string_view name)
{
    if (name == "off")
        return DpdMode::off;
    if (name == "mp")
        return DpdMode::mp;
    if (name == "gmp")
        return DpdMode::gmp;
    throw Error(ErrorCategory::invalid_argument, "unknown dpd mode '" + std::string(name) + "'");
}

namespace {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0)
{
    return CounterRng::mix(CounterRng::mix(CounterRng::mix(base ^ a) + b) + c);
}

waveform::NrCarrierConfig make_training_config(const Scenario& scenario)
{
    waveform::NrCarrierConfig cfg = scenario.waveform;
    const std::size_t need = static_cast<std::size_t>(std::max(scenario.dpd.ila_iterations, 1)) *
                             dpd::block_span(scenario.dpd);
    const std::size_t sym = cfg.symbol_length();
    cfg.num_symbols = static_cast<int>((need + sym - 1) / sym);
    return cfg;
}

}  // namespace

Experiment::Experiment(Scenario scenario)
    : scenario_(std::move(scenario)),
      training_cfg_(make_training_config(scenario_)),
      training_(waveform::generate_carrier(training_cfg_, derive_seed(scenario_.seed, 1))),
      held_out_(waveform::generate_carrier(scenario_.waveform, derive_seed(scenario_.seed, 2)))
{
    scenario_.dpd.validate();
    scenario_.aclr.validate();
    if (scenario_.weights.size() != scenario_.bank.size())
        throw Error(ErrorCategory::size_mismatch, "Scenario: weight count does not match bank size");
}

ComplexSignal Experiment::chain(const ComplexSignal& u, std::uint64_t noise_seed) const
{
    array::ObservationConfig obs = scenario_.observation;
    obs.seed = noise_seed;
    return array::combine(array::transmit(u, scenario_.weights, scenario_.bank, scenario_.threads),
                          scenario_.weights, obs);
}

PointResult Experiment::measure(double drive_db, DpdMode mode, bool keep_signal) const
{
    const double scale = std::pow(10.0, drive_db / 20.0);
    const std::uint64_t level_key = std::bit_cast<std::uint64_t>(drive_db);

    PointResult result;
    result.mode = mode;
    result.drive_db = drive_db;

    const ComplexSignal x_eval = held_out_.signal.scaled(scale);
    ComplexSignal u_eval = x_eval;
    if (mode != DpdMode::off) {
        const dpd::DpdConfig cfg = mode == DpdMode::mp ? scenario_.dpd.memory_polynomial() : scenario_.dpd;
        std::uint64_t call = 0;
        const dpd::Chain chain_fn = [&](const ComplexSignal& u) {
            return chain(u, derive_seed(scenario_.observation.seed, level_key, ++call));
        };
        result.learn = dpd::ila_learn(training_.signal.scaled(scale), chain_fn, cfg);
        u_eval = dpd::apply_dpd(x_eval, result.learn->beta);
    }

    // noise depends on level and call index only, so every mode sees the same draws
    const ComplexSignal r = chain(u_eval, derive_seed(scenario_.observation.seed, level_key, 0));
    result.eirp_proxy_db = 10.0 * std::log10(mean_power(r.samples()));
    result.aclr = aclr_sides(r, scenario_.aclr);
    try {
        result.evm_percent = waveform::demodulate_evm(r, held_out_.grid, scenario_.waveform);
    } catch (const Error& e) {
        if (e.category() != ErrorCategory::sync_failure && e.category() != ErrorCategory::insufficient_length)
            throw;
        result.evm_percent = std::numeric_limits<double>::quiet_NaN();
    }
    if (keep_signal)
        result.received.emplace(r);
    return result;
}

namespace {

double side_value(const AclrResult& r, AclrSpec::Side side)
{
    switch (side) {
    case AclrSpec::Side::lower: return r.lower_db;
    case AclrSpec::Side::upper: return r.upper_db;
    case AclrSpec::Side::worst: break;
    }
    return r.worst_db();
}

}  // namespace

SweepResult run_sweep(const Experiment& experiment, std::vector<double> drive_levels_db,
                      const std::vector<DpdMode>& modes)
{
    std::sort(drive_levels_db.begin(), drive_levels_db.end());
    SweepResult result;
    for (double level : drive_levels_db) {
        for (DpdMode mode : modes) {
            const PointResult p = experiment.measure(level, mode);
            result.rows.push_back(SweepRow{level, p.eirp_proxy_db,
                                           side_value(p.aclr, experiment.scenario().aclr.side), p.evm_percent,
                                           mode});
        }
    }
    return result;
}

SweepResult run_sweep(const Scenario& scenario, std::vector<double> drive_levels_db,
                      const std::vector<DpdMode>& modes)
{
    const Experiment experiment(scenario);
    return run_sweep(experiment, std::move(drive_levels_db), modes);
}

std::optional<double> max_compliant_drive(const SweepResult& result, DpdMode mode, double aclr_limit_db,
                                          double evm_limit_percent)
{
    std::optional<double> best;
    for (const auto& row : result.rows) {
        if (row.dpd_mode != mode)
            continue;
        // NaN EVM fails the comparison and ends the compliant run
        if (!(row.aclr_db >= aclr_limit_db && row.evm_percent <= evm_limit_percent))
            break;
        best = row.drive_level_db;
    }
    return best;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result)
{
    out << "# aclr_limit_db=" << format_number(kAclrLimitDb) << '\n';
    out << "# evm_limit_pct=" << format_number(kEvmLimitPercent) << '\n';
    out << "drive_level_db,eirp_proxy_db,aclr_db,evm_percent,dpd_mode\n";
    for (const auto& row : result.rows) {
        out << format_number(row.drive_level_db) << ',' << format_number(row.eirp_proxy_db) << ','
            << format_number(row.aclr_db) << ',' << format_number(row.evm_percent) << ','
            << mode_name(row.dpd_mode) << '\n';
    }
}

SweepResult read_sweep_csv(std::istream& in)
{
    SweepResult result;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (!header) {
            if (line != "drive_level_db,eirp_proxy_db,aclr_db,evm_percent,dpd_mode")
                throw Error(ErrorCategory::config_parse, "sweep CSV: unexpected header '" + line + "'");
            header = true;
            continue;
        }
        std::istringstream fields(line);
        std::string cell[5];
        for (auto& c : cell) {
            if (!std::getline(fields, c, ','))
                throw Error(ErrorCategory::config_parse, "sweep CSV: short row '" + line + "'");
        }
        SweepRow row;
        try {
            row.drive_level_db = std::stod(cell[0]);
            row.eirp_proxy_db = std::stod(cell[1]);
            row.aclr_db = std::stod(cell[2]);
            row.evm_percent = std::stod(cell[3]);
        } catch (const std::exception&) {
            throw Error(ErrorCategory::config_parse, "sweep CSV: bad number in '" + line + "'");
        }
        row.dpd_mode = parse_mode(cell[4]);
        result.rows.push_back(row);
    }
    if (!header)
        throw Error(ErrorCategory::config_parse, "sweep CSV: missing header");
    return result;
}

}  // namespace arraydpd::metrics
