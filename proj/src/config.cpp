// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/config.hpp"

#include "arraydpd/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace arraydpd::harness {

using nlohmann::json;

std::vector<double> default_sweep_levels()
{
    return {-15.0, -6.0, -4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0};
}

void ExperimentConfig::validate() const
{
    waveform.validate();
    bank.structure.validate();
    bank.dispersion.validate();
    dpd.validate();
    aclr.validate();
    if (bank.model != "nominal" && bank.model != "identity")
        throw Error(ErrorCategory::invalid_config, "bank.model must be \"nominal\" or \"identity\"");
    if (bank.elements < 1)
        throw Error(ErrorCategory::invalid_config, "bank.elements must be >= 1");
    if (!weights.matched && weights.phases_deg.size() != static_cast<std::size_t>(bank.elements))
        throw Error(ErrorCategory::invalid_config, "weights.phases_deg must list one phase per element");
    if (threads < 1)
        throw Error(ErrorCategory::invalid_config, "threads must be >= 1");
    if (waveform.sample_rate_hz() < 2.0 * (aclr.adjacent_offset_hz + 0.5 * aclr.measurement_bw_hz))
        throw Error(ErrorCategory::invalid_config, "waveform sample rate too low for the ACLR adjacent channel");
}

namespace {

[[noreturn]] void parse_error(const std::string& what)
{
    throw Error(ErrorCategory::config_parse, what);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object())
        parse_error(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            ok = ok || key == a;
        if (!ok)
            parse_error(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where)
{
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        parse_error(where + "." + key + ": " + e.what());
    }
}

void read_structure(const json& j, GmpStructure& s, const std::string& where)
{
    check_keys(j, where, {"max_order", "envelope_lag", "memory_depth"});
    read(j, "max_order", s.max_order, where);
    read(j, "envelope_lag", s.envelope_lag, where);
    read(j, "memory_depth", s.memory_depth, where);
}

json structure_json(const GmpStructure& s)
{
    return {{"max_order", s.max_order}, {"envelope_lag", s.envelope_lag}, {"memory_depth", s.memory_depth}};
}

std::string side_name(metrics::AclrSpec::Side side)
{
    switch (side) {
    case metrics::AclrSpec::Side::lower: return "lower";
    case metrics::AclrSpec::Side::upper: return "upper";
    case metrics::AclrSpec::Side::worst: break;
    }
    return "worst";
}

}  // namespace

ExperimentConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        parse_error(std::string("invalid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    check_keys(root, "config",
               {"waveform", "bank", "weights", "observation", "dpd", "aclr", "drive_db", "sweep", "seed",
                "output_dir", "threads"});

    if (root.contains("waveform")) {
        const auto& w = root["waveform"];
        const std::string at = "waveform";
        check_keys(w, at, {"subcarrier_spacing_hz", "fft_size", "active_subcarriers", "cp_fraction", "qam_order",
                           "num_symbols", "oversampling"});
        read(w, "subcarrier_spacing_hz", cfg.waveform.subcarrier_spacing_hz, at);
        read(w, "fft_size", cfg.waveform.fft_size, at);
        read(w, "active_subcarriers", cfg.waveform.active_subcarriers, at);
        read(w, "cp_fraction", cfg.waveform.cp_fraction, at);
        read(w, "qam_order", cfg.waveform.qam_order, at);
        read(w, "num_symbols", cfg.waveform.num_symbols, at);
        read(w, "oversampling", cfg.waveform.oversampling, at);
    }

    if (root.contains("bank")) {
        const auto& b = root["bank"];
        const std::string at = "bank";
        check_keys(b, at, {"model", "structure", "dispersion", "elements", "backoff_db"});
        read(b, "model", cfg.bank.model, at);
        read(b, "elements", cfg.bank.elements, at);
        read(b, "backoff_db", cfg.bank.backoff_db, at);
        if (b.contains("structure"))
            read_structure(b["structure"], cfg.bank.structure, "bank.structure");
        if (b.contains("dispersion")) {
            const auto& d = b["dispersion"];
            const std::string dat = "bank.dispersion";
            check_keys(d, dat, {"gain_std_db", "phase_std_deg", "nonlinear_coeff_rel_std", "seed"});
            read(d, "gain_std_db", cfg.bank.dispersion.gain_std_db, dat);
            read(d, "phase_std_deg", cfg.bank.dispersion.phase_std_deg, dat);
            read(d, "nonlinear_coeff_rel_std", cfg.bank.dispersion.nonlinear_coeff_rel_std, dat);
            read(d, "seed", cfg.bank.dispersion.seed, dat);
        }
    }

    if (root.contains("weights")) {
        const auto& w = root["weights"];
        if (w.is_string()) {
            if (w.get<std::string>() != "matched")
                parse_error("weights: expected \"matched\" or an object");
            cfg.weights.matched = true;
        } else {
            check_keys(w, "weights", {"matched", "steer_deg", "phases_deg"});
            read(w, "matched", cfg.weights.matched, "weights");
            read(w, "steer_deg", cfg.weights.steer_deg, "weights");
            read(w, "phases_deg", cfg.weights.phases_deg, "weights");
            if (w.contains("phases_deg") && !w.contains("matched"))
                cfg.weights.matched = false;
        }
    }

    if (root.contains("observation")) {
        const auto& o = root["observation"];
        check_keys(o, "observation", {"noise_snr_db", "seed"});
        if (o.contains("noise_snr_db")) {
            if (o["noise_snr_db"].is_null())
                cfg.observation.noise_snr_db.reset();
            else if (o["noise_snr_db"].is_number())
                cfg.observation.noise_snr_db = o["noise_snr_db"].get<double>();
            else
                parse_error("observation.noise_snr_db: expected a number or null (noiseless)");
        }
        read(o, "seed", cfg.observation.seed, "observation");
    }

    if (root.contains("dpd")) {
        const auto& d = root["dpd"];
        check_keys(d, "dpd", {"structure", "ila_iterations", "block_samples", "regularization"});
        if (d.contains("structure"))
            read_structure(d["structure"], cfg.dpd.structure, "dpd.structure");
        read(d, "ila_iterations", cfg.dpd.ila_iterations, "dpd");
        read(d, "block_samples", cfg.dpd.block_samples, "dpd");
        read(d, "regularization", cfg.dpd.regularization, "dpd");
    }

    if (root.contains("aclr")) {
        const auto& a = root["aclr"];
        check_keys(a, "aclr", {"channel_bw_hz", "measurement_bw_hz", "adjacent_offset_hz", "side"});
        read(a, "channel_bw_hz", cfg.aclr.channel_bw_hz, "aclr");
        read(a, "measurement_bw_hz", cfg.aclr.measurement_bw_hz, "aclr");
        read(a, "adjacent_offset_hz", cfg.aclr.adjacent_offset_hz, "aclr");
        if (a.contains("side")) {
            std::string side;
            read(a, "side", side, "aclr");
            if (side == "lower")
                cfg.aclr.side = metrics::AclrSpec::Side::lower;
            else if (side == "upper")
                cfg.aclr.side = metrics::AclrSpec::Side::upper;
            else if (side == "worst")
                cfg.aclr.side = metrics::AclrSpec::Side::worst;
            else
                parse_error("aclr.side: expected lower, upper or worst");
        }
    }

    read(root, "drive_db", cfg.drive_db, "config");
    read(root, "sweep", cfg.sweep, "config");
    read(root, "seed", cfg.seed, "config");
    read(root, "threads", cfg.threads, "config");
    if (root.contains("output_dir")) {
        std::string dir;
        read(root, "output_dir", dir, "config");
        cfg.output_dir = dir;
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCategory::io, "cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string dump_config(const ExperimentConfig& cfg)
{
    json root;
    root["waveform"] = {
        {"subcarrier_spacing_hz", cfg.waveform.subcarrier_spacing_hz},
        {"fft_size", cfg.waveform.fft_size},
        {"active_subcarriers", cfg.waveform.active_subcarriers},
        {"cp_fraction", cfg.waveform.cp_fraction},
        {"qam_order", cfg.waveform.qam_order},
        {"num_symbols", cfg.waveform.num_symbols},
        {"oversampling", cfg.waveform.oversampling},
    };
    root["bank"] = {
        {"model", cfg.bank.model},
        {"structure", structure_json(cfg.bank.structure)},
        {"dispersion",
         {{"gain_std_db", cfg.bank.dispersion.gain_std_db},
          {"phase_std_deg", cfg.bank.dispersion.phase_std_deg},
          {"nonlinear_coeff_rel_std", cfg.bank.dispersion.nonlinear_coeff_rel_std},
          {"seed", cfg.bank.dispersion.seed}}},
        {"elements", cfg.bank.elements},
        {"backoff_db", cfg.bank.backoff_db},
    };
    root["weights"] = {
        {"matched", cfg.weights.matched},
        {"steer_deg", cfg.weights.steer_deg},
        {"phases_deg", cfg.weights.phases_deg},
    };
    root["observation"] = {
        {"noise_snr_db", cfg.observation.noise_snr_db ? json(*cfg.observation.noise_snr_db) : json(nullptr)},
        {"seed", cfg.observation.seed},
    };
    root["dpd"] = {
        {"structure", structure_json(cfg.dpd.structure)},
        {"ila_iterations", cfg.dpd.ila_iterations},
        {"block_samples", cfg.dpd.block_samples},
        {"regularization", cfg.dpd.regularization},
    };
    root["aclr"] = {
        {"channel_bw_hz", cfg.aclr.channel_bw_hz},
        {"measurement_bw_hz", cfg.aclr.measurement_bw_hz},
        {"adjacent_offset_hz", cfg.aclr.adjacent_offset_hz},
        {"side", side_name(cfg.aclr.side)},
    };
    root["drive_db"] = cfg.drive_db;
    root["sweep"] = cfg.sweep;
    root["seed"] = cfg.seed;
    root["output_dir"] = cfg.output_dir.string();
    root["threads"] = cfg.threads;
    return root.dump(2) + "\n";
}

metrics::Scenario build_scenario(const ExperimentConfig& cfg)
{
    cfg.validate();
    const GmpModel nominal = cfg.bank.model == "identity" ? GmpModel::identity(cfg.bank.structure)
                                                          : default_nominal_pa(cfg.bank.structure, cfg.bank.backoff_db);
    auto weights = cfg.weights.matched ? array::BeamWeights::matched(cfg.bank.elements, cfg.weights.steer_deg)
                                       : array::BeamWeights::from_phases_deg(cfg.weights.phases_deg);
    return metrics::Scenario{
        cfg.waveform,
        synthesize_bank(nominal, cfg.bank.dispersion, cfg.bank.elements),
        std::move(weights),
        cfg.observation,
        cfg.dpd,
        cfg.aclr,
        cfg.seed,
        cfg.threads,
    };
}

}  // namespace arraydpd::harness
