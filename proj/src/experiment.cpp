// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/experiment.hpp"

#include "arraydpd/error.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace arraydpd::harness {

namespace {

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCategory::io, "cannot open " + path.string() + " for writing");
    return out;
}

void prepare_output_dir(const ExperimentConfig& cfg)
{
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec)
        throw Error(ErrorCategory::io, "cannot create " + cfg.output_dir.string() + ": " + ec.message());
    auto out = open_output(cfg.output_dir / "config_resolved.json");
    out << dump_config(cfg);
}

}  // namespace

SingleReport run_single(const ExperimentConfig& cfg, const std::vector<metrics::DpdMode>& modes)
{
    using metrics::format_number;

    prepare_output_dir(cfg);
    const metrics::Experiment experiment(build_scenario(cfg));

    SingleReport report;
    for (auto mode : modes)
        report.points.push_back(experiment.measure(cfg.drive_db, mode, /*keep_signal=*/true));

    const auto input = experiment.held_out().signal.scaled(std::pow(10.0, cfg.drive_db / 20.0));
    write_signal(cfg.output_dir / "input.csig", input);

    std::vector<std::pair<std::string, metrics::Psd>> spectra;
    spectra.emplace_back("input", metrics::psd(input));

    auto csv = open_output(cfg.output_dir / "metrics.csv");
    csv << "mode,aclr_db,aclr_lower_db,aclr_upper_db,evm_percent,eirp_proxy_db,train_nmse_db\n";
    for (const auto& p : report.points) {
        const std::string name(metrics::mode_name(p.mode));
        const double worst = cfg.aclr.side == metrics::AclrSpec::Side::lower   ? p.aclr.lower_db
                             : cfg.aclr.side == metrics::AclrSpec::Side::upper ? p.aclr.upper_db
                                                                                : p.aclr.worst_db();
        const double train = p.learn ? p.learn->report.nmse_db.back() : std::numeric_limits<double>::quiet_NaN();
        csv << name << ',' << format_number(worst) << ',' << format_number(p.aclr.lower_db) << ','
            << format_number(p.aclr.upper_db) << ',' << format_number(p.evm_percent) << ','
            << format_number(p.eirp_proxy_db) << ',' << format_number(train) << '\n';

        write_signal(cfg.output_dir / ("received_" + name + ".csig"), *p.received);
        spectra.emplace_back(name, metrics::psd(*p.received));
        if (p.learn) {
            auto learn = open_output(cfg.output_dir / ("learn_" + name + ".csv"));
            dpd::write_learn_report_csv(learn, p.learn->report);
            save_model(cfg.output_dir / ("beta_" + name + ".gmp"), p.learn->beta);
        }
    }

    auto psd_csv = open_output(cfg.output_dir / "psd.csv");
    metrics::write_psd_csv(psd_csv, spectra);
    return report;
}

metrics::SweepResult run_sweep_cmd(const ExperimentConfig& cfg, const std::vector<metrics::DpdMode>& modes)
{
    prepare_output_dir(cfg);
    const metrics::Experiment experiment(build_scenario(cfg));
    auto result = metrics::run_sweep(experiment, cfg.sweep, modes);

    auto csv = open_output(cfg.output_dir / "sweep.csv");
    metrics::write_sweep_csv(csv, result);

    auto summary = open_output(cfg.output_dir / "sweep_summary.csv");
    summary << "dpd_mode,max_compliant_drive_db\n";
    for (auto mode : modes) {
        const auto best = metrics::max_compliant_drive(result, mode);
        summary << metrics::mode_name(mode) << ','
                << (best ? metrics::format_number(*best) : std::string("nan")) << '\n';
    }
    return result;
}

}  // namespace arraydpd::harness
