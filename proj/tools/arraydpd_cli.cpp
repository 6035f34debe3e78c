// SPDX-License-Identifier: Apache-2.0
//
// arraydpd: single-DPD linearization experiments for active antenna arrays.

#include "arraydpd/error.hpp"
#include "arraydpd/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace arraydpd;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string dpd;
    int threads = 0;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config, "JSON experiment configuration (defaults when omitted)");
    cmd->add_option("--seed", c.seed, "override the experiment seed");
    cmd->add_option("--out", c.out, "override the output directory");
    cmd->add_option("--dpd", c.dpd, "run only this mode")->check(CLI::IsMember({"off", "mp", "gmp"}));
    cmd->add_option("--threads", c.threads, "cap on worker threads (default 1)")->check(CLI::PositiveNumber);
}

harness::ExperimentConfig resolve(const Common& c)
{
    auto cfg = c.config.empty() ? harness::ExperimentConfig{} : harness::load_config(c.config);
    if (c.seed)
        cfg.seed = *c.seed;
    if (!c.out.empty())
        cfg.output_dir = c.out;
    if (c.threads > 0)
        cfg.threads = c.threads;
    cfg.validate();
    return cfg;
}

std::vector<metrics::DpdMode> modes_of(const Common& c)
{
    if (c.dpd.empty())
        return {metrics::DpdMode::off, metrics::DpdMode::mp, metrics::DpdMode::gmp};
    return {metrics::parse_mode(c.dpd)};
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Single-DPD linearization of active antenna arrays"};
    app.require_subcommand(1);

    Common single_opts, sweep_opts, config_opts;
    auto* single = app.add_subcommand("single", "linearize at one drive level and write ACLR and EVM metrics per DPD mode");
    add_common(single, single_opts);
    auto* sweep = app.add_subcommand("sweep", "drive-level sweep of ACLR and EVM per DPD mode");
    add_common(sweep, sweep_opts);
    auto* selftest = app.add_subcommand("selftest", "run the built-in invariant checks");
    std::uint64_t selftest_seed = 1;
    selftest->add_option("--seed", selftest_seed, "seed for the random instances");
    auto* config = app.add_subcommand("config", "print the resolved configuration");
    add_common(config, config_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (single->parsed()) {
            const auto cfg = resolve(single_opts);
            const auto report = harness::run_single(cfg, modes_of(single_opts));
            std::cout << "mode   ACLR[dBc]  EVM[%]\n";
            for (const auto& p : report.points)
                std::cout << metrics::mode_name(p.mode) << "    " << p.aclr.worst_db() << "  " << p.evm_percent << '\n';
            std::cout << "outputs in " << cfg.output_dir.string() << '\n';
        } else if (sweep->parsed()) {
            const auto cfg = resolve(sweep_opts);
            const auto modes = modes_of(sweep_opts);
            const auto result = harness::run_sweep_cmd(cfg, modes);
            metrics::write_sweep_csv(std::cout, result);
            for (auto mode : modes) {
                const auto best = metrics::max_compliant_drive(result, mode);
                std::cout << "# max compliant drive (" << metrics::mode_name(mode)
                          << "): " << (best ? metrics::format_number(*best) + " dB" : std::string("none")) << '\n';
            }
        } else if (selftest->parsed()) {
            return harness::run_selftest(std::cout, selftest_seed) ? 0 : 1;
        } else if (config->parsed()) {
            std::cout << harness::dump_config(resolve(config_opts));
        }
    } catch (const Error& e) {
        std::cerr << "error[" << category_name(e.category()) << "]: " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
