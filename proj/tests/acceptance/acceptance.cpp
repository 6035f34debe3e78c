// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include "arraydpd/array.hpp"
#include "arraydpd/config.hpp"
#include "arraydpd/dpd.hpp"
#include "arraydpd/experiment.hpp"
#include "arraydpd/sweep.hpp"
#include "arraydpd/waveform.hpp"
#include "../oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using namespace arraydpd;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail)
{
    std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void combined_equivalence()
{
    const auto t0 = Clock::now();
    const int sizes[] = {1, 8, 64};
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const int count = sizes[t % 3];
        const GmpStructure s{7, 3, 4};
        auto nominal = oracle::random_model(s, 500 + t, 0.05);
        nominal.set(1, 0, 0, nominal.at(1, 0, 0) + 1.0);
        const auto bank = synthesize_bank(nominal, DispersionSpec{1.0, 10.0, 0.2, static_cast<std::uint64_t>(t)}, count);
        const auto w = array::BeamWeights::matched(count, -40.0 + 4.0 * t);
        const auto x = oracle::gaussian_signal(4000, 600 + t);
        const auto r = array::combine(array::transmit(x, w, bank), w, {});
        const auto ref = gmp_evaluate(array::equivalent_model(bank), x);
        worst = std::max(worst, oracle::rel_l2(r.data(), ref.data()));
    }
    const double secs = seconds_since(t0);
    report(1, "combined-observation equivalence", worst < 1e-10 && secs < 30.0,
           fmt("max relative L2 error %.3g over 20 banks (L in {1, 8, 64}), %.1f s", worst, secs));
}

void gmp_oracles()
{
    double eval_err = 0.0, basis_err = 0.0;
    const GmpStructure structures[] = {{7, 3, 4}, {7, 0, 4}, {5, 2, 3}, {9, 1, 2}, {1, 0, 1}};
    std::uint64_t seed = 700;
    for (const auto& s : structures) {
        const auto model = oracle::random_model(s, ++seed);
        const auto x = oracle::gaussian_signal(1000, ++seed);
        eval_err = std::max(eval_err, oracle::rel_l2(gmp_evaluate(model, x).data(), oracle::gmp_naive(model, x.data())));

        const auto Z = dpd::basis_matrix(x.samples(), s);
        const long first = static_cast<long>(dpd::basis_first_row(s));
        for (Eigen::Index r = 0; r < Z.rows(); ++r)
            for (int p = 1; p <= s.max_order; p += 2)
                for (int g = -s.envelope_lag; g <= s.envelope_lag; ++g)
                    for (int m = 0; m < s.memory_depth; ++m) {
                        const long n = first + r;
                        const cd expect = std::pow(std::abs(x[static_cast<std::size_t>(n - g - m)]), p - 1) *
                                          x[static_cast<std::size_t>(n - m)];
                        const cd got = Z(r, static_cast<Eigen::Index>(s.index(p, g, m)));
                        basis_err = std::max(basis_err, std::abs(got - expect) / std::max(std::abs(expect), 1e-300));
                    }
    }
    report(2, "GMP oracle equivalence", eval_err < 1e-12 && basis_err < 1e-12,
           fmt("gmp_evaluate relative error %.3g, basis entries max relative error %.3g (1k samples, 5 structures)",
               eval_err, basis_err));
}

void ls_correctness()
{
    double pinv_err = 0.0, orth_err = 0.0;
    for (std::uint64_t t = 0; t < 50; ++t) {
        const auto cols = static_cast<Eigen::Index>(2 + t % 30);
        const auto rows = cols + static_cast<Eigen::Index>(5 + 17 * t);
        const auto Z = oracle::random_matrix(rows, cols, 800 + t);
        const auto x = oracle::random_matrix(rows, 1, 900 + t);
        const Eigen::VectorXcd b = dpd::ls_solve(Z, x).coeffs;
        pinv_err = std::max(pinv_err, oracle::rel_l2(b, oracle::pinv_solve(Z, x)));
        const double lambda = 0.01 * static_cast<double>(t % 5);
        const Eigen::VectorXcd bl = dpd::ls_solve(Z, x, lambda).coeffs;
        const Eigen::VectorXcd g = Z.adjoint() * (Z * bl - x) + lambda * bl;
        orth_err = std::max(orth_err, g.norm() / (Z.adjoint() * x).norm());
    }
    report(3, "least-squares correctness", pinv_err < 1e-8 && orth_err < 1e-8,
           fmt("pseudoinverse mismatch %.3g, orthogonality residual %.3g (50 systems)", pinv_err, orth_err));
}

void headline_and_ordering()
{
    const auto t0 = Clock::now();
    const auto cfg = harness::ExperimentConfig{};
    const metrics::Experiment ex(harness::build_scenario(cfg));
    const auto off = ex.measure(cfg.drive_db, metrics::DpdMode::off);
    const auto t_gmp = Clock::now();
    const auto gmp = ex.measure(cfg.drive_db, metrics::DpdMode::gmp);
    const double gmp_secs = seconds_since(t_gmp);
    const auto mp = ex.measure(cfg.drive_db, metrics::DpdMode::mp);

    const double a_off = off.aclr.worst_db(), a_gmp = gmp.aclr.worst_db(), a_mp = mp.aclr.worst_db();
    const bool regime = a_off >= 27.0 && a_off <= 33.0;
    const bool ok4 = regime && a_gmp - a_off >= 10.0 && gmp.evm_percent < off.evm_percent && gmp_secs < 300.0;
    report(4, "linearization headline", ok4,
           fmt("off ACLR %.2f dBc EVM %.2f%%, GMP ACLR %.2f dBc EVM %.2f%% (+%.2f dB), GMP learn+measure %.1f s",
               a_off, off.evm_percent, a_gmp, gmp.evm_percent, a_gmp - a_off, gmp_secs));

    const auto& rg = gmp.learn->report;
    const auto& rm = mp.learn->report;
    const bool nested = rg.nmse_db.front() <= rm.nmse_db.front();
    const bool final_order = rg.nmse_db.back() <= rm.nmse_db.back();
    const bool ok5 = a_gmp >= a_mp - 0.5 && nested && final_order;
    report(5, "MP vs GMP ordering", ok5,
           fmt("ACLR GMP %.2f vs MP %.2f dBc; training NMSE first iteration (identical data) GMP %.2f vs MP %.2f dB, "
               "final GMP %.2f vs MP %.2f dB",
               a_gmp, a_mp, rg.nmse_db.front(), rm.nmse_db.front(), rg.nmse_db.back(), rm.nmse_db.back()));
    std::printf("  (criteria 4-5 total %.1f s)\n", seconds_since(t0));
}

void sweep_shape()
{
    const auto t0 = Clock::now();
    const auto cfg = harness::ExperimentConfig{};
    const auto result = metrics::run_sweep(harness::build_scenario(cfg), cfg.sweep);
    bool monotone = true;
    double prev = 1e300;
    for (const auto& row : result.rows) {
        if (row.dpd_mode != metrics::DpdMode::off)
            continue;
        monotone = monotone && row.aclr_db <= prev;
        prev = row.aclr_db;
    }
    const auto off = metrics::max_compliant_drive(result, metrics::DpdMode::off);
    const auto gmp = metrics::max_compliant_drive(result, metrics::DpdMode::gmp);
    const bool headroom = gmp && (!off || *gmp - *off >= 1.0);
    const bool ok = cfg.sweep.size() >= 7 && monotone && gmp.has_value() && off.has_value() && headroom;
    report(6, "sweep shape", ok,
           fmt("%zu levels, off ACLR non-increasing: %s, max compliant drive off %s dB, GMP %s dB (%.0f s)",
               cfg.sweep.size(), monotone ? "yes" : "no", off ? metrics::format_number(*off).c_str() : "none",
               gmp ? metrics::format_number(*gmp).c_str() : "none", seconds_since(t0)));
}

void fixed_point_and_evm()
{
    const waveform::NrCarrierConfig wcfg;
    const auto c = waveform::generate_carrier(wcfg, 1234);

    dpd::DpdConfig cfg;
    cfg.ila_iterations = 1;
    const cd gain{0.7, -1.3};
    const auto learned = dpd::ila_learn(c.signal, [&](const ComplexSignal& u) { return u.scaled(gain); }, cfg);
    const auto id = GmpModel::identity(cfg.structure);
    double beta_err = 0.0;
    for (std::size_t i = 0; i < id.coeffs().size(); ++i)
        beta_err = std::max(beta_err, std::abs(learned.beta.coeffs()[i] - id.coeffs()[i]));

    const double self_evm = waveform::demodulate_evm(c.signal, c.grid, wcfg);

    double worst_rel = 0.0;
    for (double snr = 10.0; snr <= 40.0; snr += 5.0) {
        const double variance = std::pow(10.0, -snr / 10.0) * wcfg.sample_rate_hz() / wcfg.occupied_bandwidth_hz();
        auto v = oracle::gaussian(c.signal.size(), 1000 + static_cast<std::uint64_t>(snr), variance);
        for (std::size_t n = 0; n < v.size(); ++n)
            v[n] += c.signal[n];
        const double evm = waveform::demodulate_evm(ComplexSignal(std::move(v), c.signal.sample_rate_hz()), c.grid, wcfg);
        worst_rel = std::max(worst_rel, std::abs(evm / oracle::evm_from_snr(snr) - 1.0));
    }
    report(7, "ILA fixed point and EVM", beta_err < 1e-8 && self_evm < 0.1 && worst_rel < 0.1,
           fmt("linear chain beta deviation %.3g, self-demodulation EVM %.4f%%, EVM-vs-SNR worst relative error "
               "%.3f over 10..40 dB",
               beta_err, self_evm, worst_rel));
}

void determinism()
{
    const auto t0 = Clock::now();
    const auto root = std::filesystem::temp_directory_path() / "arraydpd_acceptance";
    std::filesystem::remove_all(root);
    std::vector<std::string> mismatched;
    std::size_t compared = 0, csv_files = 0;
    for (int run = 0; run < 2; ++run) {
        auto cfg = harness::ExperimentConfig{};
        cfg.output_dir = root / ("single" + std::to_string(run));
        harness::run_single(cfg, {metrics::kAllModes[0], metrics::kAllModes[1], metrics::kAllModes[2]});
        cfg.output_dir = root / ("sweep" + std::to_string(run));
        cfg.sweep = {-3.0, 0.0};
        harness::run_sweep_cmd(cfg, {metrics::kAllModes[0], metrics::kAllModes[1], metrics::kAllModes[2]});
    }
    for (const char* kind : {"single", "sweep"}) {
        for (const auto& e : std::filesystem::directory_iterator(root / (std::string(kind) + "0"))) {
            // the resolved config embeds the output directory
            if (e.path().filename() == "config_resolved.json")
                continue;
            ++compared;
            csv_files += e.path().extension() == ".csv";
            const auto other = root / (std::string(kind) + "1") / e.path().filename();
            if (slurp(e.path()) != slurp(other))
                mismatched.push_back(e.path().filename().string());
        }
    }
    std::filesystem::remove_all(root);
    std::string detail = fmt("%zu output files (%zu CSV, plus models and signals) compared across two runs, %zu differ "
                             "(%.0f s)",
                             compared, csv_files, mismatched.size(), seconds_since(t0));
    for (const auto& m : mismatched)
        detail += " " + m;
    report(8, "determinism", mismatched.empty() && csv_files == 6, detail);
}

}  // namespace

int main()
{
    try {
        combined_equivalence();
        gmp_oracles();
        ls_correctness();
        headline_and_ordering();
        sweep_shape();
        fixed_point_and_evm();
        determinism();
    } catch (const std::exception& e) {
        std::printf("FAIL acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED", failures);
    return failures == 0 ? 0 : 1;
}
