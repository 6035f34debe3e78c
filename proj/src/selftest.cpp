// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/experiment.hpp"
#include "arraydpd/rng.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

namespace arraydpd::harness {

namespace {

std::vector<cd> random_samples(CounterRng& rng, std::size_t n, double variance = 1.0)
{
    std::vector<cd> v(n);
    for (auto& s : v)
        s = rng.complex_normal(variance);
    return v;
}

GmpModel random_model(CounterRng& rng, const GmpStructure& s)
{
    std::vector<cd> c(s.term_count());
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = rng.complex_normal(i == 0 ? 1.0 : 0.01);
    return GmpModel(s, std::move(c));
}

}  // namespace

bool run_selftest(std::ostream& log, std::uint64_t seed)
{
    bool all = true;
    const auto check = [&](const char* name, const std::function<std::pair<bool, std::string>()>& body) {
        bool ok = false;
        std::string detail;
        try {
            std::tie(ok, detail) = body();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        all = all && ok;
        log << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    };
    const auto fmt = [](double v) {
        std::ostringstream s;
        s << v;
        return s.str();
    };

    CounterRng rng(seed, 100);
    const GmpStructure s{5, 1, 2};
    const ComplexSignal x(random_samples(rng, 2000, 0.3), 1e6);

    check("combined-observation-equivalence", [&] {
        std::vector<GmpModel> models;
        for (int l = 0; l < 8; ++l)
            models.push_back(random_model(rng, s));
        const PaBank bank(std::move(models));
        std::vector<double> phases;
        for (int l = 0; l < 8; ++l)
            phases.push_back(360.0 * rng.uniform());
        const auto w = array::BeamWeights::from_phases_deg(phases);
        const auto r = array::combine(array::transmit(x, w, bank), w, {});
        const auto ref = gmp_evaluate(array::equivalent_model(bank), x);
        const double err = std::sqrt(nmse(r.samples(), ref.samples()));
        return std::pair{err < 1e-10, "relative L2 error " + fmt(err)};
    });

    check("order-homogeneity", [&] {
        GmpModel cubic(s);
        cubic.set(3, 1, 1, {0.3, -0.2});
        cubic.set(3, 0, 0, {-0.1, 0.05});
        const cd c{0.7, -1.1};
        const auto lhs = gmp_evaluate(cubic, x.scaled(c));
        auto rhs = gmp_evaluate(cubic, x).scaled(c * std::norm(c));
        const double err = std::sqrt(nmse(lhs.samples(), rhs.samples()));
        return std::pair{err < 1e-13, "relative error " + fmt(err)};
    });

    check("ls-residual-orthogonality", [&] {
        const dpd::CMatrix Z = dpd::basis_matrix(x.samples(), s);
        dpd::CVector t(Z.rows());
        for (Eigen::Index i = 0; i < t.size(); ++i)
            t(i) = rng.complex_normal(1.0);
        const double lambda = 0.5;
        const auto sol = dpd::ls_solve(Z, t, lambda);
        const double ortho =
            (Z.adjoint() * (Z * sol.coeffs - t) + lambda * sol.coeffs).norm() / (Z.adjoint() * t).norm();
        return std::pair{ortho < 1e-8, "normalized gradient " + fmt(ortho)};
    });

    check("evm-self-demodulation", [&] {
        waveform::NrCarrierConfig cfg;
        cfg.fft_size = 256;
        cfg.active_subcarriers = 180;
        cfg.qam_order = 16;
        cfg.num_symbols = 4;
        const auto carrier = waveform::generate_carrier(cfg, seed);
        const double evm = waveform::demodulate_evm(carrier.signal.scaled({0.25, 0.43}), carrier.grid, cfg);
        return std::pair{evm < 0.1, "EVM " + fmt(evm) + " %"};
    });

    check("ila-linear-fixed-point", [&] {
        dpd::DpdConfig cfg;
        cfg.structure = s;
        cfg.block_samples = 500;
        cfg.ila_iterations = 1;
        const cd gain{0.4, 0.9};
        const auto result = dpd::ila_learn(x, [&](const ComplexSignal& u) { return u.scaled(gain); }, cfg);
        const auto ident = GmpModel::identity(s);
        double dev = 0.0;
        for (std::size_t i = 0; i < ident.coeffs().size(); ++i)
            dev = std::max(dev, std::abs(result.beta.coeffs()[i] - ident.coeffs()[i]));
        return std::pair{dev < 1e-8, "max coefficient deviation " + fmt(dev)};
    });

    check("psd-parseval", [&] {
        const auto spectrum = metrics::psd(x, 256);
        const double db = 10.0 * std::log10(spectrum.total_power() / mean_power(x.samples()));
        return std::pair{std::abs(db) < 0.1, "power ratio " + fmt(db) + " dB"};
    });

    check("gmp-text-round-trip", [&] {
        const auto m = random_model(rng, s);
        std::stringstream buf;
        write_model(buf, m);
        return std::pair{read_model(buf) == m, std::string("exact")};
    });

    return all;
}

}  // namespace arraydpd::harness
