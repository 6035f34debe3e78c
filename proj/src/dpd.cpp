// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/dpd.hpp"

#include "arraydpd/error.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

namespace arraydpd::dpd {

void DpdConfig::validate() const
{
    structure.validate();
    if (ila_iterations < 1)
        throw Error(ErrorCategory::invalid_config, "DpdConfig: ila_iterations must be >= 1");
    if (block_samples <= structure.term_count())
        throw Error(ErrorCategory::invalid_config, "DpdConfig: block_samples must exceed the term count");
    if (!(regularization >= 0.0) || !std::isfinite(regularization))
        throw Error(ErrorCategory::invalid_config, "DpdConfig: regularization must be finite and >= 0");
}

DpdConfig DpdConfig::memory_polynomial() const
{
    DpdConfig mp = *this;
    mp.structure.envelope_lag = 0;
    return mp;
}

std::size_t basis_first_row(const GmpStructure& s) noexcept
{
    return static_cast<std::size_t>(s.envelope_lag + s.memory_depth - 1);
}

CMatrix basis_matrix(std::span<const cd> z, const GmpStructure& s, std::size_t rows)
{
    s.validate();
    const std::size_t first = basis_first_row(s);
    const std::size_t needed = rows + first + static_cast<std::size_t>(s.envelope_lag);
    if (rows == 0 || z.size() < needed)
        throw Error(ErrorCategory::signal_too_short,
                    "basis_matrix: need " + std::to_string(needed) + " samples, have " + std::to_string(z.size()));

    std::vector<double> mag2(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        mag2[i] = std::norm(z[i]);

    CMatrix Z(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(s.term_count()));
    for (int p = 1; p <= s.max_order; p += 2) {
        const int k = (p - 1) / 2;
        for (int g = -s.envelope_lag; g <= s.envelope_lag; ++g) {
            for (int m = 0; m < s.memory_depth; ++m) {
                const auto col = static_cast<Eigen::Index>(s.index(p, g, m));
                for (std::size_t r = 0; r < rows; ++r) {
                    const std::size_t n = first + r;
                    double env = 1.0;
                    const double a2 = mag2[n - static_cast<std::size_t>(g + m)];
                    for (int i = 0; i < k; ++i)
                        env *= a2;
                    Z(static_cast<Eigen::Index>(r), col) = env * z[n - static_cast<std::size_t>(m)];
                }
            }
        }
    }
    return Z;
}

CMatrix basis_matrix(std::span<const cd> z, const GmpStructure& s)
{
    const std::size_t edge = basis_first_row(s) + static_cast<std::size_t>(s.envelope_lag);
    if (z.size() <= edge)
        throw Error(ErrorCategory::signal_too_short, "basis_matrix: signal has no fully valid row");
    return basis_matrix(z, s, z.size() - edge);
}

LsSolution ls_solve(const CMatrix& Z, const CVector& x, double lambda)
{
    if (Z.rows() < Z.cols() || Z.cols() == 0)
        throw Error(ErrorCategory::size_mismatch, "ls_solve: need at least as many rows as columns");
    if (x.size() != Z.rows())
        throw Error(ErrorCategory::size_mismatch, "ls_solve: target length differs from row count");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw Error(ErrorCategory::invalid_argument, "ls_solve: lambda must be finite and >= 0");

    const Eigen::Index cols = Z.cols();
    LsSolution sol;
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod;
    if (lambda > 0.0) {
        // ridge as an augmented least-squares problem [Z; sqrt(l) I] b = [x; 0]
        CMatrix A(Z.rows() + cols, cols);
        A.topRows(Z.rows()) = Z;
        A.bottomRows(cols) = CMatrix::Identity(cols, cols) * std::sqrt(lambda);
        CVector b = CVector::Zero(Z.rows() + cols);
        b.head(Z.rows()) = x;
        cod.compute(A);
        sol.coeffs = cod.solve(b);
    } else {
        cod.compute(Z);
        sol.coeffs = cod.solve(x);
    }

    sol.rank = cod.rank();
    sol.rank_deficient = sol.rank < cols;
    if (sol.rank == 0) {
        sol.condition_estimate = std::numeric_limits<double>::infinity();
    } else {
        // leading block of the pivoted-QR factor spans the numerical range of Z
        const Eigen::Index r = sol.rank;
        const CMatrix R = cod.matrixQTZ().topLeftCorner(r, r).triangularView<Eigen::Upper>();
        const Eigen::JacobiSVD<CMatrix> svd(R);
        const auto& sv = svd.singularValues();
        const double c = sv(0) / sv(r - 1);
        sol.condition_estimate = c * c;
    }
    return sol;
}

ComplexSignal apply_dpd(const ComplexSignal& x, const GmpModel& beta)
{
    return gmp_evaluate(beta, x);
}

std::size_t block_span(const DpdConfig& cfg) noexcept
{
    const auto& s = cfg.structure;
    const std::size_t guard = static_cast<std::size_t>(s.envelope_lag + s.memory_depth + kMaxAlignLag);
    return cfg.block_samples + basis_first_row(s) + static_cast<std::size_t>(s.envelope_lag) + 2 * guard;
}

namespace {

// Integer d maximizing |sum_n z[n + d] conj(u[n])| over |d| <= max_lag.
long estimate_delay(std::span<const cd> u, std::span<const cd> z, long max_lag)
{
    const long n = static_cast<long>(std::min(u.size(), z.size()));
    long best_lag = 0;
    double best = -1.0;
    for (long d = -max_lag; d <= max_lag; ++d) {
        cd acc{};
        for (long i = std::max(0L, -d); i < std::min(n, n - d); ++i)
            acc += z[static_cast<std::size_t>(i + d)] * std::conj(u[static_cast<std::size_t>(i)]);
        if (std::abs(acc) > best) {
            best = std::abs(acc);
            best_lag = d;
        }
    }
    return best_lag;
}

}  // namespace

GmpModel canonical_linear_terms(const GmpModel& model)
{
    const auto& s = model.structure();
    GmpModel out = model;
    for (int m = 0; m < s.memory_depth; ++m) {
        cd sum{};
        for (int g = -s.envelope_lag; g <= s.envelope_lag; ++g) {
            sum += model.at(1, g, m);
            out.set(1, g, m, cd{});
        }
        out.set(1, 0, m, sum);
    }
    return out;
}

Eigen::Index expected_rank(const GmpStructure& s) noexcept
{
    return static_cast<Eigen::Index>(s.term_count()) - 2 * s.envelope_lag * s.memory_depth;
}

LearnResult ila_learn(const ComplexSignal& x, const Chain& chain, const DpdConfig& cfg)
{
    cfg.validate();
    const auto& s = cfg.structure;
    const std::size_t span = block_span(cfg);
    if (x.size() < span)
        throw Error(ErrorCategory::signal_too_short,
                    "ila_learn: training signal holds " + std::to_string(x.size()) + " samples, one block needs " +
                        std::to_string(span));
    const std::size_t guard = static_cast<std::size_t>(s.envelope_lag + s.memory_depth + kMaxAlignLag);
    const std::size_t positions = x.size() - span + 1;

    GmpModel beta = GmpModel::identity(s);
    LearnReport report;

    for (int k = 0; k < cfg.ila_iterations; ++k) {
        const std::size_t start = (static_cast<std::size_t>(k) * span) % positions;
        const ComplexSignal u = apply_dpd(x.slice(start, span), beta);
        const ComplexSignal fb = chain(u);
        if (fb.size() != u.size())
            throw Error(ErrorCategory::size_mismatch, "ila_learn: chain changed the signal length");

        const long delay = estimate_delay(u.samples(), fb.samples(), kMaxAlignLag);
        std::vector<cd> z(span, cd{});
        for (std::size_t i = 0; i < span; ++i) {
            const long j = static_cast<long>(i) + delay;
            if (j >= 0 && j < static_cast<long>(span))
                z[i] = fb[static_cast<std::size_t>(j)];
        }

        // unit effective gain over the fitted window: z <- z / ((u^H z) / (u^H u))
        const std::size_t window_len = cfg.block_samples + basis_first_row(s) + static_cast<std::size_t>(s.envelope_lag);
        cd uz{};
        double uu = 0.0;
        for (std::size_t i = guard; i < guard + window_len; ++i) {
            uz += std::conj(u[i]) * z[i];
            uu += std::norm(u[i]);
        }
        const cd gain = uz / uu;
        for (auto& v : z)
            v /= gain;

        const auto window = std::span<const cd>(z).subspan(guard, window_len);
        const CMatrix Z = basis_matrix(window, s, cfg.block_samples);
        CVector target(static_cast<Eigen::Index>(cfg.block_samples));
        const std::size_t t0 = guard + basis_first_row(s);
        for (std::size_t r = 0; r < cfg.block_samples; ++r)
            target(static_cast<Eigen::Index>(r)) = u[t0 + r];

        const LsSolution sol = ls_solve(Z, target, cfg.regularization);
        const double residual = (Z * sol.coeffs - target).squaredNorm() / target.squaredNorm();

        beta = canonical_linear_terms(GmpModel(s, {sol.coeffs.data(), sol.coeffs.data() + sol.coeffs.size()}));
        std::vector<cd> coeffs = beta.coeffs();

        const double nmse_db = 10.0 * std::log10(residual);
        if (!report.nmse_db.empty() && nmse_db > report.nmse_db.back() + 3.0)
            report.divergence_warning = true;
        report.nmse_db.push_back(nmse_db);
        report.condition_estimate.push_back(sol.condition_estimate);
        report.snapshots.push_back(std::move(coeffs));
        report.feedback_delay.push_back(delay);
        report.feedback_gain.push_back(gain);
        report.rank_deficient = report.rank_deficient || sol.rank < expected_rank(s);
        report.ill_conditioned = report.ill_conditioned || sol.condition_estimate > kConditionWarning;
    }
    return LearnResult{std::move(beta), std::move(report)};
}

void write_learn_report_csv(std::ostream& out, const LearnReport& report)
{
    out << "iteration,nmse_db,condition_estimate\n";
    for (std::size_t i = 0; i < report.nmse_db.size(); ++i) {
        char a[64], b[64];
        const auto ra = std::to_chars(a, a + sizeof a, report.nmse_db[i]);
        const auto rb = std::to_chars(b, b + sizeof b, report.condition_estimate[i]);
        out << (i + 1) << ',' << std::string_view(a, static_cast<std::size_t>(ra.ptr - a)) << ','
            << std::string_view(b, static_cast<std::size_t>(rb.ptr - b)) << '\n';
    }
}

}  // namespace arraydpd::dpd
