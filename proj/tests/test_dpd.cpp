// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/dpd.hpp"
#include "arraydpd/waveform.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace arraydpd;
using namespace arraydpd::dpd;

namespace {

// Least-squares scalar fit of y onto x, then NMSE in dB.
double linear_nmse_db(const ComplexSignal& y, const ComplexSignal& x)
{
    cd num{};
    for (std::size_t n = 0; n < x.size(); ++n)
        num += std::conj(x[n]) * y[n];
    const cd g = num / energy(x.samples());
    return 10.0 * std::log10(nmse(y.scaled(1.0 / g).samples(), x.samples()));
}

ComplexSignal mild_cubic(const ComplexSignal& u)
{
    std::vector<cd> out(u.size());
    for (std::size_t n = 0; n < u.size(); ++n)
        out[n] = u[n] - 0.05 * std::norm(u[n]) * u[n];
    return {std::move(out), u.sample_rate_hz()};
}

const waveform::Carrier& carrier(std::uint64_t seed)
{
    static const waveform::Carrier a = waveform::generate_carrier({}, 31);
    static const waveform::Carrier b = waveform::generate_carrier({}, 32);
    return seed == 31 ? a : b;
}

}  // namespace

TEST(BasisMatrix, LinearSingleColumn)
{
    const auto z = oracle::gaussian(50, 1);
    const auto Z = basis_matrix(z, {1, 0, 1});
    ASSERT_EQ(Z.rows(), 50);
    ASSERT_EQ(Z.cols(), 1);
    for (Eigen::Index r = 0; r < Z.rows(); ++r)
        EXPECT_EQ(Z(r, 0), z[static_cast<std::size_t>(r)]);
}

TEST(BasisMatrix, CubicOnConstant)
{
    const std::vector<cd> z(10, cd{1.0, 0.0});
    const auto Z = basis_matrix(z, {3, 0, 1});
    ASSERT_EQ(Z.cols(), 2);
    for (Eigen::Index r = 0; r < Z.rows(); ++r) {
        EXPECT_EQ(Z(r, 0), cd(1.0, 0.0));
        EXPECT_EQ(Z(r, 1), cd(1.0, 0.0));
    }
}

TEST(BasisMatrix, PointwiseFormula)
{
    const GmpStructure s{7, 3, 4};
    const auto z = oracle::gaussian(1000, 2);
    const auto Z = basis_matrix(z, s);
    const std::size_t first = basis_first_row(s);
    ASSERT_EQ(static_cast<std::size_t>(Z.rows()), z.size() - first - 3);
    ASSERT_EQ(Z.cols(), 112);
    for (Eigen::Index r = 0; r < Z.rows(); ++r) {
        const long n = static_cast<long>(first) + r;
        for (int p = 1; p <= 7; p += 2)
            for (int g = -3; g <= 3; ++g)
                for (int m = 0; m < 4; ++m) {
                    const cd expect = std::pow(std::abs(z[static_cast<std::size_t>(n - g - m)]), p - 1) *
                                      z[static_cast<std::size_t>(n - m)];
                    const cd got = Z(r, static_cast<Eigen::Index>(s.index(p, g, m)));
                    ASSERT_LE(std::abs(got - expect), 1e-12 * std::max(1.0, std::abs(expect)));
                }
    }
}

TEST(BasisMatrix, RowsAndTooShort)
{
    const GmpStructure s{7, 3, 4};
    const auto z = oracle::gaussian(40000 + 2 * 3 + 4 - 1, 3);
    EXPECT_EQ(basis_matrix(z, s, 40000).rows(), 40000);
    EXPECT_TRUE(oracle::throws_category([&] { basis_matrix(std::span(z).first(z.size() - 1), s, 40000); },
                                        ErrorCategory::signal_too_short));
    EXPECT_TRUE(oracle::throws_category([&] { basis_matrix(std::span(z).first(9), s); },
                                        ErrorCategory::signal_too_short));
}

TEST(LsSolve, IdentitySystem)
{
    const auto x = Eigen::Map<const CVector>(oracle::gaussian(12, 4).data(), 12);
    const auto sol = ls_solve(CMatrix::Identity(12, 12), x);
    EXPECT_LT(oracle::rel_l2(sol.coeffs, CVector(x)), 1e-15);
    EXPECT_EQ(sol.rank, 12);
    EXPECT_FALSE(sol.rank_deficient);
}

TEST(LsSolve, ConsistentSystem)
{
    const CMatrix Z = oracle::random_matrix(300, 20, 5);
    const CVector b0 = oracle::random_matrix(20, 1, 6);
    const auto sol = ls_solve(Z, Z * b0);
    EXPECT_LT(oracle::rel_l2(sol.coeffs, b0), 1e-10);
}

TEST(LsSolve, MatchesPseudoinverse)
{
    for (std::uint64_t t = 0; t < 20; ++t) {
        const auto rows = static_cast<Eigen::Index>(40 + 13 * t);
        const auto cols = static_cast<Eigen::Index>(3 + t);
        const CMatrix Z = oracle::random_matrix(rows, cols, 100 + t);
        const CVector x = oracle::random_matrix(rows, 1, 200 + t);
        EXPECT_LT(oracle::rel_l2(ls_solve(Z, x).coeffs, oracle::pinv_solve(Z, x)), 1e-8) << t;
    }
}

TEST(LsSolve, RankDeficientGivesMinimumNorm)
{
    CMatrix Z = oracle::random_matrix(100, 6, 7);
    Z.col(4) = Z.col(1);
    Z.col(5) = Z.col(0) * cd(0.5, 2.0);
    const CVector x = oracle::random_matrix(100, 1, 8);
    const auto sol = ls_solve(Z, x);
    EXPECT_TRUE(sol.rank_deficient);
    EXPECT_EQ(sol.rank, 4);
    EXPECT_LT(oracle::rel_l2(sol.coeffs, oracle::pinv_solve(Z, x)), 1e-8);
}

TEST(LsSolve, ResidualOrthogonality)
{
    for (double lambda : {0.0, 0.1, 10.0}) {
        const CMatrix Z = oracle::random_matrix(200, 15, 9);
        const CVector x = oracle::random_matrix(200, 1, 10);
        const CVector b = ls_solve(Z, x, lambda).coeffs;
        const CVector g = Z.adjoint() * (Z * b - x) + lambda * b;
        EXPECT_LT(g.norm() / (Z.adjoint() * x).norm(), 1e-8) << lambda;
    }
}

TEST(LsSolve, ConditionEstimate)
{
    CMatrix Z = CMatrix::Zero(10, 2);
    Z(0, 0) = 1.0;
    Z(1, 1) = 1e-3;
    const auto sol = ls_solve(Z, CVector::Ones(10));
    EXPECT_NEAR(sol.condition_estimate, 1e6, 1e-3);
}

TEST(LsSolve, Errors)
{
    EXPECT_TRUE(oracle::throws_category([] { ls_solve(CMatrix::Ones(2, 3), CVector::Ones(2)); },
                                        ErrorCategory::size_mismatch));
    EXPECT_TRUE(oracle::throws_category([] { ls_solve(CMatrix::Ones(3, 2), CVector::Ones(2)); },
                                        ErrorCategory::size_mismatch));
    EXPECT_TRUE(oracle::throws_category([] { ls_solve(CMatrix::Ones(3, 2), CVector::Ones(3), -1.0); },
                                        ErrorCategory::invalid_argument));
}

TEST(DpdConfig, CountsAndValidation)
{
    DpdConfig cfg;
    EXPECT_EQ(cfg.structure.term_count(), 112u);
    EXPECT_EQ(cfg.memory_polynomial().structure.term_count(), 16u);
    EXPECT_NO_THROW(cfg.validate());
    cfg.block_samples = 100;
    EXPECT_TRUE(oracle::throws_category([&] { cfg.validate(); }, ErrorCategory::invalid_config));
    cfg = DpdConfig{};
    cfg.ila_iterations = 0;
    EXPECT_TRUE(oracle::throws_category([&] { cfg.validate(); }, ErrorCategory::invalid_config));
}

TEST(ApplyDpd, Cases)
{
    const auto x = oracle::gaussian_signal(500, 11);
    EXPECT_TRUE(apply_dpd(x, GmpModel::identity({7, 3, 4})) == x);
    auto beta = GmpModel::identity({3, 1, 2});
    beta.set(3, 0, 0, cd(0.02, -0.01));
    beta.set(3, 1, 1, cd(-0.005, 0.0));
    EXPECT_LT(oracle::rel_l2(apply_dpd(x, beta).data(), oracle::gmp_naive(beta, x.data())), 1e-12);
    const ComplexSignal zero(std::vector<cd>(100, cd{}), 1.0);
    EXPECT_TRUE(apply_dpd(zero, beta) == zero);
}

TEST(CanonicalLinearTerms, FoldsOntoZeroLag)
{
    GmpModel m({3, 2, 2});
    m.set(1, -2, 0, 0.25);
    m.set(1, 1, 0, 0.75);
    m.set(1, 2, 1, cd(0.0, 0.5));
    m.set(3, 1, 0, 0.1);
    const auto c = canonical_linear_terms(m);
    EXPECT_EQ(c.at(1, 0, 0), cd(1.0, 0.0));
    EXPECT_EQ(c.at(1, 0, 1), cd(0.0, 0.5));
    EXPECT_EQ(c.at(1, 1, 0), cd{});
    EXPECT_EQ(c.at(3, 1, 0), cd(0.1, 0.0));
    const auto x = oracle::gaussian_signal(100, 12);
    EXPECT_LT(oracle::rel_l2(gmp_evaluate(c, x).data(), gmp_evaluate(m, x).data()), 1e-14);
    EXPECT_EQ(expected_rank({7, 3, 4}), 112 - 2 * 3 * 4);
}

TEST(IlaLearn, IdentityChainFixedPoint)
{
    DpdConfig cfg;
    cfg.ila_iterations = 1;
    const auto x = oracle::gaussian_signal(block_span(cfg), 13);
    const auto res = ila_learn(x, [](const ComplexSignal& u) { return u; }, cfg);
    const auto id = GmpModel::identity(cfg.structure);
    for (std::size_t i = 0; i < id.coeffs().size(); ++i)
        EXPECT_LT(std::abs(res.beta.coeffs()[i] - id.coeffs()[i]), 1e-8) << i;
    EXPECT_FALSE(res.report.rank_deficient);
    EXPECT_EQ(res.report.feedback_delay[0], 0);
}

TEST(IlaLearn, LinearChainGainRemoved)
{
    DpdConfig cfg;
    cfg.structure = {5, 1, 3};
    cfg.ila_iterations = 2;
    cfg.block_samples = 5000;
    const auto x = oracle::gaussian_signal(3 * block_span(cfg), 14);
    const cd c{0.3, 2.0};
    const auto res = ila_learn(x, [&](const ComplexSignal& u) { return u.scaled(c); }, cfg);
    const auto id = GmpModel::identity(cfg.structure);
    for (std::size_t i = 0; i < id.coeffs().size(); ++i)
        EXPECT_LT(std::abs(res.beta.coeffs()[i] - id.coeffs()[i]), 1e-8) << i;
    EXPECT_NEAR(std::abs(res.report.feedback_gain[0] - c), 0.0, 1e-12);
}

TEST(IlaLearn, DelayedChainAligned)
{
    DpdConfig cfg;
    cfg.structure = {3, 0, 2};
    cfg.ila_iterations = 1;
    cfg.block_samples = 5000;
    const auto x = oracle::gaussian_signal(block_span(cfg), 15);
    auto delayed = [](const ComplexSignal& u) {
        std::vector<cd> v(3, cd{});
        v.insert(v.end(), u.data().begin(), u.data().end() - 3);
        return ComplexSignal(std::move(v), u.sample_rate_hz());
    };
    const auto res = ila_learn(x, delayed, cfg);
    EXPECT_EQ(res.report.feedback_delay[0], 3);
    EXPECT_NEAR(std::abs(res.beta.at(1, 0, 0) - 1.0), 0.0, 1e-8);
}

TEST(IlaLearn, MildCubicLinearized)
{
    const double rms = 0.5;
    const auto train = carrier(31).signal.scaled(rms);
    const auto test = carrier(32).signal.scaled(rms);
    const DpdConfig cfg;
    const auto res = ila_learn(train, mild_cubic, cfg);
    ASSERT_EQ(res.report.nmse_db.size(), 3u);
    const auto& r = res.report.nmse_db;
    EXPECT_EQ(res.report.divergence_warning, r[1] > r[0] + 3.0 || r[2] > r[1] + 3.0);
    const double before = linear_nmse_db(mild_cubic(test), test);
    const double after = linear_nmse_db(mild_cubic(apply_dpd(test, res.beta)), test);
    EXPECT_LE(after, -45.0) << "before " << before;
    EXPECT_LT(after, before);
}

TEST(IlaLearn, NestedModelsOrderResiduals)
{
    const auto train = carrier(31).signal.scaled(0.5);
    auto chain = [](const ComplexSignal& u) {
        std::vector<cd> out(u.size());
        for (std::size_t n = 0; n < u.size(); ++n) {
            const double prev = n > 0 ? std::norm(u[n - 1]) : 0.0;
            out[n] = u[n] - cd(0.04, 0.03) * std::norm(u[n]) * u[n] - cd(0.0, 0.02) * prev * u[n];
        }
        return ComplexSignal(std::move(out), u.sample_rate_hz());
    };
    DpdConfig gmp;
    gmp.ila_iterations = 1;
    const auto g = ila_learn(train, chain, gmp);
    const auto m = ila_learn(train, chain, gmp.memory_polynomial());
    ASSERT_EQ(m.beta.coeffs().size(), 16u);
    ASSERT_EQ(g.beta.coeffs().size(), 112u);
    EXPECT_LE(g.report.nmse_db[0], m.report.nmse_db[0]);
    EXPECT_LT(g.report.nmse_db[0], m.report.nmse_db[0] - 3.0);

    // nesting on one design matrix
    const auto z = oracle::gaussian(3000, 16);
    const CMatrix Zg = basis_matrix(z, gmp.structure, 2000);
    const auto zm = std::span(z).subspan(3);
    const CMatrix Zm = basis_matrix(zm, gmp.memory_polynomial().structure, 2000);
    const CVector target = oracle::random_matrix(2000, 1, 17);
    const double rg = (Zg * ls_solve(Zg, target).coeffs - target).norm();
    const double rm = (Zm * ls_solve(Zm, target).coeffs - target).norm();
    EXPECT_LE(rg, rm);
}

TEST(IlaLearn, TooShortSignal)
{
    const DpdConfig cfg;
    EXPECT_TRUE(oracle::throws_category(
        [&] { ila_learn(oracle::gaussian_signal(block_span(cfg) - 1, 1), [](const ComplexSignal& u) { return u; }, cfg); },
        ErrorCategory::signal_too_short));
}

TEST(LearnReport, Csv)
{
    LearnReport r;
    r.nmse_db = {-30.5, -41.25};
    r.condition_estimate = {1e3, 2.5e4};
    std::ostringstream out;
    write_learn_report_csv(out, r);
    EXPECT_EQ(out.str(), "iteration,nmse_db,condition_estimate\n1,-30.5,1000\n2,-41.25,25000\n");
}
