// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "arraydpd/gmp.hpp"
#include "arraydpd/signal.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace arraydpd::dpd {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct DpdConfig {
    GmpStructure structure{7, 3, 4};
    int ila_iterations = 3;
    std::size_t block_samples = 40000;
    double regularization = 0.0;

    void validate() const;

    /// Same orders and taps with the envelope lags removed (G = 0).
    DpdConfig memory_polynomial() const;
};

/// Normal-equation condition numbers above this are flagged in the report;
/// set DpdConfig::regularization > 0 to stabilize such fits.
inline constexpr double kConditionWarning = 1e10;

/// Row n (relative to z) of the first fully valid basis row: G + M - 1.
std::size_t basis_first_row(const GmpStructure& s) noexcept;

/// Basis matrix over every time index whose regressors all lie inside z.
/// Row r corresponds to n = basis_first_row(s) + r; column
/// s.index(p, g, m) holds |z(n-g-m)|^{p-1} z(n-m).
CMatrix basis_matrix(std::span<const cd> z, const GmpStructure& s);

/// The first `rows` valid rows; z must hold rows + 2G + M - 1 samples.
CMatrix basis_matrix(std::span<const cd> z, const GmpStructure& s, std::size_t rows);

struct LsSolution {
    CVector coeffs;
    Eigen::Index rank = 0;
    bool rank_deficient = false;
    /// Condition number of the normal-equation matrix restricted to the
    /// numerical rank of Z (augmented by sqrt(lambda) I when lambda > 0).
    double condition_estimate = 0.0;
};

/// argmin ||Z b - x||^2 + lambda ||b||^2 by complete orthogonal
/// decomposition. Rank deficiency with lambda = 0 is reported and the
/// minimum-norm solution returned.
LsSolution ls_solve(const CMatrix& Z, const CVector& x, double lambda = 0.0);

/// For p = 1 the basis column does not depend on g, so a GMP with G > 0
/// carries 2G*M duplicate linear columns. This moves each tap's linear
/// coefficients onto g = 0; the evaluated model is unchanged.
GmpModel canonical_linear_terms(const GmpModel& model);

/// Rank of a basis matrix on generic data: term count minus the duplicate
/// linear columns.
Eigen::Index expected_rank(const GmpStructure& s) noexcept;

/// Runs the predistorter; identical contract to gmp_evaluate.
ComplexSignal apply_dpd(const ComplexSignal& x, const GmpModel& beta);

/// Transmit-and-observe path seen by the learner.
using Chain = std::function<ComplexSignal(const ComplexSignal&)>;

struct LearnReport {
    std::vector<double> nmse_db;             ///< postdistorter fit residual per iteration
    std::vector<double> condition_estimate;  ///< per iteration
    std::vector<std::vector<cd>> snapshots;  ///< coefficients after each iteration
    std::vector<long> feedback_delay;        ///< integer alignment applied per iteration
    std::vector<cd> feedback_gain;           ///< gain normalization per iteration
    bool divergence_warning = false;         ///< residual grew by more than 3 dB
    bool rank_deficient = false;             ///< rank below expected_rank in some iteration
    bool ill_conditioned = false;            ///< some condition estimate above kConditionWarning
};

struct LearnResult {
    GmpModel beta;
    LearnReport report;
};

/// Largest feedback misalignment searched for, in samples.
inline constexpr long kMaxAlignLag = 8;

/// Samples consumed by one learning block for this configuration.
std::size_t block_span(const DpdConfig& cfg) noexcept;

/// Indirect learning: per iteration, predistort a fresh block of x with the
/// current coefficients, pass it through `chain`, align and gain-normalize
/// the feedback, and fit the postdistorter from feedback to the
/// predistorted block. The fit, with its linear terms made canonical,
/// becomes the next predistorter. Blocks are
/// consecutive while x is long enough and wrap around otherwise.
LearnResult ila_learn(const ComplexSignal& x, const Chain& chain, const DpdConfig& cfg);

/// CSV: iteration,nmse_db,condition_estimate
void write_learn_report_csv(std::ostream& out, const LearnReport& report);

}  // namespace arraydpd::dpd
