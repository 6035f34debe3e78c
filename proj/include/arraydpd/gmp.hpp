// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "arraydpd/signal.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace arraydpd {

/// Shape of a generalized memory polynomial: odd orders p = 1, 3, ..., P,
/// envelope lags g = -G..G and memory taps m = 0..M-1.
struct GmpStructure {
    int max_order = 7;
    int envelope_lag = 3;
    int memory_depth = 4;

    void validate() const;

    int num_orders() const noexcept { return (max_order + 1) / 2; }
    std::size_t term_count() const noexcept
    {
        return static_cast<std::size_t>(num_orders()) * (2 * envelope_lag + 1) * memory_depth;
    }

    /// Canonical column/coefficient position: p outer, g middle, m inner.
    std::size_t index(int p, int g, int m) const noexcept
    {
        return (static_cast<std::size_t>((p - 1) / 2) * (2 * envelope_lag + 1) + (g + envelope_lag)) * memory_depth + m;
    }

    bool operator==(const GmpStructure&) const = default;
};

/// Coefficients alpha_{p,g}[m] of one GMP (a PA or a predistorter).
class GmpModel {
public:
    /// All-zero model.
    explicit GmpModel(GmpStructure structure);
    GmpModel(GmpStructure structure, std::vector<cd> coeffs);

    /// Only the p=1, g=0, m=0 coefficient set to one.
    static GmpModel identity(GmpStructure structure);

    const GmpStructure& structure() const noexcept { return structure_; }
    const std::vector<cd>& coeffs() const noexcept { return coeffs_; }

    cd at(int p, int g, int m) const { return coeffs_[checked_index(p, g, m)]; }
    void set(int p, int g, int m, cd value) { coeffs_[checked_index(p, g, m)] = value; }

    bool operator==(const GmpModel&) const = default;

private:
    std::size_t checked_index(int p, int g, int m) const;

    GmpStructure structure_;
    std::vector<cd> coeffs_;
};

/// out(n) = sum_{p,g,m} alpha[p,g,m] |x(n-g-m)|^{p-1} x(n-m), samples outside
/// the input treated as zero and |0|^0 = 1. Output length equals input length.
ComplexSignal gmp_evaluate(const GmpModel& model, const ComplexSignal& input);

void write_model(std::ostream& out, const GmpModel& model);
GmpModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const GmpModel& model);
GmpModel load_model(const std::filesystem::path& path);

}  // namespace arraydpd
