// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace arraydpd {

using cd = std::complex<double>;

/// Uniformly sampled complex baseband sequence. Non-empty, finite samples,
/// positive sample rate; checked on construction.
class ComplexSignal {
public:
    ComplexSignal(std::vector<cd> samples, double sample_rate_hz);

    std::span<const cd> samples() const noexcept { return samples_; }
    const std::vector<cd>& data() const noexcept { return samples_; }
    double sample_rate_hz() const noexcept { return sample_rate_hz_; }
    std::size_t size() const noexcept { return samples_.size(); }
    const cd& operator[](std::size_t i) const noexcept { return samples_[i]; }

    /// Copy of `count` samples starting at `offset`.
    ComplexSignal slice(std::size_t offset, std::size_t count) const;
    ComplexSignal scaled(cd factor) const;

    bool operator==(const ComplexSignal&) const = default;

private:
    std::vector<cd> samples_;
    double sample_rate_hz_;
};

double mean_power(std::span<const cd> x) noexcept;
double energy(std::span<const cd> x) noexcept;

/// ||a - b||^2 / ||b||^2 over the common length.
double nmse(std::span<const cd> a, std::span<const cd> b);

/// Binary interchange format: "CSIG", u32 version, f64 sample rate, u64 count,
/// then interleaved f64 I/Q. All little-endian.
void write_signal(const std::filesystem::path& path, const ComplexSignal& sig);
ComplexSignal read_signal(const std::filesystem::path& path);

inline constexpr std::uint32_t kSignalFormatVersion = 1;

}  // namespace arraydpd
