// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/signal.hpp"

#include "arraydpd/error.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace arraydpd {

static_assert(std::endian::native == std::endian::little,
              "signal file I/O assumes a little-endian host");

ComplexSignal::ComplexSignal(std::vector<cd> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz)
{
    if (samples_.empty())
        throw Error(ErrorCategory::invalid_argument, "ComplexSignal: empty sample sequence");
    if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_))
        throw Error(ErrorCategory::invalid_argument, "ComplexSignal: sample rate must be positive");
    for (const auto& s : samples_) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw Error(ErrorCategory::invalid_argument, "ComplexSignal: non-finite sample");
    }
}

ComplexSignal ComplexSignal::slice(std::size_t offset, std::size_t count) const
{
    if (offset + count > samples_.size() || count == 0)
        throw Error(ErrorCategory::insufficient_length, "ComplexSignal::slice out of range");
    return ComplexSignal(std::vector<cd>(samples_.begin() + static_cast<std::ptrdiff_t>(offset),
                                         samples_.begin() + static_cast<std::ptrdiff_t>(offset + count)),
                         sample_rate_hz_);
}

ComplexSignal ComplexSignal::scaled(cd factor) const
{
    std::vector<cd> out(samples_);
    for (auto& s : out)
        s *= factor;
    return ComplexSignal(std::move(out), sample_rate_hz_);
}

double mean_power(std::span<const cd> x) noexcept
{
    return x.empty() ? 0.0 : energy(x) / static_cast<double>(x.size());
}

double energy(std::span<const cd> x) noexcept
{
    double acc = 0.0;
    for (const auto& s : x)
        acc += std::norm(s);
    return acc;
}

double nmse(std::span<const cd> a, std::span<const cd> b)
{
    const std::size_t n = std::min(a.size(), b.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return num / den;
}

void write_signal(const std::filesystem::path& path, const ComplexSignal& sig)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCategory::io, "cannot open " + path.string() + " for writing");

    const char magic[4] = {'C', 'S', 'I', 'G'};
    const std::uint32_t version = kSignalFormatVersion;
    const double rate = sig.sample_rate_hz();
    const std::uint64_t count = sig.size();
    out.write(magic, 4);
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    out.write(reinterpret_cast<const char*>(&rate), sizeof rate);
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
    // std::complex<double> is layout-compatible with double[2]
    out.write(reinterpret_cast<const char*>(sig.samples().data()),
              static_cast<std::streamsize>(count * 2 * sizeof(double)));
    if (!out)
        throw Error(ErrorCategory::io, "write failed: " + path.string());
}

ComplexSignal read_signal(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCategory::io, "cannot open " + path.string());

    char magic[4];
    std::uint32_t version = 0;
    double rate = 0.0;
    std::uint64_t count = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&rate), sizeof rate);
    in.read(reinterpret_cast<char*>(&count), sizeof count);
    if (!in || std::memcmp(magic, "CSIG", 4) != 0)
        throw Error(ErrorCategory::io, path.string() + ": not a CSIG file");
    if (version != kSignalFormatVersion)
        throw Error(ErrorCategory::io, path.string() + ": unsupported CSIG version " + std::to_string(version));

    const auto header_bytes = static_cast<std::uintmax_t>(in.tellg());
    std::error_code ec;
    const auto file_bytes = std::filesystem::file_size(path, ec);
    if (ec || count == 0 || (file_bytes - header_bytes) / (2 * sizeof(double)) < count)
        throw Error(ErrorCategory::io, path.string() + ": truncated sample payload");

    std::vector<cd> samples(count);
    in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(count * 2 * sizeof(double)));
    if (!in)
        throw Error(ErrorCategory::io, path.string() + ": truncated sample payload");
    return ComplexSignal(std::move(samples), rate);
}

}  // namespace arraydpd
