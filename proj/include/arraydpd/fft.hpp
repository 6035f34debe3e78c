// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "arraydpd/signal.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace arraydpd {

/// Reusable FFTW plan for one transform length and direction. Forward is
/// unnormalized, inverse carries the 1/N factor.
class Fft {
public:
    enum class Direction { forward, inverse };

    Fft(std::size_t n, Direction dir);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&& other) noexcept;
    Fft& operator=(Fft&& other) noexcept;

    std::size_t size() const noexcept { return n_; }

    /// `in` and `out` must both have size(); they may alias.
    void execute(std::span<const cd> in, std::span<cd> out);
    std::vector<cd> operator()(std::span<const cd> in);

private:
    void release() noexcept;

    std::size_t n_ = 0;
    Direction dir_ = Direction::forward;
    cd* buffer_ = nullptr;
    void* plan_ = nullptr;
};

std::vector<cd> fft(std::span<const cd> x);
std::vector<cd> ifft(std::span<const cd> x);

/// Map a signed frequency bin index to its FFT array position.
constexpr std::size_t bin_position(long k, std::size_t n) noexcept
{
    const long nn = static_cast<long>(n);
    return static_cast<std::size_t>(((k % nn) + nn) % nn);
}

}  // namespace arraydpd
