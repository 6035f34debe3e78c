// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/fft.hpp"

#include "arraydpd/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace arraydpd {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

}  // namespace

Fft::Fft(std::size_t n, Direction dir) : n_(n), dir_(dir)
{
    if (n == 0)
        throw Error(ErrorCategory::invalid_argument, "Fft: zero length");
    std::lock_guard lock(planner_mutex());
    buffer_ = reinterpret_cast<cd*>(fftw_malloc(sizeof(fftw_complex) * n));
    auto* buf = reinterpret_cast<fftw_complex*>(buffer_);
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf,
                             dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() { release(); }

Fft::Fft(Fft&& other) noexcept
    : n_(other.n_), dir_(other.dir_), buffer_(other.buffer_), plan_(other.plan_)
{
    other.buffer_ = nullptr;
    other.plan_ = nullptr;
}

Fft& Fft::operator=(Fft&& other) noexcept
{
    if (this != &other) {
        release();
        n_ = other.n_;
        dir_ = other.dir_;
        buffer_ = other.buffer_;
        plan_ = other.plan_;
        other.buffer_ = nullptr;
        other.plan_ = nullptr;
    }
    return *this;
}

void Fft::release() noexcept
{
    std::lock_guard lock(planner_mutex());
    if (plan_)
        fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    if (buffer_)
        fftw_free(buffer_);
    plan_ = nullptr;
    buffer_ = nullptr;
}

void Fft::execute(std::span<const cd> in, std::span<cd> out)
{
    if (in.size() != n_ || out.size() != n_)
        throw Error(ErrorCategory::size_mismatch, "Fft::execute: buffer length mismatch");
    std::copy(in.begin(), in.end(), buffer_);
    fftw_execute(static_cast<fftw_plan>(plan_));
    if (dir_ == Direction::inverse) {
        const double scale = 1.0 / static_cast<double>(n_);
        std::transform(buffer_, buffer_ + n_, out.begin(), [scale](cd v) { return v * scale; });
    } else {
        std::copy(buffer_, buffer_ + n_, out.begin());
    }
}

std::vector<cd> Fft::operator()(std::span<const cd> in)
{
    std::vector<cd> out(n_);
    execute(in, out);
    return out;
}

std::vector<cd> fft(std::span<const cd> x)
{
    Fft plan(x.size(), Fft::Direction::forward);
    return plan(x);
}

std::vector<cd> ifft(std::span<const cd> x)
{
    Fft plan(x.size(), Fft::Direction::inverse);
    return plan(x);
}

}  // namespace arraydpd
