#pragma once

#include <complex>
#include <fftw3.h>
#include <stdexcept>

#include <ost/grid.hpp>

namespace ost {

namespace detail {

inline ComplexImage fft2_with_sign(const ComplexImage& in, int sign) {
    if (in.width <= 0 || in.height <= 0)
        throw std::invalid_argument("fft2: empty image");
    ComplexImage out(in.width, in.height);
    // FFTW's planner may write to its buffers under exhaustive planning modes;
    // FFTW_ESTIMATE leaves them alone, so planning after filling is safe.
    auto* src = reinterpret_cast<fftw_complex*>(
        const_cast<std::complex<double>*>(in.data.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data.data());
    fftw_plan plan =
        fftw_plan_dft_2d(in.height, in.width, src, dst, sign, FFTW_ESTIMATE);
    if (!plan) throw std::runtime_error("fft2: planning failed");
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

} // namespace detail

// Unnormalized forward transform, exp(-i w x) convention.
inline ComplexImage fft2_forward(const ComplexImage& in) {
    return detail::fft2_with_sign(in, FFTW_FORWARD);
}

// Inverse transform carrying the 1/(W H) factor, so fft2_inverse(fft2_forward(f))
// returns f up to roundoff.
inline ComplexImage fft2_inverse(const ComplexImage& in) {
    ComplexImage out = detail::fft2_with_sign(in, FFTW_BACKWARD);
    const double scale = 1.0 / (double(in.width) * double(in.height));
    for (auto& v : out.data) v *= scale;
    return out;
}

} // namespace ost
