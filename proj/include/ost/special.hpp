#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace ost {

namespace detail {

// theta(lambda) = sum_n exp(-lambda n^2) and its lambda-derivative, by direct
// summation. Fast once lambda is order one; callers switch to the modular
// identity below that.
inline double theta_direct(double lambda) {
    double acc = 1.0;
    for (int n = 1;; ++n) {
        const double term = 2.0 * std::exp(-lambda * double(n) * n);
        acc += term;
        if (term < 1e-18 * acc) break;
    }
    return acc;
}

inline double theta_direct_derivative(double lambda) {
    double acc = 0.0;
    for (int n = 1;; ++n) {
        const double nn = double(n) * n;
        const double term = -2.0 * nn * std::exp(-lambda * nn);
        acc += term;
        if (std::fabs(term) < 1e-18 * (std::fabs(acc) + 1e-300)) break;
    }
    return acc;
}

} // namespace detail

// Jacobi theta function of the third kind, theta3(q) = sum_{n in Z} q^{n^2}.
// For q above exp(-1) the direct series crawls, so the modular identity
// theta3(e^{-lambda}) = sqrt(pi/lambda) theta3(e^{-pi^2/lambda}) kicks in.
inline double theta3(double q) {
    if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("theta3 needs 0 <= q < 1");
    if (q == 0.0) return 1.0;
    const double lambda = -std::log(q);
    if (lambda < 1.0) {
        const double mu = std::numbers::pi * std::numbers::pi / lambda;
        return std::sqrt(std::numbers::pi / lambda) * detail::theta_direct(mu);
    }
    return detail::theta_direct(lambda);
}

// d/d lambda of (theta3(e^{-lambda}))^2, i.e. 2 theta theta'. Same modular
// switch as theta3, with the identity differentiated through.
inline double theta3_log_derivative_sq(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("theta3_log_derivative_sq needs lambda > 0");
    double th;
    double thp;
    if (lambda < 1.0) {
        const double pi = std::numbers::pi;
        const double mu = pi * pi / lambda;
        const double tmu = detail::theta_direct(mu);
        const double tmup = detail::theta_direct_derivative(mu);
        const double root = std::sqrt(pi / lambda);
        th = root * tmu;
        thp = -0.5 * std::sqrt(pi) * std::pow(lambda, -1.5) * tmu -
              root * (pi * pi / (lambda * lambda)) * tmup;
    } else {
        th = detail::theta_direct(lambda);
        thp = detail::theta_direct_derivative(lambda);
    }
    return 2.0 * th * thp;
}

namespace detail {

// erf on the complex plane via the classical real-erf-plus-series expansion
// (Abramowitz-Stegun 7.1.29). The exp(-x^2) prefactor is folded into the
// cosh/sinh exponentials so nothing overflows before the result itself would.
inline std::complex<double> erf_complex(std::complex<double> z) {
    const double pi = std::numbers::pi;
    const double x = z.real();
    const double y = z.imag();
    if (x < 0.0) return -erf_complex(-z);
    if (y == 0.0) return {std::erf(x), 0.0};
    if (x == 0.0) {
        // Purely imaginary argument: erf(iy) = i (y/pi + series), exactly real part 0.
        double im = y / pi;
        for (int n = 1; n <= 2 * int(std::fabs(y)) + 45; ++n) {
            const double en = -0.25 * double(n) * n;
            const double sh = 0.5 * (std::exp(en + n * y) - std::exp(en - n * y));
            im += (2.0 / pi) * sh / double(n);
            if (n > 2.0 * std::fabs(y) + 4.0 && en + n * std::fabs(y) < -60.0) break;
        }
        return {0.0, im};
    }
    const double c2 = std::cos(2.0 * x * y);
    const double s2 = std::sin(2.0 * x * y);
    const double e0 = -x * x;
    double re = std::erf(x);
    double im = 0.0;
    const double pref = std::exp(e0) / (2.0 * pi * x);
    re += pref * (1.0 - c2);
    im += pref * s2;
    const int cap = 2 * int(std::fabs(y)) + 45;
    for (int n = 1; n <= cap; ++n) {
        const double en = e0 - 0.25 * double(n) * n;
        const double ep = std::exp(en + n * y);
        const double em = std::exp(en - n * y);
        const double ch = 0.5 * (ep + em); // e^{-x^2 - n^2/4} cosh(n y)
        const double sh = 0.5 * (ep - em); // e^{-x^2 - n^2/4} sinh(n y)
        const double base = std::exp(en);
        const double denom = double(n) * n + 4.0 * x * x;
        const double fn = 2.0 * x * base - 2.0 * x * ch * c2 + n * sh * s2;
        const double gn = 2.0 * x * ch * s2 + n * sh * c2;
        re += (2.0 / pi) * fn / denom;
        im += (2.0 / pi) * gn / denom;
        if (n > 2.0 * std::fabs(y) + 4.0 && en + n * std::fabs(y) < -60.0) break;
    }
    return {re, im};
}

} // namespace detail

inline double erf_real_part(std::complex<double> z) {
    if (std::fabs(z.imag()) > 50.0)
        throw std::invalid_argument("erf_real_part validated only for |Im z| <= 50");
    return detail::erf_complex(z).real();
}

} // namespace ost
