#pragma once

#include <stdexcept>

namespace ost {

// Centered cardinal B-splines: B_0 is the indicator of [-1/2, 1/2] and
// B_k = B_{k-1} * B_0, supported on [-(k+1)/2, (k+1)/2]. At the jump points of
// B_0 the symmetric value B_0(+-1/2) = 1/2 is returned so that the integer-shift
// partition sum_m B_k(x - m) = 1 holds pointwise, knots included.

inline constexpr int max_spline_order = 60;

namespace detail {

inline void check_spline_order(int k) {
    if (k < 0) throw std::invalid_argument("spline order must be nonnegative");
    if (k > max_spline_order) throw std::invalid_argument("spline order exceeds cap of 60");
}

} // namespace detail

inline double bspline_eval(int k, double x) {
    detail::check_spline_order(k);
    if (x < 0.0) x = -x; // evaluate one side only, so evenness is bit-exact
    if (k == 0) {
        if (x < 0.5) return 1.0;
        return x == 0.5 ? 0.5 : 0.0;
    }
    const double half_width = 0.5 * (k + 1);
    if (x >= half_width) return 0.0;
    // Triangular de Boor recursion on the uniform knot lattice, written for
    // u = x + (k+1)/2 against the one-sided box M_0 = indicator of [0, 1).
    // Every blending weight is nonnegative on the support, so the recursion
    // evaluates the piecewise polynomial without cancellation.
    const double u = x + half_width;
    double v[max_spline_order + 1];
    for (int m = 0; m <= k; ++m) {
        const double t = u - m;
        v[m] = (t >= 0.0 && t < 1.0) ? 1.0 : 0.0;
    }
    for (int j = 1; j <= k; ++j) {
        for (int m = 0; m <= k - j; ++m) {
            const double t = u - m;
            v[m] = (t * v[m] + (double(j + 1) - t) * v[m + 1]) / j;
        }
    }
    return v[0];
}

inline double bspline_derivative(int k, double x) {
    detail::check_spline_order(k);
    if (k == 0) throw std::invalid_argument("order-0 spline has no usable derivative");
    // Exact two-term formula B_k' = B_{k-1}(. + 1/2) - B_{k-1}(. - 1/2). For
    // k = 1 the jump convention of B_0 makes kink points come out as the
    // average of the one-sided slopes.
    return bspline_eval(k - 1, x + 0.5) - bspline_eval(k - 1, x - 0.5);
}

struct SupportInterval {
    double lo;
    double hi;
};

inline SupportInterval bspline_support(int k) {
    detail::check_spline_order(k);
    const double h = 0.5 * (k + 1);
    return {-h, h};
}

} // namespace ost
