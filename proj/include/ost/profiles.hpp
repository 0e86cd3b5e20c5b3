#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include <ost/bspline.hpp>

namespace ost {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Angular profiles on the circle. CakeBSpline is the periodized spline wedge
// profile with n slices per turn (real-valued n is allowed here; only the
// wavelet stack demands an integer). WrappedGaussian drops the usual
// normalizing prefactor and VonMises uses the stabilized scaling
// exp((cos phi - 1)/lambda); every quantity built on top is a ratio that does
// not see either constant.
struct CakeBSpline {
    double n;
    int k;
};

struct WrappedGaussian {
    double lambda;
};

struct VonMises {
    double lambda;
};

using AngularProfileSpec = std::variant<CakeBSpline, WrappedGaussian, VonMises>;

struct SampledCircleFunction {
    std::vector<double> values; // at phi_m = 2 pi m / M - pi
};

// Grid point phi_m = 2 pi m / M - pi, computed as pi (2m - M) / M so that the
// index reflection m <-> M - m is an exact sign flip in floating point.
inline double circle_grid_point(int m, int M) {
    return std::numbers::pi * double(2 * m - M) / double(M);
}

namespace detail {

// phi collapsed to s = |phi mod 2pi| in [0, pi]. All profile families are even
// and 2 pi periodic; evaluating on one side makes both properties bit-exact.
inline double reduce_angle_abs(double phi) {
    return std::fabs(std::remainder(phi, two_pi));
}

inline void check_profile_params(const CakeBSpline& c) {
    if (!(c.n > 0.0)) throw std::invalid_argument("cake profile needs n > 0");
    check_spline_order(c.k);
}

inline void check_lambda(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("profile needs lambda > 0");
}

// Wrap sum sum_n B_k(u + step n) at lattice coordinate u = n_slices phi / 2pi.
// One fused rounding per term keeps knot hits deterministic.
inline double cake_wrap_sum(int k, double step, double u) {
    const double w = 0.5 * (k + 1);
    const int n_lo = int(std::floor((-w - u) / step)) - 1;
    const int n_hi = int(std::ceil((w - u) / step)) + 1;
    double acc = 0.0;
    for (int n = n_lo; n <= n_hi; ++n) acc += bspline_eval(k, std::fma(step, n, u));
    return acc;
}

inline double cake_wrap_sum_derivative(int k, double step, double u) {
    const double w = 0.5 * (k + 1);
    const int n_lo = int(std::floor((-w - u) / step)) - 1;
    const int n_hi = int(std::ceil((w - u) / step)) + 1;
    double acc = 0.0;
    for (int n = n_lo; n <= n_hi; ++n) acc += bspline_derivative(k, std::fma(step, n, u));
    return acc;
}

constexpr int gaussian_wrap_terms = 8; // residual below exp(-(15 pi)^2 / 2) for lambda <= 1

} // namespace detail

inline double eval_profile(const AngularProfileSpec& spec, double phi) {
    const double s = detail::reduce_angle_abs(phi);
    if (const auto* c = std::get_if<CakeBSpline>(&spec)) {
        detail::check_profile_params(*c);
        return detail::cake_wrap_sum(c->k, c->n, c->n * s / two_pi);
    }
    if (const auto* g = std::get_if<WrappedGaussian>(&spec)) {
        detail::check_lambda(g->lambda);
        double acc = 0.0;
        for (int n = -detail::gaussian_wrap_terms; n <= detail::gaussian_wrap_terms; ++n) {
            const double t = s - two_pi * n;
            acc += std::exp(-t * t / (2.0 * g->lambda));
        }
        return acc;
    }
    const auto& v = std::get<VonMises>(spec);
    detail::check_lambda(v.lambda);
    return std::exp((std::cos(s) - 1.0) / v.lambda);
}

inline double profile_derivative(const AngularProfileSpec& spec, double phi) {
    const double r = std::remainder(phi, two_pi);
    const double s = std::fabs(r);
    // Even periodic C1 functions have zero slope at the symmetry points; pin
    // them so odd sample arrays reflect exactly.
    if (s == 0.0 || s == std::numbers::pi) return 0.0;
    const double sign = r < 0.0 ? -1.0 : 1.0;
    if (const auto* c = std::get_if<CakeBSpline>(&spec)) {
        detail::check_profile_params(*c);
        if (c->k < 1) throw std::invalid_argument("cake profile derivative needs k >= 1");
        const double u = c->n * s / two_pi;
        return sign * (c->n / two_pi) * detail::cake_wrap_sum_derivative(c->k, c->n, u);
    }
    if (const auto* g = std::get_if<WrappedGaussian>(&spec)) {
        detail::check_lambda(g->lambda);
        double acc = 0.0;
        for (int n = -detail::gaussian_wrap_terms; n <= detail::gaussian_wrap_terms; ++n) {
            const double t = s - two_pi * n;
            acc += -(t / g->lambda) * std::exp(-t * t / (2.0 * g->lambda));
        }
        return sign * acc;
    }
    const auto& v = std::get<VonMises>(spec);
    detail::check_lambda(v.lambda);
    return sign * (-std::sin(s) / v.lambda) * std::exp((std::cos(s) - 1.0) / v.lambda);
}

// N_lambda(k) = sqrt(pi^2 k / (3 lambda)): the slice count at which the cake
// profile's angular variance matches a Gaussian of variance lambda.
inline double n_of_lambda(int k, double lambda) {
    if (k < 1) throw std::invalid_argument("n_of_lambda needs k >= 1");
    detail::check_lambda(lambda);
    return std::numbers::pi * std::sqrt(double(k) / (3.0 * lambda));
}

// Max over the phi grid of |sum_{m=0}^{N-1} Phi_{N,k}(phi - 2 pi m / N) - 1|.
// The rotated copies are evaluated on the shared spline lattice (integer
// offsets of one u per grid point), so wedge boundaries stay exact instead of
// being double-counted by separately rounded angles.
inline double partition_of_unity_residual(int n_slices, int k, int grid_size) {
    if (n_slices < 1) throw std::invalid_argument("partition needs n_slices >= 1");
    detail::check_spline_order(k);
    if (grid_size < 16) throw std::invalid_argument("partition grid too small");
    const double w = 0.5 * (k + 1);
    double worst = 0.0;
    for (int g = 0; g < grid_size; ++g) {
        const double u = n_slices * circle_grid_point(g, grid_size) / two_pi;
        const int j_lo = int(std::floor(u - w)) - 1;
        const int j_hi = int(std::ceil(u + w)) + 1;
        double total = 0.0;
        for (int j = j_lo; j <= j_hi; ++j) total += bspline_eval(k, u - j);
        worst = std::max(worst, std::fabs(total - 1.0));
    }
    return worst;
}

inline SampledCircleFunction sample_profile(const AngularProfileSpec& spec, int grid_size) {
    if (grid_size < 16) throw std::invalid_argument("sample grid too small");
    SampledCircleFunction out;
    out.values.resize(size_t(grid_size));
    for (int m = 0; m < grid_size; ++m)
        out.values[size_t(m)] = eval_profile(spec, circle_grid_point(m, grid_size));
    return out;
}

inline SampledCircleFunction sample_profile_derivative(const AngularProfileSpec& spec,
                                                       int grid_size) {
    if (grid_size < 16) throw std::invalid_argument("sample grid too small");
    SampledCircleFunction out;
    out.values.resize(size_t(grid_size));
    for (int m = 0; m < grid_size; ++m)
        out.values[size_t(m)] = profile_derivative(spec, circle_grid_point(m, grid_size));
    return out;
}

} // namespace ost
