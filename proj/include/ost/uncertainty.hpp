#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include <ost/profiles.hpp>
#include <ost/special.hpp>

namespace ost {

// Position-side generator A = multiplication by rho sin(phi) (or rho cos(phi))
// and momentum-side generator B = -i d/dphi, acting on circle functions. The
// uncertainty gap of a profile is var_A var_B / (|<[A,B]>|/2)^2 >= 1.
struct MultCos {
    double rho;
};

struct MultSin {
    double rho;
};

struct AngularDerivative {};

using GeneratorKind = std::variant<MultCos, MultSin, AngularDerivative>;

struct UncertaintyReport {
    double mean_a = 0.0;
    double var_a = 0.0;
    double mean_b = 0.0;
    double var_b = 0.0;
    double commutator_abs = 0.0; // |<[A,B]>| = rho |<cos phi>|
    double ug = 0.0;
};

struct QuadratureConfig {
    int grid_size = 8192;              // periodic trapezoid samples
    bool exact_spline_segments = true; // per-knot Gauss rule for cake profiles
    double axis_rotation = 0.0;        // generators built from omega = rho R_alpha e2
};

namespace detail {

inline constexpr double commutator_floor = 1e-14;

// 16-point Gauss-Legendre rule on [-1, 1].
struct GaussNode {
    double x;
    double w;
};

inline constexpr GaussNode gauss16[16] = {
    {-0.9894009349916499, 0.027152459411754037}, {-0.9445750230732326, 0.062253523938647706},
    {-0.8656312023878318, 0.09515851168249259},  {-0.755404408355003, 0.12462897125553403},
    {-0.6178762444026438, 0.14959598881657676},  {-0.45801677765722737, 0.16915651939500262},
    {-0.2816035507792589, 0.1826034150449236},   {-0.09501250983763745, 0.18945061045506859},
    {0.09501250983763745, 0.18945061045506859},  {0.2816035507792589, 0.1826034150449236},
    {0.45801677765722737, 0.16915651939500262},  {0.6178762444026438, 0.14959598881657676},
    {0.755404408355003, 0.12462897125553403},    {0.8656312023878318, 0.09515851168249259},
    {0.9445750230732326, 0.062253523938647706},  {0.9894009349916499, 0.027152459411754037},
};

struct CircleMoments {
    double norm = 0.0;  // int Phi^2
    double sin1 = 0.0;  // int sin(phi) Phi^2
    double sin2 = 0.0;  // int sin^2(phi) Phi^2
    double cos1 = 0.0;  // int cos(phi) Phi^2
    double deriv = 0.0; // int Phi'^2
};

inline UncertaintyReport report_from_moments(const CircleMoments& m, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("uncertainty gap needs rho > 0");
    if (!(m.norm > 0.0)) throw std::invalid_argument("uncertainty gap of a zero-norm profile");
    UncertaintyReport r;
    r.mean_a = rho * m.sin1 / m.norm;
    r.var_a = rho * rho * (m.sin2 / m.norm) - r.mean_a * r.mean_a;
    r.mean_b = 0.0; // (Phi, -i Phi') is purely imaginary times int Phi Phi' = 0
    r.var_b = m.deriv / m.norm;
    r.commutator_abs = rho * std::fabs(m.cos1 / m.norm);
    if (r.commutator_abs < commutator_floor)
        throw std::domain_error("uncertainty gap undefined: <cos phi> vanishes for this profile");
    const double half_comm = 0.5 * r.commutator_abs;
    r.ug = r.var_a * r.var_b / (half_comm * half_comm);
    return r;
}

// Trapezoid moments with the generator axis rotated by alpha: the profile is
// evaluated at phi - alpha against weights sin/cos(phi - alpha), which is the
// unrotated problem under substitution.
inline CircleMoments trapezoid_moments(const AngularProfileSpec& spec, int grid_size,
                                       double alpha) {
    if (grid_size < 16) throw std::invalid_argument("quadrature grid too small");
    CircleMoments m;
    for (int g = 0; g < grid_size; ++g) {
        const double t = circle_grid_point(g, grid_size) - alpha;
        const double f = eval_profile(spec, t);
        const double d = profile_derivative(spec, t);
        const double f2 = f * f;
        const double s = std::sin(t);
        m.norm += f2;
        m.sin1 += s * f2;
        m.sin2 += s * s * f2;
        m.cos1 += std::cos(t) * f2;
        m.deriv += d * d;
    }
    // The common 2 pi / grid_size weight cancels in every ratio; fold it in
    // anyway so the moments themselves are honest integrals.
    const double h = two_pi / grid_size;
    m.norm *= h;
    m.sin1 *= h;
    m.sin2 *= h;
    m.cos1 *= h;
    m.deriv *= h;
    return m;
}

// Knots of the wrapped spline profile inside [-pi, pi]: the lattice
// breakpoints of every wrap copy, mapped back to angle.
inline std::vector<double> cake_knot_angles(const CakeBSpline& c) {
    const double w = 0.5 * (c.k + 1);
    const double half_u = 0.5 * c.n; // u ranges over [-n/2, n/2] on [-pi, pi]
    std::vector<double> knots = {-std::numbers::pi, std::numbers::pi};
    const int n_max = int(std::ceil((w + half_u) / c.n)) + 1;
    for (int n = -n_max; n <= n_max; ++n) {
        for (int i = 0; i <= c.k + 1; ++i) {
            const double u = -double(n) * c.n - w + i;
            if (u <= -half_u || u >= half_u) continue;
            knots.push_back(two_pi * u / c.n);
        }
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end(),
                            [](double a, double b) { return std::fabs(a - b) < 1e-13; }),
                knots.end());
    return knots;
}

// Per-knot-segment Gauss moments for cake profiles. Between knots the profile
// is a polynomial, so the only quadrature error left is the (tiny) trig-factor
// one; the axis rotation drops out exactly and is ignored here.
inline CircleMoments cake_gauss_moments(const CakeBSpline& c) {
    CircleMoments m;
    const auto knots = cake_knot_angles(c);
    for (size_t s = 0; s + 1 < knots.size(); ++s) {
        const double mid = 0.5 * (knots[s] + knots[s + 1]);
        const double half = 0.5 * (knots[s + 1] - knots[s]);
        for (const auto& node : gauss16) {
            const double phi = mid + half * node.x;
            const double weight = node.w * half;
            const double f = eval_profile(c, phi);
            const double d = profile_derivative(c, phi);
            const double f2 = f * f;
            const double sn = std::sin(phi);
            m.norm += weight * f2;
            m.sin1 += weight * sn * f2;
            m.sin2 += weight * sn * sn * f2;
            m.cos1 += weight * std::cos(phi) * f2;
            m.deriv += weight * d * d;
        }
    }
    return m;
}

} // namespace detail

// Expectation (psi, X psi) / (psi, psi) on the sample grid, periodic trapezoid.
// The derivative samples are only consulted for the -i d/dphi generator, whose
// expectation on a real profile is zero by construction.
inline double expectation(const GeneratorKind& op, const SampledCircleFunction& f,
                          const SampledCircleFunction* derivative = nullptr) {
    const int grid_size = int(f.values.size());
    if (grid_size < 16) throw std::invalid_argument("expectation grid too small");
    double norm = 0.0;
    for (double v : f.values) norm += v * v;
    if (!(norm > 0.0)) throw std::invalid_argument("expectation of a zero-norm profile");
    if (std::holds_alternative<AngularDerivative>(op)) {
        if (derivative == nullptr || derivative->values.size() != f.values.size())
            throw std::invalid_argument("derivative samples required for -i d/dphi");
        return 0.0;
    }
    double acc = 0.0;
    if (const auto* mc = std::get_if<MultCos>(&op)) {
        if (!(mc->rho > 0.0)) throw std::invalid_argument("generator needs rho > 0");
        for (int g = 0; g < grid_size; ++g) {
            const double v = f.values[size_t(g)];
            acc += std::cos(circle_grid_point(g, grid_size)) * v * v;
        }
        return mc->rho * acc / norm;
    }
    const auto& ms = std::get<MultSin>(op);
    if (!(ms.rho > 0.0)) throw std::invalid_argument("generator needs rho > 0");
    for (int g = 0; g < grid_size; ++g) {
        const double v = f.values[size_t(g)];
        acc += std::sin(circle_grid_point(g, grid_size)) * v * v;
    }
    return ms.rho * acc / norm;
}

// Uncertainty gap from precomputed samples of a real profile and its
// derivative, on the common grid. Used directly by property checks; the
// spec-driven entry point below goes through analytic evaluation instead.
inline UncertaintyReport uncertainty_gap_from_samples(const SampledCircleFunction& f,
                                                      const SampledCircleFunction& df,
                                                      double rho, double axis_rotation = 0.0) {
    const int grid_size = int(f.values.size());
    if (grid_size < 16 || df.values.size() != f.values.size())
        throw std::invalid_argument("uncertainty gap needs matching sample arrays");
    detail::CircleMoments m;
    for (int g = 0; g < grid_size; ++g) {
        const double t = circle_grid_point(g, grid_size) - axis_rotation;
        const double v = f.values[size_t(g)];
        const double d = df.values[size_t(g)];
        const double v2 = v * v;
        const double s = std::sin(t);
        m.norm += v2;
        m.sin1 += s * v2;
        m.sin2 += s * s * v2;
        m.cos1 += std::cos(t) * v2;
        m.deriv += d * d;
    }
    return detail::report_from_moments(m, rho);
}

inline UncertaintyReport uncertainty_gap(const AngularProfileSpec& spec, double rho,
                                         const QuadratureConfig& config = {}) {
    if (const auto* c = std::get_if<CakeBSpline>(&spec)) {
        if (c->k < 1)
            throw std::invalid_argument("uncertainty gap needs a differentiable profile (k >= 1)");
        if (config.exact_spline_segments)
            return detail::report_from_moments(detail::cake_gauss_moments(*c), rho);
    }
    return detail::report_from_moments(
        detail::trapezoid_moments(spec, config.grid_size, config.axis_rotation), rho);
}

// ||sin(.) Phi + lambda Phi'||_2 / ||Phi||_2 on the grid: zero exactly when
// the profile solves the first-order minimizer equation, i.e. von Mises.
inline double minimizer_residual(const AngularProfileSpec& spec, double lambda, int grid_size) {
    if (grid_size < 16) throw std::invalid_argument("residual grid too small");
    detail::check_lambda(lambda);
    double num = 0.0;
    double den = 0.0;
    for (int g = 0; g < grid_size; ++g) {
        const double phi = circle_grid_point(g, grid_size);
        const double f = eval_profile(spec, phi);
        const double d = profile_derivative(spec, phi);
        const double r = std::sin(phi) * f + lambda * d;
        num += r * r;
        den += f * f;
    }
    if (!(den > 0.0)) throw std::invalid_argument("residual of a zero-norm profile");
    return std::sqrt(num / den);
}

// Closed-form upper bound for the uncertainty gap of the wrapped Gaussian
// profile, valid on lambda in (0, 2].
inline double ug_upper_bound_wrapped_gaussian(double lambda) {
    if (!(lambda > 0.0 && lambda <= 2.0))
        throw std::invalid_argument("wrapped-gaussian bound validated only for 0 < lambda <= 2");
    const double pi = std::numbers::pi;
    const double num = -(lambda / pi) * std::sinh(lambda) * theta3_log_derivative_sq(lambda);
    const double c =
        std::sqrt(lambda / (2.0 * pi)) * (1.0 + std::erf(-1.0 / std::sqrt(2.0 * lambda))) +
        2.0 * std::exp(-pi * pi / (2.0 * lambda));
    const double d1 = erf_real_part({2.0 * pi / std::sqrt(4.0 * lambda),
                                     -lambda / std::sqrt(4.0 * lambda)});
    const double d2 =
        erf_real_part({pi / std::sqrt(2.0 * lambda), -lambda / std::sqrt(2.0 * lambda)});
    const double d3 =
        erf_real_part({0.5 * pi / std::sqrt(2.0 * lambda), -lambda / std::sqrt(2.0 * lambda)});
    const double inner =
        d1 + c * std::exp(-0.5 * lambda) * std::sqrt(8.0 * pi * lambda) * (d2 - d3) -
        2.0 * c * c;
    return num / (inner * inner);
}

// Convergence table: one row per lambda with the gap of the von Mises
// minimizer, the wrapped Gaussian, and the matched cake profile per requested
// order. Cells are computed independently, so evaluation order cannot leak
// into the results.
struct UgTable {
    std::vector<int> orders;
    std::vector<double> lambdas;
    std::vector<double> ug_opt;
    std::vector<double> ug_gauss;
    std::vector<std::vector<double>> ug_cake; // [order index][row]
};

inline UgTable ug_convergence_table(const std::vector<int>& orders,
                                    const std::vector<double>& lambdas,
                                    const QuadratureConfig& config = {}) {
    for (int k : orders)
        if (k < 1) throw std::invalid_argument("convergence table needs orders k >= 1");
    UgTable table;
    table.orders = orders;
    table.lambdas = lambdas;
    table.ug_cake.resize(orders.size());
    for (double lambda : lambdas) {
        table.ug_opt.push_back(uncertainty_gap(VonMises{lambda}, 1.0, config).ug);
        table.ug_gauss.push_back(uncertainty_gap(WrappedGaussian{lambda}, 1.0, config).ug);
        for (size_t i = 0; i < orders.size(); ++i) {
            const double n = n_of_lambda(orders[i], lambda);
            table.ug_cake[i].push_back(
                uncertainty_gap(CakeBSpline{n, orders[i]}, 1.0, config).ug);
        }
    }
    return table;
}

} // namespace ost
