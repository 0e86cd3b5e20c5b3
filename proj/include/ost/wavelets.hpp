#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include <ost/bspline.hpp>
#include <ost/fft.hpp>
#include <ost/grid.hpp>

namespace ost {

struct HardEdge {};

// Smooth radial rolloff of the given width ending at rho0. The erfc ramp is
// centered at rho0 - width/2 with slope width/8, which leaves the mask below
// 1e-4 at rho0 itself and indistinguishable from zero a little past it.
struct ErfTaper {
    double width = 0.1;
};

using RadialTaper = std::variant<HardEdge, ErfTaper>;

struct RadialProfileSpec {
    double rho0 = 0.8; // disk radius as a fraction of the Nyquist radius
    RadialTaper taper = HardEdge{};
};

enum class DcPolicy { SplitUniform };

// Orientation-sliced frequency response. Slice m holds the base wavelet
// rotated by theta_m = 2 pi m / N; values are real and nonnegative, kept in
// complex storage because everything downstream works on complex grids.
struct CakeWaveletStack {
    int width = 0;
    int height = 0;
    int n_orientations = 0;
    int spline_order = 0;
    RadialProfileSpec radial;
    DcPolicy dc_policy = DcPolicy::SplitUniform;
    std::vector<ComplexImage> fourier_slices;
};

// Radial mask at the given frequency radius (index-normalized, Nyquist = pi).
// The hard edge is a strict inequality, so the Nyquist ring stays outside even
// at rho0 = 1.
inline double radial_mask_value(const RadialProfileSpec& radial, double radius) {
    if (const auto* taper = std::get_if<ErfTaper>(&radial.taper)) {
        const double sigma = taper->width / 8.0;
        const double center = radial.rho0 - taper->width / 2.0;
        const double t = (radius / std::numbers::pi - center) / (sigma * std::sqrt(2.0));
        return 0.5 * std::erfc(t);
    }
    return radius < radial.rho0 * std::numbers::pi ? 1.0 : 0.0;
}

namespace detail {

inline void check_stack_params(int width, int height, int n_orientations,
                               int spline_order, const RadialProfileSpec& radial) {
    if (width < 8 || height < 8)
        throw std::invalid_argument("build_stack: dimensions must be at least 8");
    if (n_orientations < 1)
        throw std::invalid_argument("build_stack: need at least one orientation");
    check_spline_order(spline_order);
    if (!(radial.rho0 > 0.0) || radial.rho0 > 1.0)
        throw std::invalid_argument("build_stack: rho0 outside (0, 1]");
    if (const auto* taper = std::get_if<ErfTaper>(&radial.taper)) {
        if (!(taper->width > 0.0) || taper->width >= radial.rho0)
            throw std::invalid_argument("build_stack: taper width outside (0, rho0)");
    }
    const double bins = radial.rho0 * 0.5 * double(std::min(width, height));
    if (bins < 2.0)
        throw std::invalid_argument("build_stack: disk spans fewer than 2 frequency bins");
}

// Quadrant-folded angle. Writes the first-quadrant representative (x0 > 0,
// y0 >= 0) and returns q with angle(wx, wy) = q pi/2 + atan2(y0, x0). Folding
// before atan2 makes quarter-turn rotation a pure relabeling: the rotated
// point reuses the same (x0, y0) bit for bit, only q moves.
inline int fold_quadrant(double wx, double wy, double& x0, double& y0) {
    if (wx > 0.0 && wy >= 0.0) {
        x0 = wx;
        y0 = wy;
        return 0;
    }
    if (wx <= 0.0 && wy > 0.0) {
        x0 = wy;
        y0 = -wx;
        return 1;
    }
    if (wx < 0.0 && wy <= 0.0) {
        x0 = -wx;
        y0 = -wy;
        return 2;
    }
    x0 = -wy;
    y0 = wx;
    return 3;
}

} // namespace detail

// Build the filter bank on the W x H frequency grid. Each slice samples
// M(|w|) * Phi(angle - pi/2 - theta_m) analytically per frequency; the base
// slice is centered on the positive y-frequency axis. All N slices at one
// frequency come from a single spline-lattice pass, so their sum telescopes to
// the plain partition of unity and matches the radial mask to machine
// precision. The zero frequency gets 1/N per slice.
inline CakeWaveletStack build_stack(int width, int height, int n_orientations,
                                    int spline_order, RadialProfileSpec radial = {},
                                    DcPolicy dc_policy = DcPolicy::SplitUniform) {
    detail::check_stack_params(width, height, n_orientations, spline_order, radial);

    CakeWaveletStack stack;
    stack.width = width;
    stack.height = height;
    stack.n_orientations = n_orientations;
    stack.spline_order = spline_order;
    stack.radial = radial;
    stack.dc_policy = dc_policy;
    stack.fourier_slices.assign(size_t(n_orientations), ComplexImage(width, height));

    const double two_pi = 2.0 * std::numbers::pi;
    const int n = n_orientations;
    const double half_support = 0.5 * double(spline_order + 1);
    std::vector<double> vals(static_cast<size_t>(n));

    for (int iy = 0; iy < height; ++iy) {
        const double wy = frequency_value(iy, height);
        for (int ix = 0; ix < width; ++ix) {
            const double wx = frequency_value(ix, width);
            const size_t idx = size_t(iy) * size_t(width) + size_t(ix);
            if (ix == 0 && iy == 0) {
                for (int m = 0; m < n; ++m)
                    stack.fourier_slices[size_t(m)].data[idx] = 1.0 / double(n);
                continue;
            }
            const double radius = std::sqrt(wx * wx + wy * wy);
            const double mask = radial_mask_value(radial, radius);
            if (mask == 0.0) continue;

            double x0 = 0.0, y0 = 0.0;
            const int q = detail::fold_quadrant(wx, wy, x0, y0);
            const double u0 = double(n) * std::atan2(y0, x0) / two_pi;
            // Offset n (q - 1) / 4 split into an integer slice shift and an
            // exact quarter remainder, so that the spline arguments depend on
            // the folded angle alone whenever 4 divides n.
            const int nq = n * (q - 1);
            const int shift = nq / 4;
            const double u = u0 + 0.25 * double(nq - 4 * shift);

            std::fill(vals.begin(), vals.end(), 0.0);
            const int j_lo = int(std::floor(u - half_support)) - 1;
            const int j_hi = int(std::ceil(u + half_support)) + 1;
            for (int j = j_lo; j <= j_hi; ++j) {
                const double t = bspline_eval(spline_order, u - double(j));
                if (t == 0.0) continue;
                const int slice = (((j + shift) % n) + n) % n;
                vals[size_t(slice)] += t;
            }
            for (int m = 0; m < n; ++m) {
                const double v = vals[size_t(m)];
                if (v != 0.0) stack.fourier_slices[size_t(m)].data[idx] = mask * v;
            }
        }
    }
    return stack;
}

namespace detail {

inline void check_orientation_index(const CakeWaveletStack& stack, int m) {
    if (m < 0 || m >= stack.n_orientations)
        throw std::out_of_range("orientation index outside the stack");
}

} // namespace detail

// Spatial filter for one orientation: inverse transform of the slice with the
// zero frequency moved to the image center. Complex in general, since the
// slice is real but not even.
inline ComplexImage spatial_kernel(const CakeWaveletStack& stack, int m) {
    detail::check_orientation_index(stack, m);
    return fftshift(fft2_inverse(stack.fourier_slices[size_t(m)]));
}

// Pointwise sum of the slices. Equals the radial mask wherever the stack is
// well formed.
inline RealImage n_psi(const CakeWaveletStack& stack) {
    RealImage out(stack.width, stack.height);
    for (const auto& slice : stack.fourier_slices)
        for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += slice.data[i].real();
    return out;
}

// Pointwise sum of squared slice magnitudes, the diagonal of the frame
// operator.
inline RealImage m_psi(const CakeWaveletStack& stack) {
    RealImage out(stack.width, stack.height);
    for (const auto& slice : stack.fourier_slices)
        for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += std::norm(slice.data[i]);
    return out;
}

struct StabilityReport {
    double delta = 0.0;      // min of m_psi strictly inside the disk
    double peak = 0.0;       // max of m_psi there
    double cond_bound = 0.0; // peak / delta
};

// Frame bounds over frequencies strictly inside B(0, rho0 * Nyquist).
inline StabilityReport stability_report(const CakeWaveletStack& stack) {
    const RealImage mp = m_psi(stack);
    const double limit = stack.radial.rho0 * std::numbers::pi;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    bool any = false;
    for (int iy = 0; iy < stack.height; ++iy) {
        const double wy = frequency_value(iy, stack.height);
        for (int ix = 0; ix < stack.width; ++ix) {
            const double wx = frequency_value(ix, stack.width);
            if (std::sqrt(wx * wx + wy * wy) >= limit) continue;
            const double v = mp.at(ix, iy);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            any = true;
        }
    }
    if (!any || !(lo > 0.0))
        throw std::domain_error("stability_report: frame bound vanishes inside the disk");
    return {lo, hi, hi / lo};
}

// First moment of |slice|^2 along the orientation axis R_theta_m(x-axis).
// Accumulated over mirror pairs per axis so that symmetric slices cancel
// exactly; Nyquist bins of even dimensions are left out (they have no mirror
// partner). Centered slices give |moment| below 1e-10 times the slice energy.
inline double directionality_moment(const CakeWaveletStack& stack, int m) {
    detail::check_orientation_index(stack, m);
    const ComplexImage& slice = stack.fourier_slices[size_t(m)];
    const int fx_max = (stack.width - 1) / 2;
    const int fy_max = (stack.height - 1) / 2;
    const double two_pi = 2.0 * std::numbers::pi;

    double sum_x = 0.0;
    for (int fy = -fy_max; fy <= fy_max; ++fy) {
        const int iy = frequency_bin(fy, stack.height);
        for (int fx = 1; fx <= fx_max; ++fx) {
            const double wx = two_pi * double(fx) / double(stack.width);
            const double plus = std::norm(slice.at(frequency_bin(fx, stack.width), iy));
            const double minus = std::norm(slice.at(frequency_bin(-fx, stack.width), iy));
            sum_x += wx * (plus - minus);
        }
    }
    double sum_y = 0.0;
    for (int fy = 1; fy <= fy_max; ++fy) {
        const double wy = two_pi * double(fy) / double(stack.height);
        const int iy_plus = frequency_bin(fy, stack.height);
        const int iy_minus = frequency_bin(-fy, stack.height);
        for (int fx = -fx_max; fx <= fx_max; ++fx) {
            const int ix = frequency_bin(fx, stack.width);
            sum_y += wy * (std::norm(slice.at(ix, iy_plus)) - std::norm(slice.at(ix, iy_minus)));
        }
    }
    const double theta = two_pi * double(m) / double(stack.n_orientations);
    return std::cos(theta) * sum_x + std::sin(theta) * sum_y;
}

} // namespace ost
