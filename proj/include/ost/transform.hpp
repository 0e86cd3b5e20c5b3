#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <ost/fft.hpp>
#include <ost/grid.hpp>
#include <ost/wavelets.hpp>

// Everything here lives on the discrete torus: shifts wrap, convolutions are
// circular, and the trained-kernel equivalence holds to machine precision
// instead of up to boundary effects.

namespace ost {

// Stack of complex responses over the orientations theta_m = 2 pi m / N,
// tagged with the parameters of the bank that produced it.
struct OrientationScore {
    int width = 0;
    int height = 0;
    int n_orientations = 0;
    int spline_order = 0;
    RadialProfileSpec radial;
    DcPolicy dc_policy = DcPolicy::SplitUniform;
    std::vector<ComplexImage> slices;
};

struct DiskLimitResult {
    RealImage image;
    double discarded_energy_fraction = 0.0;
};

// Element (x, theta_m) of the discrete roto-translation group; x is in pixels
// and may be fractional, m is taken mod the orientation count at use.
struct GroupElement {
    std::array<double, 2> x{0.0, 0.0};
    int m = 0;
};

struct TrainedAtom {
    double coefficient = 0.0;
    std::array<int, 2> offset{0, 0};
};

// Lifting kernel given as a disk-limited sum of shifted reproducing kernels:
// psi_hat(w) = sum_i c_i exp(-i w . x_i) inside B(0, rho0 * Nyquist).
struct TrainedKernelModel {
    double rho0 = 0.8;
    std::vector<TrainedAtom> atoms;
};

struct WeightedGroupElement {
    double coefficient = 0.0;
    GroupElement element;
};

namespace detail {

inline void check_same_shape(const RealImage& f, int width, int height,
                             const char* what) {
    if (f.width != width || f.height != height)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

// Circular shift realizing out(y) = in(y + s) for integer s.
inline ComplexImage roll(const ComplexImage& in, long sx, long sy) {
    const int w = in.width, h = in.height;
    const int ax = int(((sx % w) + w) % w);
    const int ay = int(((sy % h) + h) % h);
    ComplexImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const int ys = (y + ay) % h;
        for (int x = 0; x < w; ++x) out.at(x, y) = in.at((x + ax) % w, ys);
    }
    return out;
}

inline double hard_disk_mask(double wx, double wy, double rho0) {
    const double radius = std::sqrt(wx * wx + wy * wy);
    return radius < rho0 * std::numbers::pi ? 1.0 : 0.0;
}

} // namespace detail

// Zero every DFT coefficient outside B(0, rho0 * Nyquist) and report the
// fraction of spectral energy that was removed.
inline DiskLimitResult disk_limit(const RealImage& f, double rho0) {
    if (!(rho0 > 0.0) || rho0 > 1.0)
        throw std::invalid_argument("disk_limit: rho0 outside (0, 1]");
    ComplexImage fhat = fft2_forward(to_complex(f));
    double kept = 0.0, removed = 0.0;
    for (int iy = 0; iy < f.height; ++iy) {
        const double wy = frequency_value(iy, f.height);
        for (int ix = 0; ix < f.width; ++ix) {
            const double wx = frequency_value(ix, f.width);
            auto& v = fhat.at(ix, iy);
            if (detail::hard_disk_mask(wx, wy, rho0) != 0.0) {
                kept += std::norm(v);
            } else {
                removed += std::norm(v);
                v = 0.0;
            }
        }
    }
    // The kept spectrum is Hermitian (the disk never reaches the unpaired
    // Nyquist bins), so the inverse transform is real up to roundoff.
    DiskLimitResult result;
    result.image = real_part(fft2_inverse(fhat));
    const double total = kept + removed;
    result.discarded_energy_fraction = total > 0.0 ? removed / total : 0.0;
    return result;
}

// Orientation score: slice m is the inverse transform of slice_m_hat * f_hat.
// The stack slices are real, so conjugating the correlation filter is a no-op.
inline OrientationScore lift(const RealImage& f, const CakeWaveletStack& stack) {
    detail::check_same_shape(f, stack.width, stack.height, "lift");
    const ComplexImage fhat = fft2_forward(to_complex(f));
    OrientationScore score;
    score.width = stack.width;
    score.height = stack.height;
    score.n_orientations = stack.n_orientations;
    score.spline_order = stack.spline_order;
    score.radial = stack.radial;
    score.dc_policy = stack.dc_policy;
    score.slices.reserve(size_t(stack.n_orientations));
    ComplexImage product(stack.width, stack.height);
    for (const auto& slice : stack.fourier_slices) {
        for (size_t i = 0; i < product.data.size(); ++i)
            product.data[i] = slice.data[i].real() * fhat.data[i];
        score.slices.push_back(fft2_inverse(product));
    }
    return score;
}

// Fast inverse: plain sum over orientations. Exact on disk-limited input
// because the slices sum to the radial mask in the Fourier domain.
inline RealImage reconstruct_fast(const OrientationScore& score) {
    RealImage out(score.width, score.height);
    for (const auto& slice : score.slices)
        for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += slice.data[i].real();
    return out;
}

// Largest imaginary magnitude left in the orientation sum; a reconstruction
// health check, about 1e-15 for real disk-limited input.
inline double reconstruct_imag_residual(const OrientationScore& score) {
    std::vector<std::complex<double>> acc(size_t(score.width) * size_t(score.height));
    for (const auto& slice : score.slices)
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += slice.data[i];
    double worst = 0.0;
    for (const auto& v : acc) worst = std::max(worst, std::fabs(v.imag()));
    return worst;
}

// Group product per the roto-translation law: (a.x, a.m) . (b.x, b.m) =
// (a.x + R_{theta_a} b.x, a.m + b.m). The orientation count fixes theta_a.
inline GroupElement group_product(const GroupElement& a, const GroupElement& b,
                                  int n_orientations) {
    if (n_orientations < 1)
        throw std::invalid_argument("group_product: need at least one orientation");
    const double theta =
        2.0 * std::numbers::pi * double(a.m) / double(n_orientations);
    const double c = std::cos(theta), s = std::sin(theta);
    GroupElement out;
    out.x = {a.x[0] + c * b.x[0] - s * b.x[1], a.x[1] + s * b.x[0] + c * b.x[1]};
    out.m = a.m + b.m;
    return out;
}

// Right-regular action: out(y, alpha_j) = in((y, alpha_j) . (x, theta_m)) =
// in(y + R_{alpha_j} x, alpha_j + theta_m). Spatial shifts ride on Fourier
// phase ramps exp(+i w . s) (band-limited, matching the e^{-i w x} transform
// convention); shifts within 1e-9 of a whole pixel become exact array rolls,
// which also makes the identity element a bit-exact copy.
inline OrientationScore shift_twist(const OrientationScore& score,
                                    const GroupElement& g) {
    const int n = score.n_orientations;
    if (n < 1 || score.slices.size() != size_t(n))
        throw std::invalid_argument("shift_twist: malformed score");
    const int m = ((g.m % n) + n) % n;
    const double two_pi = 2.0 * std::numbers::pi;

    OrientationScore out = score;
    for (int j = 0; j < n; ++j) {
        const double alpha = two_pi * double(j) / double(n);
        const double c = std::cos(alpha), s = std::sin(alpha);
        const double sx = c * g.x[0] - s * g.x[1];
        const double sy = s * g.x[0] + c * g.x[1];
        const ComplexImage& src = score.slices[size_t((j + m) % n)];
        const double rx = std::round(sx), ry = std::round(sy);
        if (std::fabs(sx - rx) < 1e-9 && std::fabs(sy - ry) < 1e-9) {
            out.slices[size_t(j)] = detail::roll(src, long(rx), long(ry));
            continue;
        }
        ComplexImage freq = fft2_forward(src);
        for (int iy = 0; iy < score.height; ++iy) {
            const double wy = frequency_value(iy, score.height);
            for (int ix = 0; ix < score.width; ++ix) {
                const double wx = frequency_value(ix, score.width);
                freq.at(ix, iy) *= std::polar(1.0, wx * sx + wy * sy);
            }
        }
        out.slices[size_t(j)] = fft2_inverse(freq);
    }
    return out;
}

namespace detail {

inline void check_trained_model(const TrainedKernelModel& model, int width,
                                int height, int n_orientations) {
    if (model.atoms.empty())
        throw std::invalid_argument("trained kernel model has no atoms");
    if (!(model.rho0 > 0.0) || model.rho0 > 1.0)
        throw std::invalid_argument("trained kernel model: rho0 outside (0, 1]");
    if (n_orientations < 1)
        throw std::invalid_argument("trained kernel model: need at least one orientation");
    for (const auto& atom : model.atoms) {
        if (atom.offset[0] < -width / 2 || atom.offset[0] >= (width + 1) / 2 ||
            atom.offset[1] < -height / 2 || atom.offset[1] >= (height + 1) / 2)
            throw std::invalid_argument("trained kernel model: offset outside the grid");
    }
}

} // namespace detail

// Lift with the trained kernel, rotated analytically per orientation. The
// disk mask is rotation invariant, so rotating the kernel only rotates the
// atom offsets inside the phase sum; correlation conjugates the kernel, hence
// the + sign in the ramps.
inline OrientationScore lift_trained(const RealImage& f,
                                     const TrainedKernelModel& model,
                                     int n_orientations) {
    detail::check_trained_model(model, f.width, f.height, n_orientations);
    const ComplexImage fhat = fft2_forward(to_complex(f));
    const double two_pi = 2.0 * std::numbers::pi;

    OrientationScore score;
    score.width = f.width;
    score.height = f.height;
    score.n_orientations = n_orientations;
    score.spline_order = 0;
    score.radial = RadialProfileSpec{model.rho0, HardEdge{}};
    score.slices.reserve(size_t(n_orientations));

    const size_t n_atoms = model.atoms.size();
    std::vector<double> ox(n_atoms), oy(n_atoms);
    ComplexImage product(f.width, f.height);
    for (int m = 0; m < n_orientations; ++m) {
        const double theta = two_pi * double(m) / double(n_orientations);
        const double c = std::cos(theta), s = std::sin(theta);
        for (size_t i = 0; i < n_atoms; ++i) {
            ox[i] = c * model.atoms[i].offset[0] - s * model.atoms[i].offset[1];
            oy[i] = s * model.atoms[i].offset[0] + c * model.atoms[i].offset[1];
        }
        for (int iy = 0; iy < f.height; ++iy) {
            const double wy = frequency_value(iy, f.height);
            for (int ix = 0; ix < f.width; ++ix) {
                const double wx = frequency_value(ix, f.width);
                const size_t idx = size_t(iy) * size_t(f.width) + size_t(ix);
                if (detail::hard_disk_mask(wx, wy, model.rho0) == 0.0) {
                    product.data[idx] = 0.0;
                    continue;
                }
                std::complex<double> filter = 0.0;
                for (size_t i = 0; i < n_atoms; ++i)
                    filter += model.atoms[i].coefficient *
                              std::polar(1.0, wx * ox[i] + wy * oy[i]);
                product.data[idx] = filter * fhat.data[idx];
            }
        }
        score.slices.push_back(fft2_inverse(product));
    }
    return score;
}

// The constructive expansion behind the trained-kernel equivalence: each atom
// contributes its coefficient at every orientation, because the reproducing
// kernel at offset x is the orientation sum of shift-twisted wavelets.
inline std::vector<WeightedGroupElement>
expand_trained_kernel(const TrainedKernelModel& model, int n_orientations) {
    if (n_orientations < 1)
        throw std::invalid_argument("expand_trained_kernel: need at least one orientation");
    std::vector<WeightedGroupElement> out;
    out.reserve(model.atoms.size() * size_t(n_orientations));
    for (const auto& atom : model.atoms) {
        for (int m = 0; m < n_orientations; ++m) {
            WeightedGroupElement term;
            term.coefficient = atom.coefficient;
            term.element.x = {double(atom.offset[0]), double(atom.offset[1])};
            term.element.m = m;
            out.push_back(term);
        }
    }
    return out;
}

// Max absolute gap between lifting with the trained kernel directly and
// synthesizing it from shift-twisted cake lifts. Zero up to roundoff for any
// model sharing the stack's disk.
inline double equivalence_residual(const RealImage& f,
                                   const TrainedKernelModel& model,
                                   const CakeWaveletStack& stack) {
    if (model.rho0 != stack.radial.rho0)
        throw std::invalid_argument(
            "equivalence_residual: model and stack disagree on rho0");
    detail::check_same_shape(f, stack.width, stack.height, "equivalence_residual");

    const OrientationScore direct = lift_trained(f, model, stack.n_orientations);
    const OrientationScore base = lift(f, stack);

    OrientationScore synth = direct;
    for (auto& slice : synth.slices)
        for (auto& v : slice.data) v = 0.0;
    for (const auto& term : expand_trained_kernel(model, stack.n_orientations)) {
        if (term.coefficient == 0.0) continue;
        const OrientationScore moved = shift_twist(base, term.element);
        for (int j = 0; j < stack.n_orientations; ++j)
            for (size_t i = 0; i < synth.slices[size_t(j)].data.size(); ++i)
                synth.slices[size_t(j)].data[i] +=
                    term.coefficient * moved.slices[size_t(j)].data[i];
    }

    double worst = 0.0;
    for (int j = 0; j < stack.n_orientations; ++j)
        for (size_t i = 0; i < direct.slices[size_t(j)].data.size(); ++i)
            worst = std::max(worst, std::abs(direct.slices[size_t(j)].data[i] -
                                             synth.slices[size_t(j)].data[i]));
    return worst;
}

} // namespace ost
