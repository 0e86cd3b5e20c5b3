#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include <ost/grid.hpp>

// Shared helpers for the test suite only; nothing here ships with the library.

namespace test_util {

// 16-point Gauss-Legendre rule on [-1, 1], exact for polynomials to degree 31.
struct GlNode {
    double x;
    double w;
};

inline constexpr std::array<GlNode, 16> gl16 = {{
    {-0.9894009349916499, 0.027152459411754037},
    {-0.9445750230732326, 0.062253523938647706},
    {-0.8656312023878318, 0.09515851168249259},
    {-0.755404408355003, 0.12462897125553403},
    {-0.6178762444026438, 0.14959598881657676},
    {-0.45801677765722737, 0.16915651939500262},
    {-0.2816035507792589, 0.1826034150449236},
    {-0.09501250983763745, 0.18945061045506859},
    {0.09501250983763745, 0.18945061045506859},
    {0.2816035507792589, 0.1826034150449236},
    {0.45801677765722737, 0.16915651939500262},
    {0.6178762444026438, 0.14959598881657676},
    {0.755404408355003, 0.12462897125553403},
    {0.8656312023878318, 0.09515851168249259},
    {0.9445750230732326, 0.062253523938647706},
    {0.9894009349916499, 0.027152459411754037},
}};

template <class F>
double integrate_gl16(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (const auto& node : gl16) acc += node.w * f(mid + half * node.x);
    return acc * half;
}

template <class F>
double integrate_gl16_segments(F&& f, double a, double b, int nseg) {
    double acc = 0.0;
    for (int i = 0; i < nseg; ++i) {
        const double lo = a + (b - a) * i / nseg;
        const double hi = a + (b - a) * (i + 1) / nseg;
        acc += integrate_gl16(f, lo, hi);
    }
    return acc;
}

// Deterministic uniform doubles. mt19937_64's output sequence is pinned by the
// standard; the explicit 53-bit mapping avoids the unspecified distribution
// classes so expected values can be frozen across platforms.
class Uniform01 {
  public:
    explicit Uniform01(std::uint64_t seed) : gen_(seed) {}

    double next() { return double(gen_() >> 11) * 0x1.0p-53; }

    double next_in(double lo, double hi) { return lo + (hi - lo) * next(); }

  private:
    std::mt19937_64 gen_;
};

// Direct quadratic-cost inverse DFT, spatial origin at index (0, 0). Slow on
// purpose; it is the reference the fast path is checked against.
inline ost::ComplexImage brute_inverse_dft(const ost::ComplexImage& freq) {
    const int w = freq.width, h = freq.height;
    ost::ComplexImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::complex<double> acc = 0.0;
            for (int iy = 0; iy < h; ++iy) {
                for (int ix = 0; ix < w; ++ix) {
                    const double phase = 2.0 * std::numbers::pi *
                                         (double(ix) * x / w + double(iy) * y / h);
                    acc += freq.at(ix, iy) * std::polar(1.0, phase);
                }
            }
            out.at(x, y) = acc / double(w * h);
        }
    }
    return out;
}

inline ost::RealImage random_image(int w, int h, std::uint64_t seed) {
    Uniform01 rng(seed);
    ost::RealImage img(w, h);
    for (auto& v : img.data) v = rng.next() - 0.5;
    return img;
}

} // namespace test_util
