#pragma once

#include <complex>
#include <numbers>
#include <vector>

namespace ost {

// Row-major images, y major then x. The frequency-domain grids below share the
// layout, with the zero frequency at index (0, 0) unless a function says
// otherwise.
struct RealImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    RealImage() = default;
    RealImage(int w, int h) : width(w), height(h), data(size_t(w) * size_t(h), 0.0) {}

    double& at(int x, int y) { return data[size_t(y) * size_t(width) + size_t(x)]; }
    double at(int x, int y) const { return data[size_t(y) * size_t(width) + size_t(x)]; }
};

struct ComplexImage {
    int width = 0;
    int height = 0;
    std::vector<std::complex<double>> data;

    ComplexImage() = default;
    ComplexImage(int w, int h) : width(w), height(h), data(size_t(w) * size_t(h), 0.0) {}

    std::complex<double>& at(int x, int y) {
        return data[size_t(y) * size_t(width) + size_t(x)];
    }
    std::complex<double> at(int x, int y) const {
        return data[size_t(y) * size_t(width) + size_t(x)];
    }
};

inline ComplexImage to_complex(const RealImage& f) {
    ComplexImage out(f.width, f.height);
    for (size_t i = 0; i < f.data.size(); ++i) out.data[i] = f.data[i];
    return out;
}

inline RealImage real_part(const ComplexImage& f) {
    RealImage out(f.width, f.height);
    for (size_t i = 0; i < f.data.size(); ++i) out.data[i] = f.data[i].real();
    return out;
}

// DFT bin index -> signed frequency index, Nyquist going to the negative side
// on even lengths.
inline int signed_frequency(int i, int n) {
    return i < (n + 1) / 2 ? i : i - n;
}

// Signed frequency index -> DFT bin index.
inline int frequency_bin(int f, int n) {
    return f >= 0 ? f : f + n;
}

// Angular frequency of bin i in index-normalized units (Nyquist at pi).
inline double frequency_value(int i, int n) {
    return 2.0 * std::numbers::pi * double(signed_frequency(i, n)) / double(n);
}

namespace detail {

template <typename Image>
Image shift_image(const Image& in, int sx, int sy) {
    Image out(in.width, in.height);
    for (int y = 0; y < in.height; ++y) {
        const int yd = (y + sy) % in.height;
        for (int x = 0; x < in.width; ++x) {
            out.at((x + sx) % in.width, yd) = in.at(x, y);
        }
    }
    return out;
}

} // namespace detail

// Move the zero bin to the image center (floor(n/2) per axis).
template <typename Image>
Image fftshift(const Image& in) {
    return detail::shift_image(in, in.width / 2, in.height / 2);
}

// Undo fftshift; distinct from it on odd lengths.
template <typename Image>
Image ifftshift(const Image& in) {
    return detail::shift_image(in, (in.width + 1) / 2, (in.height + 1) / 2);
}

} // namespace ost
