#pragma once

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <ost/transform.hpp>

namespace ost {

// Payloads are written as raw memory and declared little-endian in the header,
// so a big-endian build would silently produce unreadable files.
static_assert(std::endian::native == std::endian::little,
              "container payloads assume a little-endian host");

namespace detail {

// Shortest decimal form that round-trips a double exactly.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline int parse_int(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const int parsed = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(key);
        return parsed;
    } catch (const std::exception&) {
        throw std::runtime_error("bad integer for key '" + key + "': " + value);
    }
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(key);
        return parsed;
    } catch (const std::exception&) {
        throw std::runtime_error("bad number for key '" + key + "': " + value);
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const std::uint64_t parsed = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(key);
        return parsed;
    } catch (const std::exception&) {
        throw std::runtime_error("bad integer for key '" + key + "': " + value);
    }
}

} // namespace detail

// Self-describing container for wavelet stacks and orientation scores: a text
// header (one "key value" pair per line, closed by "end") followed by the raw
// slice payload, theta-major, each pixel an interleaved (real, imag) pair of
// 64-bit floats.
struct OstHeader {
    std::string role; // "stack" or "score"
    int width = 0;
    int height = 0;
    int n_orientations = 0;
    int spline_order = 0;
    RadialProfileSpec radial;
    DcPolicy dc_policy = DcPolicy::SplitUniform;
    std::string command; // flags that produced the file, for regeneration
};

struct OstFile {
    OstHeader header;
    std::vector<ComplexImage> slices;
};

inline void write_ost(const std::string& path, const OstHeader& header,
                      const std::vector<ComplexImage>& slices) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");

    const std::uint64_t payload_bytes = std::uint64_t(slices.size()) *
                                        std::uint64_t(header.width) *
                                        std::uint64_t(header.height) * 16;
    out << "OST1\n";
    out << "version 1\n";
    out << "role " << header.role << "\n";
    out << "width " << header.width << "\n";
    out << "height " << header.height << "\n";
    out << "orientations " << header.n_orientations << "\n";
    out << "spline_order " << header.spline_order << "\n";
    out << "rho0 " << detail::format_double(header.radial.rho0) << "\n";
    if (const auto* erf = std::get_if<ErfTaper>(&header.radial.taper))
        out << "taper erf " << detail::format_double(erf->width) << "\n";
    else
        out << "taper hard\n";
    out << "dc_policy split_uniform\n";
    out << "dtype complex128\n";
    out << "layout theta-major then row-major y then x\n";
    out << "endianness little\n";
    if (!header.command.empty()) out << "command " << header.command << "\n";
    out << "payload " << payload_bytes << "\n";
    out << "end\n";

    for (const auto& slice : slices)
        out.write(reinterpret_cast<const char*>(slice.data.data()),
                  std::streamsize(slice.data.size() * sizeof(std::complex<double>)));
    if (!out) throw std::runtime_error("short write to " + path);
}

inline OstFile read_ost(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::string line;
    if (!std::getline(in, line) || line != "OST1")
        throw std::runtime_error(path + ": not an OST container");

    OstFile file;
    std::uint64_t declared_payload = 0;
    bool saw_payload = false;
    bool saw_end = false;
    while (std::getline(in, line)) {
        if (line == "end") {
            saw_end = true;
            break;
        }
        const auto space = line.find(' ');
        const std::string key = line.substr(0, space);
        const std::string value =
            space == std::string::npos ? std::string() : line.substr(space + 1);
        if (key == "version") {
            if (value != "1") throw std::runtime_error(path + ": unsupported version " + value);
        } else if (key == "role") {
            file.header.role = value;
        } else if (key == "width") {
            file.header.width = detail::parse_int(key, value);
        } else if (key == "height") {
            file.header.height = detail::parse_int(key, value);
        } else if (key == "orientations") {
            file.header.n_orientations = detail::parse_int(key, value);
        } else if (key == "spline_order") {
            file.header.spline_order = detail::parse_int(key, value);
        } else if (key == "rho0") {
            file.header.radial.rho0 = detail::parse_double(key, value);
        } else if (key == "taper") {
            if (value == "hard") {
                file.header.radial.taper = HardEdge{};
            } else if (value.rfind("erf ", 0) == 0) {
                file.header.radial.taper = ErfTaper{detail::parse_double(key, value.substr(4))};
            } else {
                throw std::runtime_error(path + ": unknown taper '" + value + "'");
            }
        } else if (key == "dc_policy") {
            if (value != "split_uniform")
                throw std::runtime_error(path + ": unknown dc_policy '" + value + "'");
        } else if (key == "dtype") {
            if (value != "complex128")
                throw std::runtime_error(path + ": unsupported dtype '" + value + "'");
        } else if (key == "endianness") {
            if (value != "little")
                throw std::runtime_error(path + ": unsupported endianness '" + value + "'");
        } else if (key == "layout") {
            if (value != "theta-major then row-major y then x")
                throw std::runtime_error(path + ": unsupported layout '" + value + "'");
        } else if (key == "command") {
            file.header.command = value;
        } else if (key == "payload") {
            declared_payload = detail::parse_u64(key, value);
            saw_payload = true;
        }
        // Unknown keys pass through silently so old readers survive new fields.
    }
    if (!saw_end) throw std::runtime_error(path + ": missing end marker");
    if (file.header.role != "stack" && file.header.role != "score")
        throw std::runtime_error(path + ": role must be stack or score");
    if (file.header.width < 1 || file.header.height < 1 || file.header.n_orientations < 1)
        throw std::runtime_error(path + ": bad geometry");
    const std::uint64_t expected = std::uint64_t(file.header.n_orientations) *
                                   std::uint64_t(file.header.width) *
                                   std::uint64_t(file.header.height) * 16;
    if (!saw_payload || declared_payload != expected)
        throw std::runtime_error(path + ": payload size disagrees with geometry");

    file.slices.assign(size_t(file.header.n_orientations),
                       ComplexImage(file.header.width, file.header.height));
    for (auto& slice : file.slices) {
        in.read(reinterpret_cast<char*>(slice.data.data()),
                std::streamsize(slice.data.size() * sizeof(std::complex<double>)));
        if (in.gcount() !=
            std::streamsize(slice.data.size() * sizeof(std::complex<double>)))
            throw std::runtime_error(path + ": truncated payload");
    }
    return file;
}

inline void write_stack(const std::string& path, const CakeWaveletStack& stack,
                        const std::string& command) {
    OstHeader header;
    header.role = "stack";
    header.width = stack.width;
    header.height = stack.height;
    header.n_orientations = stack.n_orientations;
    header.spline_order = stack.spline_order;
    header.radial = stack.radial;
    header.dc_policy = stack.dc_policy;
    header.command = command;
    write_ost(path, header, stack.fourier_slices);
}

inline CakeWaveletStack read_stack(const std::string& path) {
    auto file = read_ost(path);
    if (file.header.role != "stack")
        throw std::runtime_error(path + ": expected a stack, found a " + file.header.role);
    CakeWaveletStack stack;
    stack.width = file.header.width;
    stack.height = file.header.height;
    stack.n_orientations = file.header.n_orientations;
    stack.spline_order = file.header.spline_order;
    stack.radial = file.header.radial;
    stack.dc_policy = file.header.dc_policy;
    stack.fourier_slices = std::move(file.slices);
    return stack;
}

inline void write_score(const std::string& path, const OrientationScore& score,
                        const std::string& command) {
    OstHeader header;
    header.role = "score";
    header.width = score.width;
    header.height = score.height;
    header.n_orientations = score.n_orientations;
    header.spline_order = score.spline_order;
    header.radial = score.radial;
    header.dc_policy = score.dc_policy;
    header.command = command;
    write_ost(path, header, score.slices);
}

inline OrientationScore read_score(const std::string& path) {
    auto file = read_ost(path);
    if (file.header.role != "score")
        throw std::runtime_error(path + ": expected a score, found a " + file.header.role);
    OrientationScore score;
    score.width = file.header.width;
    score.height = file.header.height;
    score.n_orientations = file.header.n_orientations;
    score.spline_order = file.header.spline_order;
    score.radial = file.header.radial;
    score.dc_policy = file.header.dc_policy;
    score.slices = std::move(file.slices);
    return score;
}

namespace detail {

// Next PGM header token; consumes the single whitespace that terminates it,
// which after maxval is exactly the separator before the raw pixel block.
inline std::string next_pgm_token(std::istream& in, std::vector<std::string>& comments) {
    std::string token;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            std::string rest;
            std::getline(in, rest);
            comments.push_back(rest);
            continue;
        }
        if (std::isspace(ch)) {
            if (!token.empty()) break;
            continue;
        }
        token.push_back(char(ch));
    }
    return token;
}

inline std::string sidecar_path(const std::string& path) { return path + ".f64"; }

} // namespace detail

// 8- or 16-bit binary PGM. Pixels map linearly onto [lo, hi]; the range rides
// along as a comment so a plain reload lands near the original values, and the
// float64 sidecar (written next to the image) restores them exactly. 16-bit
// samples are most-significant-byte first, as the format demands.
inline void write_pgm(const std::string& path, const RealImage& image, int maxval,
                      const std::vector<std::string>& comments, bool sidecar) {
    if (maxval != 255 && maxval != 65535)
        throw std::invalid_argument("write_pgm: maxval must be 255 or 65535");
    if (image.width < 1 || image.height < 1 || image.data.empty())
        throw std::invalid_argument("write_pgm: empty image");

    double lo = image.data[0], hi = image.data[0];
    for (double v : image.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "P5\n";
    out << "# range " << detail::format_double(lo) << " " << detail::format_double(hi)
        << "\n";
    for (const auto& c : comments) out << "# " << c << "\n";
    out << image.width << " " << image.height << "\n" << maxval << "\n";
    for (double v : image.data) {
        const double scaled = span == 0.0 ? 0.0 : (v - lo) / span * maxval;
        long pixel = std::lround(scaled);
        pixel = std::max(0l, std::min(long(maxval), pixel));
        if (maxval == 255) {
            out.put(char(pixel));
        } else {
            out.put(char(pixel >> 8));
            out.put(char(pixel & 0xff));
        }
    }
    if (!out) throw std::runtime_error("short write to " + path);

    if (sidecar) {
        std::ofstream raw(detail::sidecar_path(path), std::ios::binary);
        if (!raw) throw std::runtime_error("cannot open " + detail::sidecar_path(path));
        raw.write(reinterpret_cast<const char*>(image.data.data()),
                  std::streamsize(image.data.size() * sizeof(double)));
        if (!raw) throw std::runtime_error("short write to " + detail::sidecar_path(path));
    }
}

inline RealImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::vector<std::string> comments;
    if (detail::next_pgm_token(in, comments) != "P5")
        throw std::runtime_error(path + ": not a binary PGM");
    const int width = detail::parse_int("width", detail::next_pgm_token(in, comments));
    const int height = detail::parse_int("height", detail::next_pgm_token(in, comments));
    const int maxval = detail::parse_int("maxval", detail::next_pgm_token(in, comments));
    if (width < 1 || height < 1) throw std::runtime_error(path + ": bad dimensions");
    if (maxval != 255 && maxval != 65535)
        throw std::runtime_error(path + ": maxval must be 255 or 65535");

    RealImage image(width, height);

    // A matching sidecar wins over the quantized pixels.
    const auto sidecar = detail::sidecar_path(path);
    std::error_code ec;
    if (std::filesystem::exists(sidecar, ec) &&
        std::filesystem::file_size(sidecar, ec) == image.data.size() * sizeof(double)) {
        std::ifstream raw(sidecar, std::ios::binary);
        raw.read(reinterpret_cast<char*>(image.data.data()),
                 std::streamsize(image.data.size() * sizeof(double)));
        if (raw.gcount() == std::streamsize(image.data.size() * sizeof(double)))
            return image;
    }

    double lo = 0.0, hi = 1.0;
    for (const auto& comment : comments) {
        std::istringstream parts(comment);
        std::string tag;
        double a = 0.0, b = 0.0;
        if (parts >> tag >> a >> b && tag == "range") {
            lo = a;
            hi = b;
        }
    }

    const size_t bytes_per_pixel = maxval == 255 ? 1 : 2;
    std::vector<unsigned char> raw(image.data.size() * bytes_per_pixel);
    in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
    if (in.gcount() != std::streamsize(raw.size()))
        throw std::runtime_error(path + ": truncated pixel data");
    for (size_t i = 0; i < image.data.size(); ++i) {
        const unsigned pixel = maxval == 255
                                   ? raw[i]
                                   : (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
        image.data[i] = lo + (hi - lo) * double(pixel) / double(maxval);
    }
    return image;
}

} // namespace ost
