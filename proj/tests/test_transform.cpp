#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <ost/transform.hpp>

#include "test_util.hpp"

using std::numbers::pi;

namespace {

double rel_l2(const ost::RealImage& got, const ost::RealImage& want) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < got.data.size(); ++i) {
        const double d = got.data[i] - want.data[i];
        num += d * d;
        den += want.data[i] * want.data[i];
    }
    return std::sqrt(num / den);
}

double max_abs_diff(const ost::OrientationScore& a, const ost::OrientationScore& b) {
    double worst = 0.0;
    for (size_t j = 0; j < a.slices.size(); ++j)
        for (size_t i = 0; i < a.slices[j].data.size(); ++i)
            worst = std::max(worst, std::abs(a.slices[j].data[i] - b.slices[j].data[i]));
    return worst;
}

double score_max_abs(const ost::OrientationScore& s) {
    double worst = 0.0;
    for (const auto& slice : s.slices)
        for (const auto& v : slice.data) worst = std::max(worst, std::abs(v));
    return worst;
}

double slice_sq_sum(const ost::ComplexImage& s) {
    double acc = 0.0;
    for (const auto& v : s.data) acc += std::norm(v);
    return acc;
}

} // namespace

TEST_CASE("disk limiting keeps constants and drops the checkerboard", "[transform]") {
    ost::RealImage flat(32, 32);
    for (auto& v : flat.data) v = 0.7;
    const auto kept = ost::disk_limit(flat, 0.8);
    for (const auto& v : kept.image.data) REQUIRE(v == Catch::Approx(0.7).margin(1e-14));
    REQUIRE(kept.discarded_energy_fraction < 1e-25);

    // The pure-Nyquist checkerboard lives entirely outside the disk.
    ost::RealImage check(64, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) check.at(x, y) = ((x + y) % 2 == 0) ? 1.0 : -1.0;
    const auto gone = ost::disk_limit(check, 0.8);
    for (const auto& v : gone.image.data) REQUIRE(std::fabs(v) < 1e-13);
    REQUIRE(gone.discarded_energy_fraction > 1.0 - 1e-12);

    CHECK_THROWS_AS(ost::disk_limit(flat, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ost::disk_limit(flat, 1.0001), std::invalid_argument);
}

TEST_CASE("disk limiting removes the expected share of noise energy", "[transform]") {
    const int n = 128;
    const double rho0 = 0.8;
    double mean = 0.0;
    for (int seed = 0; seed < 20; ++seed)
        mean += ost::disk_limit(test_util::random_image(n, n, 4200 + seed), rho0)
                    .discarded_energy_fraction;
    mean /= 20.0;

    // Flat-spectrum expectation: the removed share is the area ratio of the
    // disk complement, refined by the exact count of excluded bins.
    const double area_ratio = 1.0 - pi * rho0 * rho0 / 4.0;
    REQUIRE(std::fabs(mean - area_ratio) / area_ratio < 0.10);

    int outside = 0;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const int fx = ix < (n + 1) / 2 ? ix : ix - n;
            const int fy = iy < (n + 1) / 2 ? iy : iy - n;
            const double wx = 2.0 * pi * fx / n;
            const double wy = 2.0 * pi * fy / n;
            if (std::sqrt(wx * wx + wy * wy) >= rho0 * pi) ++outside;
        }
    }
    const double bin_ratio = double(outside) / double(n * n);
    REQUIRE(std::fabs(mean - bin_ratio) < 0.02);
}

TEST_CASE("lifting matches a brute-force spatial correlation", "[transform]") {
    const int n = 32;
    const auto stack = ost::build_stack(n, n, 8, 3, {0.8, ost::HardEdge{}});
    const auto f = test_util::random_image(n, n, 7);
    const auto score = ost::lift(f, stack);
    for (int m : {0, 3}) {
        const auto psi = test_util::brute_inverse_dft(stack.fourier_slices[size_t(m)]);
        for (int y = 0; y < n; ++y) {
            for (int x = 0; x < n; ++x) {
                std::complex<double> acc = 0.0;
                for (int sy = 0; sy < n; ++sy)
                    for (int sx = 0; sx < n; ++sx)
                        acc += f.at(sx, sy) *
                               std::conj(psi.at((sx - x + n) % n, (sy - y + n) % n));
                REQUIRE(std::abs(score.slices[size_t(m)].at(x, y) - acc) < 1e-12);
            }
        }
    }
    CHECK_THROWS_AS(ost::lift(test_util::random_image(16, 16, 1), stack),
                    std::invalid_argument);
}

TEST_CASE("lifting a kernel peaks at its own center", "[transform]") {
    const int n = 32;
    const auto stack = ost::build_stack(n, n, 8, 3, {0.8, ost::HardEdge{}});
    const auto kernel = ost::spatial_kernel(stack, 3);
    ost::RealImage f(n, n);
    for (size_t i = 0; i < f.data.size(); ++i) f.data[i] = kernel.data[i].real();
    const auto score = ost::lift(f, stack);
    const auto& slice = score.slices[3];
    int best_x = -1, best_y = -1;
    double best = -1.0;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            if (std::abs(slice.at(x, y)) > best) {
                best = std::abs(slice.at(x, y));
                best_x = x;
                best_y = y;
            }
        }
    }
    REQUIRE(best_x == n / 2);
    REQUIRE(best_y == n / 2);
}

TEST_CASE("lifting is linear", "[transform]") {
    const int n = 32;
    const auto stack = ost::build_stack(n, n, 6, 2, {0.8, ost::HardEdge{}});
    const auto f = test_util::random_image(n, n, 11);
    const auto g = test_util::random_image(n, n, 12);
    ost::RealImage mix(n, n);
    for (size_t i = 0; i < mix.data.size(); ++i)
        mix.data[i] = 2.5 * f.data[i] - 1.25 * g.data[i];
    const auto sf = ost::lift(f, stack);
    const auto sg = ost::lift(g, stack);
    const auto sm = ost::lift(mix, stack);
    double worst = 0.0;
    for (size_t j = 0; j < sm.slices.size(); ++j)
        for (size_t i = 0; i < sm.slices[j].data.size(); ++i)
            worst = std::max(worst, std::abs(sm.slices[j].data[i] -
                                             (2.5 * sf.slices[j].data[i] -
                                              1.25 * sg.slices[j].data[i])));
    REQUIRE(worst < 1e-12);
}

TEST_CASE("lines light up the slices facing their spectrum", "[transform]") {
    // A vertical line's spectrum sits on the horizontal frequency axis, which
    // the theta = pi/2 and theta = 3 pi/2 slices cover (the base slice sits on
    // the vertical axis and answers to horizontal lines).
    const int n = 64;
    const auto stack = ost::build_stack(n, n, 8, 3, {0.8, ost::HardEdge{}});

    ost::RealImage vertical(n, n);
    for (int y = 0; y < n; ++y) vertical.at(20, y) = 1.0;
    const auto vs = ost::lift(ost::disk_limit(vertical, 0.8).image, stack);
    std::vector<double> ve;
    for (const auto& slice : vs.slices) ve.push_back(slice_sq_sum(slice));
    REQUIRE(ve[2] == Catch::Approx(ve[6]).epsilon(1e-9));
    for (int m : {0, 1, 3, 4, 5, 7}) REQUIRE(ve[2] > 4.0 * ve[size_t(m)]);

    ost::RealImage horizontal(n, n);
    for (int x = 0; x < n; ++x) horizontal.at(x, 37) = 1.0;
    const auto hs = ost::lift(ost::disk_limit(horizontal, 0.8).image, stack);
    std::vector<double> he;
    for (const auto& slice : hs.slices) he.push_back(slice_sq_sum(slice));
    REQUIRE(he[0] == Catch::Approx(he[4]).epsilon(1e-9));
    for (int m : {1, 2, 3, 5, 6, 7}) REQUIRE(he[0] > 4.0 * he[size_t(m)]);
}

TEST_CASE("reconstruction inverts the lift on the disk", "[transform]") {
    const int n = 64;
    const auto stack = ost::build_stack(n, n, 8, 3, {0.8, ost::HardEdge{}});
    for (int seed = 0; seed < 20; ++seed) {
        const auto f = test_util::random_image(n, n, 9000 + seed);
        const auto limited = ost::disk_limit(f, 0.8);
        const auto score = ost::lift(limited.image, stack);
        const auto back = ost::reconstruct_fast(score);
        REQUIRE(rel_l2(back, limited.image) < 1e-12);
        REQUIRE(ost::reconstruct_imag_residual(score) < 1e-12);

        // The round trip loses exactly the energy disk limiting removed.
        double lost = 0.0, total = 0.0;
        for (size_t i = 0; i < f.data.size(); ++i) {
            const double d = f.data[i] - back.data[i];
            lost += d * d;
            total += f.data[i] * f.data[i];
        }
        REQUIRE(lost / total ==
                Catch::Approx(limited.discarded_energy_fraction).margin(1e-12));
    }

    ost::OrientationScore zero;
    zero.width = 16;
    zero.height = 16;
    zero.n_orientations = 2;
    zero.slices.assign(2, ost::ComplexImage(16, 16));
    const auto image = ost::reconstruct_fast(zero);
    for (const auto& v : image.data) REQUIRE(v == 0.0);
}

TEST_CASE("shift twist identity and integer shifts are exact", "[transform]") {
    const int n = 32;
    const auto stack = ost::build_stack(n, n, 4, 1, {0.8, ost::HardEdge{}});
    const auto score = ost::lift(test_util::random_image(n, n, 21), stack);

    const auto same = ost::shift_twist(score, ost::GroupElement{});
    for (size_t j = 0; j < score.slices.size(); ++j)
        for (size_t i = 0; i < score.slices[j].data.size(); ++i)
            REQUIRE(same.slices[j].data[i] == score.slices[j].data[i]);

    // With N = 4 every alpha_j is a quarter turn, so the rotated integer shift
    // snaps to an exact circular roll on every slice.
    const ost::GroupElement g{{3.0, -2.0}, 1};
    const auto moved = ost::shift_twist(score, g);
    const int shifts[4][2] = {{3, -2}, {2, 3}, {-3, 2}, {-2, -3}}; // R_{alpha_j}(3,-2)
    for (int j = 0; j < 4; ++j) {
        const auto& src = score.slices[size_t((j + 1) % 4)];
        const int sx = ((shifts[j][0] % n) + n) % n;
        const int sy = ((shifts[j][1] % n) + n) % n;
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                REQUIRE(moved.slices[size_t(j)].at(x, y) ==
                        src.at((x + sx) % n, (y + sy) % n));
    }
}

TEST_CASE("shift twists compose along the group product", "[transform]") {
    const auto stack = ost::build_stack(48, 32, 8, 3, {0.8, ost::HardEdge{}});
    const auto score = ost::lift(test_util::random_image(48, 32, 33), stack);
    const ost::GroupElement g{{1.3, -0.7}, 3};
    const ost::GroupElement h{{-2.1, 0.4}, 6};

    const auto two_step = ost::shift_twist(ost::shift_twist(score, g), h);
    const auto one_step = ost::shift_twist(score, ost::group_product(h, g, 8));
    REQUIRE(max_abs_diff(two_step, one_step) < 1e-12);

    // The group is noncommutative; the reversed product lands elsewhere.
    const auto wrong = ost::shift_twist(score, ost::group_product(g, h, 8));
    REQUIRE(max_abs_diff(two_step, wrong) > 1e-4 * score_max_abs(score));
}

TEST_CASE("a centered trained atom reduces to disk limiting", "[transform]") {
    const int n = 32;
    const auto f = test_util::random_image(n, n, 41);
    const ost::TrainedKernelModel model{0.8, {{1.0, {0, 0}}}};
    const auto score = ost::lift_trained(f, model, 4);
    const auto limited = ost::disk_limit(f, 0.8);
    for (size_t j = 1; j < score.slices.size(); ++j)
        for (size_t i = 0; i < score.slices[j].data.size(); ++i)
            REQUIRE(score.slices[j].data[i] == score.slices[0].data[i]);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            REQUIRE(score.slices[0].at(x, y).real() ==
                    Catch::Approx(limited.image.at(x, y)).margin(1e-13));
            REQUIRE(std::fabs(score.slices[0].at(x, y).imag()) < 1e-13);
        }
    }
}

TEST_CASE("trained lifting matches brute-force correlation", "[transform]") {
    const int n = 16;
    const auto f = test_util::random_image(n, n, 55);
    const ost::TrainedKernelModel model{0.8, {{0.7, {1, 0}}, {-0.3, {2, -3}}}};
    const int n_orient = 8;
    const auto score = ost::lift_trained(f, model, n_orient);

    const int m = 2;
    const double theta = 2.0 * pi * m / n_orient;
    ost::ComplexImage filt(n, n);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const int fx = ix < (n + 1) / 2 ? ix : ix - n;
            const int fy = iy < (n + 1) / 2 ? iy : iy - n;
            const double wx = 2.0 * pi * fx / n;
            const double wy = 2.0 * pi * fy / n;
            if (std::sqrt(wx * wx + wy * wy) >= 0.8 * pi) continue;
            std::complex<double> acc = 0.0;
            for (const auto& atom : model.atoms) {
                const double rx = std::cos(theta) * atom.offset[0] -
                                  std::sin(theta) * atom.offset[1];
                const double ry = std::sin(theta) * atom.offset[0] +
                                  std::cos(theta) * atom.offset[1];
                acc += atom.coefficient * std::polar(1.0, -(wx * rx + wy * ry));
            }
            filt.at(ix, iy) = acc;
        }
    }
    const auto psi = test_util::brute_inverse_dft(filt);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            std::complex<double> acc = 0.0;
            for (int sy = 0; sy < n; ++sy)
                for (int sx = 0; sx < n; ++sx)
                    acc += f.at(sx, sy) *
                           std::conj(psi.at((sx - x + n) % n, (sy - y + n) % n));
            REQUIRE(std::abs(score.slices[m].at(x, y) - acc) < 1e-12);
        }
    }
}

TEST_CASE("a unit offset atom shifts the disk-limited image", "[transform]") {
    const int n = 32;
    const auto f = test_util::random_image(n, n, 61);
    const auto limited = ost::disk_limit(f, 0.8).image;
    const auto score =
        ost::lift_trained(f, ost::TrainedKernelModel{0.8, {{1.0, {1, 0}}}}, 4);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            REQUIRE(score.slices[0].at(x, y).real() ==
                    Catch::Approx(limited.at((x + 1) % n, y)).margin(1e-12));
}

TEST_CASE("trained lifting is linear in the coefficients", "[transform]") {
    const int n = 32;
    const auto f = test_util::random_image(n, n, 71);
    const ost::TrainedKernelModel a{0.8, {{1.0, {2, 1}}}};
    const ost::TrainedKernelModel b{0.8, {{1.0, {-3, 4}}}};
    const ost::TrainedKernelModel mix{0.8, {{0.6, {2, 1}}, {-1.7, {-3, 4}}}};
    const auto sa = ost::lift_trained(f, a, 6);
    const auto sb = ost::lift_trained(f, b, 6);
    const auto sm = ost::lift_trained(f, mix, 6);
    double worst = 0.0;
    for (size_t j = 0; j < sm.slices.size(); ++j)
        for (size_t i = 0; i < sm.slices[j].data.size(); ++i)
            worst = std::max(worst,
                             std::abs(sm.slices[j].data[i] - (0.6 * sa.slices[j].data[i] -
                                                              1.7 * sb.slices[j].data[i])));
    REQUIRE(worst < 1e-12);
}

TEST_CASE("trained model validation", "[transform]") {
    const auto f = test_util::random_image(16, 16, 81);
    CHECK_THROWS_AS(ost::lift_trained(f, ost::TrainedKernelModel{0.8, {}}, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        ost::lift_trained(f, ost::TrainedKernelModel{0.0, {{1.0, {0, 0}}}}, 4),
        std::invalid_argument);
    CHECK_THROWS_AS(
        ost::lift_trained(f, ost::TrainedKernelModel{0.8, {{1.0, {8, 0}}}}, 4),
        std::invalid_argument);
    CHECK_THROWS_AS(
        ost::lift_trained(f, ost::TrainedKernelModel{0.8, {{1.0, {0, -9}}}}, 4),
        std::invalid_argument);
    CHECK_THROWS_AS(
        ost::lift_trained(f, ost::TrainedKernelModel{0.8, {{1.0, {0, 0}}}}, 0),
        std::invalid_argument);
}

TEST_CASE("expanding a trained kernel enumerates atoms times orientations", "[transform]") {
    const ost::TrainedKernelModel model{0.8, {{0.25, {1, 2}}, {-1.0, {0, -3}}}};
    const auto terms = ost::expand_trained_kernel(model, 4);
    REQUIRE(terms.size() == 8);
    for (const auto& t : terms) {
        const bool first = t.element.x[0] == 1.0 && t.element.x[1] == 2.0;
        REQUIRE(t.coefficient == (first ? 0.25 : -1.0));
        REQUIRE(t.element.m >= 0);
        REQUIRE(t.element.m < 4);
    }

    // Reordering the atoms permutes the list but not its contents.
    const ost::TrainedKernelModel swapped{0.8, {{-1.0, {0, -3}}, {0.25, {1, 2}}}};
    auto lhs = ost::expand_trained_kernel(model, 4);
    auto rhs = ost::expand_trained_kernel(swapped, 4);
    auto key = [](const ost::WeightedGroupElement& t) {
        return std::make_tuple(t.coefficient, t.element.x[0], t.element.x[1], t.element.m);
    };
    auto by_key = [&](const ost::WeightedGroupElement& a,
                      const ost::WeightedGroupElement& b) { return key(a) < key(b); };
    std::sort(lhs.begin(), lhs.end(), by_key);
    std::sort(rhs.begin(), rhs.end(), by_key);
    REQUIRE(lhs.size() == rhs.size());
    for (size_t i = 0; i < lhs.size(); ++i) REQUIRE(key(lhs[i]) == key(rhs[i]));
}

TEST_CASE("trained kernels are spanned by twisted cake lifts", "[transform]") {
    const int n = 64;
    const auto stack = ost::build_stack(n, n, 8, 3, {0.8, ost::HardEdge{}});
    const auto f = ost::disk_limit(test_util::random_image(n, n, 91), 0.8).image;

    test_util::Uniform01 rng(92);
    ost::TrainedKernelModel model;
    model.rho0 = 0.8;
    for (int i = 0; i < 5; ++i)
        model.atoms.push_back({rng.next_in(-1.0, 1.0),
                               {int(rng.next_in(-8.0, 8.0)), int(rng.next_in(-8.0, 8.0))}});
    REQUIRE(ost::equivalence_residual(f, model, stack) < 1e-10);

    // The identity needs the hard edge on both sides; a smooth taper on the
    // stack leaves a genuine gap, and that gap scales linearly with the input.
    const auto tapered = ost::build_stack(n, n, 8, 3, {0.8, ost::ErfTaper{0.2}});
    const double gap = ost::equivalence_residual(f, model, tapered);
    REQUIRE(gap > 1e-6);
    ost::RealImage scaled(n, n);
    for (size_t i = 0; i < f.data.size(); ++i) scaled.data[i] = 3.0 * f.data[i];
    REQUIRE(ost::equivalence_residual(scaled, model, tapered) ==
            Catch::Approx(3.0 * gap).epsilon(1e-10));

    ost::TrainedKernelModel zero{0.8, {{0.0, {3, 1}}}};
    REQUIRE(ost::equivalence_residual(f, zero, stack) == 0.0);

    ost::TrainedKernelModel mismatched{0.7, {{1.0, {0, 0}}}};
    CHECK_THROWS_AS(ost::equivalence_residual(f, mismatched, stack),
                    std::invalid_argument);
}

TEST_CASE("the lift is equivariant to shifts and quarter turns", "[transform]") {
    const int n = 64;
    const auto stack = ost::build_stack(n, n, 8, 3, {0.8, ost::HardEdge{}});
    const auto f = test_util::random_image(n, n, 101);
    const auto score = ost::lift(f, stack);

    ost::RealImage shifted(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) shifted.at(x, y) = f.at((x + 5) % n, (y + n - 3) % n);
    const auto ss = ost::lift(shifted, stack);
    double worst = 0.0;
    for (size_t j = 0; j < ss.slices.size(); ++j)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                worst = std::max(worst,
                                 std::abs(ss.slices[j].at(x, y) -
                                          score.slices[j].at((x + 5) % n, (y + n - 3) % n)));
    REQUIRE(worst < 1e-12);

    // Quarter turn: slices roll by N/4 while pixels rotate.
    ost::RealImage turned(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) turned.at(x, y) = f.at(y, (n - x) % n);
    const auto ts = ost::lift(turned, stack);
    worst = 0.0;
    for (int j = 0; j < 8; ++j) {
        const auto& rolled = score.slices[size_t((j + 6) % 8)];
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                worst = std::max(worst, std::abs(ts.slices[size_t(j)].at(x, y) -
                                                 rolled.at(y, (n - x) % n)));
    }
    REQUIRE(worst < 1e-12);
}

TEST_CASE("slice energy matches the frame diagonal", "[transform]") {
    const auto stack = ost::build_stack(48, 32, 6, 2, {0.8, ost::HardEdge{}});
    const auto f = test_util::random_image(48, 32, 111);
    const auto score = ost::lift(f, stack);
    double total = 0.0;
    for (const auto& slice : score.slices) total += slice_sq_sum(slice);

    const auto mp = ost::m_psi(stack);
    const auto fhat = ost::fft2_forward(ost::to_complex(f));
    double want = 0.0;
    for (size_t i = 0; i < mp.data.size(); ++i) want += mp.data[i] * std::norm(fhat.data[i]);
    want /= double(48 * 32);
    REQUIRE(total == Catch::Approx(want).epsilon(1e-10));
}
