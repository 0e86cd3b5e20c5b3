// Command-line front end: builds cake wavelet stacks, lifts images to
// orientation scores and reconstructs them, and emits the angular-profile
// tables behind the uncertainty experiments.
//
// Exit codes: 0 success, 1 a computed quantity missed its acceptance
// threshold, 2 usage or validation error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <ost/io.hpp>
#include <ost/rng.hpp>
#include <ost/transform.hpp>
#include <ost/uncertainty.hpp>

namespace {

std::string fmt(double v) { return ost::detail::format_double(v); }

std::string join(const std::vector<double>& values) {
    std::string out;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += fmt(values[i]);
    }
    return out;
}

std::string join(const std::vector<int>& values) {
    std::string out;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(values[i]);
    }
    return out;
}

void require_positive_lambdas(const std::vector<double>& lambdas) {
    if (lambdas.empty()) throw std::invalid_argument("need at least one lambda");
    for (double l : lambdas)
        if (!(l > 0.0)) throw std::invalid_argument("lambdas must be positive");
}

// Table text goes to the named file, or to stdout when no path is given.
void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("short write to " + out_path);
}

struct WaveletsArgs {
    int size = 64;
    int width = 0;
    int height = 0;
    int orientations = 8;
    int spline_order = 3;
    double rho0 = 0.8;
    std::string taper = "hard";
    double taper_width = 0.1;
    std::string out;
    int kernel_index = -1;
    std::string kernel_out;
};

int cmd_wavelets(const WaveletsArgs& a) {
    const int width = a.width > 0 ? a.width : a.size;
    const int height = a.height > 0 ? a.height : a.size;

    ost::RadialProfileSpec radial;
    radial.rho0 = a.rho0;
    if (a.taper == "erf")
        radial.taper = ost::ErfTaper{a.taper_width};
    else
        radial.taper = ost::HardEdge{};

    const auto stack =
        ost::build_stack(width, height, a.orientations, a.spline_order, radial);

    std::ostringstream cmd;
    cmd << "wavelets --width " << width << " --height " << height << " --orientations "
        << a.orientations << " --spline-order " << a.spline_order << " --rho0 "
        << fmt(a.rho0) << " --taper " << a.taper;
    if (a.taper == "erf") cmd << " --taper-width " << fmt(a.taper_width);
    ost::write_stack(a.out, stack, cmd.str());

    if (!a.kernel_out.empty()) {
        if (a.kernel_index < 0)
            throw std::invalid_argument("--kernel-out needs --kernel-index");
        const auto kernel = ost::spatial_kernel(stack, a.kernel_index);
        ost::RealImage real(kernel.width, kernel.height);
        for (size_t i = 0; i < real.data.size(); ++i)
            real.data[i] = kernel.data[i].real();
        ost::write_pgm(a.kernel_out, real, 65535,
                       {"command " + cmd.str() + " --kernel-index " +
                        std::to_string(a.kernel_index)},
                       true);
    }
    return 0;
}

struct LiftArgs {
    std::string image;
    std::string stack;
    std::string out;
};

int cmd_lift(const LiftArgs& a) {
    const auto f = ost::read_pgm(a.image);
    const auto stack = ost::read_stack(a.stack);
    const auto score = ost::lift(f, stack);
    ost::write_score(a.out, score, "lift --image " + a.image + " --stack " + a.stack);
    return 0;
}

struct ReconstructArgs {
    std::string score;
    std::string out;
    std::string reference;
};

int cmd_reconstruct(const ReconstructArgs& a) {
    const auto score = ost::read_score(a.score);
    const auto image = ost::reconstruct_fast(score);
    ost::write_pgm(a.out, image, 65535, {"command reconstruct --score " + a.score},
                   true);

    if (!a.reference.empty()) {
        const auto reference = ost::read_pgm(a.reference);
        if (reference.width != score.width || reference.height != score.height)
            throw std::invalid_argument("reference dimensions do not match the score");
        const auto limited = ost::disk_limit(reference, score.radial.rho0).image;
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < image.data.size(); ++i) {
            const double d = image.data[i] - limited.data[i];
            num += d * d;
            den += limited.data[i] * limited.data[i];
        }
        std::cout << "relative_l2 " << fmt(den > 0.0 ? std::sqrt(num / den) : 0.0)
                  << "\n";
    }
    return 0;
}

struct UgArgs {
    std::vector<double> lambdas;
    std::vector<int> orders{3, 6, 9, 12};
    int grid = 8192;
    std::string out;
};

int cmd_ug(UgArgs a) {
    if (a.lambdas.empty())
        for (int i = 1; i <= 20; ++i) a.lambdas.push_back(i / 20.0);
    require_positive_lambdas(a.lambdas);

    ost::QuadratureConfig config;
    config.grid_size = a.grid;
    const auto table = ost::ug_convergence_table(a.orders, a.lambdas, config);

    std::ostringstream text;
    text << "# uncertainty gaps of angular profiles, one row per lambda\n";
    text << "# command ug --lambdas " << join(a.lambdas) << " --orders "
         << join(a.orders) << " --grid " << a.grid << "\n";
    text << "# columns lambda optimal gauss";
    for (int k : a.orders) text << " cake_k" << k;
    text << "\n";
    for (size_t row = 0; row < a.lambdas.size(); ++row) {
        text << fmt(a.lambdas[row]) << "\t" << fmt(table.ug_opt[row]) << "\t"
             << fmt(table.ug_gauss[row]);
        for (size_t ki = 0; ki < a.orders.size(); ++ki)
            text << "\t" << fmt(table.ug_cake[ki][row]);
        text << "\n";
    }
    emit(a.out, text.str());
    return 0;
}

struct ProfilesArgs {
    double lambda = 0.2;
    int grid = 512;
    std::string out;
};

int cmd_profiles(const ProfilesArgs& a) {
    require_positive_lambdas({a.lambda});
    const std::vector<int> orders{3, 6, 9, 12};

    std::vector<ost::AngularProfileSpec> specs;
    specs.push_back(ost::VonMises{a.lambda});
    specs.push_back(ost::WrappedGaussian{a.lambda});
    for (int k : orders)
        specs.push_back(ost::CakeBSpline{ost::n_of_lambda(k, a.lambda), k});

    std::vector<std::vector<double>> columns;
    for (const auto& spec : specs) {
        std::vector<double> column(size_t(a.grid));
        double peak = 0.0;
        for (int m = 0; m < a.grid; ++m) {
            column[size_t(m)] = ost::eval_profile(spec, ost::circle_grid_point(m, a.grid));
            peak = std::max(peak, std::fabs(column[size_t(m)]));
        }
        for (auto& v : column) v /= peak;
        columns.push_back(std::move(column));
    }

    std::ostringstream text;
    text << "# angular profiles at matched spread, peak-normalized\n";
    text << "# command profiles --lambda " << fmt(a.lambda) << " --grid " << a.grid
         << "\n";
    text << "# columns phi optimal gauss";
    for (int k : orders) text << " cake_k" << k;
    text << "\n";
    for (int m = 0; m < a.grid; ++m) {
        text << fmt(ost::circle_grid_point(m, a.grid));
        for (const auto& column : columns) text << "\t" << fmt(column[size_t(m)]);
        text << "\n";
    }
    emit(a.out, text.str());
    return 0;
}

struct BoundArgs {
    std::vector<double> lambdas;
    int grid = 8192;
    std::string out;
};

int cmd_bound(BoundArgs a) {
    if (a.lambdas.empty())
        for (int i = 1; i <= 10; ++i) a.lambdas.push_back(i / 10.0);
    require_positive_lambdas(a.lambdas);

    ost::QuadratureConfig config;
    config.grid_size = a.grid;

    std::ostringstream text;
    text << "# closed-form gap bound for the wrapped gaussian profile vs its "
            "quadrature value\n";
    text << "# command bound --lambdas " << join(a.lambdas) << " --grid " << a.grid
         << "\n";
    text << "# columns lambda bound gauss\n";
    for (double lambda : a.lambdas) {
        const double bound = ost::ug_upper_bound_wrapped_gaussian(lambda);
        const double gauss =
            ost::uncertainty_gap(ost::WrappedGaussian{lambda}, 1.0, config).ug;
        text << fmt(lambda) << "\t" << fmt(bound) << "\t" << fmt(gauss) << "\n";
    }
    emit(a.out, text.str());
    return 0;
}

struct EquivalenceArgs {
    int atoms = 5;
    int size = 64;
    int orientations = 8;
    int spline_order = 3;
    double rho0 = 0.8;
    int images = 3;
    std::uint64_t seed = 0;
};

int cmd_equivalence(const EquivalenceArgs& a) {
    const auto stack = ost::build_stack(a.size, a.size, a.orientations, a.spline_order,
                                        {a.rho0, ost::HardEdge{}});

    std::uint64_t stream = a.seed;
    ost::Rng model_rng(ost::splitmix64(stream));

    ost::TrainedKernelModel model;
    model.rho0 = a.rho0;
    const int lo = -a.size / 2;
    const int hi = (a.size + 1) / 2 - 1;
    for (int i = 0; i < a.atoms; ++i)
        model.atoms.push_back({model_rng.normal(),
                               {int(model_rng.uniform_int(lo, hi)),
                                int(model_rng.uniform_int(lo, hi))}});

    double worst = 0.0;
    for (int i = 0; i < a.images; ++i) {
        ost::Rng image_rng(ost::splitmix64(stream));
        ost::RealImage f(a.size, a.size);
        for (auto& v : f.data) v = image_rng.uniform_in(-0.5, 0.5);
        const auto limited = ost::disk_limit(f, a.rho0).image;
        worst = std::max(worst, ost::equivalence_residual(limited, model, stack));
    }

    std::cout << "seed " << a.seed << "\n";
    std::cout << "max_residual " << fmt(worst) << "\n";
    if (worst > 1e-8) {
        std::cerr << "residual above the 1e-08 threshold\n";
        return 1;
    }
    return 0;
}

struct StabilityArgs {
    std::string stack;
};

int cmd_stability(const StabilityArgs& a) {
    const auto stack = ost::read_stack(a.stack);
    try {
        const auto report = ost::stability_report(stack);
        std::cout << fmt(report.delta) << " " << fmt(report.peak) << " "
                  << fmt(report.cond_bound) << "\n";
    } catch (const std::domain_error& e) {
        std::cerr << "unstable band: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"orientation score toolkit"};
    app.require_subcommand(1);

    WaveletsArgs wavelets_args;
    auto* wavelets = app.add_subcommand("wavelets", "build a cake wavelet stack");
    wavelets->add_option("--size", wavelets_args.size, "square grid side")
        ->check(CLI::Range(8, 16384));
    wavelets->add_option("--width", wavelets_args.width, "grid width, overrides --size")
        ->check(CLI::Range(8, 16384));
    wavelets->add_option("--height", wavelets_args.height, "grid height, overrides --size")
        ->check(CLI::Range(8, 16384));
    wavelets->add_option("--orientations", wavelets_args.orientations, "slice count")
        ->check(CLI::Range(1, 4096));
    wavelets->add_option("--spline-order", wavelets_args.spline_order, "angular order")
        ->check(CLI::Range(0, 60));
    wavelets->add_option("--rho0", wavelets_args.rho0,
                         "disk radius as a fraction of Nyquist");
    wavelets->add_option("--taper", wavelets_args.taper, "radial edge")
        ->check(CLI::IsMember({"hard", "erf"}));
    wavelets->add_option("--taper-width", wavelets_args.taper_width,
                         "erf rolloff width");
    wavelets->add_option("--out", wavelets_args.out, "stack file to write")->required();
    wavelets->add_option("--kernel-index", wavelets_args.kernel_index,
                         "orientation whose spatial kernel to export");
    wavelets->add_option("--kernel-out", wavelets_args.kernel_out,
                         "kernel image file to write");

    LiftArgs lift_args;
    auto* lift = app.add_subcommand("lift", "lift an image to an orientation score");
    lift->add_option("--image", lift_args.image, "input image")->required();
    lift->add_option("--stack", lift_args.stack, "wavelet stack file")->required();
    lift->add_option("--out", lift_args.out, "score file to write")->required();

    ReconstructArgs reconstruct_args;
    auto* reconstruct =
        app.add_subcommand("reconstruct", "sum a score back into an image");
    reconstruct->add_option("--score", reconstruct_args.score, "score file")->required();
    reconstruct->add_option("--out", reconstruct_args.out, "image file to write")
        ->required();
    reconstruct->add_option("--reference", reconstruct_args.reference,
                            "original image; prints the error against its "
                            "disk-limited part");

    UgArgs ug_args;
    auto* ug = app.add_subcommand("ug", "uncertainty gap table over lambda");
    ug->add_option("--lambdas", ug_args.lambdas, "spread values")->delimiter(',');
    ug->add_option("--orders", ug_args.orders, "spline orders")
        ->delimiter(',')
        ->check(CLI::Range(1, 60));
    ug->add_option("--grid", ug_args.grid, "quadrature grid size")
        ->check(CLI::Range(16, 1 << 22));
    ug->add_option("--out", ug_args.out, "table file; stdout when omitted");

    ProfilesArgs profiles_args;
    auto* profiles =
        app.add_subcommand("profiles", "sampled angular profiles at one spread");
    profiles->add_option("--lambda", profiles_args.lambda, "spread value");
    profiles->add_option("--grid", profiles_args.grid, "sample count")
        ->check(CLI::Range(8, 1 << 22));
    profiles->add_option("--out", profiles_args.out, "table file; stdout when omitted");

    BoundArgs bound_args;
    auto* bound = app.add_subcommand("bound", "closed-form gap bound vs quadrature");
    bound->add_option("--lambdas", bound_args.lambdas, "spread values")->delimiter(',');
    bound->add_option("--grid", bound_args.grid, "quadrature grid size")
        ->check(CLI::Range(16, 1 << 22));
    bound->add_option("--out", bound_args.out, "table file; stdout when omitted");

    EquivalenceArgs equivalence_args;
    auto* equivalence = app.add_subcommand(
        "equivalence", "check random trained kernels against twisted cake lifts");
    equivalence->add_option("--atoms", equivalence_args.atoms, "atoms in the model")
        ->check(CLI::Range(1, 4096));
    equivalence->add_option("--size", equivalence_args.size, "square grid side")
        ->check(CLI::Range(8, 16384));
    equivalence->add_option("--orientations", equivalence_args.orientations,
                            "slice count")
        ->check(CLI::Range(1, 4096));
    equivalence->add_option("--spline-order", equivalence_args.spline_order,
                            "angular order")
        ->check(CLI::Range(0, 60));
    equivalence->add_option("--rho0", equivalence_args.rho0,
                            "disk radius as a fraction of Nyquist");
    equivalence->add_option("--images", equivalence_args.images, "test images to draw")
        ->check(CLI::Range(1, 1024));
    equivalence->add_option("--seed", equivalence_args.seed, "master seed");

    StabilityArgs stability_args;
    auto* stability = app.add_subcommand("stability", "frame bounds of a stack");
    stability->add_option("--stack", stability_args.stack, "stack file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (wavelets->parsed()) return cmd_wavelets(wavelets_args);
        if (lift->parsed()) return cmd_lift(lift_args);
        if (reconstruct->parsed()) return cmd_reconstruct(reconstruct_args);
        if (ug->parsed()) return cmd_ug(ug_args);
        if (profiles->parsed()) return cmd_profiles(profiles_args);
        if (bound->parsed()) return cmd_bound(bound_args);
        if (equivalence->parsed()) return cmd_equivalence(equivalence_args);
        if (stability->parsed()) return cmd_stability(stability_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
