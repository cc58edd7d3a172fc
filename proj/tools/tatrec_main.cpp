#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "tatrec/forward.hpp"
#include "tatrec/io.hpp"
#include "tatrec/linedet.hpp"
#include "tatrec/metrics.hpp"
#include "tatrec/model.hpp"
#include "tatrec/recon2d.hpp"
#include "tatrec/recon3d.hpp"
#include "tatrec/threading.hpp"
#include "tatrec/timereversal.hpp"

namespace {

using namespace tatrec;

struct SimulateArgs {
    std::string phantom_path;
    std::string geometry;
    std::string out;
    std::size_t detectors = 272;
    double radius = 1.05;
    std::size_t nt = 1000;
    double dt = 0.005;
    std::size_t alphas = 128;
    double noise = 0.0;
    std::uint64_t seed = 0;
    bool no_taper = false;
};

int run_simulate(const SimulateArgs& a) {
    const Phantom phantom = io::load_phantom(a.phantom_path);
    TimeGrid time{a.dt, a.nt};
    ForwardOptions fwd;
    fwd.taper = !a.no_taper;

    auto maybe_noise = [&](SeriesData data, std::uint64_t seed) {
        if (a.noise > 0.0) return add_noise(data, NoiseSpec{a.noise, seed});
        return data;
    };

    if (a.geometry == "ring") {
        DetectorRing ring{a.radius, a.detectors};
        SeriesData data = maybe_noise(forward_2d(phantom, ring, time, fwd), a.seed);
        io::write_series(a.out, data);
    } else if (a.geometry == "sphere") {
        DetectorSphere sphere(a.radius, a.detectors, 2 * a.detectors);
        SeriesData data = maybe_noise(forward_3d(phantom, sphere, time, fwd), a.seed);
        io::write_series(a.out, data);
    } else if (a.geometry == "linedet") {
        LineDetectorGeometry geom{a.radius, equispaced_alphas(a.alphas), a.detectors};
        std::vector<SeriesData> scan = forward_linedet(phantom, geom, time, fwd);
        if (a.noise > 0.0)
            for (std::size_t i = 0; i < scan.size(); ++i)
                scan[i] = add_noise(scan[i], NoiseSpec{a.noise, a.seed + i});
        io::write_linedet_scan(a.out, scan);
    } else if (a.geometry == "square") {
        const std::size_t n = a.detectors / 4 + 1;
        SquareBoundaryData bdata = forward_square_boundary(phantom, a.radius, n, time);
        SeriesData data;
        data.tag = GeometryTag::SquareBoundary;
        data.R = bdata.L;
        data.time = bdata.time;
        data.values = bdata.values;
        io::write_series(a.out, maybe_noise(std::move(data), a.seed));
    } else {
        throw validation_error("unknown geometry '" + a.geometry + "'");
    }
    return 0;
}

struct ReconArgs {
    std::string in;
    std::string out;
    std::size_t n = 256;
    double extent = 0.0;
    bool pgm = false;
};

int run_recon2d(const ReconArgs& a) {
    const SeriesData data = io::read_series(a.in);
    if (data.tag != GeometryTag::Ring)
        throw validation_error("recon2d expects ring geometry data");
    DetectorRing ring{data.R, data.detector_count()};
    Recon2dOptions opts;
    opts.n = a.n;
    opts.extent = a.extent;
    Recon2dDiagnostics diag;
    const Image2D img = reconstruct_2d(data, ring, opts, &diag);
    if (diag.imag_residual > 0.01)
        std::cerr << "tatrec: warning: imaginary residual " << diag.imag_residual
                  << " suggests a geometry/convention mismatch\n";
    io::write_image(a.out, img);
    if (a.pgm) io::write_pgm(a.out + ".pgm", img);
    std::cout << "recon2d n=" << a.n << " imag_residual=" << diag.imag_residual << "\n";
    return 0;
}

int run_recon3d(const ReconArgs& a) {
    const SeriesData data = io::read_series(a.in);
    if (data.tag != GeometryTag::Sphere)
        throw validation_error("recon3d expects sphere geometry data");
    // Row count 2*N^2 encodes the (N, 2N) sphere grid used by simulate.
    const std::size_t count = data.detector_count();
    const std::size_t n_theta =
        static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count) / 2.0)));
    if (2 * n_theta * n_theta != count)
        throw validation_error("recon3d: detector count is not 2*N^2");
    DetectorSphere sphere(data.R, n_theta, 2 * n_theta);
    Recon3dOptions opts;
    opts.n = a.n;
    opts.extent = a.extent;
    Recon3dDiagnostics diag;
    const Image3D img = reconstruct_3d(data, sphere, opts, &diag);
    io::write_image(a.out, img);
    if (a.pgm) io::write_pgm_stack(a.out, img);
    std::cout << "recon3d n=" << a.n << " imag_residual=" << diag.imag_residual << "\n";
    return 0;
}

int run_recon_linedet(const ReconArgs& a) {
    const std::vector<SeriesData> scan = io::read_linedet_scan(a.in);
    std::vector<double> alphas(scan.size());
    for (std::size_t i = 0; i < scan.size(); ++i) alphas[i] = scan[i].alpha;
    LineDetectorGeometry geom{scan[0].R, alphas, scan[0].detector_count()};
    ReconLinedetOptions opts;
    opts.n = a.n;
    opts.extent = a.extent;
    Recon2dDiagnostics diag;
    const Image3D img = reconstruct_linedet(scan, geom, opts, &diag);
    io::write_image(a.out, img);
    if (a.pgm) io::write_pgm_stack(a.out, img);
    std::cout << "recon-linedet n=" << a.n << " imag_residual=" << diag.imag_residual << "\n";
    return 0;
}

struct TimeReverseArgs {
    std::string in;
    std::string phantom_path;
    std::string out;
    std::size_t n = 256;
    double extent = 1.05;
    std::size_t nt = 1000;
    double dt = 0.005;
    bool pgm = false;
};

int run_timereverse(const TimeReverseArgs& a) {
    SquareBoundaryData bdata;
    if (!a.in.empty()) {
        const SeriesData data = io::read_series(a.in);
        if (data.tag != GeometryTag::SquareBoundary)
            throw validation_error("timereverse expects square-boundary data");
        bdata.L = data.R;
        bdata.n = data.detector_count() / 4 + 1;
        if (4 * bdata.n - 4 != data.detector_count())
            throw validation_error("timereverse: detector count is not 4n-4");
        bdata.time = data.time;
        bdata.values = data.values;
    } else if (!a.phantom_path.empty()) {
        const Phantom phantom = io::load_phantom(a.phantom_path);
        bdata = forward_square_boundary(phantom, a.extent, a.n, TimeGrid{a.dt, a.nt});
    } else {
        throw validation_error("timereverse needs --in or --phantom");
    }
    const Image2D img = time_reverse_2d(bdata);
    io::write_image(a.out, img);
    if (a.pgm) io::write_pgm(a.out + ".pgm", img);
    std::cout << "timereverse n=" << bdata.n << "\n";
    return 0;
}

int run_compare(const std::string& a, const std::string& b, double mask) {
    const io::AnyImage ia = io::read_image(a);
    const io::AnyImage ib = io::read_image(b);
    if (ia.dims != ib.dims)
        throw validation_error("compare: image dimensionality mismatch");
    const double err = ia.dims == 2 ? rel_l2_error(ia.im2, ib.im2, mask)
                                    : rel_l2_error(ia.im3, ib.im3, mask);
    std::printf("%.12g\n", err);
    return 0;
}

int run_bench(const std::string& pipeline, const std::string& sizes_csv) {
    std::vector<std::size_t> sizes;
    std::size_t pos = 0;
    while (pos < sizes_csv.size()) {
        std::size_t next = sizes_csv.find(',', pos);
        if (next == std::string::npos) next = sizes_csv.size();
        const std::string tok = sizes_csv.substr(pos, next - pos);
        try {
            sizes.push_back(std::stoul(tok));
        } catch (const std::exception&) {
            throw validation_error("bench: bad size '" + tok + "'");
        }
        pos = next + 1;
    }
    const ScalingReport report = scaling_probe(pipeline, sizes);
    std::cout << scaling_csv(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermoacoustic tomography reconstruction toolkit"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: TATREC_THREADS or 1)");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "simulate detector data for a phantom");
    c_sim->add_option("--phantom", sim.phantom_path, "phantom JSON file")->required();
    c_sim->add_option("--geometry", sim.geometry, "ring|sphere|linedet|square")->required();
    c_sim->add_option("--detectors", sim.detectors, "detectors (ring/linedet rows; sphere: polar count)");
    c_sim->add_option("--radius", sim.radius, "acquisition radius (square: half-side)");
    c_sim->add_option("--nt", sim.nt, "time samples");
    c_sim->add_option("--dt", sim.dt, "time step");
    c_sim->add_option("--alphas", sim.alphas, "rotation count for linedet");
    c_sim->add_option("--noise", sim.noise, "noise level, ||noise||/||signal||");
    c_sim->add_option("--seed", sim.seed, "noise seed");
    c_sim->add_flag("--no-taper", sim.no_taper, "disable the end-of-record taper");
    c_sim->add_option("--out", sim.out, "output path (.tats or manifest .json)")->required();

    ReconArgs r2, r3, rl;
    auto* c_r2 = app.add_subcommand("recon2d", "reconstruct from ring data");
    c_r2->add_option("--in", r2.in)->required();
    c_r2->add_option("--n", r2.n, "image size per axis");
    c_r2->add_option("--extent", r2.extent, "image half-width (default: R)");
    c_r2->add_flag("--pgm", r2.pgm, "also write an 8-bit PGM preview");
    c_r2->add_option("--out", r2.out)->required();

    auto* c_r3 = app.add_subcommand("recon3d", "reconstruct from sphere data");
    c_r3->add_option("--in", r3.in)->required();
    c_r3->add_option("--n", r3.n);
    c_r3->add_option("--extent", r3.extent);
    c_r3->add_flag("--pgm", r3.pgm, "also write a PGM slice stack");
    c_r3->add_option("--out", r3.out)->required();

    auto* c_rl = app.add_subcommand("recon-linedet", "reconstruct from a line-detector scan");
    c_rl->add_option("--in", rl.in, "scan manifest JSON")->required();
    c_rl->add_option("--n", rl.n);
    c_rl->add_option("--extent", rl.extent);
    c_rl->add_flag("--pgm", rl.pgm);
    c_rl->add_option("--out", rl.out)->required();

    TimeReverseArgs tr;
    auto* c_tr = app.add_subcommand("timereverse", "leapfrog time reversal on a square");
    c_tr->add_option("--in", tr.in, "square-boundary series (.tats)");
    c_tr->add_option("--phantom", tr.phantom_path, "simulate boundary data from this phantom");
    c_tr->add_option("--n", tr.n, "grid size per axis");
    c_tr->add_option("--extent", tr.extent, "square half-side");
    c_tr->add_option("--nt", tr.nt, "time samples (with --phantom)");
    c_tr->add_option("--dt", tr.dt, "time step (with --phantom)");
    c_tr->add_flag("--pgm", tr.pgm);
    c_tr->add_option("--out", tr.out)->required();

    std::string cmp_a, cmp_b;
    double cmp_mask = 0.9;
    auto* c_cmp = app.add_subcommand("compare", "relative L2 error between two images");
    c_cmp->add_option("--a", cmp_a)->required();
    c_cmp->add_option("--b", cmp_b, "reference image")->required();
    c_cmp->add_option("--mask", cmp_mask, "mask radius");

    std::string bench_pipeline = "recon2d", bench_sizes = "128,256,512";
    auto* c_bench = app.add_subcommand("bench", "wall-time scaling probe");
    c_bench->add_option("--pipeline", bench_pipeline);
    c_bench->add_option("--sizes", bench_sizes, "comma-separated image sizes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "tatrec: " << e.what() << "\n";
        return 2;
    }

    try {
        if (threads > 0) set_num_threads(threads);
        if (c_sim->parsed()) return run_simulate(sim);
        if (c_r2->parsed()) return run_recon2d(r2);
        if (c_r3->parsed()) return run_recon3d(r3);
        if (c_rl->parsed()) return run_recon_linedet(rl);
        if (c_tr->parsed()) return run_timereverse(tr);
        if (c_cmp->parsed()) return run_compare(cmp_a, cmp_b, cmp_mask);
        if (c_bench->parsed()) return run_bench(bench_pipeline, bench_sizes);
    } catch (const validation_error& e) {
        std::cerr << "tatrec: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "tatrec: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
