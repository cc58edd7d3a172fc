#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tatrec/forward.hpp"
#include "tatrec/io.hpp"
#include "tatrec/linedet.hpp"
#include "tatrec/metrics.hpp"
#include "tatrec/model.hpp"
#include "tatrec/recon2d.hpp"
#include "tatrec/recon3d.hpp"
#include "tatrec/threading.hpp"
#include "tatrec/timereversal.hpp"

namespace py = pybind11;
using namespace tatrec;

namespace {

py::array_t<double> series_array(const SeriesData& data) {
    py::array_t<double> out({data.values.rows(), data.values.cols()});
    std::copy(data.values.data(), data.values.data() + data.values.size(),
              out.mutable_data());
    return out;
}

void set_series_array(SeriesData& data, py::array_t<double, py::array::c_style> arr) {
    if (arr.ndim() != 2) throw validation_error("series values must be 2D");
    data.values = Array2<double>(arr.shape(0), arr.shape(1));
    std::copy(arr.data(), arr.data() + arr.size(), data.values.data());
}

py::array_t<double> image2_array(const Image2D& img) {
    py::array_t<double> out({img.n, img.n});
    std::copy(img.values.begin(), img.values.end(), out.mutable_data());
    return out;
}

py::array_t<double> image3_array(const Image3D& img) {
    py::array_t<double> out({img.n, img.n, img.n});
    std::copy(img.values.begin(), img.values.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(tatrec, m) {
    m.doc() = "Fast spectral reconstruction for circular, spherical and "
              "rotating line-detector acoustic tomography";

    py::enum_<PrimitiveKind>(m, "PrimitiveKind")
        .value("disk", PrimitiveKind::Disk)
        .value("ball", PrimitiveKind::Ball)
        .value("gaussian", PrimitiveKind::Gaussian);

    py::class_<Primitive>(m, "Primitive")
        .def(py::init([](PrimitiveKind kind, std::vector<double> center, double radius,
                         double amplitude) {
                 Primitive p;
                 p.kind = kind;
                 p.center.x = center.size() > 0 ? center[0] : 0.0;
                 p.center.y = center.size() > 1 ? center[1] : 0.0;
                 p.center.z = center.size() > 2 ? center[2] : 0.0;
                 p.radius = radius;
                 p.amplitude = amplitude;
                 return p;
             }),
             py::arg("kind"), py::arg("center"), py::arg("radius"), py::arg("amplitude"));

    py::class_<Phantom>(m, "Phantom")
        .def(py::init<int, std::vector<Primitive>>(), py::arg("dimension"),
             py::arg("primitives"))
        .def_static("from_json", &io::parse_phantom_json)
        .def_property_readonly("dimension", &Phantom::dimension)
        .def_property_readonly("support_radius", &Phantom::support_radius)
        .def("eval2",
             [](const Phantom& p, double x, double y) { return eval_phantom(p, Vec2{x, y}); })
        .def("eval3", [](const Phantom& p, double x, double y, double z) {
            return eval_phantom(p, Vec3{x, y, z});
        });

    py::class_<TimeGrid>(m, "TimeGrid")
        .def(py::init([](double dt, std::size_t nt) { return TimeGrid{dt, nt}; }),
             py::arg("dt"), py::arg("nt"))
        .def_readonly("dt", &TimeGrid::dt)
        .def_readonly("nt", &TimeGrid::nt);

    py::enum_<GeometryTag>(m, "GeometryTag")
        .value("ring", GeometryTag::Ring)
        .value("sphere", GeometryTag::Sphere)
        .value("line_slice", GeometryTag::LineSlice)
        .value("square_boundary", GeometryTag::SquareBoundary);

    py::class_<SeriesData>(m, "SeriesData")
        .def_readonly("tag", &SeriesData::tag)
        .def_readonly("R", &SeriesData::R)
        .def_readonly("alpha", &SeriesData::alpha)
        .def_readonly("time", &SeriesData::time)
        .def_property("values", &series_array, &set_series_array);

    py::class_<Image2D>(m, "Image2D")
        .def_readonly("n", &Image2D::n)
        .def_readonly("extent", &Image2D::extent)
        .def_property_readonly("values", &image2_array);

    py::class_<Image3D>(m, "Image3D")
        .def_readonly("n", &Image3D::n)
        .def_readonly("extent", &Image3D::extent)
        .def_property_readonly("values", &image3_array);

    m.def("set_num_threads", &set_num_threads);

    m.def(
        "forward_2d",
        [](const Phantom& ph, double R, std::size_t detectors, const TimeGrid& time) {
            return forward_2d(ph, DetectorRing{R, detectors}, time);
        },
        py::arg("phantom"), py::arg("R"), py::arg("detectors"), py::arg("time"));

    m.def(
        "forward_3d",
        [](const Phantom& ph, double R, std::size_t n_theta, std::size_t n_phi,
           const TimeGrid& time) {
            return forward_3d(ph, DetectorSphere(R, n_theta, n_phi), time);
        },
        py::arg("phantom"), py::arg("R"), py::arg("n_theta"), py::arg("n_phi"),
        py::arg("time"));

    m.def(
        "forward_linedet",
        [](const Phantom& ph, double R, std::size_t n_alpha, std::size_t n_beta,
           const TimeGrid& time) {
            LineDetectorGeometry geom{R, equispaced_alphas(n_alpha), n_beta};
            return forward_linedet(ph, geom, time);
        },
        py::arg("phantom"), py::arg("R"), py::arg("n_alpha"), py::arg("n_beta"),
        py::arg("time"));

    m.def(
        "add_noise",
        [](const SeriesData& data, double level, std::uint64_t seed) {
            return add_noise(data, NoiseSpec{level, seed});
        },
        py::arg("data"), py::arg("level"), py::arg("seed"));

    m.def(
        "reconstruct_2d",
        [](const SeriesData& data, std::size_t n, double extent) {
            DetectorRing ring{data.R, data.detector_count()};
            Recon2dOptions opts;
            opts.n = n;
            opts.extent = extent;
            return reconstruct_2d(data, ring, opts);
        },
        py::arg("data"), py::arg("n") = 256, py::arg("extent") = 0.0);

    m.def(
        "reconstruct_3d",
        [](const SeriesData& data, std::size_t n_theta, std::size_t n_phi, std::size_t n,
           double extent) {
            DetectorSphere sphere(data.R, n_theta, n_phi);
            Recon3dOptions opts;
            opts.n = n;
            opts.extent = extent;
            return reconstruct_3d(data, sphere, opts);
        },
        py::arg("data"), py::arg("n_theta"), py::arg("n_phi"), py::arg("n") = 64,
        py::arg("extent") = 0.0);

    m.def(
        "reconstruct_linedet",
        [](const std::vector<SeriesData>& scan, std::size_t n, double extent) {
            if (scan.empty()) throw validation_error("empty scan");
            std::vector<double> alphas(scan.size());
            for (std::size_t i = 0; i < scan.size(); ++i) alphas[i] = scan[i].alpha;
            LineDetectorGeometry geom{scan[0].R, alphas, scan[0].detector_count()};
            ReconLinedetOptions opts;
            opts.n = n;
            opts.extent = extent;
            return reconstruct_linedet(scan, geom, opts);
        },
        py::arg("scan"), py::arg("n") = 128, py::arg("extent") = 0.0);

    m.def(
        "time_reverse_2d",
        [](const Phantom& ph, double L, std::size_t n, const TimeGrid& time) {
            return time_reverse_2d(forward_square_boundary(ph, L, n, time));
        },
        py::arg("phantom"), py::arg("L"), py::arg("n"), py::arg("time"));

    m.def(
        "rasterize_2d",
        [](const Phantom& ph, std::size_t n, double extent) {
            return rasterize_2d(ph, n, extent);
        },
        py::arg("phantom"), py::arg("n"), py::arg("extent"));
    m.def(
        "rasterize_3d",
        [](const Phantom& ph, std::size_t n, double extent) {
            return rasterize_3d(ph, n, extent);
        },
        py::arg("phantom"), py::arg("n"), py::arg("extent"));

    m.def("rel_l2_error_2d",
          [](const Image2D& a, const Image2D& b, double mask) {
              return rel_l2_error(a, b, mask);
          });
    m.def("rel_l2_error_3d",
          [](const Image3D& a, const Image3D& b, double mask) {
              return rel_l2_error(a, b, mask);
          });

    m.def("write_series", &io::write_series);
    m.def("read_series", &io::read_series);
    m.def("write_image_2d",
          [](const std::string& path, const Image2D& img) { io::write_image(path, img); });
    m.def("write_image_3d",
          [](const std::string& path, const Image3D& img) { io::write_image(path, img); });
    m.def("write_linedet_scan", &io::write_linedet_scan);
    m.def("read_linedet_scan", &io::read_linedet_scan);

    py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
}
