#include "tatrec/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tatrec {
namespace io {

namespace {

using nlohmann::json;

void put_bytes(std::string& buf, const void* p, std::size_t n) {
    buf.append(static_cast<const char*>(p), n);
}

void put_u16(std::string& buf, std::uint16_t v) {
    const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                                static_cast<unsigned char>(v >> 8)};
    put_bytes(buf, b, 2);
}

void put_u32(std::string& buf, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    put_bytes(buf, b, 4);
}

void put_f64(std::string& buf, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    put_bytes(buf, b, 8);
}

class Reader {
  public:
    Reader(const std::string& path) : path_(path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw io_error("cannot open '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        data_ = ss.str();
    }

    void need(std::size_t n) const {
        if (pos_ + n > data_.size())
            throw io_error("'" + path_ + "': truncated file");
    }
    void bytes(void* out, std::size_t n) {
        need(n);
        std::memcpy(out, data_.data() + pos_, n);
        pos_ += n;
    }
    std::uint16_t u16() {
        unsigned char b[2];
        bytes(b, 2);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }
    std::uint32_t u32() {
        unsigned char b[4];
        bytes(b, 4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }
    double f64() {
        unsigned char b[8];
        bytes(b, 8);
        std::uint64_t bits = 0;
        for (int i = 7; i >= 0; --i) bits = (bits << 8) | b[i];
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::size_t remaining() const { return data_.size() - pos_; }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::string data_;
    std::size_t pos_ = 0;
};

void write_file(const std::string& path, const std::string& buf) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot create '" + path + "'");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw io_error("short write to '" + path + "'");
}

void check_finite(const double* p, std::size_t n, const std::string& path) {
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(p[i]))
            throw io_error("'" + path + "': non-finite sample at index " + std::to_string(i));
}

}  // namespace

void write_series(const std::string& path, const SeriesData& data) {
    data.time.validate();
    std::string buf;
    buf.reserve(40 + data.values.size() * 8);
    put_bytes(buf, "TATS", 4);
    put_u16(buf, 1);
    put_u16(buf, static_cast<std::uint16_t>(data.tag));
    put_u32(buf, static_cast<std::uint32_t>(data.detector_count()));
    put_u32(buf, static_cast<std::uint32_t>(data.time.nt));
    put_f64(buf, data.time.dt);
    put_f64(buf, data.R);
    if (data.tag == GeometryTag::LineSlice) put_f64(buf, data.alpha);
    for (double v : data.values.storage()) put_f64(buf, v);
    write_file(path, buf);
}

SeriesData read_series(const std::string& path) {
    Reader r(path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, "TATS", 4) != 0)
        throw io_error("'" + path + "': not a series file (bad magic)");
    const std::uint16_t version = r.u16();
    if (version != 1)
        throw io_error("'" + path + "': unsupported series version " + std::to_string(version));
    const std::uint16_t tag = r.u16();
    if (tag < 1 || tag > 4)
        throw io_error("'" + path + "': unknown geometry tag " + std::to_string(tag));
    SeriesData data;
    data.tag = static_cast<GeometryTag>(tag);
    const std::uint32_t count = r.u32();
    const std::uint32_t nt = r.u32();
    data.time.dt = r.f64();
    data.R = r.f64();
    if (data.tag == GeometryTag::LineSlice) data.alpha = r.f64();
    data.time.nt = nt;
    data.time.validate();
    if (count == 0) throw io_error("'" + path + "': zero detector count");
    if (r.remaining() != static_cast<std::size_t>(count) * nt * 8)
        throw io_error("'" + path + "': payload length mismatch");
    data.values = Array2<double>(count, nt);
    r.bytes(data.values.data(), r.remaining());
    check_finite(data.values.data(), data.values.size(), path);
    return data;
}

namespace {

void write_image_impl(const std::string& path, int dims, std::size_t n, double extent,
                      const std::vector<double>& values) {
    std::string buf;
    buf.reserve(64 + values.size() * 8);
    put_bytes(buf, "TATI", 4);
    put_u16(buf, 1);
    put_u16(buf, static_cast<std::uint16_t>(dims));
    for (int d = 0; d < dims; ++d) put_u32(buf, static_cast<std::uint32_t>(n));
    for (int d = 0; d < dims; ++d) put_f64(buf, extent);
    for (double v : values) put_f64(buf, v);
    write_file(path, buf);
}

}  // namespace

void write_image(const std::string& path, const Image2D& img) {
    write_image_impl(path, 2, img.n, img.extent, img.values);
}

void write_image(const std::string& path, const Image3D& img) {
    write_image_impl(path, 3, img.n, img.extent, img.values);
}

AnyImage read_image(const std::string& path) {
    Reader r(path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, "TATI", 4) != 0)
        throw io_error("'" + path + "': not an image file (bad magic)");
    const std::uint16_t version = r.u16();
    if (version != 1)
        throw io_error("'" + path + "': unsupported image version " + std::to_string(version));
    const std::uint16_t dims = r.u16();
    if (dims != 2 && dims != 3)
        throw io_error("'" + path + "': image must be 2D or 3D");
    std::vector<std::uint32_t> sizes(dims);
    for (auto& s : sizes) s = r.u32();
    for (std::size_t d = 1; d < sizes.size(); ++d)
        if (sizes[d] != sizes[0])
            throw io_error("'" + path + "': non-cubic images are not supported");
    std::vector<double> extents(dims);
    for (auto& e : extents) e = r.f64();
    const std::size_t n = sizes[0];
    std::size_t total = 1;
    for (int d = 0; d < dims; ++d) total *= n;
    if (r.remaining() != total * 8)
        throw io_error("'" + path + "': payload length mismatch");

    AnyImage out;
    out.dims = dims;
    if (dims == 2) {
        out.im2.n = n;
        out.im2.extent = extents[0];
        out.im2.values.resize(total);
        r.bytes(out.im2.values.data(), total * 8);
        check_finite(out.im2.values.data(), total, path);
    } else {
        out.im3.n = n;
        out.im3.extent = extents[0];
        out.im3.values.resize(total);
        r.bytes(out.im3.values.data(), total * 8);
        check_finite(out.im3.values.data(), total, path);
    }
    return out;
}

namespace {

void write_pgm_payload(const std::string& path, std::size_t n, double vmin, double vmax,
                       const std::vector<double>& values, std::size_t offset) {
    std::string buf = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
    const double scale = vmax > vmin ? 255.0 / (vmax - vmin) : 0.0;
    // Top row of the file is the largest y.
    for (std::size_t row = 0; row < n; ++row) {
        const std::size_t iy = n - 1 - row;
        for (std::size_t ix = 0; ix < n; ++ix) {
            const double v = values[offset + iy * n + ix];
            int g = static_cast<int>(std::lround((v - vmin) * scale));
            buf.push_back(static_cast<char>(std::clamp(g, 0, 255)));
        }
    }
    write_file(path, buf);
}

void write_pgm_sidecar(const std::string& path, double vmin, double vmax,
                       std::size_t slices) {
    json j;
    j["min"] = vmin;
    j["max"] = vmax;
    if (slices > 0) j["slices"] = slices;
    write_file(path, j.dump(2) + "\n");
}

}  // namespace

void write_pgm(const std::string& path, const Image2D& img) {
    const auto [mn, mx] = std::minmax_element(img.values.begin(), img.values.end());
    write_pgm_payload(path, img.n, *mn, *mx, img.values, 0);
    write_pgm_sidecar(path + ".json", *mn, *mx, 0);
}

void write_pgm_stack(const std::string& stem, const Image3D& img) {
    const auto [mn, mx] = std::minmax_element(img.values.begin(), img.values.end());
    char name[32];
    for (std::size_t iz = 0; iz < img.n; ++iz) {
        std::snprintf(name, sizeof(name), "_z%04zu.pgm", iz);
        write_pgm_payload(stem + name, img.n, *mn, *mx, img.values, iz * img.n * img.n);
    }
    write_pgm_sidecar(stem + ".json", *mn, *mx, img.n);
}

void write_linedet_scan(const std::string& manifest_path,
                        const std::vector<SeriesData>& scan) {
    if (scan.empty()) throw io_error("write_linedet_scan: empty scan");
    namespace fs = std::filesystem;
    const fs::path manifest(manifest_path);
    const fs::path dir = manifest.parent_path();
    const std::string stem = manifest.stem().string();

    json j;
    j["format"] = "tatrec-linedet-scan";
    j["version"] = 1;
    j["R"] = scan[0].R;
    j["nt"] = scan[0].time.nt;
    j["dt"] = scan[0].time.dt;
    j["n_beta"] = scan[0].detector_count();
    j["alphas"] = json::array();
    j["files"] = json::array();
    char suffix[32];
    for (std::size_t i = 0; i < scan.size(); ++i) {
        if (scan[i].tag != GeometryTag::LineSlice)
            throw io_error("write_linedet_scan: slice " + std::to_string(i) +
                           " is not line-detector data");
        std::snprintf(suffix, sizeof(suffix), "_a%04zu.tats", i);
        const std::string fname = stem + suffix;
        write_series((dir / fname).string(), scan[i]);
        j["alphas"].push_back(scan[i].alpha);
        j["files"].push_back(fname);
    }
    write_file(manifest_path, j.dump(2) + "\n");
}

std::vector<SeriesData> read_linedet_scan(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    std::ifstream in(manifest_path);
    if (!in) throw io_error("cannot open '" + manifest_path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw io_error("'" + manifest_path + "': invalid JSON: " + e.what());
    }
    if (!j.is_object() || j.value("format", "") != "tatrec-linedet-scan")
        throw io_error("'" + manifest_path + "': not a line-detector scan manifest");
    if (j.value("version", 0) != 1)
        throw io_error("'" + manifest_path + "': unsupported manifest version");
    if (!j.contains("files") || !j.contains("alphas") ||
        j["files"].size() != j["alphas"].size() || j["files"].empty())
        throw io_error("'" + manifest_path + "': files/alphas lists are inconsistent");

    const fs::path dir = fs::path(manifest_path).parent_path();
    std::vector<SeriesData> scan;
    scan.reserve(j["files"].size());
    for (std::size_t i = 0; i < j["files"].size(); ++i) {
        SeriesData slice = read_series((dir / j["files"][i].get<std::string>()).string());
        if (slice.tag != GeometryTag::LineSlice)
            throw io_error("'" + manifest_path + "': slice " + std::to_string(i) +
                           " has wrong geometry");
        if (std::abs(slice.alpha - j["alphas"][i].get<double>()) > 1e-12)
            throw io_error("'" + manifest_path + "': slice " + std::to_string(i) +
                           " angle disagrees with the manifest");
        if (!scan.empty()) {
            if (slice.detector_count() != scan[0].detector_count() ||
                slice.time.nt != scan[0].time.nt || slice.time.dt != scan[0].time.dt ||
                slice.R != scan[0].R)
                throw io_error("'" + manifest_path + "': inconsistent slice geometry");
        }
        scan.push_back(std::move(slice));
    }
    return scan;
}

namespace {

Vec3 parse_center(const json& c, int dimension, std::size_t index) {
    if (!c.is_array() || c.size() != static_cast<std::size_t>(dimension))
        throw io_error("phantom primitive " + std::to_string(index) +
                       ": center must have " + std::to_string(dimension) + " components");
    Vec3 out{};
    out.x = c[0].get<double>();
    out.y = c[1].get<double>();
    if (dimension == 3) out.z = c[2].get<double>();
    return out;
}

}  // namespace

Phantom parse_phantom_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw io_error(std::string("phantom: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw io_error("phantom: document must be an object");
    for (const auto& [key, _] : j.items())
        if (key != "dimension" && key != "primitives")
            throw io_error("phantom: unknown key '" + key + "'");
    if (!j.contains("dimension") || !j["dimension"].is_number_integer())
        throw io_error("phantom: missing integer 'dimension'");
    const int dim = j["dimension"].get<int>();
    if (dim != 2 && dim != 3) throw io_error("phantom: dimension must be 2 or 3");
    if (!j.contains("primitives") || !j["primitives"].is_array())
        throw io_error("phantom: missing 'primitives' array");

    std::vector<Primitive> prims;
    std::size_t index = 0;
    for (const auto& p : j["primitives"]) {
        if (!p.is_object())
            throw io_error("phantom primitive " + std::to_string(index) + ": not an object");
        const std::string kind = p.value("kind", "");
        Primitive prim;
        std::string size_key;
        if (kind == "disk") {
            prim.kind = PrimitiveKind::Disk;
            size_key = "radius";
        } else if (kind == "ball") {
            prim.kind = PrimitiveKind::Ball;
            size_key = "radius";
        } else if (kind == "gaussian") {
            prim.kind = PrimitiveKind::Gaussian;
            size_key = "sigma";
        } else {
            throw io_error("phantom primitive " + std::to_string(index) +
                           ": unknown kind '" + kind + "'");
        }
        for (const auto& [key, _] : p.items())
            if (key != "kind" && key != "center" && key != "amplitude" && key != size_key)
                throw io_error("phantom primitive " + std::to_string(index) +
                               ": unknown key '" + key + "'");
        if (!p.contains("center"))
            throw io_error("phantom primitive " + std::to_string(index) + ": missing center");
        prim.center = parse_center(p["center"], dim, index);
        if (!p.contains(size_key) || !p[size_key].is_number())
            throw io_error("phantom primitive " + std::to_string(index) + ": missing " +
                           size_key);
        prim.radius = p[size_key].get<double>();
        if (!p.contains("amplitude") || !p["amplitude"].is_number())
            throw io_error("phantom primitive " + std::to_string(index) +
                           ": missing amplitude");
        prim.amplitude = p["amplitude"].get<double>();
        prims.push_back(prim);
        ++index;
    }
    try {
        return Phantom(dim, std::move(prims));
    } catch (const validation_error& e) {
        throw io_error(std::string("phantom: ") + e.what());
    }
}

Phantom load_phantom(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_phantom_json(ss.str());
}

}  // namespace io
}  // namespace tatrec
