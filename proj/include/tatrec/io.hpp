#pragma once

#include <string>
#include <vector>

#include "tatrec/core.hpp"
#include "tatrec/model.hpp"

namespace tatrec {
namespace io {

// On-disk formats, all little-endian, no padding.
//
// Series (.tats): magic "TATS", u16 version=1, u16 geometry tag
// (1=ring, 2=sphere, 3=line-slice, 4=square-boundary), u32 detector count,
// u32 nt, f64 dt, f64 R, then f64 alpha for line slices only, then
// count*nt f64 samples row-major [detector][time].
//
// Image (.tati): magic "TATI", u16 version=1, u16 dims (2 or 3), u32 size
// per axis, f64 half-extent per axis, then row-major f64 payload
// (x fastest, then y, then z).
//
// Line-detector scans are one slice file per alpha plus a JSON manifest.

class io_error : public validation_error {
  public:
    using validation_error::validation_error;
};

void write_series(const std::string& path, const SeriesData& data);
SeriesData read_series(const std::string& path);

void write_image(const std::string& path, const Image2D& img);
void write_image(const std::string& path, const Image3D& img);

struct AnyImage {
    int dims = 0;
    Image2D im2;
    Image3D im3;
};
AnyImage read_image(const std::string& path);

/// 8-bit binary PGM with min/max linear scaling; the scaling is recorded in
/// a JSON sidecar at path + ".json". 3D images emit one PGM per z-slice
/// (path stem + "_z####.pgm") scaled globally.
void write_pgm(const std::string& path, const Image2D& img);
void write_pgm_stack(const std::string& stem, const Image3D& img);

/// Writes slice files "<stem>_a####.tats" next to the manifest.
void write_linedet_scan(const std::string& manifest_path,
                        const std::vector<SeriesData>& scan);
std::vector<SeriesData> read_linedet_scan(const std::string& manifest_path);

/// Strict phantom description: {"dimension":2|3,"primitives":[...]} with
/// per-primitive kind/center/amplitude and radius (disk/ball) or sigma
/// (gaussian). Unknown kinds or keys are rejected.
Phantom parse_phantom_json(const std::string& text);
Phantom load_phantom(const std::string& path);

}  // namespace io
}  // namespace tatrec
