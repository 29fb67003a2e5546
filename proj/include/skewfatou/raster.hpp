#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "skewfatou/dynamics1d.hpp"

namespace skewfatou {

struct Bounds {
  double re_min, re_max, im_min, im_max;
};

struct GridRaster {
  static constexpr std::uint32_t kNotEscaped = 0xFFFFFFFFu;

  Bounds bounds{};
  int resolution = 0;  // pixels per side
  int cap = 0;
  std::vector<std::uint32_t> values;  // row-major, iy * resolution + ix

  double pixel_dx() const {
    return (bounds.re_max - bounds.re_min) / resolution;
  }
  double pixel_dy() const {
    return (bounds.im_max - bounds.im_min) / resolution;
  }
  double pixel_area() const { return pixel_dx() * pixel_dy(); }
  Complex pixel_center(int ix, int iy) const {
    return {bounds.re_min + (ix + 0.5) * pixel_dx(),
            bounds.im_min + (iy + 0.5) * pixel_dy()};
  }
  std::uint32_t at(int ix, int iy) const {
    return values[static_cast<std::size_t>(iy) * resolution + ix];
  }
  std::size_t not_escaped_count() const;
};

/// Square of half-side R + 0.5 centered at the origin.
Bounds default_bounds(const EscapeRegion& region);

/// Per-pixel escape time at pixel centers. Deterministic and data-parallel
/// over rows. Pre: resolution >= 64 and bounds contain D(0, R).
GridRaster rasterize(const ComplexPoly& p, const EscapeRegion& region,
                     Bounds bounds, int resolution, int cap, int threads = 0);

/// (pixels with escape time > m or NotEscaped) * pixel area.
double area_of_Vm(const GridRaster& raster, int m);
std::size_t count_of_Vm(const GridRaster& raster, int m);

struct DecayFit {
  std::vector<std::pair<int, double>> areas;
  double rate = 0.0;  // fitted gamma in area ~ C * gamma^m
  double C = 0.0;
  double r2 = 0.0;
};

/// Least squares on (m, log area) for samples with m >= m_min and area > 0.
/// Throws DegenerateFit below 5 usable samples.
DecayFit fit_decay(std::span<const std::pair<int, double>> areas, int m_min);

/// Minkowski dimension estimate: slope of log N vs log(1/eps) over block
/// scales (powers of two dividing the resolution) on the NotEscaped mask.
double box_dimension(const GridRaster& raster, std::span<const int> scales);

/// Exact Euclidean distance (pixel units, two-pass transform) from every
/// pixel center to the nearest NotEscaped pixel center.
std::vector<float> distance_to_julia_px(const GridRaster& raster);

/// Area of pixels within distance delta of a NotEscaped pixel.
/// Pre: delta >= 2 pixel widths.
double neighborhood_area(const GridRaster& raster, double delta);

}  // namespace skewfatou
