#include "skewfatou/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skewfatou/parallel.hpp"

namespace skewfatou {

std::size_t GridRaster::not_escaped_count() const {
  std::size_t n = 0;
  for (std::uint32_t v : values) {
    if (v == kNotEscaped) ++n;
  }
  return n;
}

Bounds default_bounds(const EscapeRegion& region) {
  double h = region.R + 0.5;
  return {-h, h, -h, h};
}

GridRaster rasterize(const ComplexPoly& p, const EscapeRegion& region,
                     Bounds bounds, int resolution, int cap, int threads) {
  if (resolution < 64) {
    throw std::invalid_argument("rasterize: resolution >= 64 required");
  }
  if (!(bounds.re_min <= -region.R && bounds.re_max >= region.R &&
        bounds.im_min <= -region.R && bounds.im_max >= region.R)) {
    throw std::invalid_argument("rasterize: bounds must contain D(0, R)");
  }
  GridRaster raster;
  raster.bounds = bounds;
  raster.resolution = resolution;
  raster.cap = cap;
  raster.values.assign(static_cast<std::size_t>(resolution) * resolution, 0u);

  parallel_chunks(resolution, threads, [&](int row_begin, int row_end) {
    for (int iy = row_begin; iy < row_end; ++iy) {
      std::uint32_t* row = raster.values.data() +
                           static_cast<std::size_t>(iy) * resolution;
      for (int ix = 0; ix < resolution; ++ix) {
        auto et = escape_time(p, region, raster.pixel_center(ix, iy), cap);
        row[ix] = et ? static_cast<std::uint32_t>(*et) : GridRaster::kNotEscaped;
      }
    }
  });
  return raster;
}

std::size_t count_of_Vm(const GridRaster& raster, int m) {
  if (m > raster.cap) {
    throw std::invalid_argument("count_of_Vm: m exceeds the raster cap");
  }
  std::size_t n = 0;
  const std::uint32_t mm = static_cast<std::uint32_t>(m);
  for (std::uint32_t v : raster.values) {
    if (v > mm) ++n;  // NotEscaped sentinel compares large on purpose
  }
  return n;
}

double area_of_Vm(const GridRaster& raster, int m) {
  return static_cast<double>(count_of_Vm(raster, m)) * raster.pixel_area();
}

DecayFit fit_decay(std::span<const std::pair<int, double>> areas, int m_min) {
  DecayFit fit;
  fit.areas.assign(areas.begin(), areas.end());
  std::vector<double> xs, ys;
  for (const auto& [m, a] : areas) {
    if (m >= m_min && a > 0.0) {
      xs.push_back(m);
      ys.push_back(std::log(a));
    }
  }
  if (xs.size() < 5) {
    throw DegenerateFit("fit_decay: need at least 5 positive-area samples, have " +
                        std::to_string(xs.size()));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  double slope = (n * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0, mean = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double pred = slope * xs[i] + intercept;
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  fit.rate = std::exp(slope);
  fit.C = std::exp(intercept);
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double box_dimension(const GridRaster& raster, std::span<const int> scales) {
  if (scales.size() < 2) {
    throw std::invalid_argument("box_dimension: need at least 2 scales");
  }
  for (int s : scales) {
    if (s < 1 || raster.resolution % s != 0 || (s & (s - 1)) != 0) {
      throw std::invalid_argument(
          "box_dimension: scales must be powers of two dividing the resolution");
    }
  }
  if (raster.not_escaped_count() == 0) {
    throw EmptyJuliaSample("box_dimension: no NotEscaped pixels");
  }
  const int res = raster.resolution;
  std::vector<double> log_inv_eps, log_n;
  for (int s : scales) {
    const int blocks = res / s;
    std::size_t occupied = 0;
    for (int by = 0; by < blocks; ++by) {
      for (int bx = 0; bx < blocks; ++bx) {
        bool hit = false;
        for (int iy = by * s; iy < (by + 1) * s && !hit; ++iy) {
          const std::uint32_t* row =
              raster.values.data() + static_cast<std::size_t>(iy) * res;
          for (int ix = bx * s; ix < (bx + 1) * s; ++ix) {
            if (row[ix] == GridRaster::kNotEscaped) {
              hit = true;
              break;
            }
          }
        }
        if (hit) ++occupied;
      }
    }
    if (occupied == 0) continue;
    double eps = s * raster.pixel_dx();
    log_inv_eps.push_back(std::log(1.0 / eps));
    log_n.push_back(std::log(static_cast<double>(occupied)));
  }
  if (log_inv_eps.size() < 2) {
    throw EmptyJuliaSample("box_dimension: mask too sparse for the scales");
  }
  const double n = static_cast<double>(log_inv_eps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_inv_eps.size(); ++i) {
    sx += log_inv_eps[i];
    sy += log_n[i];
    sxx += log_inv_eps[i] * log_inv_eps[i];
    sxy += log_inv_eps[i] * log_n[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

// Felzenszwalb-Huttenlocher 1-D squared distance transform.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, int n) {
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s;
    for (;;) {
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    d[q] = (q - v[k]) * (q - v[k]) + f[v[k]];
  }
}

}  // namespace

std::vector<float> distance_to_julia_px(const GridRaster& raster) {
  const int res = raster.resolution;
  if (raster.not_escaped_count() == 0) {
    throw EmptyJuliaSample("distance transform: no NotEscaped pixels");
  }
  const double inf = 1e18;
  std::vector<double> grid(static_cast<std::size_t>(res) * res);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = raster.values[i] == GridRaster::kNotEscaped ? 0.0 : inf;
  }
  std::vector<double> f(res), d(res);
  // columns
  for (int ix = 0; ix < res; ++ix) {
    for (int iy = 0; iy < res; ++iy)
      f[iy] = grid[static_cast<std::size_t>(iy) * res + ix];
    edt_1d(f, d, res);
    for (int iy = 0; iy < res; ++iy)
      grid[static_cast<std::size_t>(iy) * res + ix] = d[iy];
  }
  // rows
  for (int iy = 0; iy < res; ++iy) {
    for (int ix = 0; ix < res; ++ix)
      f[ix] = grid[static_cast<std::size_t>(iy) * res + ix];
    edt_1d(f, d, res);
    for (int ix = 0; ix < res; ++ix)
      grid[static_cast<std::size_t>(iy) * res + ix] = d[ix];
  }
  std::vector<float> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i] = static_cast<float>(std::sqrt(grid[i]));
  }
  return out;
}

double neighborhood_area(const GridRaster& raster, double delta) {
  if (delta < 2.0 * raster.pixel_dx()) {
    throw std::invalid_argument("neighborhood_area: delta >= 2 pixel widths");
  }
  auto dist = distance_to_julia_px(raster);
  const double limit = delta / raster.pixel_dx();
  std::size_t count = 0;
  for (float v : dist) {
    if (v <= limit) ++count;
  }
  return static_cast<double>(count) * raster.pixel_area();
}

}  // namespace skewfatou
