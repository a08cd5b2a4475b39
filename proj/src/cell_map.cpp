#include "ghostbench/cell_map.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "ghostbench/image_io.hpp"

namespace ghostbench {

void validate_cell_map(const CellMap& map) {
    const std::size_t n = static_cast<std::size_t>(map.width) * map.height;
    if (map.width <= 0 || map.height <= 0) throw std::logic_error("cell map: bad dimensions");
    if (map.cell_of_pixel.size() != n) throw std::logic_error("cell map: pixel table size");
    if (map.cell_count <= 0) throw std::logic_error("cell map: no cells");
    if (map.cell_pixel_count.size() != static_cast<std::size_t>(map.cell_count) ||
        map.cell_nominal_size.size() != static_cast<std::size_t>(map.cell_count))
        throw std::logic_error("cell map: per-cell table size");

    std::vector<std::int32_t> counts(map.cell_count, 0);
    for (std::int32_t c : map.cell_of_pixel) {
        if (c < 0 || c >= map.cell_count) throw std::logic_error("cell map: index out of range");
        ++counts[c];
    }
    for (std::int32_t c = 0; c < map.cell_count; ++c) {
        if (counts[c] == 0) throw std::logic_error("cell map: empty cell");
        if (counts[c] != map.cell_pixel_count[c])
            throw std::logic_error("cell map: pixel count mismatch");
    }

    // 4-connectivity: one flood fill per cell, started from its first pixel.
    std::vector<char> seen(n, 0);
    std::vector<std::int32_t> first(map.cell_count, -1);
    for (std::size_t i = 0; i < n; ++i)
        if (first[map.cell_of_pixel[i]] < 0) first[map.cell_of_pixel[i]] = static_cast<std::int32_t>(i);
    std::vector<std::int32_t> stack;
    for (std::int32_t c = 0; c < map.cell_count; ++c) {
        std::int32_t reached = 0;
        stack.assign(1, first[c]);
        seen[first[c]] = 1;
        while (!stack.empty()) {
            const std::int32_t i = stack.back();
            stack.pop_back();
            ++reached;
            const int x = i % map.width;
            const int y = i / map.width;
            const int nbr[4] = {x > 0 ? i - 1 : -1, x + 1 < map.width ? i + 1 : -1,
                                y > 0 ? i - map.width : -1, y + 1 < map.height ? i + map.width : -1};
            for (int j : nbr) {
                if (j >= 0 && !seen[j] && map.cell_of_pixel[j] == c) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
            }
        }
        if (reached != counts[c]) throw std::logic_error("cell map: cell not 4-connected");
    }
}

namespace {

// Groups pixels by provisional tile id, splits non-connected fragments, and
// renumbers cells in raster order of their first pixel.
CellMap finalize_cells(int width, int height, const std::vector<std::int64_t>& tile_of_pixel,
                       const std::vector<std::int16_t>& size_of_pixel) {
    const std::size_t n = static_cast<std::size_t>(width) * height;
    CellMap map;
    map.width = width;
    map.height = height;
    map.cell_of_pixel.assign(n, -1);

    std::int32_t next = 0;
    std::vector<std::int32_t> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (map.cell_of_pixel[start] >= 0) continue;
        const std::int64_t tile = tile_of_pixel[start];
        const std::int32_t cell = next++;
        map.cell_of_pixel[start] = cell;
        map.cell_nominal_size.push_back(size_of_pixel[start]);
        std::int32_t count = 0;
        stack.assign(1, static_cast<std::int32_t>(start));
        while (!stack.empty()) {
            const std::int32_t i = stack.back();
            stack.pop_back();
            ++count;
            const int x = i % width;
            const int y = i / width;
            const int nbr[4] = {x > 0 ? i - 1 : -1, x + 1 < width ? i + 1 : -1,
                                y > 0 ? i - width : -1, y + 1 < height ? i + width : -1};
            for (int j : nbr) {
                if (j >= 0 && map.cell_of_pixel[j] < 0 && tile_of_pixel[j] == tile) {
                    map.cell_of_pixel[j] = cell;
                    stack.push_back(j);
                }
            }
        }
        map.cell_pixel_count.push_back(count);
    }
    map.cell_count = next;
    return map;
}

} // namespace

CellMap uniform_cell_map(int width, int height, int cell_size) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("uniform_cell_map: bad dimensions");
    if (cell_size <= 0 || width % cell_size != 0 || height % cell_size != 0)
        throw std::invalid_argument("uniform_cell_map: cell_size must divide both dimensions");

    CellMap map;
    map.width = width;
    map.height = height;
    const int cols = width / cell_size;
    const int rows = height / cell_size;
    map.cell_count = cols * rows;
    map.cell_of_pixel.resize(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            map.cell_of_pixel[static_cast<std::size_t>(y) * width + x] =
                (y / cell_size) * cols + (x / cell_size);
    map.cell_pixel_count.assign(map.cell_count, cell_size * cell_size);
    map.cell_nominal_size.assign(map.cell_count, static_cast<std::int16_t>(cell_size));
    return map;
}

int default_max_cell_size(int actual_resolution) {
    return std::max(1, actual_resolution / 8);
}

void validate_retina_spec(const RetinaSpec& spec, int width, int height) {
    if (spec.roi_cell_size < 1 || width % spec.roi_cell_size != 0 ||
        height % spec.roi_cell_size != 0)
        throw std::invalid_argument("retina spec: roi_cell_size must divide the resolution");
    if (!(spec.ring_growth > 1.0))
        throw std::invalid_argument("retina spec: ring_growth must be > 1");
    const int cap = spec.max_cell_size;
    if (cap < spec.roi_cell_size || cap % spec.roi_cell_size != 0 ||
        ((cap / spec.roi_cell_size) & (cap / spec.roi_cell_size - 1)) != 0)
        throw std::invalid_argument("retina spec: max_cell_size must be roi_cell_size * 2^j");
    validate_roi(spec.roi, width, height); // throws when the ROI misses the image
}

CellMap retina_cell_map(int width, int height, const RetinaSpec& spec) {
    validate_retina_spec(spec, width, height);

    // Distinct cell sizes, finest to coarsest: c0, 2*c0, ..., max_cell_size.
    std::vector<int> sizes;
    for (int s = spec.roi_cell_size; s < spec.max_cell_size; s *= 2) sizes.push_back(s);
    sizes.push_back(spec.max_cell_size);
    const int levels = static_cast<int>(sizes.size());

    // Ring index of a radius: 0 inside the ROI, j for [r0*g^(j-1), r0*g^j).
    const double r0 = spec.roi.radius;
    const double log_g = std::log(spec.ring_growth);
    auto ring_of = [&](double radius) -> int {
        if (radius < r0) return 0;
        return 1 + static_cast<int>(std::floor(std::log(radius / r0) / log_g));
    };
    // Rings at or beyond the cap all use the coarsest grid.
    auto level_of_ring = [&](int ring) { return std::min(ring, levels - 1); };

    const std::size_t n = static_cast<std::size_t>(width) * height;
    std::vector<std::int64_t> tile_of_pixel(n);
    std::vector<std::int16_t> size_of_pixel(n);

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * width + x;
            int chosen = -1;
            for (int k = 0; k < levels; ++k) {
                const int s = sizes[k];
                const int tx = x / s;
                const int ty = y / s;
                // Tile center in pixel-center coordinates, clipped tiles included.
                const double cx = (tx * s + std::min((tx + 1) * s, width)) * 0.5;
                const double cy = (ty * s + std::min((ty + 1) * s, height)) * 0.5;
                const double radius = std::hypot(cx - spec.roi.center_x, cy - spec.roi.center_y);
                if (level_of_ring(ring_of(radius)) == k) {
                    chosen = k;
                    break;
                }
            }
            if (chosen < 0) chosen = levels - 1; // tiny-ROI corner case: coarsest grid
            const int s = sizes[chosen];
            const std::int64_t cols = (width + s - 1) / s;
            // Level-disjoint tile id: one full pixel-count stride per level.
            tile_of_pixel[p] = static_cast<std::int64_t>(chosen) * (static_cast<std::int64_t>(n) + 1) +
                               (y / s) * cols + (x / s);
            size_of_pixel[p] = static_cast<std::int16_t>(s);
        }
    }
    return finalize_cells(width, height, tile_of_pixel, size_of_pixel);
}

CellMap cell_map_for_stage(const std::optional<RetinaSpec>& base, int actual_resolution,
                           int stage_cells) {
    if (stage_cells <= 0 || actual_resolution % stage_cells != 0)
        throw std::invalid_argument("cell_map_for_stage: stage cell count must divide resolution");
    const int cell_size = actual_resolution / stage_cells;
    if (!base) return uniform_cell_map(actual_resolution, actual_resolution, cell_size);
    RetinaSpec staged = *base;
    staged.roi_cell_size = cell_size;
    if (staged.max_cell_size < cell_size) staged.max_cell_size = cell_size;
    return retina_cell_map(actual_resolution, actual_resolution, staged);
}

void write_cell_map_debug_pgm(const CellMap& map, const std::string& path) {
    Image img(map.width, map.height);
    std::int16_t max_size = 1;
    for (std::int16_t s : map.cell_nominal_size) max_size = std::max(max_size, s);
    for (std::size_t p = 0; p < map.cell_of_pixel.size(); ++p) {
        const std::int32_t c = map.cell_of_pixel[p];
        img.data[p] = static_cast<double>(map.cell_nominal_size[c]) / max_size;
    }
    save_image(img, path, 8);
}

} // namespace ghostbench
