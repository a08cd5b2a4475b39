#ifndef GHOSTBENCH_CELL_MAP_HPP
#define GHOSTBENCH_CELL_MAP_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ghostbench/image.hpp"

namespace ghostbench {

/// Partition of the pixel grid into cells: the resolution structure of one
/// illumination pattern. Every pixel belongs to exactly one cell, cells are
/// non-empty 4-connected blocks, and indices cover [0, cell_count).
struct CellMap {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> cell_of_pixel; // row-major
    std::int32_t cell_count = 0;
    std::vector<std::int32_t> cell_pixel_count;  // per cell
    std::vector<std::int16_t> cell_nominal_size; // side of the generating tile

    std::int32_t cell_at(int x, int y) const {
        return cell_of_pixel[static_cast<std::size_t>(y) * width + x];
    }
};

/// Checks all partition invariants; throws std::logic_error on violation.
void validate_cell_map(const CellMap& map);

/// Axis-aligned cell_size x cell_size tiling. cell_size must divide both
/// dimensions; cells are numbered in raster order of their top-left pixel.
CellMap uniform_cell_map(int width, int height, int cell_size);

/// Retina-like (foveated) resolution structure, clipped to the image
/// rectangle: finest cells inside the ROI disk, cell side doubling per
/// annulus outward, capped at max_cell_size.
struct RetinaSpec {
    RoiSpec roi;
    int roi_cell_size = 1;    // cell side inside the ROI
    double ring_growth = 2.0; // multiplicative radius factor per annulus
    int max_cell_size = 0;    // coarsest allowed cell; roi_cell_size * 2^j
};

/// Default coarsest cell for an M x M pattern (M/8, at least 1).
int default_max_cell_size(int actual_resolution);

/// Throws std::invalid_argument if the spec is inconsistent with the
/// dimensions (non-dividing cell size, growth <= 1, bad cap, ROI disjoint).
void validate_retina_spec(const RetinaSpec& spec, int width, int height);

/// Builds the retina-like partition. Annulus j spans radii
/// [r0*g^(j-1), r0*g^j) and carries cells of side roi_cell_size*2^j capped
/// at max_cell_size; a cell straddling a ring boundary goes to the ring
/// containing its center. Beyond the coarsest ring the max_cell_size tiling
/// continues outward. Partial cells at the image border stay as smaller
/// rectangles; fragments are split so every cell is one 4-connected block.
CellMap retina_cell_map(int width, int height, const RetinaSpec& spec);

/// Stage map of a temporally variable sequence: stage_cells (m_k) cells per
/// side at actual_resolution (M) pixels. Uniform family when base is empty
/// (cell side M/m_k); retina family otherwise (roi_cell_size = M/m_k, ring
/// structure of the base spec unchanged).
CellMap cell_map_for_stage(const std::optional<RetinaSpec>& base, int actual_resolution,
                           int stage_cells);

/// Diagnostic only: writes a PGM whose intensity encodes each cell's
/// nominal size. Format not stability-guaranteed.
void write_cell_map_debug_pgm(const CellMap& map, const std::string& path);

} // namespace ghostbench

#endif
