#ifndef GHOSTBENCH_IMAGE_HPP
#define GHOSTBENCH_IMAGE_HPP

#include <cstdint>
#include <optional>
#include <vector>

namespace ghostbench {

/// Dense grayscale raster. Intensities are stored normalized in [0,1],
/// row-major, one value per pixel.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t pixel_count() const { return data.size(); }
};

/// Throws std::invalid_argument if dimensions/data disagree or any
/// intensity is non-finite or outside [0,1].
void validate_image(const Image& image);

/// Disk region of interest in pixel coordinates: center (x0,y0), radius r0.
/// Pixel (x,y) covers the unit square with center (x+0.5, y+0.5); membership
/// is strict Euclidean distance < r0 from the ROI center.
struct RoiSpec {
    double center_x = 0.0;
    double center_y = 0.0;
    double radius = 0.0;
};

bool roi_contains(const RoiSpec& roi, int x, int y);

/// Throws if radius <= 0 or no pixel center of a width x height raster
/// falls inside the disk.
void validate_roi(const RoiSpec& roi, int width, int height);

/// PSNR cap reported for a zero-MSE comparison (keeps CSV output finite).
inline constexpr double kPsnrCapDb = 100.0;

struct QualityReport {
    double mse = 0.0;
    double psnr_db = 0.0;
    std::int64_t pixel_count = 0;
    int bit_depth = 8;
};

/// Mean squared error on the (2^k - 1) intensity scale, k = bit_depth.
/// With a ROI, only pixels strictly inside the disk contribute.
double mse(const Image& reference, const Image& candidate,
           const std::optional<RoiSpec>& roi = std::nullopt, int bit_depth = 8);

/// PSNR = 10 log10((2^k - 1)^2 / MSE); capped at kPsnrCapDb when MSE = 0.
QualityReport psnr(const Image& reference, const Image& candidate,
                   const std::optional<RoiSpec>& roi = std::nullopt, int bit_depth = 8);

/// Area-weighted (box) resampling to a new size. Exact averaging for
/// integer downscale factors; fractional overlaps are area-weighted.
Image resize_box(const Image& source, int new_width, int new_height);

} // namespace ghostbench

#endif
