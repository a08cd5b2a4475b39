#include "ghostbench/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ghostbench {

void validate_image(const Image& image) {
    if (image.width <= 0 || image.height <= 0)
        throw std::invalid_argument("image dimensions must be positive");
    if (image.data.size() != static_cast<std::size_t>(image.width) * image.height)
        throw std::invalid_argument("image data length != width*height");
    for (double v : image.data) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw std::invalid_argument("image intensity outside [0,1]");
    }
}

bool roi_contains(const RoiSpec& roi, int x, int y) {
    const double dx = (x + 0.5) - roi.center_x;
    const double dy = (y + 0.5) - roi.center_y;
    return dx * dx + dy * dy < roi.radius * roi.radius;
}

void validate_roi(const RoiSpec& roi, int width, int height) {
    if (!(roi.radius > 0.0))
        throw std::invalid_argument("ROI radius must be > 0");
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (roi_contains(roi, x, y)) return;
    throw std::invalid_argument("ROI disk contains no pixel of the image");
}

namespace {

double peak_value(int bit_depth) {
    if (bit_depth < 1 || bit_depth > 16)
        throw std::invalid_argument("bit depth must be in [1,16]");
    return static_cast<double>((1 << bit_depth) - 1);
}

} // namespace

double mse(const Image& reference, const Image& candidate,
           const std::optional<RoiSpec>& roi, int bit_depth) {
    if (reference.width != candidate.width || reference.height != candidate.height)
        throw std::invalid_argument("mse: image dimensions differ");
    const double peak = peak_value(bit_depth);
    double sum = 0.0;
    std::int64_t n = 0;
    if (roi) {
        validate_roi(*roi, reference.width, reference.height);
        for (int y = 0; y < reference.height; ++y) {
            for (int x = 0; x < reference.width; ++x) {
                if (!roi_contains(*roi, x, y)) continue;
                const double d = (reference.at(x, y) - candidate.at(x, y)) * peak;
                sum += d * d;
                ++n;
            }
        }
    } else {
        for (std::size_t i = 0; i < reference.data.size(); ++i) {
            const double d = (reference.data[i] - candidate.data[i]) * peak;
            sum += d * d;
        }
        n = static_cast<std::int64_t>(reference.data.size());
    }
    return sum / static_cast<double>(n);
}

QualityReport psnr(const Image& reference, const Image& candidate,
                   const std::optional<RoiSpec>& roi, int bit_depth) {
    QualityReport report;
    report.bit_depth = bit_depth;
    report.mse = mse(reference, candidate, roi, bit_depth);
    const double peak = peak_value(bit_depth);
    if (report.mse > 0.0)
        report.psnr_db = std::min(kPsnrCapDb, 10.0 * std::log10(peak * peak / report.mse));
    else
        report.psnr_db = kPsnrCapDb;
    if (roi) {
        report.pixel_count = 0;
        for (int y = 0; y < reference.height; ++y)
            for (int x = 0; x < reference.width; ++x)
                if (roi_contains(*roi, x, y)) ++report.pixel_count;
    } else {
        report.pixel_count = static_cast<std::int64_t>(reference.pixel_count());
    }
    return report;
}

Image resize_box(const Image& source, int new_width, int new_height) {
    if (new_width <= 0 || new_height <= 0)
        throw std::invalid_argument("resize_box: target dimensions must be positive");
    if (source.width == new_width && source.height == new_height) return source;
    Image out(new_width, new_height);
    const double sx = static_cast<double>(source.width) / new_width;
    const double sy = static_cast<double>(source.height) / new_height;
    for (int oy = 0; oy < new_height; ++oy) {
        const double y0 = oy * sy;
        const double y1 = (oy + 1) * sy;
        const int iy0 = static_cast<int>(std::floor(y0));
        const int iy1 = std::min(source.height - 1, static_cast<int>(std::ceil(y1)) - 1);
        for (int ox = 0; ox < new_width; ++ox) {
            const double x0 = ox * sx;
            const double x1 = (ox + 1) * sx;
            const int ix0 = static_cast<int>(std::floor(x0));
            const int ix1 = std::min(source.width - 1, static_cast<int>(std::ceil(x1)) - 1);
            double acc = 0.0;
            double area = 0.0;
            for (int iy = iy0; iy <= iy1; ++iy) {
                const double wy = std::min<double>(iy + 1, y1) - std::max<double>(iy, y0);
                for (int ix = ix0; ix <= ix1; ++ix) {
                    const double wx = std::min<double>(ix + 1, x1) - std::max<double>(ix, x0);
                    acc += wx * wy * source.at(ix, iy);
                    area += wx * wy;
                }
            }
            out.at(ox, oy) = std::clamp(acc / area, 0.0, 1.0);
        }
    }
    return out;
}

} // namespace ghostbench
