#include "ghostbench/test_objects.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "ghostbench/image_io.hpp"

namespace ghostbench {

namespace {

// One rounded shape of the still life, in normalized [0,1]^2 scene
// coordinates. The rotation is baked in as (cos,sin) literals so the scene
// needs no runtime trigonometry.
struct Blob {
    double cx, cy;     // center
    double ax, ay;     // semi-axes
    double rot_c, rot_s;
    double base;       // body intensity
    double shade;      // radial shading strength
    double hx, hy, hr; // specular-style highlight center/radius
};

constexpr std::array<Blob, 5> kScene = {{
    {0.32, 0.62, 0.26, 0.33, 0.980, 0.199, 0.62, 0.28, 0.24, 0.55, 0.075},
    {0.68, 0.58, 0.24, 0.30, 0.921, -0.390, 0.48, 0.24, 0.60, 0.46, 0.070},
    {0.50, 0.36, 0.21, 0.17, 0.995, 0.100, 0.78, 0.20, 0.44, 0.30, 0.060},
    {0.18, 0.28, 0.15, 0.20, 0.940, 0.342, 0.35, 0.18, 0.13, 0.22, 0.050},
    {0.84, 0.26, 0.13, 0.18, 0.961, -0.275, 0.68, 0.16, 0.88, 0.20, 0.045},
}};

double smoothstep(double e0, double e1, double v) {
    const double t = std::clamp((v - e0) / (e1 - e0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

double scene_intensity(double u, double v) {
    // Graded backdrop with a soft vignette.
    double value = 0.30 + 0.18 * v + 0.05 * u;
    const double du = u - 0.5, dv = v - 0.5;
    value -= 0.10 * (du * du + dv * dv);

    for (const Blob& blob : kScene) {
        const double x = u - blob.cx;
        const double y = v - blob.cy;
        const double xr = (blob.rot_c * x + blob.rot_s * y) / blob.ax;
        const double yr = (-blob.rot_s * x + blob.rot_c * y) / blob.ay;
        const double q = xr * xr + yr * yr;
        if (q >= 1.0) continue;
        const double body = blob.base + blob.shade * (1.0 - q) * (0.6 + 0.4 * yr);
        const double alpha = smoothstep(1.0, 0.90, q); // soft rim
        value = value * (1.0 - alpha) + body * alpha;

        const double hx = u - blob.hx, hy = v - blob.hy;
        const double hq = (hx * hx + hy * hy) / (blob.hr * blob.hr);
        if (hq < 1.0) value += 0.22 * (1.0 - hq) * (1.0 - hq) * alpha;
    }
    return std::clamp(value, 0.02, 0.98);
}

// 5x7 block glyphs.
constexpr const char* kGlyphB[7] = {"11110", "10001", "10001", "11110",
                                    "10001", "10001", "11110"};
constexpr const char* kGlyphI[7] = {"11111", "00100", "00100", "00100",
                                    "00100", "00100", "11111"};
constexpr const char* kGlyphT[7] = {"11111", "00100", "00100", "00100",
                                    "00100", "00100", "00100"};

} // namespace

Image make_peppers(int resolution) {
    if (resolution < 1) throw std::invalid_argument("make_peppers: bad resolution");
    Image image(resolution, resolution);
    for (int y = 0; y < resolution; ++y)
        for (int x = 0; x < resolution; ++x)
            image.at(x, y) = scene_intensity((x + 0.5) / resolution, (y + 0.5) / resolution);
    return image;
}

Image make_bit_letters(int resolution) {
    if (resolution < 8) throw std::invalid_argument("make_bit_letters: resolution too small");
    Image image(resolution, resolution, 0.0);
    const char* const* glyphs[3] = {kGlyphB, kGlyphI, kGlyphT};
    // Three 5-wide glyphs with 2-column gaps: 19 columns, 7 rows.
    const int cols = 19, rows = 7;
    const int cell = std::max(1, static_cast<int>(resolution * 0.72) / cols);
    const int x0 = (resolution - cols * cell) / 2;
    const int y0 = (resolution - rows * cell) / 2;
    for (int g = 0; g < 3; ++g) {
        const int gx = x0 + g * 7 * cell;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < 5; ++c) {
                if (glyphs[g][r][c] != '1') continue;
                for (int yy = 0; yy < cell; ++yy)
                    for (int xx = 0; xx < cell; ++xx) {
                        const int px = gx + c * cell + xx;
                        const int py = y0 + r * cell + yy;
                        if (px >= 0 && px < resolution && py >= 0 && py < resolution)
                            image.at(px, py) = 1.0;
                    }
            }
    }
    return image;
}

Image load_object(const std::string& name_or_path, int resolution) {
    if (name_or_path == "peppers") return make_peppers(resolution);
    if (name_or_path == "bit") return make_bit_letters(resolution);
    const Image loaded = load_image(name_or_path);
    return resize_box(loaded, resolution, resolution);
}

} // namespace ghostbench
