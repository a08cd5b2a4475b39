#ifndef GHOSTBENCH_IMAGE_IO_HPP
#define GHOSTBENCH_IMAGE_IO_HPP

#include <string>

#include "ghostbench/image.hpp"

namespace ghostbench {

/// Loads an 8- or 16-bit grayscale PGM (P5) or PNG file.
/// Intensities map linearly onto [0,1]. Throws std::runtime_error on
/// unreadable files, unsupported formats, or non-grayscale input.
Image load_image(const std::string& path);

/// Saves as PGM or PNG depending on the file extension (.pgm/.png),
/// quantizing to the given bit depth (8 or 16). Saving then loading an
/// already-quantized raster round-trips bit-exactly.
void save_image(const Image& image, const std::string& path, int bit_depth = 8);

} // namespace ghostbench

#endif
