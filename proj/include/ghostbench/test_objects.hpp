#ifndef GHOSTBENCH_TEST_OBJECTS_HPP
#define GHOSTBENCH_TEST_OBJECTS_HPP

#include <string>

#include "ghostbench/image.hpp"

namespace ghostbench {

/// Bundled "peppers"-style still life: overlapping smooth rounded shapes
/// with shading and highlights on a graded background. Deterministic and
/// resolution-independent (evaluated from a fixed continuous scene).
Image make_peppers(int resolution);

/// "BIT" test card: white block letters on a black background.
Image make_bit_letters(int resolution);

/// Resolves an object reference: the builtin names "peppers" and "bit",
/// or a PGM/PNG path (box-resampled to resolution x resolution).
Image load_object(const std::string& name_or_path, int resolution);

} // namespace ghostbench

#endif
