#ifndef GHOSTBENCH_PATTERN_IO_HPP
#define GHOSTBENCH_PATTERN_IO_HPP

#include <string>

#include "ghostbench/pattern.hpp"

namespace ghostbench {

/// GPAT1 pattern-stack format, little-endian:
///   "GPAT" | version u8=1 | width u32 | height u32 | count u32
///   | family u8 | seed u64 | TLV block (u32 byte length, then tagged
///   schedule/retina records) | count bit-packed masks (row-major,
///   MSB-first, rows padded to byte boundaries) | CRC32 of all preceding
///   bytes.
void write_pattern_stack(const PatternSequence& sequence, const std::string& path);

/// Bit-exact inverse of write_pattern_stack, including metadata. Throws
/// std::runtime_error on malformed headers, truncated payloads, or CRC
/// mismatches; never returns partial data.
PatternSequence read_pattern_stack(const std::string& path);

} // namespace ghostbench

#endif
