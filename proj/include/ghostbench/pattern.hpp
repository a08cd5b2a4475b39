#ifndef GHOSTBENCH_PATTERN_HPP
#define GHOSTBENCH_PATTERN_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "ghostbench/cell_map.hpp"
#include "ghostbench/schedule.hpp"

namespace ghostbench {

enum class PatternFamily : std::uint8_t {
    uniform = 0,  // finest uniform cells for every pattern (UCGI)
    temporal = 1, // schedule-staged uniform cells (TVCGI)
    spatial = 2,  // finest-stage retina cells for every pattern (SVCGI)
    tsv = 3,      // schedule-staged retina cells (TSVCGI)
};

const char* family_name(PatternFamily family);
std::optional<PatternFamily> family_from_name(const std::string& name);

/// One binary illumination mask. Bits are packed row-major, MSB first,
/// rows padded to byte boundaries; all pixels of one source cell carry the
/// same bit.
struct Pattern {
    int width = 0;
    int height = 0;
    std::int32_t index = 0; // sequence position i
    std::vector<std::uint8_t> bits;
    std::shared_ptr<const CellMap> source_cell_map;

    int row_bytes() const { return (width + 7) / 8; }
    bool bit(int x, int y) const {
        return (bits[static_cast<std::size_t>(y) * row_bytes() + (x >> 3)] >> (7 - (x & 7))) & 1;
    }
};

/// Ordered stack of patterns with full generation provenance.
struct PatternSequence {
    int width = 0;
    int height = 0;
    PatternFamily family = PatternFamily::uniform;
    std::optional<Schedule> schedule; // temporal/tsv
    std::optional<RetinaSpec> retina; // spatial/tsv
    std::uint64_t seed = 0;
    std::vector<Pattern> patterns;

    int count() const { return static_cast<int>(patterns.size()); }
    /// CRC32 over mask payloads and generation parameters.
    std::uint32_t content_hash() const;
};

/// Generates `count` seeded Bernoulli(1/2) patterns. Each pattern draws one
/// independent bit per cell of its stage cell map (a pure function of
/// (seed, pattern index, cell index), so stacks regenerate bit-identically
/// and stage prefixes are stable). Temporal/tsv walk the schedule stages in
/// order and truncate the final stage when count falls short of the
/// schedule total.
PatternSequence generate_sequence(PatternFamily family, int actual_resolution, int count,
                                  const std::optional<Schedule>& schedule,
                                  const std::optional<RetinaSpec>& retina, std::uint64_t seed);

} // namespace ghostbench

#endif
