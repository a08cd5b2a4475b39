#include "ghostbench/pattern.hpp"

#include <zlib.h>

#include <cstring>
#include <stdexcept>
#include <string>

#include "ghostbench/rng.hpp"

namespace ghostbench {

const char* family_name(PatternFamily family) {
    switch (family) {
        case PatternFamily::uniform: return "uniform";
        case PatternFamily::temporal: return "temporal";
        case PatternFamily::spatial: return "spatial";
        case PatternFamily::tsv: return "tsv";
    }
    return "?";
}

std::optional<PatternFamily> family_from_name(const std::string& name) {
    if (name == "uniform") return PatternFamily::uniform;
    if (name == "temporal") return PatternFamily::temporal;
    if (name == "spatial") return PatternFamily::spatial;
    if (name == "tsv") return PatternFamily::tsv;
    return std::nullopt;
}

namespace {

constexpr std::uint32_t kPatternStreamTag = 0x70617474u; // "patt"

// One fair bit per (seed, pattern, cell); four cells share a Philox block.
void draw_cell_bits(std::uint64_t seed, std::int32_t pattern_index, std::int32_t cell_count,
                    std::vector<std::uint8_t>& cell_bits) {
    cell_bits.resize(static_cast<std::size_t>(cell_count));
    const PhiloxKey key = key_from_seed(seed);
    for (std::int32_t block = 0; block * 4 < cell_count; ++block) {
        const PhiloxBlock words = philox4x32(
            {static_cast<std::uint32_t>(pattern_index), static_cast<std::uint32_t>(block),
             kPatternStreamTag, 0},
            key);
        for (int j = 0; j < 4; ++j) {
            const std::int32_t c = block * 4 + j;
            if (c >= cell_count) break;
            cell_bits[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(words[j] & 1u);
        }
    }
}

Pattern make_pattern(std::int32_t index, const std::shared_ptr<const CellMap>& map,
                     std::uint64_t seed, std::vector<std::uint8_t>& scratch) {
    Pattern pattern;
    pattern.width = map->width;
    pattern.height = map->height;
    pattern.index = index;
    pattern.source_cell_map = map;
    draw_cell_bits(seed, index, map->cell_count, scratch);

    const int row_bytes = pattern.row_bytes();
    pattern.bits.assign(static_cast<std::size_t>(row_bytes) * pattern.height, 0);
    const std::int32_t* cells = map->cell_of_pixel.data();
    for (int y = 0; y < pattern.height; ++y) {
        std::uint8_t* row = pattern.bits.data() + static_cast<std::size_t>(y) * row_bytes;
        const std::int32_t* cell_row = cells + static_cast<std::size_t>(y) * pattern.width;
        for (int x = 0; x < pattern.width; ++x) {
            if (scratch[static_cast<std::size_t>(cell_row[x])])
                row[x >> 3] |= static_cast<std::uint8_t>(0x80u >> (x & 7));
        }
    }
    return pattern;
}

} // namespace

PatternSequence generate_sequence(PatternFamily family, int actual_resolution, int count,
                                  const std::optional<Schedule>& schedule,
                                  const std::optional<RetinaSpec>& retina, std::uint64_t seed) {
    if (actual_resolution < 1) throw std::invalid_argument("generate_sequence: bad resolution");
    if (count <= 0) throw std::invalid_argument("generate_sequence: pattern count must be > 0");

    const bool needs_schedule = family == PatternFamily::temporal || family == PatternFamily::tsv;
    const bool needs_retina = family == PatternFamily::spatial || family == PatternFamily::tsv;
    if (needs_schedule && !schedule)
        throw std::invalid_argument("generate_sequence: family requires a schedule");
    if (needs_retina && !retina)
        throw std::invalid_argument("generate_sequence: family requires a retina spec");

    PatternSequence seq;
    seq.width = actual_resolution;
    seq.height = actual_resolution;
    seq.family = family;
    seq.seed = seed;
    if (needs_schedule) {
        validate_schedule(*schedule);
        if (schedule->actual_resolution != actual_resolution)
            throw std::invalid_argument("generate_sequence: schedule resolution mismatch");
        if (count > schedule->total_patterns())
            throw std::invalid_argument(
                "generate_sequence: count exceeds the schedule total (full sampling)");
        seq.schedule = schedule;
    }
    if (needs_retina) seq.retina = retina;

    seq.patterns.reserve(static_cast<std::size_t>(count));
    std::vector<std::uint8_t> scratch;
    if (needs_schedule) {
        std::int32_t index = 0;
        for (const auto& stage : schedule->stages) {
            if (index >= count) break;
            const auto map = std::make_shared<const CellMap>(cell_map_for_stage(
                needs_retina ? seq.retina : std::nullopt, actual_resolution, stage.cells_per_side));
            const int stage_end = std::min(count, index + stage.pattern_count);
            for (; index < stage_end; ++index)
                seq.patterns.push_back(make_pattern(index, map, seed, scratch));
        }
    } else {
        const auto map = std::make_shared<const CellMap>(
            cell_map_for_stage(needs_retina ? seq.retina : std::nullopt, actual_resolution,
                               actual_resolution)); // finest stage
        for (std::int32_t index = 0; index < count; ++index)
            seq.patterns.push_back(make_pattern(index, map, seed, scratch));
    }
    return seq;
}

std::uint32_t PatternSequence::content_hash() const {
    std::uint32_t crc = static_cast<std::uint32_t>(crc32(0L, Z_NULL, 0));
    auto feed = [&crc](const void* data, std::size_t len) {
        crc = static_cast<std::uint32_t>(
            crc32(crc, static_cast<const Bytef*>(data), static_cast<uInt>(len)));
    };
    const std::uint32_t header[3] = {static_cast<std::uint32_t>(width),
                                     static_cast<std::uint32_t>(height),
                                     static_cast<std::uint32_t>(family)};
    feed(header, sizeof(header));
    feed(&seed, sizeof(seed));
    if (schedule) {
        for (const auto& stage : schedule->stages) {
            const std::uint32_t s[2] = {static_cast<std::uint32_t>(stage.cells_per_side),
                                        static_cast<std::uint32_t>(stage.pattern_count)};
            feed(s, sizeof(s));
        }
    }
    if (retina) {
        const double r[3] = {retina->roi.center_x, retina->roi.center_y, retina->roi.radius};
        feed(r, sizeof(r));
        const std::uint32_t c[2] = {static_cast<std::uint32_t>(retina->roi_cell_size),
                                    static_cast<std::uint32_t>(retina->max_cell_size)};
        feed(c, sizeof(c));
        feed(&retina->ring_growth, sizeof(double));
    }
    for (const auto& p : patterns) feed(p.bits.data(), p.bits.size());
    return crc;
}

} // namespace ghostbench
