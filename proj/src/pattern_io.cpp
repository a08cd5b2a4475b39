#include "ghostbench/pattern_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace ghostbench {

namespace {

constexpr char kMagic[4] = {'G', 'P', 'A', 'T'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint16_t kTagSchedule = 0x0001;
constexpr std::uint16_t kTagRetina = 0x0002;

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) {
        for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void bytes(const void* data, std::size_t len) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        buf_.insert(buf_.end(), p, p + len);
    }
    std::vector<std::uint8_t>& data() { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t size, const std::string& path)
        : data_(data), size_(size), path_(path) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint16_t u16() {
        const auto* p = take(2);
        return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    }
    std::uint32_t u32() {
        const auto* p = take(4);
        return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
               (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    }
    std::uint64_t u64() {
        const std::uint64_t lo = u32();
        return lo | (static_cast<std::uint64_t>(u32()) << 32);
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    const std::uint8_t* take(std::size_t len) {
        if (pos_ + len > size_)
            throw std::runtime_error(path_ + ": truncated GPAT1 payload");
        const std::uint8_t* p = data_ + pos_;
        pos_ += len;
        return p;
    }
    std::size_t pos() const { return pos_; }

private:
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
    const std::string& path_;
};

std::uint32_t crc_of(const std::uint8_t* data, std::size_t len) {
    return static_cast<std::uint32_t>(
        crc32(crc32(0L, Z_NULL, 0), static_cast<const Bytef*>(data), static_cast<uInt>(len)));
}

} // namespace

void write_pattern_stack(const PatternSequence& sequence, const std::string& path) {
    Writer w;
    w.bytes(kMagic, 4);
    w.u8(kVersion);
    w.u32(static_cast<std::uint32_t>(sequence.width));
    w.u32(static_cast<std::uint32_t>(sequence.height));
    w.u32(static_cast<std::uint32_t>(sequence.count()));
    w.u8(static_cast<std::uint8_t>(sequence.family));
    w.u64(sequence.seed);

    Writer tlv;
    if (sequence.schedule) {
        tlv.u16(kTagSchedule);
        tlv.u32(static_cast<std::uint32_t>(8 + sequence.schedule->stages.size() * 8));
        tlv.u32(static_cast<std::uint32_t>(sequence.schedule->actual_resolution));
        tlv.u32(static_cast<std::uint32_t>(sequence.schedule->stages.size()));
        for (const auto& stage : sequence.schedule->stages) {
            tlv.u32(static_cast<std::uint32_t>(stage.cells_per_side));
            tlv.u32(static_cast<std::uint32_t>(stage.pattern_count));
        }
    }
    if (sequence.retina) {
        tlv.u16(kTagRetina);
        tlv.u32(8 * 4 + 4 * 2);
        tlv.f64(sequence.retina->roi.center_x);
        tlv.f64(sequence.retina->roi.center_y);
        tlv.f64(sequence.retina->roi.radius);
        tlv.f64(sequence.retina->ring_growth);
        tlv.u32(static_cast<std::uint32_t>(sequence.retina->roi_cell_size));
        tlv.u32(static_cast<std::uint32_t>(sequence.retina->max_cell_size));
    }
    w.u32(static_cast<std::uint32_t>(tlv.data().size()));
    w.bytes(tlv.data().data(), tlv.data().size());

    const std::size_t mask_bytes =
        static_cast<std::size_t>((sequence.width + 7) / 8) * sequence.height;
    for (const auto& pattern : sequence.patterns) {
        if (pattern.bits.size() != mask_bytes)
            throw std::runtime_error("write_pattern_stack: inconsistent mask size");
        w.bytes(pattern.bits.data(), pattern.bits.size());
    }
    w.u32(crc_of(w.data().data(), w.data().size()));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(w.data().data()),
              static_cast<std::streamsize>(w.data().size()));
    if (!out) throw std::runtime_error(path + ": write failed");
}

PatternSequence read_pattern_stack(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::vector<std::uint8_t> file((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (file.size() < 4 + 1 + 12 + 1 + 8 + 4 + 4)
        throw std::runtime_error(path + ": not a GPAT1 file (too short)");
    if (std::memcmp(file.data(), kMagic, 4) != 0)
        throw std::runtime_error(path + ": bad magic bytes (not a GPAT1 file)");
    const std::uint32_t expect =
        static_cast<std::uint32_t>(file[file.size() - 4]) |
        (static_cast<std::uint32_t>(file[file.size() - 3]) << 8) |
        (static_cast<std::uint32_t>(file[file.size() - 2]) << 16) |
        (static_cast<std::uint32_t>(file[file.size() - 1]) << 24);
    if (crc_of(file.data(), file.size() - 4) != expect)
        throw std::runtime_error(path + ": CRC32 mismatch (corrupted stack)");

    Reader r(file.data(), file.size() - 4, path);
    r.take(4); // magic
    if (r.u8() != kVersion) throw std::runtime_error(path + ": unsupported GPAT version");

    PatternSequence seq;
    seq.width = static_cast<int>(r.u32());
    seq.height = static_cast<int>(r.u32());
    const std::uint32_t count = r.u32();
    const std::uint8_t family = r.u8();
    if (family > 3) throw std::runtime_error(path + ": unknown pattern family tag");
    seq.family = static_cast<PatternFamily>(family);
    seq.seed = r.u64();
    if (seq.width <= 0 || seq.height <= 0 || seq.width > 1 << 16 || seq.height > 1 << 16)
        throw std::runtime_error(path + ": implausible dimensions");

    const std::uint32_t tlv_len = r.u32();
    const std::size_t tlv_end = r.pos() + tlv_len;
    if (tlv_end > file.size() - 4) throw std::runtime_error(path + ": TLV block overruns file");
    while (r.pos() < tlv_end) {
        const std::uint16_t tag = r.u16();
        const std::uint32_t len = r.u32();
        if (r.pos() + len > tlv_end) throw std::runtime_error(path + ": TLV record overruns block");
        if (tag == kTagSchedule) {
            Schedule schedule;
            schedule.actual_resolution = static_cast<int>(r.u32());
            const std::uint32_t stages = r.u32();
            if (len != 8 + stages * 8) throw std::runtime_error(path + ": bad schedule record");
            for (std::uint32_t i = 0; i < stages; ++i) {
                ScheduleStage stage;
                stage.cells_per_side = static_cast<int>(r.u32());
                stage.pattern_count = static_cast<int>(r.u32());
                schedule.stages.push_back(stage);
            }
            seq.schedule = schedule;
        } else if (tag == kTagRetina) {
            RetinaSpec retina;
            retina.roi.center_x = r.f64();
            retina.roi.center_y = r.f64();
            retina.roi.radius = r.f64();
            retina.ring_growth = r.f64();
            retina.roi_cell_size = static_cast<int>(r.u32());
            retina.max_cell_size = static_cast<int>(r.u32());
            seq.retina = retina;
        } else {
            r.take(len); // unknown record: skip, stays covered by the CRC
        }
    }

    const bool needs_schedule =
        seq.family == PatternFamily::temporal || seq.family == PatternFamily::tsv;
    const bool needs_retina =
        seq.family == PatternFamily::spatial || seq.family == PatternFamily::tsv;
    if (needs_schedule && !seq.schedule)
        throw std::runtime_error(path + ": family requires a schedule record");
    if (needs_retina && !seq.retina)
        throw std::runtime_error(path + ": family requires a retina record");

    const std::size_t mask_bytes = static_cast<std::size_t>((seq.width + 7) / 8) * seq.height;

    // Rebuild the per-stage cell maps so loaded patterns keep their
    // provenance; masks themselves come verbatim from the payload.
    std::vector<std::pair<std::shared_ptr<const CellMap>, int>> stage_maps; // (map, end index)
    if (needs_schedule) {
        validate_schedule(*seq.schedule);
        int end = 0;
        for (const auto& stage : seq.schedule->stages) {
            end += stage.pattern_count;
            if (end <= 0) continue;
            stage_maps.emplace_back(
                std::make_shared<const CellMap>(cell_map_for_stage(
                    needs_retina ? seq.retina : std::nullopt, seq.width, stage.cells_per_side)),
                end);
            if (end >= static_cast<int>(count)) break;
        }
    } else {
        stage_maps.emplace_back(std::make_shared<const CellMap>(cell_map_for_stage(
                                    needs_retina ? seq.retina : std::nullopt, seq.width, seq.width)),
                                static_cast<int>(count));
    }

    seq.patterns.reserve(count);
    std::size_t stage = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
        while (stage < stage_maps.size() && static_cast<int>(i) >= stage_maps[stage].second)
            ++stage;
        if (stage >= stage_maps.size())
            throw std::runtime_error(path + ": pattern count exceeds the schedule total");
        Pattern pattern;
        pattern.width = seq.width;
        pattern.height = seq.height;
        pattern.index = static_cast<std::int32_t>(i);
        pattern.source_cell_map = stage_maps[stage].first;
        const std::uint8_t* payload = r.take(mask_bytes);
        pattern.bits.assign(payload, payload + mask_bytes);
        seq.patterns.push_back(std::move(pattern));
    }
    if (r.pos() != file.size() - 4)
        throw std::runtime_error(path + ": trailing bytes after pattern payload");
    return seq;
}

} // namespace ghostbench
