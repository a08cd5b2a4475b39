#include "ghostbench/forward.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ghostbench/rng.hpp"

namespace ghostbench {

namespace {

double bucket_sum(const Image& object, const Pattern& pattern) {
    double sum = 0.0;
    const int row_bytes = pattern.row_bytes();
    for (int y = 0; y < pattern.height; ++y) {
        const std::uint8_t* row = pattern.bits.data() + static_cast<std::size_t>(y) * row_bytes;
        const double* obj = object.data.data() + static_cast<std::size_t>(y) * object.width;
        for (int xb = 0; xb < row_bytes; ++xb) {
            const std::uint8_t byte = row[xb];
            if (!byte) continue;
            const int x0 = xb * 8;
            for (int b = 0; b < 8; ++b) {
                if (byte & (0x80u >> b)) sum += obj[x0 + b];
            }
        }
    }
    return sum;
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

MeasurementSet measure(const Image& object, const PatternSequence& sequence,
                       const NoiseModel& noise) {
    if (object.width != sequence.width || object.height != sequence.height)
        throw std::invalid_argument("measure: object and pattern dimensions differ");
    if (noise.std_dev < 0.0) throw std::invalid_argument("measure: negative noise std dev");

    MeasurementSet out;
    out.noise = noise;
    {
        std::ostringstream ref;
        ref << family_name(sequence.family) << "/" << sequence.width << "x" << sequence.height
            << "/" << sequence.count() << "/" << sequence.seed << "/" << std::hex
            << sequence.content_hash();
        out.sequence_ref = ref.str();
    }
    out.intensities.resize(sequence.patterns.size());
    for (std::size_t i = 0; i < sequence.patterns.size(); ++i) {
        double value = bucket_sum(object, sequence.patterns[i]) + noise.mean;
        if (noise.std_dev > 0.0) value += noise.std_dev * gaussian_draw(noise.seed, i);
        out.intensities[i] = value;
    }
    return out;
}

std::pair<double, double> noise_sample_statistics(const NoiseModel& noise, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("noise_sample_statistics: n must be >= 1");
    if (noise.std_dev == 0.0) return {noise.mean, 0.0};
    double sum = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
        sum += noise.mean + noise.std_dev * gaussian_draw(noise.seed, static_cast<std::uint64_t>(i));
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double d =
            noise.mean + noise.std_dev * gaussian_draw(noise.seed, static_cast<std::uint64_t>(i)) -
            mean;
        sq += d * d;
    }
    return {mean, std::sqrt(sq / static_cast<double>(n))};
}

void write_intensities_csv(const MeasurementSet& measurements, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "index,intensity\n";
    for (std::size_t i = 0; i < measurements.intensities.size(); ++i)
        out << i << "," << format_double(measurements.intensities[i]) << "\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<double> read_intensities_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error(path + ": malformed CSV line");
        const std::string field = line.substr(comma + 1);
        double v = 0.0;
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (res.ec != std::errc{}) {
            if (values.empty() && field.find("intensity") != std::string::npos) continue; // header
            throw std::runtime_error(path + ": malformed intensity value");
        }
        values.push_back(v);
    }
    if (values.empty()) throw std::runtime_error(path + ": no intensities found");
    return values;
}

} // namespace ghostbench
