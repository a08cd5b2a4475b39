#ifndef GHOSTBENCH_FORWARD_HPP
#define GHOSTBENCH_FORWARD_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ghostbench/image.hpp"
#include "ghostbench/pattern.hpp"

namespace ghostbench {

/// Additive white Gaussian measurement noise. std_dev = 0 is noiseless.
/// Noise is applied in raw intensity-sum units and drawn from an indexed
/// stream, so any subset of measurements reproduces independently.
struct NoiseModel {
    double mean = 0.0;
    double std_dev = 0.0;
    std::uint64_t seed = 0;
};

/// Single-pixel detector intensities, one per pattern.
struct MeasurementSet {
    std::vector<double> intensities;
    std::string sequence_ref; // family/WxH/count/seed/crc of the generating sequence
    NoiseModel noise;

    int count() const { return static_cast<int>(intensities.size()); }
};

/// Simulates the bucket measurement I_i = sum_xy S_i(x,y) O(x,y) + eps_i
/// with eps_i ~ Normal(mean, std_dev^2). Negative noisy intensities are
/// kept (the reconstruction consumes raw values). Throws on dimension
/// mismatch.
MeasurementSet measure(const Image& object, const PatternSequence& sequence,
                       const NoiseModel& noise);

/// Empirical (mean, standard deviation) of n draws from the noise stream.
std::pair<double, double> noise_sample_statistics(const NoiseModel& noise, std::int64_t n);

/// CSV export "index,intensity" with a header row.
void write_intensities_csv(const MeasurementSet& measurements, const std::string& path);

/// Reads intensities back from the CSV form (header optional).
std::vector<double> read_intensities_csv(const std::string& path);

} // namespace ghostbench

#endif
