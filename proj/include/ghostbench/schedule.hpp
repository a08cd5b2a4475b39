#ifndef GHOSTBENCH_SCHEDULE_HPP
#define GHOSTBENCH_SCHEDULE_HPP

#include <vector>

namespace ghostbench {

/// One stage of a temporally variable sequence: m_k x m_k cells for the
/// next n_k patterns.
struct ScheduleStage {
    int cells_per_side = 0; // m_k
    int pattern_count = 0;  // n_k
};

/// Temporal schedule: imaging resolution doubles per stage while the
/// cumulative pattern count after stage k equals m_k^2 (so the full
/// schedule reaches sampling rate 1 at the actual resolution).
struct Schedule {
    int actual_resolution = 0; // M
    std::vector<ScheduleStage> stages;

    int total_patterns() const {
        int total = 0;
        for (const auto& s : stages) total += s.pattern_count;
        return total;
    }
};

/// Builds the doubling ladder from lowest_resolution (m_1) up to M:
/// n_1 = m_1^2 and n_k = m_k^2 - sum of earlier counts. Requires m_1 to
/// divide M with M/m_1 a power of two.
Schedule build_schedule(int actual_resolution, int lowest_resolution);

/// Throws std::invalid_argument if the stages violate the schedule
/// invariants (doubling ladder, positive counts, cumulative sums).
void validate_schedule(const Schedule& schedule);

} // namespace ghostbench

#endif
