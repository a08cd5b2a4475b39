#include "ghostbench/schedule.hpp"

#include <stdexcept>

namespace ghostbench {

Schedule build_schedule(int actual_resolution, int lowest_resolution) {
    if (lowest_resolution < 1 || actual_resolution < 1)
        throw std::invalid_argument("build_schedule: resolutions must be positive");
    if (lowest_resolution > actual_resolution)
        throw std::invalid_argument("build_schedule: m_1 exceeds the actual resolution");
    const int ratio = actual_resolution / lowest_resolution;
    if (lowest_resolution * ratio != actual_resolution || (ratio & (ratio - 1)) != 0)
        throw std::invalid_argument("build_schedule: M/m_1 must be a power of two");

    Schedule schedule;
    schedule.actual_resolution = actual_resolution;
    int cumulative = 0;
    for (int m = lowest_resolution; m <= actual_resolution; m *= 2) {
        ScheduleStage stage;
        stage.cells_per_side = m;
        stage.pattern_count = m * m - cumulative;
        cumulative = m * m;
        schedule.stages.push_back(stage);
    }
    return schedule;
}

void validate_schedule(const Schedule& schedule) {
    if (schedule.actual_resolution < 1 || schedule.stages.empty())
        throw std::invalid_argument("schedule: empty or bad resolution");
    int cumulative = 0;
    int prev_m = 0;
    for (const auto& stage : schedule.stages) {
        if (prev_m != 0 && stage.cells_per_side != 2 * prev_m)
            throw std::invalid_argument("schedule: stages must double in resolution");
        if (stage.cells_per_side > schedule.actual_resolution)
            throw std::invalid_argument("schedule: stage resolution exceeds actual resolution");
        if (stage.pattern_count <= 0)
            throw std::invalid_argument("schedule: stage pattern count must be positive");
        cumulative += stage.pattern_count;
        if (cumulative != stage.cells_per_side * stage.cells_per_side)
            throw std::invalid_argument("schedule: cumulative count != m_k^2");
        prev_m = stage.cells_per_side;
    }
}

} // namespace ghostbench
