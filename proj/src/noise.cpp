#include "seiar/noise.hpp"

#include "seiar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace seiar::noise {

CounterRng CounterRng::substream(std::uint64_t id) const
{
    return CounterRng(mix(key_ ^ mix(id * kGolden + 1)), 0);
}

void NoiseConfig::validate() const
{
    if (!(q_diag.array() >= 0.0).all() || !q_diag.allFinite())
        throw ValidationError("noise.q_diag >= 0");
    if (!(r_diag.array() > 0.0).all() || !r_diag.allFinite())
        throw ValidationError("noise.r_diag > 0");
    if (shot_count < 0)
        throw ValidationError("noise.shot_count >= 0");
    if (!std::isfinite(shot_magnitude))
        throw ValidationError("noise.shot_magnitude finite");
    if (!(horizon > 0.0))
        throw ValidationError("horizon > 0");
}

ShotSchedule build_schedule(const NoiseConfig& cfg, double min_separation)
{
    ShotSchedule out;
    out.magnitude = cfg.shot_magnitude;
    if (cfg.shot_count <= 0)
        return out;
    if (min_separation * cfg.shot_count > 0.5 * cfg.horizon)
        throw ValidationError("noise.shot_count too large for the horizon");

    CounterRng gen = stream(cfg.seed, Stream::Shots);
    std::uniform_real_distribution<double> when(0.0, cfg.horizon);
    while (out.times.size() < static_cast<std::size_t>(cfg.shot_count)) {
        const double t = when(gen);
        if (!(t < cfg.horizon))
            continue;
        const bool crowded = std::any_of(out.times.begin(), out.times.end(), [&](double o) {
            return std::abs(o - t) < min_separation;
        });
        if (!crowded)
            out.times.push_back(t);
    }
    std::sort(out.times.begin(), out.times.end());
    out.channels.assign(out.times.size(), kBothChannels);
    return out;
}

Vec5 sample_process_noise(CounterRng& gen, const Vec5& q_diag, double dt, bool continuous)
{
    std::normal_distribution<double> n01(0.0, 1.0);
    Vec5 w;
    for (int j = 0; j < 5; ++j) {
        const double var = continuous ? q_diag[j] / dt : q_diag[j];
        w[j] = std::sqrt(var) * n01(gen);
    }
    return w;
}

int shots_in_window(const ShotSchedule& schedule, double t, double dt)
{
    auto lo = std::lower_bound(schedule.times.begin(), schedule.times.end(), t);
    auto hi = std::lower_bound(lo, schedule.times.end(), t + dt);
    return static_cast<int>(hi - lo);
}

Vec2 sample_measurement_noise(CounterRng& gen, const Vec2& r_diag, const ShotSchedule& schedule,
                              double t, double dt, bool continuous)
{
    std::normal_distribution<double> n01(0.0, 1.0);
    Vec2 v;
    for (int j = 0; j < 2; ++j) {
        const double var = continuous ? r_diag[j] / dt : r_diag[j];
        v[j] = std::sqrt(var) * n01(gen);
    }

    auto lo = std::lower_bound(schedule.times.begin(), schedule.times.end(), t);
    for (auto it = lo; it != schedule.times.end() && *it < t + dt; ++it) {
        const unsigned mask = schedule.channels[static_cast<std::size_t>(it - schedule.times.begin())];
        if (mask & kExposedChannel)
            v[0] += schedule.magnitude;
        if (mask & kInfectedChannel)
            v[1] += schedule.magnitude;
    }
    return v;
}

} // namespace seiar::noise
