#pragma once

#include "seiar/types.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace seiar::noise {

/// Counter-based generator: output n is a bijective mix of (key, n), so any
/// draw is addressable and independent streams are obtained by re-keying.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ kSeedSalt)) {}

    /// Independent generator for sub-stream `id`. Does not advance this one.
    CounterRng substream(std::uint64_t id) const;

    result_type operator()() { return mix(key_ + kGolden * ++counter_); }

    std::uint64_t counter() const { return counter_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    CounterRng(std::uint64_t key, int) : key_(key) {}

    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    static constexpr std::uint64_t kSeedSalt = 0x5e1a5eed5eedULL;

    // splitmix64 finalizer
    static constexpr std::uint64_t mix(std::uint64_t x)
    {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return x;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Sub-stream ids derived from one scenario seed.
enum class Stream : std::uint64_t {
    Process = 1,
    Measurement = 2,
    Shots = 3,
};

inline CounterRng stream(std::uint64_t seed, Stream s)
{
    return CounterRng(seed).substream(static_cast<std::uint64_t>(s));
}

struct NoiseConfig {
    Vec5 q_diag = Vec5::Ones();
    Vec2 r_diag = Vec2::Constant(0.01);
    int shot_count = 20;
    double shot_magnitude = 200.0;
    std::uint64_t seed = 0;
    double horizon = 40.0;
    /// Divide the covariances by dt when sampling (continuous-time white noise).
    bool continuous_scaling = false;

    void validate() const;
};

enum ShotChannel : unsigned {
    kExposedChannel = 1u << 0,
    kInfectedChannel = 1u << 1,
    kBothChannels = kExposedChannel | kInfectedChannel,
};

struct ShotSchedule {
    std::vector<double> times; ///< sorted, in [0, horizon)
    double magnitude = 0.0;
    std::vector<unsigned> channels; ///< ShotChannel mask per impulse

    std::size_t size() const { return times.size(); }
};

/// Draws shot_count impulse times uniformly on [0, horizon). Times closer than
/// `min_separation` to an earlier draw are redrawn, so with the step size as
/// separation every impulse lands in its own step.
ShotSchedule build_schedule(const NoiseConfig& cfg, double min_separation = 0.0);

/// Zero-mean Gaussian with per-step variance q_diag (q_diag/dt when `continuous`).
Vec5 sample_process_noise(CounterRng& gen, const Vec5& q_diag, double dt, bool continuous = false);

/// Gaussian with variance r_diag (r_diag/dt when `continuous`) plus the shot
/// magnitude on each channel hit by an impulse scheduled in [t, t + dt).
Vec2 sample_measurement_noise(CounterRng& gen, const Vec2& r_diag, const ShotSchedule& schedule,
                              double t, double dt, bool continuous = false);

/// Number of scheduled impulses in [t, t + dt).
int shots_in_window(const ShotSchedule& schedule, double t, double dt);

} // namespace seiar::noise
