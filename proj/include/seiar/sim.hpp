#pragma once

#include "seiar/controller.hpp"
#include "seiar/filter.hpp"
#include "seiar/noise.hpp"
#include "seiar/qp.hpp"
#include "seiar/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace seiar::sim {

struct ScenarioConfig {
    double horizon = 40.0;
    double dt = 0.01;
    double population = 16000.0;
    ModelParams plant_params;
    ModelParams filter_params;
    SeiarState z0;
    SeiarState z_hat0;
    Mat5 P0 = Mat5::Identity();
    noise::NoiseConfig noise; ///< seed and horizon are taken from this config
    filter::FilterMode filter_mode = filter::FilterMode::Emckf;
    double sigma = 0.01;
    bool kernel_literal = false;
    controller::ClfConfig clf;
    controller::DesiredTrajectory traj;
    std::uint64_t seed = 0;
    int record_stride = 10;

    /// Throws ValidationError naming the violated invariant.
    void validate() const;

    long steps() const;
    filter::FilterConfig filter_config() const;
};

struct StepRecord {
    double t = 0.0;
    Vec5 z = Vec5::Zero();
    Vec5 z_hat = Vec5::Zero();
    Vec2 y = Vec2::Zero();
    Vec2 u = Vec2::Zero();
    double h = 0.0;
    double nu = 1.0;
    double V = 0.0;
    Vec2 e = Vec2::Zero();
    double objective = 0.0;
    int clamp_events = 0; ///< cumulative

    /// Measurement-driven part of the last filter step, |z_hat - prediction|.
    double estimate_jump = 0.0;
    /// Impulses that hit the measurement which produced this estimate.
    int shots = 0;
    /// Empirical uncertainty residual de/dt - mu over the previous step.
    Vec2 delta = Vec2::Zero();
};

struct RunMetrics {
    double rmse_tracking = 0.0;         ///< |z_e - z_d| over the horizon
    double rmse_tracking_steady = 0.0;  ///< same over [25, 40]
    double rmse_estimation = 0.0;       ///< |z - z_hat| over the horizon
    double rmse_estimation_steady = 0.0;
    Vec2 u_max = Vec2::Zero();
    double u_rms = 0.0;
    double h_max = 0.0;
    std::optional<double> converge_day; ///< first day with S + I below 1 % of N0
    int clamp_total = 0;

    // Diagnostics.
    double max_jump_at_shots = 0.0;
    double max_nu_at_shots = 0.0;
    double u_total_variation_late = 0.0; ///< sum |du| for t >= 20
    int non_optimal_steps = 0;
    int regularized_steps = 0;
    double delta_rms = 0.0;
    long steps = 0;
};

struct RunResult {
    std::vector<StepRecord> records; ///< every record_stride-th step, t = 0 included
    RunMetrics metrics;
};

/// Closed-loop simulation. Per step: reference, CLF terms from the current
/// estimate, QP, clamped control, noise draws, plant RK4, measurement, filter.
/// Numeric errors are rethrown with the step index in the message.
RunResult run(const ScenarioConfig& cfg);

/// EMCKF run then EKF run on identical seeds and shot schedule.
std::pair<RunResult, RunResult> compare_filters(const ScenarioConfig& cfg);

using Selector = std::function<double(const StepRecord&)>;

/// Root mean square of `selector` over records with t in [t_lo, t_hi].
/// Throws EmptyWindow.
double rmse(const std::vector<StepRecord>& records, const Selector& selector,
            double t_lo = -1e300, double t_hi = 1e300);

inline constexpr double kConvergenceFraction = 0.01;
inline constexpr double kSteadyStart = 25.0;
inline constexpr double kLateControlStart = 20.0;

} // namespace seiar::sim
