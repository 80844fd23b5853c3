#include "seiar/sim.hpp"

#include "seiar/errors.hpp"
#include "seiar/model.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

namespace seiar::sim {

void ScenarioConfig::validate() const
{
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ValidationError("horizon > 0");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("dt > 0");
    const double ratio = horizon / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
        throw ValidationError("horizon / dt must be an integer");
    if (!(population > 0.0))
        throw ValidationError("population > 0");
    if (!(z0.z.array() >= 0.0).all() || !z0.z.allFinite())
        throw ValidationError("z0 >= 0");
    if (std::abs(z0.total() - population) > 1e-9 * population)
        throw ValidationError("sum(z0) == population");
    if (!z_hat0.z.allFinite())
        throw ValidationError("z_hat0 finite");
    plant_params.validate();
    filter_params.validate();
    noise::NoiseConfig n = noise;
    n.horizon = horizon;
    n.validate();
    if (!(sigma > 0.0))
        throw ValidationError("filter.sigma > 0");
    clf.validate();
    if (!(traj.gamma >= 0.0) || !std::isfinite(traj.gamma) || !traj.z0.allFinite())
        throw ValidationError("traj.gamma >= 0");
    if (record_stride < 1)
        throw ValidationError("record_stride >= 1");
}

long ScenarioConfig::steps() const
{
    return std::lround(horizon / dt);
}

filter::FilterConfig ScenarioConfig::filter_config() const
{
    filter::FilterConfig f;
    f.mode = filter_mode;
    f.Q = noise.q_diag.asDiagonal();
    f.R = noise.r_diag.asDiagonal();
    f.sigma = sigma;
    f.kernel_literal = kernel_literal;
    return f;
}

double rmse(const std::vector<StepRecord>& records, const Selector& selector, double t_lo, double t_hi)
{
    double sum = 0.0;
    long n = 0;
    for (const auto& r : records) {
        if (r.t < t_lo || r.t > t_hi)
            continue;
        const double v = selector(r);
        sum += v * v;
        ++n;
    }
    if (n == 0)
        throw EmptyWindow("rmse: no records in the selected window");
    return std::sqrt(sum / static_cast<double>(n));
}

namespace {

template <class E>
[[noreturn]] void rethrow_at(const E& e, long step)
{
    throw E("step " + std::to_string(step) + ": " + e.what());
}

RunMetrics summarize(const ScenarioConfig& cfg, const std::vector<StepRecord>& all)
{
    RunMetrics m;
    const auto& traj = cfg.traj;
    auto tracking = [&](const StepRecord& r) {
        return (Vec2(r.z[0], r.z[2]) - traj.value(r.t)).norm();
    };
    auto estimation = [](const StepRecord& r) { return (r.z - r.z_hat).norm(); };
    const double steady = std::min(kSteadyStart, cfg.horizon);

    m.rmse_tracking = rmse(all, tracking);
    m.rmse_tracking_steady = rmse(all, tracking, steady);
    m.rmse_estimation = rmse(all, estimation);
    m.rmse_estimation_steady = rmse(all, estimation, steady);
    m.u_rms = rmse(all, [](const StepRecord& r) { return r.u.norm(); });
    m.delta_rms = rmse(all, [](const StepRecord& r) { return r.delta.norm(); });
    m.steps = static_cast<long>(all.size()) - 1;

    const double threshold = kConvergenceFraction * cfg.population;
    for (std::size_t k = 0; k < all.size(); ++k) {
        const auto& r = all[k];
        m.u_max = m.u_max.cwiseMax(r.u);
        m.h_max = std::max(m.h_max, r.h);
        if (!m.converge_day && r.z[0] + r.z[2] < threshold)
            m.converge_day = r.t;
        if (r.shots > 0) {
            m.max_jump_at_shots = std::max(m.max_jump_at_shots, r.estimate_jump);
            m.max_nu_at_shots = std::max(m.max_nu_at_shots, r.nu);
        }
        if (k > 0 && r.t >= kLateControlStart)
            m.u_total_variation_late += (r.u - all[k - 1].u).cwiseAbs().sum();
    }
    m.clamp_total = all.empty() ? 0 : all.back().clamp_events;
    return m;
}

} // namespace

RunResult run(const ScenarioConfig& cfg)
{
    cfg.validate();
    const long n_steps = cfg.steps();
    const double dt = cfg.dt;

    noise::NoiseConfig ncfg = cfg.noise;
    ncfg.seed = cfg.seed;
    ncfg.horizon = cfg.horizon;
    const noise::ShotSchedule schedule = noise::build_schedule(ncfg, dt);
    noise::CounterRng process_rng = noise::stream(cfg.seed, noise::Stream::Process);
    noise::CounterRng measurement_rng = noise::stream(cfg.seed, noise::Stream::Measurement);

    const filter::FilterConfig fcfg = cfg.filter_config();
    filter::FilterState fs = filter::initialize(cfg.z_hat0, cfg.P0, cfg.sigma);
    SeiarState z = cfg.z0;

    Vec2 y = model::measurement(z) +
             noise::sample_measurement_noise(measurement_rng, ncfg.r_diag, noise::ShotSchedule{}, 0.0,
                                             dt, ncfg.continuous_scaling);

    std::vector<StepRecord> all;
    all.reserve(static_cast<std::size_t>(n_steps) + 1);
    RunResult result;
    int non_optimal = 0;
    int regularized = 0;
    int clamps = 0;
    double jump = 0.0;
    int shots = 0;
    Vec2 prev_e = Vec2::Zero();
    Vec2 prev_mu = Vec2::Zero();

    for (long k = 0; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        try {
            const auto terms = controller::clf_terms(fs.z_hat, cfg.filter_params, cfg.traj, t, cfg.clf);
            const auto problem = controller::assemble_qp(terms, cfg.traj, t, cfg.clf);
            const auto sol = qp::solve(problem);

            ControlInput u;
            double h = 0.0;
            double objective = 0.0;
            if (sol.status == qp::QpStatus::Optimal) {
                u = {sol.x[1], sol.x[2]};
                h = sol.x[0];
                objective = sol.objective;
            } else {
                ++non_optimal;
                try {
                    u = controller::pwmc(terms, cfg.clf.z_floor);
                } catch (const DegenerateDirection&) {
                    u = {};
                }
            }
            if (sol.regularized)
                ++regularized;
            u.u1 = std::clamp(u.u1, cfg.clf.u_min[0], cfg.clf.u_max[0]);
            u.u2 = std::clamp(u.u2, cfg.clf.u_min[1], cfg.clf.u_max[1]);

            StepRecord rec;
            rec.t = t;
            rec.z = z.z;
            rec.z_hat = fs.z_hat.z;
            rec.y = y;
            rec.u = u.vec();
            rec.h = h;
            rec.nu = fs.nu;
            rec.V = terms.V;
            rec.e = terms.e;
            rec.objective = objective;
            rec.clamp_events = clamps;
            rec.estimate_jump = jump;
            rec.shots = shots;
            if (k > 0)
                rec.delta = (terms.e - prev_e) / dt - prev_mu;
            all.push_back(rec);
            if (k % cfg.record_stride == 0)
                result.records.push_back(rec);

            if (k == n_steps)
                break;

            prev_e = terms.e;
            prev_mu = controller::virtual_input(terms, cfg.traj.rate(t), u);

            const Vec5 w = noise::sample_process_noise(process_rng, ncfg.q_diag, dt, ncfg.continuous_scaling);
            const auto step = model::rk4_step(z, u, cfg.plant_params, w, dt);
            z = step.z;
            clamps += step.clamp_events;

            const Vec2 v = noise::sample_measurement_noise(measurement_rng, ncfg.r_diag, schedule, t, dt,
                                                           ncfg.continuous_scaling);
            shots = noise::shots_in_window(schedule, t, dt);
            y = model::measurement(z) + v;

            const SeiarState predicted = filter::predict_only(fs, u, cfg.filter_params, dt);
            fs = filter::filter_step(fs, y, u, cfg.filter_params, fcfg, dt);
            jump = (fs.z_hat.z - predicted.z).norm();
        } catch (const NonFinite& e) {
            rethrow_at(e, k);
        } catch (const IllConditioned& e) {
            rethrow_at(e, k);
        } catch (const SingularR& e) {
            rethrow_at(e, k);
        }
    }

    result.metrics = summarize(cfg, all);
    result.metrics.non_optimal_steps = non_optimal;
    result.metrics.regularized_steps = regularized;
    return result;
}

std::pair<RunResult, RunResult> compare_filters(const ScenarioConfig& cfg)
{
    ScenarioConfig emckf = cfg;
    emckf.filter_mode = filter::FilterMode::Emckf;
    ScenarioConfig ekf = cfg;
    ekf.filter_mode = filter::FilterMode::Ekf;

    auto ekf_run = std::async(std::launch::async, [ekf] { return run(ekf); });
    RunResult first = run(emckf);
    return {std::move(first), ekf_run.get()};
}

} // namespace seiar::sim
