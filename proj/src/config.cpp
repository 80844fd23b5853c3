#include "seiar/config.hpp"

#include "seiar/csv.hpp"
#include "seiar/errors.hpp"
#include "seiar/model.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace seiar::config {

namespace {

constexpr std::string_view kPresetNames[] = {"nominal", "perturb_plus50", "perturb_minus50",
                                             "ekf_baseline", "noise_free"};

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string value;
    int line = 0;
};

class Reader {
public:
    explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

    const Entry& raw(const std::string& key)
    {
        used_.insert(key);
        return entries_.at(key);
    }

    void number(const std::string& key, double& out)
    {
        if (has(key))
            out = csv::parse_double(raw(key).value, entries_.at(key).line, key);
    }

    template <int N>
    void vector(const std::string& key, Eigen::Matrix<double, N, 1>& out)
    {
        if (!has(key))
            return;
        const auto list = numbers(key);
        if (list.size() != static_cast<std::size_t>(N))
            throw ParseError("expected " + std::to_string(N) + " numbers", entries_.at(key).line, key);
        for (int j = 0; j < N; ++j)
            out[j] = list[static_cast<std::size_t>(j)];
    }

    std::vector<double> numbers(const std::string& key)
    {
        const Entry& e = raw(key);
        std::vector<double> out;
        std::string text = e.value;
        for (char& c : text) {
            if (c == ',')
                c = ' ';
        }
        std::istringstream ss(text);
        std::string tok;
        while (ss >> tok)
            out.push_back(csv::parse_double(tok, e.line, key));
        return out;
    }

    void boolean(const std::string& key, bool& out)
    {
        if (!has(key))
            return;
        const Entry& e = raw(key);
        if (e.value == "true" || e.value == "1")
            out = true;
        else if (e.value == "false" || e.value == "0")
            out = false;
        else
            throw ParseError("expected true or false", e.line, key);
    }

    void integer(const std::string& key, long long& out)
    {
        if (!has(key))
            return;
        const Entry& e = raw(key);
        try {
            std::size_t used = 0;
            out = std::stoll(e.value, &used);
            if (used != e.value.size())
                throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError("expected an integer", e.line, key);
        }
    }

    void reject_unused() const
    {
        for (const auto& [key, e] : entries_) {
            if (!used_.count(key))
                throw ParseError("unknown key", e.line, key);
        }
    }

private:
    std::map<std::string, Entry> entries_;
    std::set<std::string> used_;
};

void read_params(Reader& r, const std::string& prefix, ModelParams& th)
{
    r.number(prefix + "beta", th.beta);
    r.number(prefix + "epsilon", th.epsilon);
    r.number(prefix + "q", th.q);
    r.number(prefix + "delta", th.delta);
    r.number(prefix + "kappa", th.kappa);
    r.number(prefix + "p", th.p);
    r.number(prefix + "alpha", th.alpha);
    r.number(prefix + "eta", th.eta);
    r.number(prefix + "zeta", th.zeta);
}

} // namespace

std::optional<Preset> parse_preset(std::string_view name)
{
    for (std::size_t i = 0; i < std::size(kPresetNames); ++i) {
        if (kPresetNames[i] == name)
            return static_cast<Preset>(i);
    }
    return std::nullopt;
}

std::string_view preset_name(Preset p)
{
    return kPresetNames[static_cast<std::size_t>(p)];
}

sim::ScenarioConfig preset_config(Preset p, std::uint64_t seed, double beta)
{
    sim::ScenarioConfig c;
    c.horizon = 40.0;
    c.dt = 0.01;
    c.population = 16000.0;
    c.plant_params = table_params(beta);
    c.filter_params = c.plant_params;
    c.z0 = SeiarState(15000, 200, 500, 300, 0);
    c.z_hat0 = SeiarState(11000, 800, 1000, 700, 2500);
    c.P0 = Mat5::Identity();
    c.noise.q_diag = Vec5::Ones();
    c.noise.r_diag = Vec2::Constant(0.01);
    c.noise.shot_count = 20;
    c.noise.shot_magnitude = 200.0;
    c.filter_mode = filter::FilterMode::Emckf;
    c.sigma = 0.01;
    c.clf = controller::ClfConfig{};
    c.traj.law = controller::TrajectoryLaw::ExpDecay;
    c.traj.gamma = 0.3;
    c.traj.z0 = {c.z_hat0.s(), c.z_hat0.i()};
    c.seed = seed;
    c.record_stride = 10;

    switch (p) {
    case Preset::Nominal:
        break;
    case Preset::PerturbPlus50:
        c.filter_params = c.plant_params.scaled(1.5);
        break;
    case Preset::PerturbMinus50:
        c.filter_params = c.plant_params.scaled(0.5);
        break;
    case Preset::EkfBaseline:
        c.filter_mode = filter::FilterMode::Ekf;
        break;
    case Preset::NoiseFree:
        c.noise.q_diag = Vec5::Zero();
        c.noise.r_diag = Vec2::Constant(1e-10);
        c.noise.shot_count = 0;
        c.z_hat0 = c.z0;
        c.P0 = Mat5::Zero();
        c.traj.law = controller::TrajectoryLaw::ConstantZero;
        c.traj.z0 = Vec2::Zero();
        break;
    }
    return c;
}

sim::ScenarioConfig parse_config(std::string_view text)
{
    std::map<std::string, Entry> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected 'key = value'", line_no, {});
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ParseError("empty key", line_no, {});
        if (value.empty())
            throw ParseError("empty value", line_no, key);
        if (!entries.emplace(key, Entry{value, line_no}).second)
            throw ParseError("repeated key", line_no, key);
    }

    Reader r(std::move(entries));

    if (!r.has("beta"))
        throw ValidationError("beta is required: give a transmission rate or 'calibrated' "
                              "(R0 = 1.8 at N0 = 16000, see README, transmission rate)");
    double beta = 0.0;
    {
        const Entry& e = r.raw("beta");
        beta = e.value == "calibrated" ? model::default_beta() : csv::parse_double(e.value, e.line, "beta");
    }

    Preset preset = Preset::Nominal;
    if (r.has("preset")) {
        const Entry& e = r.raw("preset");
        const auto parsed = parse_preset(e.value);
        if (!parsed)
            throw ParseError("unknown preset '" + e.value + "'", e.line, "preset");
        preset = *parsed;
    }
    long long seed = 0;
    r.integer("seed", seed);
    if (seed < 0)
        throw ValidationError("seed >= 0");

    sim::ScenarioConfig c = preset_config(preset, static_cast<std::uint64_t>(seed), beta);
    const ModelParams preset_plant = c.plant_params;
    const ModelParams preset_estimate = c.filter_params;

    r.number("horizon", c.horizon);
    r.number("dt", c.dt);
    r.number("population", c.population);
    long long stride = c.record_stride;
    r.integer("record_stride", stride);
    c.record_stride = static_cast<int>(stride);

    r.vector<5>("z0", c.z0.z);
    const bool traj_z0_default = !r.has("traj.z0");
    r.vector<5>("z_hat0", c.z_hat0.z);
    if (r.has("P0")) {
        const auto v = r.numbers("P0");
        if (v.size() == 5) {
            c.P0 = Vec5(Eigen::Map<const Vec5>(v.data())).asDiagonal();
        } else if (v.size() == 25) {
            c.P0 = Eigen::Map<const Eigen::Matrix<double, 5, 5, Eigen::RowMajor>>(v.data());
        } else {
            throw ParseError("P0 takes 5 diagonal or 25 row-major entries", r.line("P0"), "P0");
        }
    }

    read_params(r, "plant.", c.plant_params);
    if (r.has("plant.beta"))
        throw ParseError("use 'beta' for the plant transmission rate", r.line("plant.beta"), "plant.beta");

    // The estimate follows the plant unless scaled or overridden.
    const bool plant_changed = !(c.plant_params == preset_plant);
    double scale = 1.0;
    r.number("estimate.scale", scale);
    if (r.has("estimate.scale") || plant_changed)
        c.filter_params = c.plant_params.scaled(scale);
    else
        c.filter_params = preset_estimate;
    read_params(r, "estimate.", c.filter_params);

    r.vector<5>("noise.q_diag", c.noise.q_diag);
    r.vector<2>("noise.r_diag", c.noise.r_diag);
    long long shots = c.noise.shot_count;
    r.integer("noise.shot_count", shots);
    c.noise.shot_count = static_cast<int>(shots);
    r.number("noise.shot_magnitude", c.noise.shot_magnitude);
    r.boolean("noise.continuous_scaling", c.noise.continuous_scaling);

    if (r.has("filter.mode")) {
        const Entry& e = r.raw("filter.mode");
        if (e.value == "emckf")
            c.filter_mode = filter::FilterMode::Emckf;
        else if (e.value == "ekf")
            c.filter_mode = filter::FilterMode::Ekf;
        else
            throw ParseError("expected emckf or ekf", e.line, "filter.mode");
    }
    r.number("filter.sigma", c.sigma);
    r.boolean("filter.kernel_literal", c.kernel_literal);

    r.number("clf.lambda", c.clf.lambda);
    r.number("clf.k_r", c.clf.k_r);
    r.number("clf.c", c.clf.c);
    r.vector<2>("clf.u_min", c.clf.u_min);
    r.vector<2>("clf.u_max", c.clf.u_max);
    r.number("clf.z_floor", c.clf.z_floor);

    if (r.has("traj.law")) {
        const Entry& e = r.raw("traj.law");
        if (e.value == "exp_decay")
            c.traj.law = controller::TrajectoryLaw::ExpDecay;
        else if (e.value == "constant_zero")
            c.traj.law = controller::TrajectoryLaw::ConstantZero;
        else
            throw ParseError("expected exp_decay or constant_zero", e.line, "traj.law");
    }
    r.number("traj.gamma", c.traj.gamma);
    r.vector<2>("traj.z0", c.traj.z0);
    if (traj_z0_default)
        c.traj.z0 = c.traj.law == controller::TrajectoryLaw::ExpDecay ? Vec2(c.z_hat0.s(), c.z_hat0.i())
                                                                      : Vec2::Zero();

    r.reject_unused();
    c.validate();
    return c;
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open '" + path.string() + "' for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f)
        throw IoError("failed writing '" + path.string() + "'");
}

sim::ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string format_metrics(const sim::RunMetrics& m, std::string_view prefix)
{
    std::string out;
    auto put = [&](std::string_view key, const std::string& value) {
        out.append(prefix).append(key).append(" = ").append(value).append("\n");
    };
    auto num = [&](std::string_view key, double v) { put(key, csv::format_double(v)); };

    num("rmse_tracking", m.rmse_tracking);
    num("rmse_tracking_steady", m.rmse_tracking_steady);
    num("rmse_estimation", m.rmse_estimation);
    num("rmse_estimation_steady", m.rmse_estimation_steady);
    num("u1_max", m.u_max[0]);
    num("u2_max", m.u_max[1]);
    num("u_rms", m.u_rms);
    num("h_max", m.h_max);
    put("converge_day", m.converge_day ? csv::format_double(*m.converge_day) : "not_converged");
    put("clamp_total", std::to_string(m.clamp_total));
    num("max_jump_at_shots", m.max_jump_at_shots);
    num("max_nu_at_shots", m.max_nu_at_shots);
    num("u_total_variation_late", m.u_total_variation_late);
    put("non_optimal_steps", std::to_string(m.non_optimal_steps));
    put("regularized_steps", std::to_string(m.regularized_steps));
    num("delta_rms", m.delta_rms);
    put("steps", std::to_string(m.steps));
    return out;
}

std::string digest(const sim::RunMetrics& m)
{
    std::ostringstream ss;
    ss.precision(4);
    ss << "rmse_t=" << m.rmse_tracking << " rmse_e=" << m.rmse_estimation << " u_max=(" << m.u_max[0]
       << "," << m.u_max[1] << ") h_max=" << m.h_max << " converge_day=";
    if (m.converge_day)
        ss << *m.converge_day;
    else
        ss << "none";
    ss << " clamps=" << m.clamp_total;
    return ss.str();
}

} // namespace seiar::config
