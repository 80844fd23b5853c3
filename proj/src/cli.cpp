#include "seiar/cli.hpp"

#include "seiar/config.hpp"
#include "seiar/csv.hpp"
#include "seiar/errors.hpp"
#include "seiar/sim.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace seiar::cli {

namespace {

std::string key_of(const std::string& line)
{
    std::string body = line.substr(0, line.find('#'));
    const auto eq = body.find('=');
    if (eq == std::string::npos)
        return {};
    body = body.substr(0, eq);
    const auto first = body.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = body.find_last_not_of(" \t\r");
    return body.substr(first, last - first + 1);
}

std::filesystem::path with_suffix(const std::filesystem::path& p, const std::string& suffix)
{
    std::filesystem::path out = p;
    out.replace_filename(p.stem().string() + suffix + p.extension().string());
    return out;
}

} // namespace

std::string apply_overrides(const std::string& text,
                            const std::vector<std::pair<std::string, std::string>>& overrides)
{
    std::istringstream in(text);
    std::string out;
    std::string line;
    while (std::getline(in, line)) {
        const std::string key = key_of(line);
        const bool replaced = std::any_of(overrides.begin(), overrides.end(),
                                          [&](const auto& kv) { return kv.first == key; });
        if (replaced)
            out += "# overridden on the command line: ";
        out += line;
        out += '\n';
    }
    for (const auto& [key, value] : overrides)
        out += key + " = " + value + "\n";
    return out;
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Closed-loop SEIAR epidemic simulation with EMCKF estimation and QP robust-CLF control",
                 "seiarsim"};

    std::string preset;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> beta;
    std::string out_path = "seiar_run.csv";
    std::string metrics_path;
    bool compare = false;
    std::optional<std::string> days;
    std::optional<std::string> dt;
    std::optional<int> stride;

    auto* preset_opt = app.add_option("--preset", preset,
                                      "nominal, perturb_plus50, perturb_minus50, ekf_baseline, noise_free");
    auto* config_opt = app.add_option("--config", config_path, "scenario file (key = value lines)");
    preset_opt->excludes(config_opt);
    app.add_option("--seed", seed, "64-bit noise seed");
    app.add_option("--beta", beta, "transmission rate, or 'calibrated'");
    app.add_option("--out", out_path, "trajectory CSV path");
    app.add_option("--metrics", metrics_path, "metrics path (default: CSV path with .metrics)");
    app.add_flag("--compare-filters", compare, "run EMCKF and EKF on identical noise");
    app.add_option("--days", days, "horizon in days");
    app.add_option("--dt", dt, "integration step in days");
    app.add_option("--stride", stride, "integration steps per CSV row");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "seiarsim: " << e.what() << "\n";
        return 1;
    }

    try {
        std::string text;
        if (!config_path.empty()) {
            std::ifstream f(config_path, std::ios::binary);
            if (!f)
                throw IoError("cannot open config '" + config_path + "'");
            std::ostringstream ss;
            ss << f.rdbuf();
            text = ss.str();
        } else {
            const std::string name = preset.empty() ? "nominal" : preset;
            if (!config::parse_preset(name))
                throw ValidationError("unknown preset '" + name + "'");
            text = "preset = " + name + "\n";
            if (!beta)
                beta = "calibrated";
        }

        std::vector<std::pair<std::string, std::string>> overrides;
        if (beta)
            overrides.emplace_back("beta", *beta);
        if (seed)
            overrides.emplace_back("seed", std::to_string(*seed));
        if (days)
            overrides.emplace_back("horizon", *days);
        if (dt)
            overrides.emplace_back("dt", *dt);
        if (stride)
            overrides.emplace_back("record_stride", std::to_string(*stride));

        const sim::ScenarioConfig cfg = config::parse_config(apply_overrides(text, overrides));

        const std::filesystem::path csv_path(out_path);
        const std::filesystem::path met_path =
            metrics_path.empty() ? std::filesystem::path(csv_path).replace_extension(".metrics")
                                 : std::filesystem::path(metrics_path);

        if (compare) {
            const auto [emckf, ekf] = sim::compare_filters(cfg);
            csv::emit_csv(emckf.records, with_suffix(csv_path, "_emckf"));
            csv::emit_csv(ekf.records, with_suffix(csv_path, "_ekf"));
            config::write_text(met_path, config::format_metrics(emckf.metrics, "emckf.") +
                                             config::format_metrics(ekf.metrics, "ekf."));
            out << "emckf: " << config::digest(emckf.metrics) << "\n";
            out << "ekf:   " << config::digest(ekf.metrics) << "\n";
        } else {
            const auto result = sim::run(cfg);
            csv::emit_csv(result.records, csv_path);
            config::write_text(met_path, config::format_metrics(result.metrics));
            out << config::digest(result.metrics) << "\n";
        }
        return 0;
    } catch (const InputError& e) {
        err << "seiarsim: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "seiarsim: " << e.what() << "\n";
        return 2;
    }
}

} // namespace seiar::cli
