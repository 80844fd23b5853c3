#include <doctest.h>

#include <seiar/cli.hpp>
#include <seiar/csv.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using seiar::cli::run_main;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::path(SEIAR_TEST_TMPDIR) / "cli";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int call(std::vector<std::string> args, std::string* err_text = nullptr)
{
    std::ostringstream out, err;
    const int rc = run_main(args, out, err);
    if (err_text)
        *err_text = err.str();
    return rc;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_CASE("preset run writes csv and metrics")
{
    const fs::path out = scratch("nominal.csv");
    CHECK(call({"--preset", "nominal", "--seed", "42", "--days", "4", "--out", out.string()}) == 0);
    const std::string text = slurp(out);
    CHECK(text.rfind(std::string(seiar::csv::kHeader) + "\n", 0) == 0);
    // header + 4 / 0.01 / 10 + 1 rows
    CHECK(line_count(text) == 1 + 41);
    const std::string metrics = slurp(fs::path(out).replace_extension(".metrics"));
    CHECK(metrics.find("rmse_estimation = ") != std::string::npos);

    CHECK(seiar::csv::parse_csv(text).size() == 41);
}

TEST_CASE("stride and explicit beta")
{
    const fs::path out = scratch("stride.csv");
    CHECK(call({"--preset", "noise_free", "--beta", "4.1e-5", "--days", "2", "--stride", "20", "--out",
                out.string()}) == 0);
    CHECK(line_count(slurp(out)) == 1 + 11);
}

TEST_CASE("filter comparison outputs")
{
    const fs::path out = scratch("cmp.csv");
    CHECK(call({"--preset", "nominal", "--compare-filters", "--days", "2", "--out", out.string()}) == 0);
    CHECK(fs::exists(scratch("cmp_emckf.csv")));
    CHECK(fs::exists(scratch("cmp_ekf.csv")));
    const std::string metrics = slurp(scratch("cmp.metrics"));
    CHECK(metrics.find("emckf.rmse_estimation") != std::string::npos);
    CHECK(metrics.find("ekf.rmse_estimation") != std::string::npos);
}

TEST_CASE("config files and overrides")
{
    const fs::path cfg = scratch("run.cfg");
    {
        std::ofstream f(cfg);
        f << "preset = nominal\nbeta = calibrated\nseed = 5\nhorizon = 1\n";
    }
    const fs::path out = scratch("cfg.csv");
    CHECK(call({"--config", cfg.string(), "--out", out.string()}) == 0);
    CHECK(line_count(slurp(out)) == 1 + 11);
    CHECK(call({"--config", cfg.string(), "--days", "2", "--out", out.string()}) == 0);
    CHECK(line_count(slurp(out)) == 1 + 21);

    const std::string layered = seiar::cli::apply_overrides("a = 1\nb = 2\n", {{"a", "3"}});
    CHECK(layered.find("a = 3") != std::string::npos);
    CHECK(layered.find("b = 2") != std::string::npos);
    CHECK(layered.find("\na = 1") == std::string::npos);
}

TEST_CASE("exit codes")
{
    std::string err;
    CHECK(call({"--help"}) == 0);
    CHECK(call({"--preset", "bogus"}, &err) == 1);
    CHECK(err.find("bogus") != std::string::npos);
    CHECK(call({"--preset", "nominal", "--config", "x.cfg"}) == 1);
    CHECK(call({"--no-such-flag"}) == 1);
    CHECK(call({"--config", scratch("missing.cfg").string()}) == 1);
    CHECK(call({"--preset", "nominal", "--dt", "0", "--out", scratch("dt.csv").string()}, &err) == 1);
    CHECK(err.find("dt > 0") != std::string::npos);
    CHECK(call({"--preset", "nominal", "--days", "1", "--out", "/nonexistent/dir/x.csv"}) == 1);

    const fs::path bad = scratch("overflow.cfg");
    {
        std::ofstream f(bad);
        f << "beta = 1e300\nhorizon = 1\n";
    }
    CHECK(call({"--config", bad.string(), "--out", scratch("of.csv").string()}, &err) == 2);
}
