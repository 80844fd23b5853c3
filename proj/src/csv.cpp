#include "seiar/csv.hpp"

#include "seiar/errors.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace seiar::csv {

std::string format_double(double v)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text, int line, std::string_view key)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw ParseError("not a number: '" + std::string(text) + "'", line, std::string(key));
    return v;
}

std::string format_csv(const std::vector<sim::StepRecord>& records)
{
    std::string out(kHeader);
    out += '\n';
    for (const auto& r : records) {
        auto put = [&](double v, bool last = false) {
            out += format_double(v);
            out += last ? '\n' : ',';
        };
        put(r.t);
        for (int j = 0; j < 5; ++j)
            put(r.z[j]);
        for (int j = 0; j < 5; ++j)
            put(r.z_hat[j]);
        put(r.y[0]);
        put(r.y[1]);
        put(r.u[0]);
        put(r.u[1]);
        put(r.h);
        put(r.nu);
        put(r.V);
        put(r.e[0]);
        put(r.e[1], true);
    }
    return out;
}

void emit_csv(const std::vector<sim::StepRecord>& records, const std::filesystem::path& path)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open '" + path.string() + "' for writing");
    const std::string text = format_csv(records);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f)
        throw IoError("failed writing '" + path.string() + "'");
}

std::vector<sim::StepRecord> parse_csv(std::string_view text)
{
    std::vector<sim::StepRecord> out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != kHeader)
                throw ParseError("unexpected CSV header", 1, {});
            continue;
        }
        if (line.empty())
            continue;

        std::array<double, 20> f{};
        std::size_t col = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string_view cell = line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start);
            if (col >= f.size())
                throw ParseError("too many CSV columns", line_no, {});
            f[col++] = parse_double(cell, line_no, {});
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        if (col != f.size())
            throw ParseError("expected 20 CSV columns", line_no, {});

        sim::StepRecord r;
        r.t = f[0];
        for (int j = 0; j < 5; ++j) {
            r.z[j] = f[static_cast<std::size_t>(1 + j)];
            r.z_hat[j] = f[static_cast<std::size_t>(6 + j)];
        }
        r.y = {f[11], f[12]};
        r.u = {f[13], f[14]};
        r.h = f[15];
        r.nu = f[16];
        r.V = f[17];
        r.e = {f[18], f[19]};
        out.push_back(r);
    }
    return out;
}

std::vector<sim::StepRecord> read_csv(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str());
}

} // namespace seiar::csv
