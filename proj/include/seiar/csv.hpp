#pragma once

#include "seiar/sim.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace seiar::csv {

inline constexpr std::string_view kHeader =
    "t,z1,z2,z3,z4,z5,zhat1,zhat2,zhat3,zhat4,zhat5,y1,y2,u1,u2,h,nu,V,e1,e2";

/// Shortest decimal that parses back to the same double; locale independent.
std::string format_double(double v);

/// Inverse of format_double. Throws ParseError on malformed text.
double parse_double(std::string_view text, int line = 0, std::string_view key = {});

std::string format_csv(const std::vector<sim::StepRecord>& records);

/// Writes the header and one row per record. Throws IoError.
void emit_csv(const std::vector<sim::StepRecord>& records, const std::filesystem::path& path);

/// Reads back the CSV columns (other StepRecord fields stay default).
std::vector<sim::StepRecord> parse_csv(std::string_view text);
std::vector<sim::StepRecord> read_csv(const std::filesystem::path& path);

} // namespace seiar::csv
