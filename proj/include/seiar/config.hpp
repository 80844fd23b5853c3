#pragma once

#include "seiar/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace seiar::config {

enum class Preset { Nominal, PerturbPlus50, PerturbMinus50, EkfBaseline, NoiseFree };

std::optional<Preset> parse_preset(std::string_view name);
std::string_view preset_name(Preset p);

/// Fully specified scenario for a preset, seed and transmission rate.
sim::ScenarioConfig preset_config(Preset p, std::uint64_t seed, double beta);

/// Parses the key = value scenario format (see README). Throws ParseError
/// for malformed lines, unknown or repeated keys, and ValidationError when
/// the resulting scenario violates an invariant or `beta` is missing.
sim::ScenarioConfig parse_config(std::string_view text);

/// parse_config on a file. Throws IoError.
sim::ScenarioConfig load_config(const std::filesystem::path& path);

/// Flat key = value lines, one metric per line. Keys get `prefix` prepended.
std::string format_metrics(const sim::RunMetrics& m, std::string_view prefix = {});

void write_text(const std::filesystem::path& path, std::string_view text);

/// One-line summary for the terminal.
std::string digest(const sim::RunMetrics& m);

} // namespace seiar::config
