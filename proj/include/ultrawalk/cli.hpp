#pragma once

// Command-line front end: simulate, rg, absorb and collapse subcommands that
// write CSV/JSON artifacts into an output directory.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ultrawalk/hierarchy.hpp"

namespace ultrawalk::cli {

inline constexpr std::string_view kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericError = 2 };

// argv[0] is the program name.
int run(int argc, const char* const* argv);
// Arguments without the program name.
int run(const std::vector<std::string>& args);

// "dyadic" (2, 4, ..., t_max), "linear:<n>" (n evenly spaced times ending at
// t_max) or "list:t1,t2,...".
std::vector<std::int64_t> parse_schedule(std::string_view text, std::int64_t t_max);

// "default" or four comma-separated numbers re+,im+,re-,im-.
Vec2c parse_ic(std::string_view text, Flavor flavor);

// 17 significant digits, enough to round-trip a double.
std::string format_double(double v);

// Worker count for sweeps: ULTRAWALK_THREADS if set, else the hardware count.
unsigned sweep_threads(std::size_t tasks);

} // namespace ultrawalk::cli
