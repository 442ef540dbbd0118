#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "pushrec/trial.hpp"

namespace pushrec::io {

// Trial CSV format:
//   #key=value            metadata lines (id, mass_kg, strategy, start_mode,
//                         abandoned, pre_shift_start_m), before the header
//   time_s,position_m[,velocity_mps][,acceleration_mps2]
//   <decimal rows, '.' separator, LF newlines>
// Numbers are written with shortest round-trip precision, so a save/load
// cycle reproduces every finite double bit-exactly.
Trial load_trial(const std::filesystem::path& path,
                 const std::optional<std::filesystem::path>& meta = std::nullopt);
void save_trial(const Trial& trial, const std::filesystem::path& path);

// Treadmill CSV: header `time_s,speed_mps`.
TreadmillLog load_treadmill(const std::filesystem::path& path);
void save_treadmill(const TreadmillLog& log, const std::filesystem::path& path);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& field, Index line_no);

}  // namespace pushrec::io
