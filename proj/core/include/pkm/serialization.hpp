#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pkm/evaluation.hpp"
#include "pkm/model.hpp"
#include "pkm/profile.hpp"

// JSON persistence. Every floating-point number is written with 17
// significant digits, so a save/load round trip is bit-exact.

namespace pkm {

inline constexpr std::string_view kModelFormat = "pkm-model";
inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const PkmModel& model);
/// Throws DataError on malformed input or an unsupported format version.
PkmModel model_from_json(std::string_view text);

void save_model(const PkmModel& model, const std::filesystem::path& path);
PkmModel load_model(const std::filesystem::path& path);

std::string report_to_json(const EvaluationReport& report);
std::string profiles_to_json(const ProfileReport& report);

}  // namespace pkm
