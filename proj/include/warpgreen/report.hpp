#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "warpgreen/config.hpp"
#include "warpgreen/verify.hpp"

namespace warpgreen {

nlohmann::json to_json(const CriticalPointReport& rep);
nlohmann::json to_json(const GenericitySample& s);
nlohmann::json to_json(const GenericitySummary& s);
nlohmann::json to_json(const SolutionBranch& br);
nlohmann::json to_json(const VerifyReport& rep);
nlohmann::json tables_to_json(const GreensTables& t);

// {"tool", "version", "command", "config", "result"}
nlohmann::json envelope(const std::string& command, const RunConfig& cfg, nlohmann::json result);

std::string table_csv(const Table& t, const Grid& grid);
std::string diagonal_csv(const GreensTables& t);

// Write to a sibling temporary file, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace warpgreen
