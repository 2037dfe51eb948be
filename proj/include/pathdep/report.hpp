#pragma once

#include <string>

#include <json.hpp>

#include "pathdep/continuity.hpp"
#include "pathdep/generator.hpp"
#include "pathdep/maf.hpp"
#include "pathdep/projectors.hpp"
#include "pathdep/skorokhod.hpp"

namespace pathdep {

// JSON views of the verification reports. nlohmann::json keeps object keys
// sorted, which the byte-stable report contract relies on.
nlohmann::json to_json(const CellResult& r);
nlohmann::json to_json(const MartingaleTestReport& r);
nlohmann::json to_json(const WeakGeneratorReport& r);
nlohmann::json to_json(const NestedReport& r);
nlohmann::json to_json(const FlowReport& r);
nlohmann::json to_json(const PinningReport& r);
nlohmann::json to_json(const TrivialityReport& r);
nlohmann::json to_json(const TightnessCondition& r);
nlohmann::json to_json(const TightnessVerdict& r);
nlohmann::json to_json(const ConvergenceReport& r);
nlohmann::json to_json(const CoefficientProbeReport& r);

// write with LF endings, creating parent directories
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace pathdep
