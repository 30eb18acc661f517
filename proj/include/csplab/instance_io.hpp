#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "csplab/csp.hpp"

namespace csplab {

// Text format:
//   maxcsp k=<k> sigma=<|Σ|> vars=<n> constraints=<m>
//   pred <name> <bitstring of length |Σ|^k>
//   c <pred-name> <v1> ... <vk>
// Blank lines and lines starting with '#' are ignored.
std::string to_text(const Instance& instance);
Instance parse_text(std::string_view text);

nlohmann::json to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& j);

// Picks the JSON reader when the first non-blank character is '{'.
Instance parse_instance(std::string_view text);
Instance load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const Instance& instance);

}  // namespace csplab
