#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "iskew/model.hpp"

namespace iskew {

/// Malformed model document; the message names the offending key.
class ModelParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses the JSON model schema
///
///   { "mode": "one_factor" | "two_factor",
///     "components": [ { "weight": r, "sigma": r, "eta": r, "hurst": r }, ... ],
///     "correlation": [ [r, ...], ... ] }
///
/// Unknown keys are rejected. Structural checks only: call validate() for the model invariants.
IndexModel parse_model(std::string_view json_text);
IndexModel load_model(const std::filesystem::path& path);

std::string to_json(const IndexModel& model);

}  // namespace iskew
