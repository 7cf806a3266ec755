#pragma once

#include <string>

#include "blm/model.hpp"

namespace blm {

// Parses BLM source text into a model. The result always passes
// validate_model; syntax problems raise Error with a source span
// (codes: ParseError, DuplicateLabel, UnknownStatement).
LogicModel parse_source(const std::string& text, const std::string& filename = "<input>");

// Canonical printer; parse_source(pretty_print(m)) is structurally equal
// to m for every valid model.
std::string pretty_print(const LogicModel& model);

}  // namespace blm
