#pragma once

#include <iosfwd>
#include <string>

#include "sbopt/problems.hpp"

namespace sbopt {

/// Structured TSPLIB parse failure with line context.
struct TsplibParseError : std::runtime_error {
    TsplibParseError(const std::string& message, std::size_t line)
        : std::runtime_error("tsplib: " + message + " (line " + std::to_string(line) + ")"),
          line_number(line) {}
    std::size_t line_number;
};

/// Parses an explicit full-matrix ATSP document. Accepts only TYPE: ATSP,
/// EDGE_WEIGHT_TYPE: EXPLICIT, EDGE_WEIGHT_FORMAT: FULL_MATRIX; anything else
/// is an unsupported-feature error.
ATSPInstance parse_atsp(const std::string& text);
ATSPInstance parse_atsp_file(const std::string& path);

std::string serialize_atsp(const ATSPInstance& instance);

}  // namespace sbopt
