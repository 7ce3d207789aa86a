#pragma once

// JSON generator files:
//
//   {
//     "label": "my lattice",
//     "covolume": 6.283185307179586,
//     "stabilizer_order": 2,
//     "base_point": [0, 1],                       // optional, default i
//     "generators": [ [[1, 1], [0, 1]], [["0", "1"], ["-1", "0"]], ... ]
//   }
//
// Matrix entries are numbers or exact rational strings ("3/2", "-7"). Missing
// inverses are added on load.

#include <filesystem>
#include <string_view>

#include "hypangles/lattice.hpp"

namespace hypangles {

/// Throws std::invalid_argument on malformed input.
LatticeSpec parse_generator_spec(std::string_view json_text);

/// Throws std::runtime_error if the file cannot be read.
LatticeSpec load_generator_file(const std::filesystem::path& path);

/// Parses "p", "p/q" or a decimal literal.
double parse_rational(std::string_view text);

}  // namespace hypangles
