#pragma once

// JSON form of trees, systems and constructed times.
//
// Input:
//   {
//     "up_prob": [[p_00], [p_10, p_11], ...],      // levels 0..D-1
//     "x": [[...], ...], "x_plus": [[...], ...],   // levels 0..D, optional
//     "b": [[...], ...]                            // levels 0..D, optional
//   }
// Exactly one of (x, x_plus) or b must be present; x_plus defaults to x.
//
// Output adds "a_left" (ᵖX_k - X_{(k-1)+}), "a_right" (X_{k+} - X_k),
// "c_bar" ([u][t][j]), "report" and, for a B input, "law", "ho" and the
// dual-projection deviations.

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "laglad/mult_systems.hpp"
#include "laglad/tree.hpp"

namespace laglad {

struct TreeInput {
  FiltrationTree tree;
  std::optional<TreeLaglad> x;
  std::optional<TreeProcess> b;
};

/// Throws ConfigInvalid on malformed input.
TreeInput parse_tree_json(const std::string& text);

nlohmann::json tree_report_json(const MultSystem& ms);
nlohmann::json tree_report_json(const ConstructedTime& ct);

}  // namespace laglad
