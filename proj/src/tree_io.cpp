#include "laglad/tree_io.hpp"

#include <cmath>

#include "laglad/errors.hpp"

namespace laglad {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, "tree file: " + what); }

TreeProcess read_levels(const json& j, const std::string& key, std::size_t levels, bool binary_widths) {
  if (!j.contains(key)) invalid("missing " + key);
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != levels) invalid(key + " must have " + std::to_string(levels) + " levels");
  TreeProcess out;
  for (std::size_t k = 0; k < levels; ++k) {
    const json& level = v[k];
    if (!level.is_array() || (binary_widths && level.size() != (std::size_t{1} << k)))
      invalid(key + " level " + std::to_string(k) + " must have " + std::to_string(std::size_t{1} << k) + " entries");
    std::vector<double> row;
    for (const json& e : level) {
      if (!e.is_number()) invalid(key + " entries must be numbers");
      row.push_back(e.get<double>());
    }
    out.push_back(std::move(row));
  }
  return out;
}

json report_json(const MultSystemReport& r) {
  return {{"msdef", r.msdef}, {"q_martingale", r.q_martingale}, {"cocycle", r.cocycle},
          {"monotone", r.monotone}, {"range", r.range}};
}

}  // namespace

TreeInput parse_tree_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(e.what());
  }
  if (!j.is_object() || !j.contains("up_prob") || !j.at("up_prob").is_array()) invalid("missing up_prob");
  const std::size_t depth = j.at("up_prob").size();
  if (depth == 0 || depth > 16) invalid("depth must be in [1, 16]");
  TreeProcess up = read_levels(j, "up_prob", depth, true);
  for (const auto& level : up)
    for (double p : level)
      if (!(p > 0.0 && p < 1.0)) invalid("up probabilities must lie in (0, 1)");

  TreeInput in{FiltrationTree(up), std::nullopt, std::nullopt};
  const bool has_x = j.contains("x");
  const bool has_b = j.contains("b");
  if (has_x == has_b) invalid("give exactly one of x or b");
  if (has_x) {
    TreeLaglad x;
    x.x = read_levels(j, "x", depth + 1, true);
    x.x_plus = j.contains("x_plus") ? read_levels(j, "x_plus", depth + 1, true) : x.x;
    in.x = std::move(x);
  } else {
    in.b = read_levels(j, "b", depth + 1, true);
  }
  return in;
}

json tree_report_json(const MultSystem& ms) {
  const FiltrationTree& t = ms.tree;
  const std::size_t d = t.depth();
  json up = json::array();
  for (std::size_t k = 0; k < d; ++k) {
    json level = json::array();
    for (std::size_t j = 0; j < t.width(k); ++j) level.push_back(t.up_prob(k, j));
    up.push_back(level);
  }
  TreeProcess a_left = t.constant(0.0), a_right = t.constant(0.0);
  for (std::size_t k = 0; k <= d; ++k) {
    const std::vector<double> px = k == 0 ? std::vector<double>{} : t.conditional_expectation(k - 1, k, ms.x.x[k]);
    for (std::size_t j = 0; j < t.width(k); ++j) {
      if (k > 0) a_left[k][j] = px[j / 2] - ms.x.x_plus[k - 1][j / 2];
      a_right[k][j] = ms.x.x_plus[k][j] - ms.x.x[k][j];
    }
  }
  json ladder = json::array();
  for (const LadderRung& r : ms.ladder) ladder.push_back({{"epsilon", r.epsilon}, {"gap_to_limit", r.gap_to_limit}});
  return {{"up_prob", up},
          {"x", ms.x.x},
          {"x_plus", ms.x.x_plus},
          {"a_left", a_left},
          {"a_right", a_right},
          {"c_bar", ms.c_bar},
          {"c_bar_plus", ms.c_bar_plus},
          {"epsilon_ladder", ladder},
          {"ladder_monotone", ms.ladder_monotone},
          {"report", report_json(martingale_check(ms))}};
}

json tree_report_json(const ConstructedTime& ct) {
  json j = tree_report_json(ct.system);
  // law[leaf] holds P(τ = k | F_D) for k = 0..D followed by P(τ = ∞ | F_D).
  j["law"] = ct.law;
  if (!ct.b.empty()) {
    j["b"] = ct.b;
    const DualProjectionReport d = verify_dual_projection(ct);
    j["ho"] = d.ho;
    j["dual_projection"] = {{"max_deviation", d.max_deviation}, {"x_identity", d.x_identity}};
  }
  return j;
}

}  // namespace laglad
