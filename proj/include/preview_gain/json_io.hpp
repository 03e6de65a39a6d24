#pragma once

#include <json.hpp>

#include "preview_gain/lifting.hpp"
#include "preview_gain/model.hpp"
#include "preview_gain/sim.hpp"
#include "preview_gain/synthesis.hpp"

namespace preview_gain {

using nlohmann::json;

inline json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw std::invalid_argument("matrix_from_json: expected a nested array");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) {
      throw std::invalid_argument("matrix_from_json: ragged rows");
    }
    for (Eigen::Index jj = 0; jj < cols; ++jj) m(i, jj) = j[i][jj].get<double>();
  }
  return m;
}

inline json step_to_json(const StepData& s) {
  return json{{"A", matrix_to_json(s.A)},
              {"B", matrix_to_json(s.B)},
              {"Q", matrix_to_json(s.Q)},
              {"R", matrix_to_json(s.R)}};
}

inline StepData step_from_json(const json& j) {
  StepData s;
  s.A = matrix_from_json(j.at("A"));
  s.B = matrix_from_json(j.at("B"));
  s.Q = matrix_from_json(j.at("Q"));
  s.R = matrix_from_json(j.at("R"));
  return s;
}

/// Model schema: {"n":int, "m":int, "kind":"periodic"|"explicit",
/// "steps":[{"A":[[..]],"B":[[..]],"Q":[[..]],"R":[[..]]}]}, row-major.
inline json model_to_json(const ModelProvider& mp) {
  json j;
  j["n"] = mp.n();
  j["m"] = mp.m();
  switch (mp.kind()) {
    case ModelProvider::Kind::Periodic:
      j["kind"] = "periodic";
      break;
    case ModelProvider::Kind::Explicit:
      j["kind"] = "explicit";
      break;
    case ModelProvider::Kind::Generator:
      throw std::invalid_argument("model_to_json: generator providers are not serializable");
  }
  json steps = json::array();
  for (long t = 0; t < mp.stored_steps(); ++t) steps.push_back(step_to_json(mp.step(t)));
  j["steps"] = std::move(steps);
  return j;
}

inline ModelProvider model_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const Eigen::Index n = j.at("n").get<Eigen::Index>();
  const Eigen::Index m = j.at("m").get<Eigen::Index>();
  std::vector<StepData> steps;
  for (const auto& js : j.at("steps")) steps.push_back(step_from_json(js));
  if (steps.empty()) throw std::invalid_argument("model_from_json: no steps");
  for (const auto& s : steps) {
    if (s.n() != n || s.m() != m) {
      throw std::invalid_argument("model_from_json: step dimensions disagree with (n, m)");
    }
  }
  if (kind == "periodic") return ModelProvider::periodic(std::move(steps));
  if (kind == "explicit") return ModelProvider::explicit_sequence(std::move(steps));
  throw std::invalid_argument("model_from_json: unknown kind '" + kind + "'");
}

inline json gramian_report_to_json(const GramianReport& r) {
  return json{{"d", r.d},
              {"c_obs", r.c_obs},
              {"c_ctr", r.c_ctr},
              {"window", {{"begin", r.window_begin}, {"end", r.window_end},
                          {"exact", r.window_exact}}},
              {"pass", r.pass},
              {"failed_t", r.failed_t},
              {"failure", r.failure}};
}

inline json part2_to_json(const Part2Report& p) {
  return json{{"r_sv_min", p.r_sv_min}, {"r_sv_max", p.r_sv_max},
              {"brb_min", p.brb_min},   {"brb_max", p.brb_max},
              {"q_min", p.q_min},       {"q_max", p.q_max},
              {"pass", p.pass},         {"reasons", p.reasons}};
}

inline json certificate_to_json(const PreviewCertificate& c) {
  return json{{"kappa_lo", c.kappa_lo},
              {"delta_up", c.delta_up},
              {"rho_up", c.rho_up},
              {"eta", c.eta},
              {"alpha_lo", c.alpha_lo},
              {"T_bar", c.T_bar},
              {"T_chosen", c.T_chosen},
              {"preview_steps", c.preview_steps},
              {"d", c.d},
              {"gamma", c.gamma},
              {"beta", c.beta},
              {"part2", part2_to_json(c.part2)},
              {"window", {{"begin", c.window_begin}, {"end", c.window_end},
                          {"exact", c.window_exact}}},
              {"feasible", c.feasible},
              {"reasons", c.reasons}};
}

inline json gain_report_to_json(const GainReport& r, const std::string& units) {
  json j{{"empirical", r.empirical},
         {"units", units},
         {"N", r.N},
         {"w_scale", r.w_scale},
         {"iterations", r.iterations},
         {"converged", r.converged}};
  if (std::isfinite(r.certified)) {
    j["certified"] = r.certified;
  } else {
    j["certified"] = nullptr;
  }
  return j;
}

inline json controller_state_to_json(const ControllerState& st) {
  json preview = json::array();
  for (const auto& s : st.preview) preview.push_back(step_to_json(s));
  json j{{"t", st.t},      {"d", st.d},         {"T", st.T},
         {"gamma", st.gamma}, {"beta", st.beta},
         {"current", step_to_json(st.current)}, {"preview", std::move(preview)}};
  if (st.last_K.size() > 0) j["last_K"] = matrix_to_json(st.last_K);
  if (st.last_X.size() > 0) j["last_X"] = matrix_to_json(st.last_X);
  return j;
}

inline ControllerState controller_state_from_json(const json& j) {
  ControllerState st;
  st.t = j.at("t").get<long>();
  st.d = j.at("d").get<int>();
  st.T = j.at("T").get<int>();
  st.gamma = j.at("gamma").get<double>();
  st.beta = j.at("beta").get<double>();
  st.current = step_from_json(j.at("current"));
  for (const auto& js : j.at("preview")) st.preview.push_back(step_from_json(js));
  if (j.contains("last_K")) st.last_K = matrix_from_json(j.at("last_K"));
  if (j.contains("last_X")) st.last_X = matrix_from_json(j.at("last_X"));
  return st;
}

}  // namespace preview_gain
