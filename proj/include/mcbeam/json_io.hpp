#pragma once

#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mcbeam/acr_bb.hpp"
#include "mcbeam/problem.hpp"

namespace mcbeam {

// Instance files: {"n": int, "m": int, "channels": [[[re, im], ...] per
// user], "gamma": [...], "sigma2": [...], "seed": optional}. Complex numbers
// are always [re, im] pairs. gamma and sigma2 default to all-ones when
// absent. nlohmann serializes doubles with a shortest round-trip
// representation, so written instances read back bit for bit.

inline nlohmann::json instance_to_json(const RawInstance& raw) {
  nlohmann::json j;
  j["n"] = raw.n;
  j["m"] = raw.m;
  nlohmann::json chans = nlohmann::json::array();
  for (int k = 0; k < raw.m; ++k) {
    nlohmann::json user = nlohmann::json::array();
    for (int i = 0; i < raw.n; ++i)
      user.push_back({raw.channels(i, k).real(), raw.channels(i, k).imag()});
    chans.push_back(std::move(user));
  }
  j["channels"] = std::move(chans);
  j["gamma"] = std::vector<double>(raw.gamma.begin(), raw.gamma.end());
  j["sigma2"] = std::vector<double>(raw.sigma2.begin(), raw.sigma2.end());
  if (raw.seed) j["seed"] = *raw.seed;
  return j;
}

inline RawInstance instance_from_json(const nlohmann::json& j) {
  RawInstance raw;
  raw.n = j.at("n").get<int>();
  raw.m = j.at("m").get<int>();
  if (raw.n < 1 || raw.m < 1) throw std::invalid_argument("instance needs n, m >= 1");
  const auto& chans = j.at("channels");
  if (static_cast<int>(chans.size()) != raw.m)
    throw std::invalid_argument("channels must list one vector per user");
  raw.channels.resize(raw.n, raw.m);
  for (int k = 0; k < raw.m; ++k) {
    const auto& user = chans.at(k);
    if (static_cast<int>(user.size()) != raw.n)
      throw std::invalid_argument("channel vector length mismatch");
    for (int i = 0; i < raw.n; ++i) {
      const auto& z = user.at(i);
      if (z.size() != 2) throw std::invalid_argument("complex entries must be [re, im]");
      raw.channels(i, k) = {z.at(0).get<double>(), z.at(1).get<double>()};
    }
  }
  raw.gamma = Eigen::VectorXd::Ones(raw.m);
  raw.sigma2 = Eigen::VectorXd::Ones(raw.m);
  if (j.contains("gamma"))
    for (int k = 0; k < raw.m; ++k) raw.gamma[k] = j.at("gamma").at(k).get<double>();
  if (j.contains("sigma2"))
    for (int k = 0; k < raw.m; ++k) raw.sigma2[k] = j.at("sigma2").at(k).get<double>();
  if (j.contains("seed")) raw.seed = j.at("seed").get<std::uint64_t>();
  raw.validate();
  return raw;
}

inline void write_instance(const std::string& path, const RawInstance& raw) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << instance_to_json(raw).dump(2) << '\n';
}

inline RawInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return instance_from_json(j);
}

inline nlohmann::json beamformer_to_json(const Beamformer& w) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < w.size(); ++i) arr.push_back({w[i].real(), w[i].imag()});
  return arr;
}

/// Full solve result with the convergence trace. Relative errors per row are
/// measured against the returned objective value: e1 = |L - U*|/U*,
/// e2 = |U - U*|/U*, e3 = (U - L)/L.
inline nlohmann::json bb_result_to_json(const BbResult& r, double eps) {
  nlohmann::json j;
  j["status"] = to_string(r.status);
  j["eps"] = eps;
  j["u_star"] = r.u_star;
  j["l_final"] = r.l_final;
  j["iterations"] = r.iterations;
  j["objective"] = r.u_star;
  j["w_star"] = beamformer_to_json(r.w_star);
  nlohmann::json rows = nlohmann::json::array();
  const double nu = r.u_star;
  for (const IterationRecord& rec : r.trace) {
    nlohmann::json row;
    row["t"] = rec.t;
    row["lower"] = rec.lower;
    row["upper"] = rec.upper;
    row["gap"] = rec.gap;
    row["branch_user"] = rec.branch_user;
    if (std::isfinite(rec.split_point)) row["split_point"] = rec.split_point;
    if (std::isfinite(rec.left_value)) row["left_value"] = rec.left_value;
    if (std::isfinite(rec.right_value)) row["right_value"] = rec.right_value;
    if (nu > 0.0 && std::isfinite(nu)) {
      row["e1"] = std::abs(rec.lower - nu) / nu;
      row["e2"] = std::abs(rec.upper - nu) / nu;
      row["e3"] = std::abs(rec.upper - rec.lower) / rec.lower;
    }
    rows.push_back(std::move(row));
  }
  j["trace"] = std::move(rows);
  return j;
}

}  // namespace mcbeam
