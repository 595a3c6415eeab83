#pragma once

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "accountant.hpp"
#include "bounded.hpp"
#include "graph.hpp"
#include "harness.hpp"
#include "unbounded.hpp"

namespace dpsp {

using json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

namespace detail {

// Doubles are emitted with the shortest representation that parses back to
// the same bits; +inf (no finite distance / exhausted budget) becomes null.
inline json enc(double x) { return x == kInf ? json(nullptr) : json(x); }

inline double dec(const json& j) { return j.is_null() ? kInf : j.get<double>(); }

inline json enc_vec(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(enc(x));
  return arr;
}

inline std::vector<double> dec_vec(const json& j) {
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(dec(x));
  return v;
}

inline void expect_kind(const json& j, const char* kind) {
  if (!j.is_object() || j.value("kind", std::string{}) != kind)
    throw std::invalid_argument(std::string("parse: expected kind '") + kind + "'");
  if (j.value("format_version", -1) != kFormatVersion)
    throw std::invalid_argument("parse: unsupported format version");
}

inline json header(const char* kind) {
  json j = json::object();
  j["format_version"] = kFormatVersion;
  j["kind"] = kind;
  return j;
}

}  // namespace detail

// --- budgets and parameters ----------------------------------------------------

inline json serialize_budget(const PrivacyBudget& b) {
  return json{{"epsilon", b.epsilon}, {"delta", b.delta}};
}

inline PrivacyBudget parse_budget(const json& j) {
  return PrivacyBudget{j.at("epsilon").get<double>(), j.at("delta").get<double>()};
}

inline json serialize_params(const UnboundedParams& p) {
  json j = json::object();
  j["mode"] = to_string(p.mode);
  j["hitting_set_size"] = p.hitting_set_size;
  j["noise_scale_s"] = p.noise_scale_s;
  j["edge_noise_scale"] = p.edge_noise_scale;
  j["hop_radius"] = p.hop_radius;
  j["c_l"] = p.c_l;
  j["c_t"] = p.c_t;
  return j;
}

inline UnboundedParams parse_params(const json& j) {
  UnboundedParams p;
  p.mode = mode_from_string(j.at("mode").get<std::string>());
  p.hitting_set_size = j.at("hitting_set_size").get<std::uint64_t>();
  p.noise_scale_s = j.at("noise_scale_s").get<double>();
  p.edge_noise_scale = j.at("edge_noise_scale").get<double>();
  p.hop_radius = j.at("hop_radius").get<std::uint64_t>();
  p.c_l = j.at("c_l").get<double>();
  p.c_t = j.at("c_t").get<double>();
  return p;
}

inline json serialize_params(const BoundedParams& p) {
  json j = json::object();
  j["mode"] = to_string(p.mode);
  j["iterations"] = p.iterations;
  j["ball_size_cap_raw"] = p.ball_size_cap_raw;
  j["ball_size_cap"] = p.ball_size_cap;
  j["peel_radius_mean"] = p.peel_radius_mean;
  j["hitting_set_size"] = p.hitting_set_size;
  j["red_scale"] = p.red_scale;
  j["blue_scale"] = p.blue_scale;
  j["red_budget"] = p.red_budget;
  j["blue_budget"] = p.blue_budget;
  j["green_budget"] = p.green_budget;
  j["recursion_floor"] = p.recursion_floor;
  j["paper_constants"] = p.paper_constants;
  return j;
}

// --- accounting -----------------------------------------------------------------

inline json serialize_accounting(const UnboundedAccounting& a) {
  json j = json::object();
  j["edge_epsilon"] = detail::enc(a.edge_epsilon);
  j["s_pairs"] = a.s_pairs;
  j["s_epsilon"] = detail::enc(a.s_epsilon);
  j["s_delta"] = a.s_delta;
  j["total_epsilon"] = detail::enc(a.total_epsilon);
  j["total_delta"] = a.total_delta;
  j["within_budget"] = a.within_budget;
  return j;
}

inline UnboundedAccounting parse_unbounded_accounting(const json& j) {
  UnboundedAccounting a;
  a.edge_epsilon = detail::dec(j.at("edge_epsilon"));
  a.s_pairs = j.at("s_pairs").get<std::uint64_t>();
  a.s_epsilon = detail::dec(j.at("s_epsilon"));
  a.s_delta = j.at("s_delta").get<double>();
  a.total_epsilon = detail::dec(j.at("total_epsilon"));
  a.total_delta = j.at("total_delta").get<double>();
  a.within_budget = j.at("within_budget").get<bool>();
  return a;
}

inline json serialize_accounting(const BoundedAccounting& a) {
  json j = json::object();
  j["n"] = a.n;
  j["iterations"] = a.iterations;
  j["mode"] = to_string(a.mode);
  j["eps_param"] = a.eps_param;
  j["delta_param"] = a.delta_param;
  j["fallback"] = a.fallback;
  if (a.fallback) j["fallback_audit"] = serialize_accounting(a.fallback_audit);
  j["red_epsilon"] = detail::enc(a.red_epsilon);
  j["blue_epsilon"] = detail::enc(a.blue_epsilon);
  j["blue_delta"] = a.blue_delta;
  j["green_epsilon"] = detail::enc(a.green_epsilon);
  j["green_delta"] = a.green_delta;
  j["total_epsilon"] = detail::enc(a.total_epsilon);
  j["total_delta"] = a.total_delta;
  j["within_budget"] = a.within_budget;
  json kids = json::array();
  for (const auto& c : a.children) kids.push_back(serialize_accounting(c));
  j["children"] = std::move(kids);
  return j;
}

// --- matrices -------------------------------------------------------------------

inline json serialize_matrix(const DistanceMatrix& m) {
  json j = detail::header("distance_matrix");
  j["n"] = m.n;
  j["values"] = detail::enc_vec(m.values);
  return j;
}

inline DistanceMatrix parse_matrix(const json& j) {
  detail::expect_kind(j, "distance_matrix");
  DistanceMatrix m;
  m.n = j.at("n").get<std::size_t>();
  m.values = detail::dec_vec(j.at("values"));
  if (m.values.size() != m.n * m.n) throw std::invalid_argument("parse: matrix size mismatch");
  return m;
}

// --- releases -------------------------------------------------------------------

inline json serialize_release(const UnboundedRelease& r) {
  json j = detail::header("unbounded_release");
  j["n"] = r.n;
  j["budget"] = serialize_budget(r.budget);
  j["params"] = serialize_params(r.params);
  j["seed"] = r.seed;
  j["stream_id"] = r.stream_id;
  j["hitting_set"] = r.hitting_set;
  j["noisy_weights"] = detail::enc_vec(r.noisy_weights);
  j["s_distances"] = detail::enc_vec(r.s_distances);
  j["accounting"] = serialize_accounting(r.accounting);
  return j;
}

inline UnboundedRelease parse_release(const json& j) {
  detail::expect_kind(j, "unbounded_release");
  UnboundedRelease r;
  r.n = j.at("n").get<std::size_t>();
  r.budget = parse_budget(j.at("budget"));
  r.params = parse_params(j.at("params"));
  r.seed = j.at("seed").get<std::uint64_t>();
  r.stream_id = j.at("stream_id").get<std::uint64_t>();
  r.hitting_set = j.at("hitting_set").get<std::vector<std::uint32_t>>();
  r.noisy_weights = detail::dec_vec(j.at("noisy_weights"));
  r.s_distances = detail::dec_vec(j.at("s_distances"));
  r.accounting = parse_unbounded_accounting(j.at("accounting"));
  return r;
}

inline json serialize_bounded_result(const BoundedResult& r) {
  json j = detail::header("bounded_release");
  j["n"] = r.estimates.n;
  j["requested"] = serialize_budget(r.requested);
  j["delta_param"] = r.delta_param;
  j["seed"] = r.seed;
  j["stream_id"] = r.stream_id;
  j["params"] = serialize_params(r.params);
  j["accounting"] = serialize_accounting(r.accounting);
  j["estimates"] = serialize_matrix(r.estimates);
  return j;
}

// --- peel traces ----------------------------------------------------------------

inline json serialize_trace(const PeelTrace& t) {
  json j = detail::header("peel_trace");
  j["n"] = t.n;
  j["peel_radius_mean"] = t.peel_radius_mean;
  j["ball_size_cap"] = t.ball_size_cap;
  json steps = json::array();
  for (const auto& s : t.steps)
    steps.push_back(json{{"center", s.center}, {"radius", s.radius}, {"members", s.members}});
  j["steps"] = std::move(steps);
  j["survivors"] = t.survivors;
  return j;
}

inline PeelTrace parse_trace(const json& j) {
  detail::expect_kind(j, "peel_trace");
  PeelTrace t;
  t.n = j.at("n").get<std::size_t>();
  t.peel_radius_mean = j.at("peel_radius_mean").get<double>();
  t.ball_size_cap = j.at("ball_size_cap").get<std::uint64_t>();
  for (const auto& s : j.at("steps")) {
    PeelStep step;
    step.center = s.at("center").get<std::uint32_t>();
    step.radius = s.at("radius").get<double>();
    step.members = s.at("members").get<std::vector<std::uint32_t>>();
    t.steps.push_back(std::move(step));
  }
  t.survivors = j.at("survivors").get<std::vector<std::uint32_t>>();
  return t;
}

// --- evaluation reports -----------------------------------------------------------

inline json serialize_report(const ErrorReport& r) {
  json j = detail::header("error_report");
  j["n"] = r.n;
  j["compared_pairs"] = r.compared_pairs;
  j["disconnected_pairs"] = r.disconnected_pairs;
  j["spurious_finite"] = r.spurious_finite;
  j["max_err"] = detail::enc(r.max_err);
  j["mean_err"] = detail::enc(r.mean_err);
  j["median_err"] = detail::enc(r.median_err);
  j["p90_err"] = detail::enc(r.p90_err);
  j["p99_err"] = detail::enc(r.p99_err);
  j["predicted"] = detail::enc(r.predicted);
  j["runtime_ms"] = r.runtime_ms;
  return j;
}

// --- experiment specs --------------------------------------------------------------
// One spec file may list several sizes; each size becomes its own experiment.
// Erdos-Renyi specs may omit edge_probability, meaning min(0.5, 8/n).

inline std::vector<ExperimentSpec> parse_experiment_specs(const json& j) {
  detail::expect_kind(j, "experiment_spec");
  ExperimentSpec base;
  const std::string algorithm = j.at("algorithm").get<std::string>();
  if (algorithm == "unbounded") base.algorithm = Algorithm::unbounded;
  else if (algorithm == "bounded") base.algorithm = Algorithm::bounded;
  else throw std::invalid_argument("parse: unknown algorithm: " + algorithm);
  base.mode = mode_from_string(j.at("mode").get<std::string>());
  base.budget.epsilon = j.at("epsilon").get<double>();
  base.budget.delta = base.mode == Mode::pure ? 0.0 : j.at("delta").get<double>();
  const json& graph = j.at("graph");
  const std::string kind = graph.at("kind").get<std::string>();
  if (kind == "path") base.graph.kind = GraphKind::path;
  else if (kind == "cycle") base.graph.kind = GraphKind::cycle;
  else if (kind == "grid") base.graph.kind = GraphKind::grid;
  else if (kind == "erdos_renyi") base.graph.kind = GraphKind::erdos_renyi;
  else if (kind == "star") base.graph.kind = GraphKind::star;
  else throw std::invalid_argument("parse: unknown graph kind: " + kind);
  const json& weights = j.at("weights");
  const std::string law = weights.at("law").get<std::string>();
  if (law == "uniform")
    base.weights = WeightLaw::uniform(weights.at("lo").get<double>(), weights.at("hi").get<double>());
  else if (law == "constant")
    base.weights = WeightLaw::constant(weights.at("value").get<double>());
  else
    throw std::invalid_argument("parse: unknown weight law: " + law);
  base.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  base.threads = j.value("threads", 1u);
  base.bounded_options.k_override = j.value("k_override", 0u);
  base.bounded_options.paper_constants = j.value("paper_constants", false);
  std::vector<std::size_t> sizes;
  if (graph.contains("sizes")) sizes = graph.at("sizes").get<std::vector<std::size_t>>();
  else sizes.push_back(graph.at("n").get<std::size_t>());
  std::vector<ExperimentSpec> specs;
  for (std::size_t n : sizes) {
    ExperimentSpec spec = base;
    if (spec.graph.kind == GraphKind::grid) {
      spec.graph.rows = spec.graph.cols = n;  // grid sizes are side lengths
    } else {
      spec.graph.n = n;
      if (spec.graph.kind == GraphKind::erdos_renyi)
        spec.graph.edge_probability = graph.contains("edge_probability")
                                          ? graph.at("edge_probability").get<double>()
                                          : std::min(0.5, 8.0 / static_cast<double>(n));
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

// --- file helpers ----------------------------------------------------------------

inline void save_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return json::parse(in);
}

}  // namespace dpsp
