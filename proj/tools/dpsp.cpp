// Command-line front end: private distance releases, reconstruction,
// exact baselines, error evaluation, scaling sweeps, and self-checks.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "dpsp/accountant.hpp"
#include "dpsp/bounded.hpp"
#include "dpsp/graph.hpp"
#include "dpsp/harness.hpp"
#include "dpsp/random.hpp"
#include "dpsp/serialize.hpp"
#include "dpsp/unbounded.hpp"
#include "dpsp/verify.hpp"

namespace {

constexpr int kExitOk = 0;                 // success
constexpr int kExitValidation = 1;         // bad flags/inputs
constexpr int kExitVerificationFailed = 2; // a self-check found a violation

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed_flag) {
  if (seed_flag) return *seed_flag;
  std::random_device rd;
  std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "no --seed given; drew seed " << seed << " from system entropy\n";
  return seed;
}

dpsp::Mode resolve_mode(double epsilon, double delta, bool pure, dpsp::PrivacyBudget& budget) {
  budget.epsilon = epsilon;
  budget.delta = pure ? 0.0 : delta;
  if (!pure && !(delta > 0.0))
    throw CLI::ValidationError("--delta must be positive unless --pure is given");
  return pure ? dpsp::Mode::pure : dpsp::Mode::approx;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differentially private all-pairs shortest-path distances"};
  app.require_subcommand(1);

  // --- release-unbounded ---
  auto* rel_u = app.add_subcommand("release-unbounded",
                                   "release noisy edge weights plus a noisy hitting-set distance block");
  std::string ru_graph, ru_output;
  double ru_eps = 0.0, ru_delta = 0.0, ru_cl = 1.0, ru_ct = 1.0;
  bool ru_pure = false, ru_zero_noise = false, ru_accounting = false;
  std::optional<std::uint64_t> ru_seed;
  rel_u->add_option("--graph", ru_graph, "graph file")->required()->check(CLI::ExistingFile);
  rel_u->add_option("--output", ru_output, "release JSON path")->required();
  rel_u->add_option("--epsilon", ru_eps, "privacy budget epsilon")->required();
  rel_u->add_option("--delta", ru_delta, "privacy budget delta");
  rel_u->add_flag("--pure", ru_pure, "pure mode (delta = 0)");
  rel_u->add_option("--seed", ru_seed, "release seed (default: system entropy, logged)");
  rel_u->add_option("--c-l", ru_cl, "hitting-set size constant");
  rel_u->add_option("--c-t", ru_ct, "noise scale constant");
  rel_u->add_flag("--zero-noise", ru_zero_noise, "debug: all noise at scale zero (audit reports the blown budget)");
  rel_u->add_flag("--emit-accounting", ru_accounting, "print the accounting JSON to stdout");

  // --- release-bounded ---
  auto* rel_b = app.add_subcommand("release-bounded",
                                   "recursive private all-pairs release for bounded edge weights");
  std::string rb_graph, rb_output, rb_peel;
  double rb_eps = 0.0, rb_delta = 0.0;
  double rb_bound = 0.0;
  std::uint32_t rb_k = 0;
  unsigned rb_threads = default_threads();
  bool rb_pure = false, rb_zero_noise = false, rb_accounting = false, rb_paper = false;
  std::optional<std::uint64_t> rb_seed;
  rel_b->add_option("--graph", rb_graph, "graph file")->required()->check(CLI::ExistingFile);
  rel_b->add_option("--output", rb_output, "release JSON path")->required();
  rel_b->add_option("--epsilon", rb_eps, "privacy budget epsilon")->required();
  rel_b->add_option("--delta", rb_delta, "privacy budget delta");
  rel_b->add_flag("--pure", rb_pure, "pure mode (delta = 0)");
  rel_b->add_option("--weight-bound", rb_bound, "declared upper bound A on edge weights")->required();
  rel_b->add_option("--seed", rb_seed, "release seed (default: system entropy, logged)");
  rel_b->add_option("--k", rb_k, "override the iteration count");
  rel_b->add_flag("--paper-constants", rb_paper, "reference iteration count (100 ln n)");
  rel_b->add_flag("--zero-noise", rb_zero_noise, "debug: all noise at scale zero");
  rel_b->add_option("--threads", rb_threads, "worker threads");
  rel_b->add_option("--dump-peel", rb_peel, "write collected peel traces to this JSON file");
  rel_b->add_flag("--emit-accounting", rb_accounting, "print the accounting JSON to stdout");

  // --- reconstruct ---
  auto* rec = app.add_subcommand("reconstruct", "estimate distances from an unbounded release");
  std::string rc_release, rc_graph, rc_output;
  std::vector<std::uint32_t> rc_pair;
  unsigned rc_threads = default_threads();
  rec->add_option("--release", rc_release, "release JSON")->required()->check(CLI::ExistingFile);
  rec->add_option("--graph", rc_graph, "graph file (public topology)")->required()->check(CLI::ExistingFile);
  rec->add_option("--output", rc_output, "matrix JSON path (full reconstruction)");
  rec->add_option("--pair", rc_pair, "two vertex ids: print one estimated distance")->expected(2);
  rec->add_option("--threads", rc_threads, "worker threads");

  // --- exact ---
  auto* exact = app.add_subcommand("exact", "exact all-pairs distances (non-private baseline)");
  std::string ex_graph, ex_output;
  exact->add_option("--graph", ex_graph, "graph file")->required()->check(CLI::ExistingFile);
  exact->add_option("--output", ex_output, "matrix JSON path")->required();

  // --- eval ---
  auto* eval = app.add_subcommand("eval", "compare an estimated matrix against a baseline");
  std::string ev_estimate, ev_truth, ev_output;
  eval->add_option("--estimate", ev_estimate, "estimate matrix JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", ev_truth, "baseline matrix JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--output", ev_output, "write the report JSON here (default: stdout)");

  // --- sweep ---
  auto* sweep = app.add_subcommand("sweep", "run an experiment spec file, CSV output");
  std::string sw_spec, sw_output;
  unsigned sw_threads = 0;
  sweep->add_option("--spec", sw_spec, "experiment spec JSON file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--output", sw_output, "CSV path")->required();
  sweep->add_option("--threads", sw_threads, "worker threads (overrides the spec)");

  // --- verify ---
  auto* verify = app.add_subcommand("verify", "run the library self-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (rel_u->parsed()) {
      dpsp::PrivacyBudget budget;
      dpsp::Mode mode = resolve_mode(ru_eps, ru_delta, ru_pure, budget);
      dpsp::WeightedGraph g = dpsp::read_graph_file(ru_graph);
      dpsp::RandomStream stream(resolve_seed(ru_seed));
      std::optional<dpsp::UnboundedParams> overrides;
      if (ru_zero_noise) overrides = dpsp::zero_noise_params(g.n, budget, mode, ru_cl, ru_ct);
      dpsp::UnboundedRelease rel = dpsp::release_unbounded(g, budget, mode, stream, overrides, ru_cl, ru_ct);
      dpsp::save_json(ru_output, dpsp::serialize_release(rel));
      if (ru_accounting) std::cout << dpsp::serialize_accounting(rel.accounting).dump(2) << '\n';
      std::cerr << "wrote " << ru_output << " (seed " << rel.seed << ", L = " << rel.hitting_set.size()
                << ", within budget: " << (rel.accounting.within_budget ? "yes" : "no") << ")\n";
      return kExitOk;
    }

    if (rel_b->parsed()) {
      dpsp::PrivacyBudget budget;
      dpsp::Mode mode = resolve_mode(rb_eps, rb_delta, rb_pure, budget);
      dpsp::WeightedGraph g = dpsp::read_graph_file(rb_graph);
      if (!(rb_bound > 0.0)) throw CLI::ValidationError("--weight-bound must be positive");
      g.weight_bound = rb_bound;
      dpsp::validate(g);
      dpsp::RandomStream stream(resolve_seed(rb_seed));
      dpsp::BoundedOptions opts;
      opts.k_override = rb_k;
      opts.paper_constants = rb_paper;
      opts.zero_noise = rb_zero_noise;
      opts.threads = rb_threads;
      opts.collect_traces = !rb_peel.empty();
      dpsp::BoundedResult res = dpsp::bounded_apsp(g, budget, mode, stream, opts);
      dpsp::save_json(rb_output, dpsp::serialize_bounded_result(res));
      if (!rb_peel.empty()) {
        dpsp::json traces = dpsp::json::array();
        for (const auto& t : res.traces) {
          dpsp::json entry = dpsp::json::object();
          entry["depth"] = t.depth;
          entry["iteration"] = t.iteration;
          entry["trace"] = dpsp::serialize_trace(t.trace);
          traces.push_back(std::move(entry));
        }
        dpsp::json doc = dpsp::json::object();
        doc["format_version"] = dpsp::kFormatVersion;
        doc["kind"] = "peel_trace_list";
        doc["traces"] = std::move(traces);
        dpsp::save_json(rb_peel, doc);
      }
      if (rb_accounting) std::cout << dpsp::serialize_accounting(res.accounting).dump(2) << '\n';
      std::cerr << "wrote " << rb_output << " (seed " << res.seed
                << ", within budget: " << (res.accounting.within_budget ? "yes" : "no") << ")\n";
      return kExitOk;
    }

    if (rec->parsed()) {
      dpsp::UnboundedRelease rel = dpsp::parse_release(dpsp::load_json(rc_release));
      dpsp::Topology topo = dpsp::read_graph_file(rc_graph).topology();
      if (!rc_pair.empty()) {
        double d = dpsp::reconstruct_pair(rel, topo, rc_pair[0], rc_pair[1]);
        std::cout << dpsp::detail::enc(d).dump() << '\n';
        return kExitOk;
      }
      if (rc_output.empty())
        throw CLI::ValidationError("reconstruct needs --output (full matrix) or --pair");
      dpsp::DistanceMatrix est = dpsp::reconstruct_all(rel, topo, rc_threads);
      dpsp::save_json(rc_output, dpsp::serialize_matrix(est));
      std::cerr << "wrote " << rc_output << '\n';
      return kExitOk;
    }

    if (exact->parsed()) {
      dpsp::WeightedGraph g = dpsp::read_graph_file(ex_graph);
      dpsp::save_json(ex_output, dpsp::serialize_matrix(dpsp::exact_apsp(g)));
      std::cerr << "wrote " << ex_output << '\n';
      return kExitOk;
    }

    if (eval->parsed()) {
      dpsp::DistanceMatrix est = dpsp::parse_matrix(dpsp::load_json(ev_estimate));
      dpsp::DistanceMatrix truth = dpsp::parse_matrix(dpsp::load_json(ev_truth));
      dpsp::json report = dpsp::serialize_report(dpsp::evaluate(est, truth));
      if (ev_output.empty())
        std::cout << report.dump(2) << '\n';
      else
        dpsp::save_json(ev_output, report);
      return kExitOk;
    }

    if (sweep->parsed()) {
      std::vector<dpsp::ExperimentSpec> specs = dpsp::parse_experiment_specs(dpsp::load_json(sw_spec));
      std::vector<dpsp::SweepRow> rows;
      for (dpsp::ExperimentSpec& spec : specs) {
        if (sw_threads > 0) spec.threads = sw_threads;
        auto part = dpsp::run_sweep(spec);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      std::ofstream out(sw_output, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open for writing: " + sw_output);
      dpsp::write_csv(out, rows);
      std::cerr << "wrote " << sw_output << " (" << rows.size() << " rows)\n";
      return kExitOk;
    }

    if (verify->parsed()) {
      bool all_ok = true;
      for (const dpsp::VerifyCheck& check : dpsp::run_verification()) {
        std::cout << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << ": " << check.detail << '\n';
        all_ok = all_ok && check.passed;
      }
      return all_ok ? kExitOk : kExitVerificationFailed;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
