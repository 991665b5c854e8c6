#include "epictrl/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "epictrl/chunglu.hpp"
#include "epictrl/edge_list.hpp"
#include "epictrl/error.hpp"
#include "epictrl/instances.hpp"
#include "epictrl/percolate.hpp"
#include "epictrl/rng.hpp"
#include "epictrl/saa.hpp"
#include "epictrl/sbcc.hpp"

namespace epictrl::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr int kSchema = 1;

struct Options {
  // instance
  std::string graph;
  std::string model;
  double p = -1.0;
  std::size_t n = 0;
  double beta = 0.0;
  int w_min = 1;
  int w_max = 1;
  // solver
  double budget = 1.0;
  double epsilon = 0.3;
  double gamma = 2.0;
  double karger_gamma = 4.0;
  double lambda = 0.5;
  std::size_t repetitions = 0;
  std::string rounding = "deterministic";
  std::string mode = "edge";
  std::uint64_t samples = 0;
  std::uint64_t eval_samples = 10000;
  std::uint64_t seed = 0;
  bool strict_regime = false;
  // census and bounds
  std::size_t k_max = 5;
  std::uint64_t trials = 1000;
  std::string table = "lemma41";
  int d_max = 8;
  std::vector<double> c1_values{1.1, 1.5, 2.0};
  std::vector<int> w_min_values{1, 2};
  std::vector<double> p_grid{0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0};
  double coefficient = 1.0;
  double exponent = 2.0;
  // compare / oracle
  std::vector<std::string> algos{"saa-det", "saa-rand", "karger", "brute"};
  std::string suite = "percolation";
  std::size_t instances = 20;
  std::size_t inst_n = 7;
  std::size_t inst_m = 10;
  // percolate
  bool exact = false;
  std::vector<std::uint32_t> remove_edges;
  std::vector<std::string> remove_nodes;
  // output
  std::string output;
  std::string format = "json";
  bool no_timing = false;
  std::string config;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const Context& ctx, const Options& o, const std::string& text) {
  if (o.output.empty()) {
    ctx.out << text;
    return;
  }
  std::ofstream f(o.output, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + o.output);
  f << text;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream ss;
  ss << std::setprecision(17) << x;
  return ss.str();
}

bool has_model_params(const Options& o) { return o.n > 0; }

ChungLuModel load_model(const Options& o) {
  if (!o.model.empty()) {
    if (has_model_params(o)) throw ValidationError("give either --model or --n/--beta, not both");
    return parse_model_json(read_file(o.model));
  }
  if (!has_model_params(o)) throw ValidationError("need a model: --model or --n/--beta/--w-min/--w-max");
  return build_model(o.n, o.beta, o.w_min, o.w_max);
}

ContactNetwork load_instance(const Options& o) {
  const bool from_file = !o.graph.empty();
  const bool from_model = !o.model.empty() || has_model_params(o);
  if (from_file == from_model)
    throw ValidationError("give exactly one instance source: --graph or a Chung-Lu model");
  ContactNetwork g = from_file ? load_network(o.graph)
                               : generate(load_model(o), rng::derive(o.seed, rng::Stream::Instance, 0));
  if (o.p >= 0.0) g = g.with_probability(o.p);
  return g;
}

void add_instance(CLI::App* sub, Options& o) {
  sub->add_option("--graph", o.graph, "edge-list file");
  sub->add_option("--model", o.model, "Chung-Lu model JSON file");
  sub->add_option("--n", o.n, "Chung-Lu vertex count");
  sub->add_option("--beta", o.beta, "Chung-Lu power-law exponent");
  sub->add_option("--w-min", o.w_min, "smallest Chung-Lu weight");
  sub->add_option("--w-max", o.w_max, "largest Chung-Lu weight");
  sub->add_option("--p", o.p, "uniform transmission probability override");
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "RNG seed");
  sub->add_option("-o,--output", o.output, "output file (default stdout)");
  sub->add_flag("--no-timing", o.no_timing, "omit the timing field");
  sub->add_option("--config", o.config, "JSON config; flags take precedence");
}

Json intervention_json(const ContactNetwork& g, const Intervention& f) {
  Json doc;
  doc["kind"] = to_string(f.kind);
  doc["provenance"] = f.provenance;
  doc["cost"] = f.cost;
  Json members = Json::array();
  for (std::uint32_t id : f.members) {
    if (f.kind == InterventionKind::EdgeRemoval) {
      const Edge& e = g.edge(id);
      members.push_back({{"edge", id}, {"u", g.label(e.u)}, {"v", g.label(e.v)}});
    } else {
      members.push_back(g.label(id));
    }
  }
  doc["members"] = std::move(members);
  return doc;
}

Json estimate_json(const InfectionEstimate& est) {
  return {{"mean", est.mean},
          {"half_width", est.half_width},
          {"num_samples", est.num_samples},
          {"exact", est.exact}};
}

void stamp_timing(Json& doc, const Options& o, double runtime_ms) {
  if (!o.no_timing) doc["timing"] = {{"runtime_ms", runtime_ms}};
}

// --- generate ---------------------------------------------------------------

int cmd_generate(const Context& ctx, const Options& o) {
  const ChungLuModel model = load_model(o);
  ContactNetwork g = generate(model, rng::derive(o.seed, rng::Stream::Instance, 0));
  if (o.p >= 0.0) g = g.with_probability(o.p);
  if (g.num_edges() == 0) throw ValidationError("generated graph has no edges");
  if (g.neighbors(g.source()).empty()) {
    const VertexId moved = std::min(g.edge(0).u, g.edge(0).v);
    ctx.err << "warning: vertex " << g.label(g.source()) << " is isolated; writing with source "
            << g.label(moved) << "\n";
    g = g.with_source(moved);
  }
  std::ostringstream ss;
  write_network(ss, g);
  emit(ctx, o, ss.str());
  return kOk;
}

// --- percolate --------------------------------------------------------------

int cmd_percolate(const Context& ctx, const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const ContactNetwork g = load_instance(o);
  if (!o.remove_edges.empty() && !o.remove_nodes.empty())
    throw ValidationError("give either --remove-edges or --remove-nodes");
  Intervention f = no_intervention();
  if (!o.remove_edges.empty()) f = make_edge_intervention(g, o.remove_edges, "user");
  if (!o.remove_nodes.empty()) {
    std::vector<VertexId> ids;
    for (const std::string& label : o.remove_nodes) {
      const auto v = g.find_label(label);
      if (!v) throw ValidationError("unknown vertex label " + label);
      ids.push_back(*v);
    }
    f = make_node_intervention(g, ids, "user");
  }
  if (o.samples == 0 && !o.exact) throw ValidationError("need --samples > 0 or --exact");

  Json doc;
  doc["schema"] = kSchema;
  doc["command"] = "percolate";
  doc["num_vertices"] = g.num_vertices();
  doc["num_edges"] = g.num_edges();
  doc["source"] = g.label(g.source());
  doc["intervention"] = intervention_json(g, f);
  if (o.samples > 0) doc["monte_carlo"] = estimate_json(estimate_infections(g, f, o.samples, o.seed));
  if (o.exact) doc["exact"] = estimate_json(exact_expected_infections(g, f));
  stamp_timing(doc, o, std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start).count());
  emit(ctx, o, dump(doc));
  return kOk;
}

// --- solve-saa / solve-node -------------------------------------------------

SaaConfig saa_config(const Options& o, RemovalMode mode) {
  SaaConfig c;
  c.budget = o.budget;
  c.epsilon = o.epsilon;
  c.gamma = o.gamma;
  if (o.rounding == "deterministic") {
    c.rounding = Rounding::Deterministic;
  } else if (o.rounding == "randomized") {
    c.rounding = Rounding::Randomized;
  } else {
    throw ValidationError("--rounding must be deterministic or randomized");
  }
  c.mode = mode;
  c.seed = o.seed;
  if (o.samples > 0) c.num_samples = o.samples;
  c.eval_samples = o.eval_samples;
  return c;
}

const std::vector<std::string> kSaaCsvColumns{
    "lp_objective", "n_samples", "n_samples_theory", "rounding", "mode", "cost", "budget",
    "cost_ratio", "empirical_h", "fresh_mc_mean", "fresh_mc_half_width"};

Json saa_report_json(const SaaReport& r) {
  Json doc;
  doc["lp_objective"] = r.lp_objective;
  doc["n_samples"] = r.n_samples;
  doc["n_samples_theory"] = r.n_samples_theory;
  doc["distinct_scenarios"] = r.distinct_scenarios;
  doc["lp_iterations"] = r.lp_iterations;
  doc["rounding"] = to_string(r.rounding);
  doc["mode"] = to_string(r.mode);
  doc["cost"] = r.cost;
  doc["budget"] = r.budget;
  doc["cost_ratio"] = r.cost_ratio;
  doc["empirical_h"] = r.empirical_h;
  doc["fresh_mc_mean"] = r.fresh_mc_mean;
  doc["fresh_mc_half_width"] = r.fresh_mc_half_width;
  return doc;
}

int cmd_saa(const Context& ctx, const Options& o, RemovalMode mode) {
  const ContactNetwork g = load_instance(o);
  const SaaOutcome result = solve_saa(g, saa_config(o, mode));
  for (const std::string& w : result.report.warnings) ctx.err << "warning: " << w << "\n";

  if (o.format == "csv") {
    std::ostringstream ss;
    const Json report = saa_report_json(result.report);
    for (std::size_t i = 0; i < kSaaCsvColumns.size(); ++i)
      ss << (i ? "," : "") << kSaaCsvColumns[i];
    if (!o.no_timing) ss << ",runtime_ms";
    ss << "\n";
    for (std::size_t i = 0; i < kSaaCsvColumns.size(); ++i) {
      const Json& v = report.at(kSaaCsvColumns[i]);
      ss << (i ? "," : "") << (v.is_string() ? v.get<std::string>() : v.dump());
    }
    if (!o.no_timing) ss << "," << fmt(result.report.runtime_ms);
    ss << "\n";
    emit(ctx, o, ss.str());
    return kOk;
  }
  if (o.format != "json") throw ValidationError("--format must be json or csv");

  Json doc;
  doc["schema"] = kSchema;
  doc["command"] = mode == RemovalMode::Edge ? "solve-saa" : "solve-node";
  doc["seed"] = o.seed;
  doc["epsilon"] = o.epsilon;
  doc["gamma"] = o.gamma;
  doc["report"] = saa_report_json(result.report);
  doc["intervention"] = intervention_json(g, result.intervention);
  doc["warnings"] = result.report.warnings;
  stamp_timing(doc, o, result.report.runtime_ms);
  emit(ctx, o, dump(doc));
  return kOk;
}

// --- solve-karger -----------------------------------------------------------

KargerConfig karger_config(const Options& o) {
  KargerConfig c;
  c.budget = o.budget;
  c.gamma = o.karger_gamma;
  c.lambda = o.lambda;
  c.repetitions = o.repetitions;
  c.eval_samples = o.eval_samples;
  c.seed = o.seed;
  return c;
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

int cmd_karger(const Context& ctx, const Options& o) {
  const ContactNetwork g = load_instance(o);
  if (o.strict_regime) {
    const KargerRegime regime = karger_regime(g, 1.0);
    if (!regime.in_regime) {
      ctx.err << "error_code=out_of_regime message=c_min*p = " << fmt(regime.c_min * regime.p)
              << " is below 9 ln n\n";
      return kOutOfRegime;
    }
  }
  const KargerOutcome result = solve_karger(g, karger_config(o));
  const KargerReport& r = result.report;
  for (const std::string& w : r.warnings) ctx.err << "warning: " << w << "\n";

  Json candidates = Json::array();
  for (const KargerCandidate& c : r.candidates) {
    candidates.push_back({{"cut_cost", c.cut_cost},
                          {"component_size", c.component_size},
                          {"sampled_cut", c.sampled_cut},
                          {"mc_mean", c.mc_mean},
                          {"mc_half_width", c.mc_half_width}});
  }
  Json doc;
  doc["schema"] = kSchema;
  doc["command"] = "solve-karger";
  doc["seed"] = o.seed;
  doc["budget"] = o.budget;
  doc["gamma"] = o.karger_gamma;
  doc["lambda"] = o.lambda;
  doc["candidates"] = std::move(candidates);
  doc["chosen_index"] = r.chosen_index;
  doc["epsilon_regime"] = number_or_null(r.epsilon_regime);
  doc["in_regime"] = r.in_regime;
  doc["c_min"] = r.c_min;
  doc["p"] = r.p;
  doc["sbcc_budget"] = r.sbcc_budget;
  doc["lemma23_bound"] = number_or_null(r.lemma23_bound);
  doc["intervention"] = intervention_json(g, result.intervention);
  doc["warnings"] = r.warnings;
  stamp_timing(doc, o, r.runtime_ms);
  emit(ctx, o, dump(doc));
  return kOk;
}

// --- count-paths ------------------------------------------------------------

int cmd_count_paths(const Context& ctx, const Options& o) {
  if (o.k_max == 0) throw ValidationError("--kmax must be >= 1");
  PathCensus census;
  if (!o.graph.empty()) {
    if (!o.model.empty() || has_model_params(o))
      throw ValidationError("give either --graph or a model");
    ContactNetwork g = load_network(o.graph);
    census = count_simple_paths(g, o.k_max);
  } else {
    const double p = o.p >= 0.0 ? o.p : 1.0;
    census = estimate_gamma(load_model(o), p, o.trials, o.k_max, o.seed);
  }
  std::ostringstream ss;
  write_census_csv(ss, census);
  emit(ctx, o, ss.str());
  return kOk;
}

// --- bounds -----------------------------------------------------------------

int cmd_bounds(const Context& ctx, const Options& o) {
  std::ostringstream ss;
  if (o.table == "lemma41") {
    const ChungLuModel model = load_model(o);
    ss << "k,lemma41_bound\n";
    for (std::size_t k = 1; k <= o.k_max; ++k)
      ss << k << "," << fmt(lemma41_bound(model, static_cast<int>(k))) << "\n";
  } else if (o.table == "recurrence") {
    ss << "c1,w_min,D,k,n_recurrence,n_enumeration,lemma42_bound\n";
    for (double c1 : o.c1_values)
      for (int w : o.w_min_values)
        for (int d = w; d <= o.d_max; ++d)
          for (std::size_t k = 1; k <= o.k_max; ++k) {
            const int ki = static_cast<int>(k);
            ss << fmt(c1) << "," << w << "," << d << "," << k << ","
               << fmt(n_recurrence(d, ki, c1, w)) << "," << fmt(n_enumeration(d, ki, c1, w))
               << "," << (c1 > 1.0 ? fmt(lemma42_bound(d, ki, c1, w)) : "") << "\n";
          }
  } else if (o.table == "c0") {
    const C0Sweep sweep = sweep_c0(load_model(o), o.p_grid, o.coefficient, o.exponent,
                                   o.trials, o.k_max, o.seed);
    ss << "p,gamma,half_width,ceiling,below_ceiling\n";
    for (std::size_t i = 0; i < sweep.p_values.size(); ++i)
      ss << fmt(sweep.p_values[i]) << "," << fmt(sweep.gamma[i]) << ","
         << fmt(sweep.gamma_half_width[i]) << "," << fmt(sweep.ceiling) << ","
         << (sweep.gamma[i] <= sweep.ceiling ? 1 : 0) << "\n";
  } else {
    throw ValidationError("--table must be lemma41, recurrence or c0");
  }
  emit(ctx, o, ss.str());
  return kOk;
}

// --- compare ----------------------------------------------------------------

struct CompareRow {
  std::string algo;
  std::string status = "ok";
  std::optional<Intervention> f;
};

int cmd_compare(const Context& ctx, const Options& o) {
  const ContactNetwork g = load_instance(o);
  std::vector<CompareRow> rows;
  for (const std::string& algo : o.algos) {
    CompareRow row{algo, "ok", std::nullopt};
    try {
      if (algo == "none") {
        row.f = no_intervention();
      } else if (algo == "saa-det" || algo == "saa-rand") {
        Options so = o;
        so.rounding = algo == "saa-det" ? "deterministic" : "randomized";
        row.f = solve_saa(g, saa_config(so, RemovalMode::Edge)).intervention;
      } else if (algo == "karger") {
        row.f = solve_karger(g, karger_config(o)).intervention;
      } else if (algo == "brute") {
        const std::uint64_t n_samples =
            o.samples > 0 ? o.samples
                          : sample_count(std::max<std::size_t>(g.num_vertices(), 2),
                                         std::max<std::size_t>(g.num_edges(), 1), o.epsilon);
        const SampleSet set = draw_samples(g, n_samples, o.seed);
        row.f = brute_force_optimum(set, o.budget, RemovalMode::Edge).best;
      } else {
        throw ValidationError("unknown algorithm " + algo);
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Validation && algo != "karger" && algo != "brute") throw;
      row.status = std::string("skipped:") + to_string(e.code());
      ctx.err << "warning: " << algo << " skipped: " << e.what() << "\n";
    }
    rows.push_back(std::move(row));
  }

  const std::uint64_t eval_seed = rng::derive(o.seed, rng::Stream::Evaluation, 1);
  std::ostringstream ss;
  ss << "algo,status,cost,budget,num_removed,mc_mean,mc_half_width\n";
  for (const CompareRow& row : rows) {
    ss << row.algo << "," << row.status << ",";
    if (row.f) {
      const InfectionEstimate est = estimate_infections(g, *row.f, o.eval_samples, eval_seed);
      ss << fmt(row.f->cost) << "," << fmt(o.budget) << "," << row.f->members.size() << ","
         << fmt(est.mean) << "," << fmt(est.half_width);
    } else {
      ss << "," << fmt(o.budget) << ",,,";
    }
    ss << "\n";
  }
  emit(ctx, o, ss.str());
  return kOk;
}

// --- oracle -----------------------------------------------------------------

int cmd_oracle(const Context& ctx, const Options& o) {
  InstanceSpec spec;
  spec.n = o.inst_n;
  spec.m = o.inst_m;
  std::ostringstream ss;
  std::size_t failures = 0;
  auto seed_of = [&](std::size_t i) { return rng::derive(o.seed, rng::Stream::Instance, i); };

  if (o.suite == "percolation") {
    ss << "instance,exact,mc_mean,mc_half_width,z_score,pass\n";
    const std::uint64_t samples = o.samples ? o.samples : 100000;
    for (std::size_t i = 0; i < o.instances; ++i) {
      const ContactNetwork g = random_instance(spec, seed_of(i));
      const double exact = exact_expected_infections(g, no_intervention()).mean;
      const InfectionEstimate mc = estimate_infections(g, no_intervention(), samples, seed_of(i));
      const double sigma = mc.half_width / kZ99;
      const double z = sigma > 0 ? (mc.mean - exact) / sigma : 0.0;
      const bool pass = std::abs(mc.mean - exact) <= 4.0 * sigma + 1e-12;
      failures += pass ? 0 : 1;
      ss << i << "," << fmt(exact) << "," << fmt(mc.mean) << "," << fmt(mc.half_width) << ","
         << fmt(z) << "," << pass << "\n";
    }
  } else if (o.suite == "lp" || o.suite == "node") {
    const RemovalMode mode = o.suite == "lp" ? RemovalMode::Edge : RemovalMode::Node;
    ss << "instance,lp_objective_plus_1,brute_h,pass\n";
    const std::uint64_t samples = o.samples ? o.samples : 30;
    for (std::size_t i = 0; i < o.instances; ++i) {
      const ContactNetwork g = random_instance(spec, seed_of(i));
      const SampleSet set = draw_samples(g, samples, seed_of(i));
      const FractionalSolution frac = solve_lp(build_lp(set, o.budget, mode));
      const BruteForceResult brute = brute_force_optimum(set, o.budget, mode);
      const bool pass = frac.objective + 1.0 <= brute.h + 1e-6;
      failures += pass ? 0 : 1;
      ss << i << "," << fmt(frac.objective + 1.0) << "," << fmt(brute.h) << "," << pass << "\n";
    }
  } else if (o.suite == "sbcc") {
    ss << "instance,lambda,budget,cut_size,component_size,exact_size,pass\n";
    for (std::size_t i = 0; i < o.instances; ++i) {
      const ContactNetwork g = random_instance(spec, seed_of(i));
      const EdgeMask h = g.all_edges_mask();
      const SbccExact exact = min_sbcc_exact(g, h, g.source(), o.budget);
      const SbccSolution sol = min_sbcc(g, h, g.source(), o.budget, o.lambda);
      const double size_cap =
          std::ceil(static_cast<double>(exact.component_size) / (1.0 - o.lambda) - 1e-9);
      const bool pass = static_cast<double>(sol.cut_size) <= o.budget / o.lambda + 1e-9 &&
                        static_cast<double>(sol.component_size) <= size_cap;
      failures += pass ? 0 : 1;
      ss << i << "," << fmt(o.lambda) << "," << fmt(o.budget) << "," << sol.cut_size << ","
         << sol.component_size << "," << exact.component_size << "," << pass << "\n";
    }
  } else {
    throw ValidationError("--suite must be percolation, lp, node or sbcc");
  }
  emit(ctx, o, ss.str());
  if (failures) ctx.err << "oracle: " << failures << " of " << o.instances << " instances failed\n";
  return kOk;
}

void apply_threads() {
  const char* env = std::getenv("EPICTRL_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw ValidationError("EPICTRL_THREADS must be a positive integer");
  omp_set_num_threads(static_cast<int>(std::min<long>(v, omp_get_num_procs())));
}

std::string config_value(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string joined;
    for (const Json& item : v) {
      if (!joined.empty()) joined += ",";
      joined += config_value(item);
    }
    return joined;
  }
  return v.dump();
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  std::size_t sub = 0;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    if (!sub && !args[i].empty() && args[i][0] != '-') sub = i;
  }
  if (path.empty()) return args;
  if (!sub) throw ValidationError("--config must follow a subcommand");

  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("bad config file: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config file must hold a JSON object");

  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin() + 1, args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sub) + 1);
  for (const auto& [key, value] : doc.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (given(flag)) continue;
    out.push_back(flag + "=" + config_value(value));
  }
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(sub) + 1, args.end());
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err};
  auto fail = [&](const char* code, const std::string& what, int exit_code) {
    err << "error_code=" << code << " message=" << what << "\n";
    return exit_code;
  };

  std::vector<std::string> args;
  try {
    apply_threads();
    args = expand_config(raw_args);
  } catch (const Error& e) {
    return fail(to_string(e.code()), e.what(), kValidation);
  }

  CLI::App app{"Budgeted interventions against SIR spread on contact networks", "epictrl"};
  app.require_subcommand(1);
  std::function<int()> action;
  std::vector<std::unique_ptr<Options>> store;

  auto make = [&](const std::string& name, const std::string& help) {
    store.push_back(std::make_unique<Options>());
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, *store.back());
    return std::pair<CLI::App*, Options*>{sub, store.back().get()};
  };
  auto bind = [&](CLI::App* sub, std::function<int(const Context&, const Options&)> fn,
                  Options* o) { sub->callback([&action, fn, o, &ctx] { action = [=, &ctx] { return fn(ctx, *o); }; }); };

  {
    auto [sub, o] = make("generate", "draw a Chung-Lu graph as an edge list");
    sub->add_option("--model", o->model, "Chung-Lu model JSON file");
    sub->add_option("--n", o->n, "vertex count");
    sub->add_option("--beta", o->beta, "power-law exponent");
    sub->add_option("--w-min", o->w_min, "smallest weight");
    sub->add_option("--w-max", o->w_max, "largest weight");
    sub->add_option("--p", o->p, "uniform transmission probability");
    bind(sub, cmd_generate, o);
  }
  {
    auto [sub, o] = make("percolate", "estimate expected infections");
    add_instance(sub, *o);
    o->samples = 10000;
    sub->add_option("--samples", o->samples, "Monte Carlo samples (0 to skip)");
    sub->add_flag("--exact", o->exact, "also enumerate exactly");
    sub->add_option("--remove-edges", o->remove_edges, "edge ids to remove")->delimiter(',');
    sub->add_option("--remove-nodes", o->remove_nodes, "vertex labels to remove")->delimiter(',');
    bind(sub, cmd_percolate, o);
  }
  for (const RemovalMode mode : {RemovalMode::Edge, RemovalMode::Node}) {
    const bool edge = mode == RemovalMode::Edge;
    auto [sub, o] = make(edge ? "solve-saa" : "solve-node",
                         edge ? "SAA LP rounding, edge removal" : "SAA LP rounding, vaccination");
    add_instance(sub, *o);
    sub->add_option("--budget", o->budget, "budget B")->required();
    sub->add_option("--epsilon", o->epsilon, "accuracy epsilon in (0,1)");
    sub->add_option("--gamma", o->gamma, "randomized rounding gamma");
    sub->add_option("--rounding", o->rounding, "deterministic or randomized");
    sub->add_option("--samples", o->samples, "override N (voids the guarantees)");
    sub->add_option("--eval-samples", o->eval_samples, "fresh evaluation samples");
    sub->add_option("--format", o->format, "json or csv");
    bind(sub, [mode](const Context& c, const Options& op) { return cmd_saa(c, op, mode); }, o);
  }
  {
    auto [sub, o] = make("solve-karger", "sparsify, MinSBCC, lift; unit costs and uniform p");
    add_instance(sub, *o);
    sub->add_option("--budget", o->budget, "budget B")->required();
    sub->add_option("--gamma", o->karger_gamma, "budget inflation gamma > 2");
    sub->add_option("--lambda", o->lambda, "bicriteria trade-off in (0,1)");
    sub->add_option("--repetitions", o->repetitions, "repetitions (0 = ceil(4 ln n))");
    sub->add_option("--eval-samples", o->eval_samples, "Monte Carlo samples per candidate");
    sub->add_flag("--strict-regime", o->strict_regime, "exit 4 outside the sparsification regime");
    bind(sub, cmd_karger, o);
  }
  {
    auto [sub, o] = make("count-paths", "simple-path census");
    add_instance(sub, *o);
    sub->add_option("--kmax", o->k_max, "largest path length");
    sub->add_option("--trials", o->trials, "generated graphs");
    bind(sub, cmd_count_paths, o);
  }
  {
    auto [sub, o] = make("bounds", "path-count bound tables");
    sub->add_option("--table", o->table, "lemma41, recurrence or c0");
    sub->add_option("--model", o->model, "Chung-Lu model JSON file");
    sub->add_option("--n", o->n, "vertex count");
    sub->add_option("--beta", o->beta, "power-law exponent");
    sub->add_option("--w-min", o->w_min, "smallest weight");
    sub->add_option("--w-max", o->w_max, "largest weight");
    o->k_max = 8;
    sub->add_option("--kmax", o->k_max, "largest k");
    sub->add_option("--dmax", o->d_max, "largest D");
    sub->add_option("--c1", o->c1_values, "c1 values")->delimiter(',');
    sub->add_option("--w-mins", o->w_min_values, "w_min values")->delimiter(',');
    sub->add_option("--p-grid", o->p_grid, "probabilities for the c0 sweep")->delimiter(',');
    sub->add_option("--coefficient", o->coefficient, "ceiling coefficient");
    sub->add_option("--exponent", o->exponent, "ceiling exponent");
    sub->add_option("--trials", o->trials, "generated graphs per p");
    bind(sub, cmd_bounds, o);
  }
  {
    auto [sub, o] = make("compare", "run several algorithms on shared evaluation samples");
    add_instance(sub, *o);
    sub->add_option("--budget", o->budget, "budget B")->required();
    sub->add_option("--algos", o->algos, "saa-det,saa-rand,karger,brute,none")->delimiter(',');
    sub->add_option("--epsilon", o->epsilon, "SAA epsilon");
    sub->add_option("--gamma", o->gamma, "SAA randomized rounding gamma");
    sub->add_option("--karger-gamma", o->karger_gamma, "Karger budget inflation");
    sub->add_option("--lambda", o->lambda, "MinSBCC trade-off");
    sub->add_option("--repetitions", o->repetitions, "Karger repetitions");
    sub->add_option("--samples", o->samples, "override SAA N");
    sub->add_option("--eval-samples", o->eval_samples, "shared evaluation samples");
    bind(sub, cmd_compare, o);
  }
  {
    auto [sub, o] = make("oracle", "brute-force checks on random small instances");
    sub->add_option("--suite", o->suite, "percolation, lp, node or sbcc");
    sub->add_option("--instances", o->instances, "instance count");
    sub->add_option("--n", o->inst_n, "vertices per instance");
    sub->add_option("--m", o->inst_m, "edges per instance");
    sub->add_option("--budget", o->budget, "budget for lp, node and sbcc");
    sub->add_option("--lambda", o->lambda, "MinSBCC trade-off");
    sub->add_option("--samples", o->samples, "samples per instance");
    bind(sub, cmd_oracle, o);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    return fail("usage", e.what(), kValidation);
  }

  try {
    return action ? action() : kOk;
  } catch (const SolverError& e) {
    return fail(to_string(e.code()), e.what(), kSolver);
  } catch (const Error& e) {
    return fail(to_string(e.code()), e.what(), kValidation);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kSolver);
  }
}

}  // namespace epictrl::cli
