#include <cstdint>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypercore/analytic.hpp"
#include "hypercore/branching.hpp"
#include "hypercore/census.hpp"
#include "hypercore/dist_io.hpp"
#include "hypercore/hypergraph.hpp"
#include "hypercore/wp.hpp"

// Command-line surface for the hypergraph k-core pipeline. Every stochastic
// command either takes --seed or draws one and records it in the report, so
// outputs are byte-identical given (command, config, seed).

using nlohmann::json;
using namespace hypercore;

namespace {

std::uint64_t fresh_seed() {
  std::random_device rd;
  return ((std::uint64_t)rd() << 32) ^ rd();
}

struct InstanceOpts {
  std::string input;
  std::int64_t n = 0;
  double d = 0.0;
  int r = 3;
  int k = 2;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_instance_flags(CLI::App* cmd, InstanceOpts& opt, bool need_k = true) {
  cmd->add_option("input", opt.input, "instance file; omit to generate");
  cmd->add_option("--n", opt.n, "number of vertices (generator)");
  cmd->add_option("--d", opt.d, "expected degree parameter d (generator)");
  cmd->add_option("--r", opt.r, "edge size r")->default_val(3);
  if (need_k) cmd->add_option("--k", opt.k, "core order k")->default_val(2);
  auto* s = cmd->add_option("--seed", opt.seed, "generator seed");
  cmd->callback([&opt, s] { opt.seed_given = s->count() > 0; });
}

// Loads the instance from file or generates it, recording how in `cfg`.
Hypergraph resolve_instance(InstanceOpts& opt, json& cfg) {
  if (!opt.input.empty()) {
    cfg["input"] = opt.input;
    Hypergraph h = read_hypergraph_file(opt.input);
    cfg["n"] = h.n;
    cfg["r"] = h.r;
    return h;
  }
  if (opt.n <= 0 || opt.d <= 0.0)
    throw CLI::ValidationError("provide an input file or --n and --d");
  if (!opt.seed_given) opt.seed = fresh_seed();
  cfg["n"] = opt.n;
  cfg["d"] = opt.d;
  cfg["r"] = opt.r;
  cfg["seed"] = opt.seed;
  return sample_hypergraph(opt.n, ModelParams(opt.d, opt.r, opt.k), opt.seed);
}

void emit(const json& report, const std::string& out) {
  if (out.empty()) {
    std::cout << report.dump(2) << '\n';
  } else {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open " + out + " for writing");
    os << report.dump(2) << '\n';
  }
}

int run_analytic(double d, int r, int k, double tol) {
  ModelParams params(d, r, k);
  ThresholdResult th = threshold(r, k);
  FixedPointResult fp = largest_fixed_point(params, tol);
  json rep{{"config", {{"d", d}, {"r", r}, {"k", k}, {"tol", tol}}},
           {"d_threshold", th.d_rk},
           {"lambda_min", th.lambda_min},
           {"supercritical", supercritical(params)},
           {"p_star", fp.p_star},
           {"residual", fp.residual}};
  if (supercritical(params)) {
    Coefficients co = coefficients(params, fp.p_star);
    rep["lambda"] = lambda_rk(params);
    rep["psi"] = core_fraction_law(params);
    rep["q"] = co.q;
    rep["q_bar"] = co.q_bar;
    rep["q_tilde"] = co.q_tilde;
  }
  std::cout << rep.dump(2) << '\n';
  return 0;
}

int run_gen(InstanceOpts& opt, const std::string& out) {
  if (opt.n <= 0 || opt.d <= 0.0) throw CLI::ValidationError("gen requires --n and --d");
  if (!opt.seed_given) opt.seed = fresh_seed();
  Hypergraph h = sample_hypergraph(opt.n, ModelParams(opt.d, opt.r, opt.k), opt.seed);
  if (out.empty()) {
    write_hypergraph(std::cout, h);
    return 0;
  }
  write_hypergraph_file(out, h);
  json rep{{"config",
            {{"n", opt.n}, {"d", opt.d}, {"r", opt.r}, {"seed", opt.seed}, {"out", out}}},
           {"edges", h.edges.size()}};
  std::cout << rep.dump(2) << '\n';
  return 0;
}

int run_core(InstanceOpts& opt, const std::string& out) {
  json cfg{{"k", opt.k}};
  Hypergraph h = resolve_instance(opt, cfg);
  FactorGraph f = to_factor_graph(h);
  CoreMarking core = peel_core(f, opt.k);
  std::uint64_t cv = 0, cf = 0;
  for (auto b : core.var_mark) cv += b;
  for (auto b : core.fac_mark) cf += b;
  json rep{{"config", cfg},
           {"n", f.n},
           {"edges", f.num_factors()},
           {"core_variables", cv},
           {"core_factors", cf},
           {"core_fraction", core.core_fraction()}};
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open " + out + " for writing");
    for (auto b : core.var_mark) os << int(b) << '\n';
    rep["marks_out"] = out;
  }
  std::cout << rep.dump(2) << '\n';
  return 0;
}

int run_wp(InstanceOpts& opt, int t, bool check, const std::string& format,
           const std::string& out) {
  json cfg{{"k", opt.k}, {"format", format}};
  if (t >= 0) cfg["t"] = t;
  Hypergraph h = resolve_instance(opt, cfg);
  FactorGraph f = to_factor_graph(h);

  std::vector<WpTraceRow> rows;
  auto trace = [&rows](const WpTraceRow& row) { rows.push_back(row); };

  WpMarks marks;
  json rep{{"config", cfg}};
  if (t >= 0) {
    marks = wp_run_t(f, opt.k, t, trace);
  } else {
    WpRunResult res = wp_run(f, opt.k, -1, trace);
    marks = res.marks;
    rep["t_fix"] = res.t_fix;
    rep["converged"] = res.converged;
  }
  std::uint64_t vm = 0, fm = 0;
  for (auto b : marks.var_mark) vm += b;
  for (auto b : marks.fac_mark) fm += b;
  rep["var_marks"] = vm;
  rep["fac_marks"] = fm;

  if (check) {
    CoreMarking core = peel_core(f, opt.k);
    WpRunResult fix = wp_run(f, opt.k);
    bool equal = fix.converged && fix.marks.var_mark == core.var_mark &&
                 fix.marks.fac_mark == core.fac_mark;
    rep["check_wp_equals_peeling"] = equal;
    if (!equal) {
      std::cerr << "check failed: WP fixed point differs from peeled core\n";
      std::cout << rep.dump(2) << '\n';
      return 1;
    }
  }

  if (format == "csv") {
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
      file.open(out);
      if (!file) throw std::runtime_error("cannot open " + out + " for writing");
      os = &file;
    }
    *os << "t,v2f_ones,f2v_ones,var_marks,fac_marks\n";
    for (const auto& row : rows)
      *os << row.t << ',' << row.v2f_ones << ',' << row.f2v_ones << ',' << row.var_marks
          << ',' << row.fac_marks << '\n';
    return 0;
  }
  json jrows = json::array();
  for (const auto& row : rows)
    jrows.push_back({{"t", row.t},
                     {"v2f_ones", row.v2f_ones},
                     {"f2v_ones", row.f2v_ones},
                     {"var_marks", row.var_marks},
                     {"fac_marks", row.fac_marks}});
  rep["trace"] = jrows;
  emit(rep, out);
  return 0;
}

int run_sample_tree(const std::string& kind, double d, int r, int k, int s,
                    std::int64_t samples, std::uint64_t seed, bool seed_given,
                    const std::string& out) {
  ModelParams params(d, r, k);
  if (!seed_given) seed = fresh_seed();

  TreeSampler sampler;
  if (kind == "T") {
    sampler = [=](std::mt19937_64& gen) { return sample_T(params, s, gen); };
  } else if (kind == "Tt") {
    double p_star = largest_fixed_point(params).p_star;
    sampler = [=](std::mt19937_64& gen) {
      MarkedTree tree = sample_T(params, s, gen);
      auto mu = truncated_messages(tree, s, s, p_star, k, gen);
      tree.labels = mu;
      return tree;
    };
  } else if (kind == "Tstar") {
    double p_star = largest_fixed_point(params).p_star;
    sampler = [=](std::mt19937_64& gen) { return sample_T_star(params, p_star, s, gen); };
  } else if (kind == "hatTstar") {
    double p_star = largest_fixed_point(params).p_star;
    sampler = [=](std::mt19937_64& gen) {
      return topdown_decorate(sample_T_star(params, p_star, s + 1, gen), k);
    };
  } else if (kind == "hatT") {
    double p_star = largest_fixed_point(params).p_star;
    sampler = [=](std::mt19937_64& gen) { return sample_hatT(params, p_star, s + 1, gen); };
  } else if (kind == "binary") {
    double p_star = largest_fixed_point(params).p_star;
    sampler = [=](std::mt19937_64& gen) {
      return project_to_binary(sample_hatT(params, p_star, s + 1, gen));
    };
  } else {
    throw CLI::ValidationError("unknown kind: " + kind);
  }

  NeighborhoodDistribution dist = mc_distribution(sampler, s, samples, seed);
  json rep = distribution_to_json(dist);
  rep["config"] = {{"kind", kind}, {"d", d},       {"r", r},       {"k", k},
                   {"s", s},       {"samples", samples}, {"seed", seed}};
  emit(rep, out);
  return 0;
}

int run_census(InstanceOpts& opt, int s, const std::string& marks, const std::string& out) {
  json cfg{{"k", opt.k}, {"s", s}, {"marks", marks}};
  Hypergraph h = resolve_instance(opt, cfg);
  FactorGraph f = to_factor_graph(h);
  std::vector<std::uint8_t> vm(f.n, 0), fm(f.num_factors(), 0);
  if (marks == "core") {
    CoreMarking core = peel_core(f, opt.k);
    vm = core.var_mark;
    fm = core.fac_mark;
  } else if (marks != "none") {
    throw CLI::ValidationError("--marks must be core or none");
  }
  NeighborhoodDistribution dist = empirical_distribution(f, vm, fm, s);
  json rep = distribution_to_json(dist);
  rep["config"] = cfg;
  emit(rep, out);
  return 0;
}

int run_compare(const std::string& path_a, const std::string& path_b, double tol,
                bool tol_given) {
  NeighborhoodDistribution a = read_distribution_file(path_a);
  NeighborhoodDistribution b = read_distribution_file(path_b);
  if (a.s != b.s) throw std::domain_error("compare: censuses have different depths");
  ComparisonReport cmp = compare_distributions(a, b);
  json rep = report_to_json(cmp);
  rep["config"] = {{"a", path_a}, {"b", path_b}};
  if (tol_given) rep["config"]["tol"] = tol;
  std::cout << rep.dump(2) << '\n';
  return tol_given && cmp.tv > tol ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-core calculus of sparse random uniform hypergraphs"};
  app.require_subcommand(1);

  double d = 6.0, tol = 1e-12;
  int r = 3, k = 2, s = 2, t = -1;
  std::int64_t samples = 10000;
  std::uint64_t seed = 0;
  std::string kind = "T", out, format = "json", marks = "core";
  std::string path_a, path_b;
  bool check = false;
  InstanceOpts gen_opt, core_opt, wp_opt, census_opt;

  auto* analytic = app.add_subcommand("analytic", "fixed point, threshold and coefficients");
  analytic->add_option("--d", d, "degree parameter")->required();
  analytic->add_option("--r", r, "edge size")->default_val(3);
  analytic->add_option("--k", k, "core order")->default_val(2);
  analytic->add_option("--tol", tol, "fixed point tolerance")->default_val(1e-12);

  auto* gen = app.add_subcommand("gen", "sample a random hypergraph");
  add_instance_flags(gen, gen_opt, false);
  gen->add_option("--out", out, "output instance file (default: stdout)");

  auto* core = app.add_subcommand("core", "peel to the k-core");
  add_instance_flags(core, core_opt);
  core->add_option("--out", out, "write variable marks to this file");

  auto* wp = app.add_subcommand("wp", "run Warning Propagation");
  add_instance_flags(wp, wp_opt);
  wp->add_option("--t", t, "stop after exactly t steps (default: run to fixed point)");
  wp->add_flag("--check", check, "assert the fixed point equals the peeled core");
  wp->add_option("--format", format, "json or csv trace output")->default_val("json");
  wp->add_option("--out", out, "report/trace output file (default: stdout)");

  auto* st = app.add_subcommand("sample-tree", "Monte Carlo census of a tree process");
  st->add_option("--kind", kind, "T | Tt | Tstar | hatTstar | hatT | binary")->required();
  st->add_option("--d", d, "degree parameter")->required();
  st->add_option("--r", r, "edge size")->default_val(3);
  st->add_option("--k", k, "core order")->default_val(2);
  st->add_option("--s", s, "census depth")->default_val(2);
  st->add_option("--samples", samples, "number of sampled trees")->required();
  auto* st_seed = st->add_option("--seed", seed, "master seed");
  st->add_option("--out", out, "distribution file (default: stdout)");

  auto* census = app.add_subcommand("census", "empirical neighborhood census of an instance");
  add_instance_flags(census, census_opt);
  census->add_option("--s", s, "census depth")->default_val(2);
  census->add_option("--marks", marks, "core or none")->default_val("core");
  census->add_option("--out", out, "distribution file (default: stdout)");

  auto* compare = app.add_subcommand("compare", "total variation between two census files");
  compare->add_option("a", path_a, "first distribution file")->required();
  compare->add_option("b", path_b, "second distribution file")->required();
  auto* cmp_tol = compare->add_option("--tol", tol, "fail (exit 1) if tv exceeds this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (analytic->parsed()) return run_analytic(d, r, k, tol);
    if (gen->parsed()) return run_gen(gen_opt, out);
    if (core->parsed()) return run_core(core_opt, out);
    if (wp->parsed()) return run_wp(wp_opt, t, check, format, out);
    if (st->parsed())
      return run_sample_tree(kind, d, r, k, s, samples, seed, st_seed->count() > 0, out);
    if (census->parsed()) return run_census(census_opt, s, marks, out);
    if (compare->parsed()) return run_compare(path_a, path_b, tol, cmp_tol->count() > 0);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
