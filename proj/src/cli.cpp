#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <optional>

#include "convergence.hpp"
#include "cutdown.hpp"
#include "excursion.hpp"
#include "families.hpp"
#include "gw.hpp"
#include "io.hpp"
#include "kernels.hpp"
#include "pruning.hpp"
#include "semigroup.hpp"
#include "stats.hpp"
#include "subtree.hpp"
#include "threadpool.hpp"

namespace bimt {

namespace {

// Flags shared by every experiment command. Values given in --config override
// the command line.
struct CommonOpts {
  std::optional<uint64_t> seed;
  int threads = 1;
  std::string config_path;
  std::string out = "-";
};

struct InstanceOpts {
  std::string tree_file;  // bi-measure tree JSON; wins over the generator spec
  std::string family = "poisson:1.0";
  int nodes = 1;
  std::string scale = "unit";
  std::string mu = "nod";
  std::string nu = "ske";
  double nu_scale = 1.0;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--seed", c.seed, "master seed (required; no wall-clock default)");
  cmd->add_option("--threads", c.threads, "worker threads for replicate loops");
  cmd->add_option("--config", c.config_path, "JSON config file overriding individual flags");
  cmd->add_option("-o,--out", c.out, "output path ('-' = stdout)");
}

void add_instance(CLI::App* cmd, InstanceOpts& io) {
  cmd->add_option("--tree", io.tree_file, "bi-measure tree JSON file (overrides generator flags)");
  cmd->add_option("--family", io.family, "offspring family, e.g. poisson:1.0, geometric:0.5");
  cmd->add_option("--nodes", io.nodes, "non-root node count of the conditioned tree");
  cmd->add_option("--scale", io.scale, "edge scaling: unit|crt|fixed:<a>|stable:alpha=..,C=..");
  cmd->add_option("--mu", io.mu, "sampling measure: ske|nod");
  cmd->add_option("--nu", io.nu, "pruning measure: ske|nod|adh|height:<a>|none");
  cmd->add_option("--nu-scale", io.nu_scale, "extra factor applied to nu");
}

// --config file overrides flag values (spec'd precedence); unknown keys are
// usage errors so typos cannot silently change an experiment
class ConfigOverride {
 public:
  explicit ConfigOverride(const std::string& path) {
    if (path.empty()) return;
    json_ = Json::parse(read_text_file(path));
    if (!json_.is_object()) throw std::invalid_argument("config file must be a JSON object");
    for (auto& [k, v] : json_.items()) unused_.insert(k);
  }
  template <typename T>
  void get(const char* key, T& slot) {
    if (json_.is_null() || !json_.contains(key)) return;
    slot = json_[key].get<T>();
    unused_.erase(key);
  }
  void get_seed(const char* key, std::optional<uint64_t>& slot) {
    if (json_.is_null() || !json_.contains(key)) return;
    slot = json_[key].get<uint64_t>();
    unused_.erase(key);
  }
  void finish(const std::string& command) const {
    for (const auto& k : unused_) {
      if (k == "command" || k == "kernel_backend") continue;  // annotations
      throw CLI::ValidationError("config", "unknown config key '" + k + "' for " + command);
    }
  }

 private:
  Json json_;
  std::set<std::string> unused_;
};

void apply_common(ConfigOverride& ov, CommonOpts& c) {
  ov.get_seed("seed", c.seed);
  ov.get("threads", c.threads);
  ov.get("out", c.out);
}

void apply_instance(ConfigOverride& ov, InstanceOpts& io) {
  ov.get("tree", io.tree_file);
  ov.get("family", io.family);
  ov.get("nodes", io.nodes);
  ov.get("scale", io.scale);
  ov.get("mu", io.mu);
  ov.get("nu", io.nu);
  ov.get("nu_scale", io.nu_scale);
}

uint64_t require_seed(const CommonOpts& c) {
  if (!c.seed) throw CLI::RequiredError("--seed (or 'seed' in --config)");
  return *c.seed;
}

// The embedded config carries the experiment, not the execution: output path
// and thread count are omitted so reruns are byte-comparable; the kernel
// backend is recorded as an annotation and ignored on input.
Json common_config(const std::string& command, const CommonOpts& c) {
  Json j;
  j["command"] = command;
  j["seed"] = *c.seed;
  j["kernel_backend"] = kern::backend_name();
  return j;
}

void instance_config(Json& j, const InstanceOpts& io) {
  if (!io.tree_file.empty()) {
    j["tree"] = io.tree_file;
    return;
  }
  j["family"] = io.family;
  j["nodes"] = io.nodes;
  j["scale"] = io.scale;
  j["mu"] = io.mu;
  j["nu"] = io.nu;
  j["nu_scale"] = io.nu_scale;
}

FamilySpec family_spec(const InstanceOpts& io) {
  FamilySpec f;
  f.eta = OffspringDistribution::parse(io.family);
  f.mu_kind = io.mu;
  f.nu_kind = io.nu;
  f.scale_kind = io.scale;
  f.nu_scale = io.nu_scale;
  return f;
}

BiMeasureTree build_instance(const InstanceOpts& io, uint64_t seed) {
  if (!io.tree_file.empty()) return bimeasure_from_json(Json::parse(read_text_file(io.tree_file)));
  Rng rng = Rng::stream(seed, UINT64_MAX);  // stream ids < 2^63 are replicates
  return make_family_instance(family_spec(io), io.nodes, rng);
}

void emit(const std::string& out, const std::string& content) {
  if (out == "-")
    std::cout << content;
  else
    write_text_file(out, content);
}

std::string fmt(double x) { return format_double(x); }

// ---------------------------------------------------------------------------

int cmd_generate(const CommonOpts& common, const InstanceOpts& inst, bool measures) {
  uint64_t seed = *common.seed;
  Json config = common_config("generate", common);
  instance_config(config, inst);
  config["measures"] = measures;

  Rng rng = Rng::stream(seed, UINT64_MAX);
  Json j;
  j["config"] = config;
  if (measures) {
    BiMeasureTree x = make_family_instance(family_spec(inst), inst.nodes, rng);
    j.update(bimeasure_to_json(x));
  } else {
    auto tree = gw_conditioned(OffspringDistribution::parse(inst.family), inst.nodes, rng);
    if (inst.scale != "unit") {
      FamilySpec f = family_spec(inst);
      tree = rescale(*tree, family_scale(f, inst.nodes));
    }
    j["tree"] = tree_to_json(*tree);
  }
  emit(common.out, j.dump(2) + "\n");
  return 0;
}

int cmd_prune(const CommonOpts& common, const InstanceOpts& inst, double horizon) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("--horizon must be >= 0");
  Json config = common_config("prune", common);
  instance_config(config, inst);
  config["horizon"] = horizon;

  BiMeasureTree x = build_instance(inst, *common.seed);
  Rng rng = Rng::stream(*common.seed, 0);
  PruningPath path = simulate(x, horizon, rng);
  std::string log;
  Json head;
  head["config"] = config;
  log += head.dump() + "\n";
  for (const auto& ev : path.events()) {
    Json e;
    e["t"] = ev.time;
    e["point"] = point_to_json(ev.point);
    e["removed_mu_mass"] = ev.removed_mu;
    e["removed_nu_mass"] = ev.removed_nu;
    log += e.dump() + "\n";
  }
  emit(common.out, log);
  return 0;
}

int cmd_semigroup(const CommonOpts& common, const InstanceOpts& inst,
                  const std::vector<double>& times, long replicates) {
  Json config = common_config("semigroup", common);
  instance_config(config, inst);
  config["t"] = times;
  config["replicates"] = replicates;

  BiMeasureTree x = build_instance(inst, *common.seed);
  auto suite = default_suite();
  CsvWriter csv(common.out == "-" ? "/dev/stdout" : common.out, config,
                "t,psi_id,exact,mc_mean,mc_stderr,replicates,abs_diff,sigmas");
  uint64_t rep_seed = *common.seed;
  for (double t : times) {
    for (const auto& psi : suite) {
      double exact = semigroup_exact(x, t, psi);
      McValue mc = mc_expectation(x, t, psi, replicates, rep_seed, common.threads);
      double diff = std::fabs(mc.estimate - exact);
      double sig = mc.se > 0.0 ? diff / mc.se : 0.0;
      csv.row({fmt(t), psi.id, fmt(exact), fmt(mc.estimate), fmt(mc.se),
               std::to_string(mc.samples), fmt(diff), fmt(sig)});
      rep_seed += 1;  // fresh replicate streams per cell, still seed-determined
    }
  }
  csv.close();
  return 0;
}

int cmd_generator_check(const CommonOpts& common, const InstanceOpts& inst,
                        const std::vector<double>& times) {
  Json config = common_config("generator-check", common);
  instance_config(config, inst);
  config["t"] = times;

  BiMeasureTree x = build_instance(inst, *common.seed);
  auto suite = default_suite();
  CsvWriter csv(common.out == "-" ? "/dev/stdout" : common.out, config,
                "psi_id,t,psi,s_t_psi,quotient,generator,abs_err,slope,dual_diff");
  for (const auto& psi : suite) {
    double psi_x = eval_test_function_exact(x, psi);
    double gen = generator_apply(x, psi);
    std::string dual = "";
    if (psi.gamma.trivial() && x.nu().is_atomic()) {
      double jump = generator_jump_form(x, psi);
      dual = fmt(std::fabs(gen - jump));
    }
    std::vector<double> lt, le;
    std::vector<std::array<double, 4>> rows;
    for (double t : times) {
      double st = semigroup_exact(x, t, psi);
      double quot = (st - psi_x) / t;
      double err = std::fabs(quot - gen);
      rows.push_back({t, st, quot, err});
      if (err > 0.0) {
        lt.push_back(std::log(t));
        le.push_back(std::log(err));
      }
    }
    double slope = lt.size() >= 2 ? fit_slope(lt, le) : 0.0;
    for (const auto& r : rows)
      csv.row({psi.id, fmt(r[0]), fmt(psi_x), fmt(r[1]), fmt(r[2]), fmt(gen), fmt(r[3]),
               fmt(slope), dual});
  }
  csv.close();
  return 0;
}

int cmd_cutdown(const CommonOpts& common, const InstanceOpts& inst, long replicates,
                const std::vector<int>& moment_orders, const std::string& moments_out) {
  Json config = common_config("cutdown", common);
  instance_config(config, inst);
  config["replicates"] = replicates;
  config["moments"] = moment_orders;
  if (!moments_out.empty()) config["moments_out"] = moments_out;

  auto x = std::make_shared<BiMeasureTree>(build_instance(inst, *common.seed));
  std::vector<CutdownRun> runs(replicates);
  parallel_for(replicates, common.threads, [&](long i) {
    Rng rng = Rng::stream(*common.seed, static_cast<uint64_t>(i));
    runs[i] = theta_simulate(*x, rng);
  });
  CsvWriter csv(common.out == "-" ? "/dev/stdout" : common.out, config,
                "replicate,theta,cut_count,seed");
  for (long i = 0; i < replicates; ++i)
    csv.row({std::to_string(i), runs[i].infinite ? "inf" : fmt(runs[i].theta),
             std::to_string(runs[i].cut_count), std::to_string(*common.seed)});
  csv.close();

  if (!moments_out.empty()) {
    CsvWriter mcsv(moments_out, config, "n,exact_or_mc,value,stderr");
    Rng mrng = Rng::stream(*common.seed, UINT64_MAX - 1);
    for (int n : moment_orders) {
      MomentResult m = theta_moment(*x, n, 0, nullptr);
      mcsv.row({std::to_string(n), m.exact ? "exact" : "mc",
                m.infinite ? "inf" : fmt(m.value), fmt(m.se)});
      (void)mrng;
    }
    mcsv.close();
  }
  return 0;
}

int cmd_converge(const CommonOpts& common, const InstanceOpts& inst,
                 const std::vector<int>& sizes, const std::vector<double>& times,
                 long replicates, const std::string& trend_out) {
  Json config = common_config("converge", common);
  instance_config(config, inst);
  config["sizes"] = sizes;
  config["t"] = times;
  config["replicates"] = replicates;
  if (!trend_out.empty()) config["trend_out"] = trend_out;

  auto suite = default_suite();
  auto rows = convergence_report(family_spec(inst), sizes, times, suite, replicates,
                                 *common.seed, common.threads);
  CsvWriter csv(common.out == "-" ? "/dev/stdout" : common.out, config,
                "index,psi_id,t,mean,stderr,replicates,seed");
  for (const auto& r : rows)
    csv.row({std::to_string(r.n_nodes), r.psi_id, fmt(r.t), fmt(r.mean), fmt(r.se),
             std::to_string(r.replicates), std::to_string(*common.seed)});
  csv.close();
  if (!trend_out.empty()) {
    CsvWriter tcsv(trend_out, config, "psi_id,t,step,abs_diff");
    for (const auto& tr : cauchy_trend(rows))
      for (size_t s = 0; s < tr.diffs.size(); ++s)
        tcsv.row({tr.psi_id, fmt(tr.t), std::to_string(s), fmt(tr.diffs[s])});
    tcsv.close();
  }
  return 0;
}

int cmd_gw_shapes(const CommonOpts& common, const std::string& family, int nodes, long samples) {
  Json config = common_config("gw-shapes", common);
  config["family"] = family;
  config["nodes"] = nodes;
  config["samples"] = samples;

  OffspringDistribution eta = OffspringDistribution::parse(family);
  auto shapes = enumerate_conditioned_shapes(eta, nodes);
  auto key_of = [](const std::vector<int>& seq) {
    std::string k;
    for (size_t i = 0; i < seq.size(); ++i) {
      if (i) k += '-';
      k += std::to_string(seq[i]);
    }
    return k;
  };
  std::map<std::string, long> counts;
  std::map<std::string, double> exact;
  for (const auto& [seq, p] : shapes) exact[key_of(seq)] = p;
  Rng rng = Rng::stream(*common.seed, 0);
  for (long s = 0; s < samples; ++s) {
    auto t = gw_conditioned(eta, nodes, rng);
    counts[key_of(offspring_sequence(*t))] += 1;
  }
  std::vector<long> observed;
  std::vector<double> expected;
  for (const auto& [k, p] : exact) {
    expected.push_back(p);
    observed.push_back(counts.count(k) ? counts.at(k) : 0);
  }
  double p_val = chi_square_gof_p(observed, expected);
  CsvWriter csv(common.out == "-" ? "/dev/stdout" : common.out, config,
                "shape,count,frequency,exact_prob");
  for (const auto& [k, p] : exact) {
    long c = counts.count(k) ? counts.at(k) : 0;
    csv.row({k, std::to_string(c), fmt(static_cast<double>(c) / samples), fmt(p)});
  }
  csv.row({"__chi_square_p", "", fmt(p_val), ""});
  csv.close();
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"pruning dynamics on bi-measure R-trees"};
  app.require_subcommand(1);

  CommonOpts common;
  InstanceOpts inst;
  bool gen_measures = true;
  double horizon = 1.0;
  std::vector<double> times{0.1, 0.5, 1.0};
  std::vector<double> gen_times{0.1, 0.01, 0.001};
  long replicates = 1000;
  std::vector<int> sizes{125, 250, 500, 1000};
  std::vector<double> conv_times{0.0, 0.5};
  std::vector<int> moment_orders{1, 2, 3};
  std::string moments_out, trend_out;
  std::string shape_family = "poisson:1.0";
  int shape_nodes = 3;
  long shape_samples = 100000;

  auto* g = app.add_subcommand("generate", "sample a conditioned GW bi-measure tree to JSON");
  add_common(g, common);
  add_instance(g, inst);
  g->add_flag("--measures,!--no-measures", gen_measures, "include mu/nu in the output");

  auto* p = app.add_subcommand("prune", "simulate the pruning process; JSONL event log");
  add_common(p, common);
  add_instance(p, inst);
  p->add_option("--horizon", horizon, "time horizon");

  auto* s = app.add_subcommand("semigroup", "exact semigroup vs Monte-Carlo expectation");
  add_common(s, common);
  add_instance(s, inst);
  s->add_option("--t", times, "evaluation times");
  s->add_option("--replicates", replicates, "MC replicates");

  auto* gc = app.add_subcommand("generator-check", "generator formulas and the t->0 limit");
  add_common(gc, common);
  add_instance(gc, inst);
  gc->add_option("--t", gen_times, "difference-quotient times");

  auto* cd = app.add_subcommand("cutdown", "separation times until the root is isolated");
  add_common(cd, common);
  add_instance(cd, inst);
  cd->add_option("--replicates", replicates, "simulation replicates");
  cd->add_option("--moments", moment_orders, "Theta moment orders for the exact table");
  cd->add_option("--moments-out", moments_out, "CSV path for the moment table");

  auto* cv = app.add_subcommand("converge", "test-function means across tree sizes");
  add_common(cv, common);
  add_instance(cv, inst);
  cv->add_option("--sizes", sizes, "node counts N");
  cv->add_option("--t", conv_times, "pruning times");
  cv->add_option("--replicates", replicates, "replicates per (N, t)");
  cv->add_option("--trend-out", trend_out, "CSV path for |mean(N)-mean(2N)| trends");

  auto* gs = app.add_subcommand("gw-shapes", "sampled shape frequencies vs exact enumeration");
  add_common(gs, common);
  gs->add_option("--family", shape_family, "offspring family");
  gs->add_option("--nodes", shape_nodes, "non-root node count");
  gs->add_option("--samples", shape_samples, "number of sampled trees");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ConfigOverride ov(common.config_path);
    apply_common(ov, common);
    std::string command;
    if (g->parsed()) command = "generate";
    if (p->parsed()) command = "prune";
    if (s->parsed()) command = "semigroup";
    if (gc->parsed()) command = "generator-check";
    if (cd->parsed()) command = "cutdown";
    if (cv->parsed()) command = "converge";
    if (gs->parsed()) command = "gw-shapes";

    apply_instance(ov, inst);
    ov.get("horizon", horizon);
    ov.get("measures", gen_measures);
    ov.get("replicates", replicates);
    if (g->parsed() || p->parsed() || s->parsed() || gc->parsed() || cd->parsed() ||
        cv->parsed()) {
      // instance/t options are shared; command-specific keys below
    }
    if (s->parsed()) ov.get("t", times);
    if (gc->parsed()) ov.get("t", gen_times);
    if (cv->parsed()) {
      ov.get("sizes", sizes);
      ov.get("t", conv_times);
      ov.get("trend_out", trend_out);
    }
    if (cd->parsed()) {
      ov.get("moments", moment_orders);
      ov.get("moments_out", moments_out);
    }
    if (gs->parsed()) {
      ov.get("family", shape_family);
      ov.get("nodes", shape_nodes);
      ov.get("samples", shape_samples);
    }
    ov.finish(command);
    require_seed(common);

    if (g->parsed()) return cmd_generate(common, inst, gen_measures);
    if (p->parsed()) return cmd_prune(common, inst, horizon);
    if (s->parsed()) return cmd_semigroup(common, inst, times, replicates);
    if (gc->parsed()) return cmd_generator_check(common, inst, gen_times);
    if (cd->parsed()) return cmd_cutdown(common, inst, replicates, moment_orders, moments_out);
    if (cv->parsed()) return cmd_converge(common, inst, sizes, conv_times, replicates, trend_out);
    if (gs->parsed()) return cmd_gw_shapes(common, shape_family, shape_nodes, shape_samples);
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace bimt
