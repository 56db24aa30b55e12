#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "logchaos/experiments.hpp"
#include "logchaos/fields/kl_gff.hpp"
#include "logchaos/io.hpp"

#ifndef LOGCHAOS_VERSION
#define LOGCHAOS_VERSION "unknown"
#endif

using namespace logchaos;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kInternal = 4 };

struct Common {
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  std::string out = "out";
  bool dry_run = false;
  std::string seed_source = "flag";
};

struct GridOpts {
  int d = 1;
  int n = 128;
  double side = 1.0;
  double margin = 0.25;
  std::string profile = "auto";
  std::string scheme = "circulant-layers";
  double eps0 = 0.25;
  int levels = 4;
};

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path + ": " + what);
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "RNG seed (LOGCHAOS_SEED overrides)");
  sub->add_option("--out", c.out, "output directory");
  sub->add_flag("--dry-run", c.dry_run, "validate and print the plan, compute nothing");
}

void add_grid(CLI::App* sub, GridOpts& g, bool ladder = true) {
  sub->add_option("--d", g.d, "dimension (1 or 2)");
  sub->add_option("--n", g.n, "grid points per axis");
  sub->add_option("--side", g.side, "box side L");
  sub->add_option("--margin", g.margin, "inner-box margin");
  sub->add_option("--profile", g.profile, "seed covariance: triangle (d=1), lens (d=2), auto");
  sub->add_option("--scheme", g.scheme, "sampling scheme: circulant-layers or cholesky");
  if (ladder) {
    sub->add_option("--eps0", g.eps0, "coarsest ladder scale");
    sub->add_option("--levels", g.levels, "number of dyadic ladder scales");
  }
}

GridSpec make_grid(const std::string& cmd, const GridOpts& o) {
  require(o.d == 1 || o.d == 2, cmd + ".d", "must be 1 or 2");
  require(o.n >= 4, cmd + ".n", "must be >= 4");
  require(o.side > 0.0, cmd + ".side", "must be > 0");
  require(o.margin >= 0.0 && o.margin < o.side / 2, cmd + ".margin", "must lie in [0, side/2)");
  return GridSpec(o.d, o.side, o.n, o.margin);
}

SeedCovariance make_seed(const std::string& cmd, const GridOpts& o) {
  std::string p = o.profile == "auto" ? (o.d == 1 ? "triangle" : "lens") : o.profile;
  try {
    return make_seed_covariance(o.d, p);
  } catch (const ConfigError& e) {
    throw ConfigError(cmd + ".profile: " + e.what());
  }
}

ScaleLadder make_ladder(const std::string& cmd, const GridOpts& o) {
  require(o.eps0 > 0.0 && o.eps0 < 1.0, cmd + ".eps0", "must lie in (0,1)");
  require(o.levels >= 1 && o.levels <= 30, cmd + ".levels", "must lie in [1,30]");
  return ScaleLadder::dyadic(o.eps0, o.levels);
}

std::optional<HolderFieldSpec> make_holder(const std::string& cmd, int order, double amplitude,
                                           const std::string& law) {
  require(order >= 1, cmd + ".h-order", "must be >= 1");
  if (amplitude == 0.0) return std::nullopt;
  return HolderFieldSpec{order, amplitude, parse_coefficient_law(law)};
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + io::fmt(x);
  return s;
}

/// Output of one experiment: named files plus manifest entries.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  io::Manifest results;
  std::vector<std::string> events;
};

struct Plan {
  std::string command;
  std::string config_echo;
  std::function<Outputs()> run;
};

int execute(const Plan& plan, const Common& c) {
  if (c.dry_run) {
    std::cout << "plan: " << plan.command << "\n"
              << "output directory: " << c.out << "\n"
              << "seed: " << c.seed << " (" << c.seed_source << ")\n"
              << "jobs: " << c.jobs << "\n"
              << plan.config_echo << "validated; dry run, nothing computed\n";
    return kOk;
  }
  auto t0 = std::chrono::steady_clock::now();
  Outputs o = plan.run();
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  fs::path dir(c.out);
  for (const auto& [name, bytes] : o.files) io::write_atomic(dir / name, bytes);

  io::Manifest m;
  m.section("run");
  m.set("command", plan.command);
  m.set("version", std::string(LOGCHAOS_VERSION));
  m.set("seed", std::to_string(c.seed));
  m.set("seed_source", c.seed_source);
  m.set("jobs", std::to_string(c.jobs));
  m.set("wall_time_s", wall);
  for (const auto& [name, bytes] : o.files) m.set("file", name);
  m.section("config");
  std::istringstream echo(plan.config_echo);
  for (std::string line; std::getline(echo, line);) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    m.set(line.substr(0, eq), line.substr(eq + 1));
  }
  m.section("results");
  std::string results = o.results.str();
  m.section("events");
  m.set("count", o.events.size());
  for (const auto& e : o.events) m.set("event", e);
  std::string text = m.str();
  // results are already rendered; splice them under their section header
  auto pos = text.find("[results]\n");
  text.insert(pos + 10, results);
  io::write_atomic(dir / "manifest.txt", text);
  std::cout << plan.command << ": wrote";
  for (const auto& [name, bytes] : o.files) std::cout << " " << (dir / name).string();
  std::cout << " " << (dir / "manifest.txt").string() << "\n";
  return kOk;
}

void add_stat(io::Manifest& m, const std::string& key, const stats::StatReport& r) {
  m.set(key, r.estimate);
  m.set(key + "_se", r.se);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"logchaos: log-correlated Gaussian fields, multiplicative chaos and reconstruction"};
  app.set_config("--config", "", "INI file; [subcommand] sections, flags override file values");
  app.set_version_flag("--version", LOGCHAOS_VERSION);
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();

  // Each subcommand binds its own option block, so defaults never leak
  // between subcommands.
  struct Opts {
    Common common;
    GridOpts grid;
    std::size_t replicas = 1000;
    double gamma = 0.5, gamma0 = 0.4, eps = 0.0, se_cap = 0.05, tail_q = 2.0, h_amp = 0.0;
    int h_order = 8, modes = 200;
    std::size_t counter_replicas = 0, pairs = 24, N = 0;
    std::string variant = "subcritical", counter_mode = "per-point", h_law = "uniform";
    bool critical = false;
    std::vector<double> scales;
  };
  std::map<std::string, Opts> all;

  auto sub = [&](const char* name, const char* help, bool with_grid, bool ladder,
                 const std::function<void(Opts&)>& init = {}) {
    if (init) init(all[name]);
    auto* s = app.add_subcommand(name, help);
    add_common(s, all[name].common);
    if (with_grid) add_grid(s, all[name].grid, ladder);
    return std::make_pair(s, &all[name]);
  };
  auto add_h = [](CLI::App* s, Opts& o) {
    s->add_option("--h-order", o.h_order, "modes of the smooth perturbation H");
    s->add_option("--h-amplitude", o.h_amp, "coefficient scale c of H (0: no perturbation)");
    s->add_option("--h-law", o.h_law, "coefficient law of H: uniform or gaussian");
  };

  {
    auto [s, o] = sub("simulate-field", "sample the cut-off field on every ladder scale; raw dump", true, true, [](Opts& o) {
      o.replicas = 100;
    });
    s->add_option("--replicas", o->replicas, "replica count");
  }
  {
    auto [s, o] = sub("simulate-gff", "sample the 2D GFF by its sine expansion; raw dump", false, false, [](Opts& o) {
      o.replicas = 1;
    });
    s->add_option("--n", o->grid.n, "grid points per axis");
    s->add_option("--modes", o->modes, "modes per axis");
    s->add_option("--replicas", o->replicas, "replica count");
  }
  {
    auto [s, o] = sub("build-chaos", "chaos measures on every ladder scale; total masses", true, true);
    s->add_option("--gamma", o->gamma, "chaos parameter");
    s->add_option("--variant", o->variant, "subcritical, critical, option1, option2");
    s->add_option("--replicas", o->replicas, "replica count");
    s->add_option("--tail-q", o->tail_q, "moment order for the tail diagnostic");
    add_h(s, *o);
  }
  {
    auto [s, o] = sub("estimate-counter", "Monte Carlo counter term at one scale", true, true);
    s->add_option("--gamma", o->gamma, "chaos parameter");
    s->add_flag("--critical", o->critical, "use gamma_c with the Seneta-Heyde factor");
    s->add_option("--eps", o->eps, "counter scale (a ladder scale)")->required();
    s->add_option("--replicas", o->replicas, "replica count");
    s->add_option("--counter-mode", o->counter_mode, "per-point or pooled");
    s->add_option("--se-cap", o->se_cap, "largest accepted counter SE");
  }
  {
    auto [s, o] = sub("reconstruct", "reconstruction convergence study", true, true, [](Opts& o) {
      o.replicas = 2000;
      o.grid.n = 512;
      o.grid.levels = 6;
    });
    s->add_option("--gamma", o->gamma, "chaos parameter");
    s->add_flag("--critical", o->critical, "use gamma_c with the Seneta-Heyde factor");
    s->add_option("--scales", o->scales, "reconstruction scales (default: all but the finest)");
    s->add_option("--replicas", o->replicas, "replica count");
    s->add_option("--counter-replicas", o->counter_replicas, "independent counter batch (0: reuse)");
    s->add_option("--counter-mode", o->counter_mode, "per-point or pooled");
    s->add_option("--se-cap", o->se_cap, "largest accepted counter SE");
    add_h(s, *o);
  }
  {
    auto [s, o] = sub("thick-points", "thick-point measures against the chaos", true, true, [](Opts& o) {
      o.replicas = 4000;
      o.grid.n = 1024;
      o.grid.eps0 = 0.125;
      o.grid.levels = 7;
    });
    s->add_option("--gamma", o->gamma, "thickness level");
    s->add_option("--scales", o->scales, "thick-point scales (default: all but the finest)");
    s->add_option("--replicas", o->replicas, "replica count");
  }
  {
    auto [s, o] = sub("gamma-transfer", "rebuild nu_gamma from nu_gamma0", true, true, [](Opts& o) {
      o.replicas = 4000;
      o.gamma = 0.7;
      o.grid.n = 1024;
      o.grid.margin = 0.125;
      o.grid.eps0 = 0.125;
      o.grid.levels = 7;
      o.scales = {0.125, 0.03125, 0.0078125};
    });
    s->add_option("--gamma0", o->gamma0, "source chaos parameter");
    s->add_option("--gamma", o->gamma, "target chaos parameter");
    s->add_option("--scales", o->scales, "mollification scales");
    s->add_option("--replicas", o->replicas, "replica count");
  }
  {
    auto [s, o] = sub("zeta-gn", "randomized zeta ratio g_N", false, false, [](Opts& o) {
      o.gamma = 1.0;
      o.N = 400;
    });
    s->add_option("--gamma", o->gamma, "chaos parameter");
    s->add_option("--N", o->N, "number of primes");
  }
  {
    auto [s, o] = sub("circle-gn", "circle-field counterexample g_N", false, false, [](Opts& o) {
      o.gamma = 1.0;
      o.N = 10000;
    });
    s->add_option("--gamma", o->gamma, "chaos parameter");
    s->add_option("--N", o->N, "last index");
  }
  {
    auto [s, o] = sub("covariance-audit", "empirical against exact cut-off covariance", true, true, [](Opts& o) {
      o.replicas = 4000;
      o.grid.levels = 5;
    });
    s->add_option("--replicas", o->replicas, "replica count");
    s->add_option("--pairs", o->pairs, "point pairs per scale");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    const std::string cmd = active->get_name();
    Opts& o = all.at(cmd);
    Common& common = o.common;
    GridOpts& grid = o.grid;
    if (const char* env = std::getenv("LOGCHAOS_SEED")) {
      try {
        std::size_t used = 0;
        common.seed = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw ConfigError(std::string("LOGCHAOS_SEED: not an unsigned integer: '") + env + "'");
      }
      common.seed_source = "env";
    }
    Plan plan{cmd, active->config_to_str(true, false), {}};
    const unsigned jobs = common.jobs;
    const std::uint64_t seed = common.seed;

    if (cmd == "simulate-field") {
      require(o.replicas >= 1, cmd + ".replicas", "must be >= 1");
      GridSpec g = make_grid(cmd, grid);
      SeedCovariance sc = make_seed(cmd, grid);
      ScaleLadder ladder = make_ladder(cmd, grid);
      SamplingScheme scheme = parse_sampling_scheme(grid.scheme);
      ladder.check_against(g, false);
      plan.run = [=] {
        auto ens = sample_cutoff_ensemble(g, sc, ladder, o.replicas, seed, scheme, jobs);
        Outputs res;
        res.files.emplace_back("field.bin", io::dump_bytes(ens.values));
        res.results.set("dump", "field.bin");
        res.results.set("dtype", "float64-le");
        res.results.set("order", "replica, scale, point (row-major axes)");
        res.results.set("shape", std::to_string(o.replicas) + " " + std::to_string(ladder.size()) + " " +
                                   std::to_string(g.size()));
        res.results.set("dim", g.dim());
        res.results.set("points_per_axis", g.points_per_axis());
        res.results.set("side", g.side());
        res.results.set("spacing", g.spacing());
        res.results.set("profile", sc.name());
        res.results.set("ladder", join(ladder.scales()));
        res.results.set("scheme", to_string(scheme));
        res.events = ens.events;
        return res;
      };
    } else if (cmd == "simulate-gff") {
      require(o.replicas >= 1, cmd + ".replicas", "must be >= 1");
      require(grid.n >= 2, cmd + ".n", "must be >= 2");
      GridSpec g(2, 1.0, grid.n, 0.0);
      KLFieldSpec spec{o.modes};
      if (o.modes < 1) throw ConfigError(cmd + ".modes: must be >= 1");
      plan.run = [=] {
        auto s = sample_gff_kl(spec, g, o.replicas, seed, jobs);
        Outputs res;
        res.files.emplace_back("gff.bin", io::dump_bytes(s.values));
        res.results.set("dump", "gff.bin");
        res.results.set("dtype", "float64-le");
        res.results.set("order", "replica, point (row-major axes)");
        res.results.set("shape", std::to_string(o.replicas) + " " + std::to_string(g.size()));
        res.results.set("points_per_axis", g.points_per_axis());
        res.results.set("modes", o.modes);
        res.results.set("convention", KLFieldSpec::convention());
        return res;
      };
    } else if (cmd == "build-chaos") {
      ChaosSetup s;
      s.grid = make_grid(cmd, grid);
      s.seed_covariance = make_seed(cmd, grid);
      s.ladder = make_ladder(cmd, grid);
      s.scheme = parse_sampling_scheme(grid.scheme);
      s.gamma = o.gamma;
      s.variant = parse_chaos_variant(o.variant);
      s.perturbation = make_holder(cmd, o.h_order, o.h_amp, o.h_law);
      s.replicas = o.replicas;
      s.tail_q = o.tail_q;
      s.rng_seed = seed;
      s.jobs = jobs;
      validate(s);
      plan.run = [=] {
        auto r = build_chaos(s);
        Outputs res;
        res.files.emplace_back("chaos.csv", to_csv(r, s.ladder).str());
        res.results.set("gamma", r.gamma);
        for (const auto& sc : r.scales) {
          std::string k = "eps_" + io::fmt(sc.eps);
          add_stat(res.results, k + ".mean_total_mass", sc.mass);
          if (sc.tail) {
            res.results.set(k + ".hill_alpha", sc.tail->hill_alpha);
            res.results.set(k + ".ratio_growth_slope", sc.tail->ratio_growth_slope);
            res.results.set(k + ".heavy_tail_q" + io::fmt(sc.tail->q), sc.tail->heavy ? "yes" : "no");
          }
        }
        res.events = r.events;
        return res;
      };
    } else if (cmd == "estimate-counter") {
      CounterSetup s;
      s.grid = make_grid(cmd, grid);
      s.seed_covariance = make_seed(cmd, grid);
      s.ladder = make_ladder(cmd, grid);
      s.scheme = parse_sampling_scheme(grid.scheme);
      s.critical = o.critical;
      s.gamma = o.critical ? critical_gamma(grid.d) : o.gamma;
      s.eps = o.eps;
      s.replicas = o.replicas;
      s.options.mode = parse_counter_mode(o.counter_mode);
      s.options.se_cap = o.se_cap;
      s.options.jobs = jobs;
      s.rng_seed = seed;
      validate(s);
      plan.run = [=] {
        Outputs res;
        auto c = estimate_counter(s, &res.events);
        res.files.emplace_back("counter.csv", to_csv(c, s.grid).str());
        res.results.set("gamma", c.gamma);
        res.results.set("epsilon", c.eps);
        res.results.set("mollifier", c.mollifier);
        res.results.set("counter_mode", to_string(c.mode));
        res.results.set("replicas", c.replicas);
        res.results.set("max_se", c.max_se());
        return res;
      };
    } else if (cmd == "reconstruct") {
      ConvergenceSetup s;
      s.grid = make_grid(cmd, grid);
      s.seed_covariance = make_seed(cmd, grid);
      s.ladder = make_ladder(cmd, grid);
      s.scheme = parse_sampling_scheme(grid.scheme);
      s.critical = o.critical;
      s.gamma = o.critical ? critical_gamma(grid.d) : o.gamma;
      s.scales = o.scales;
      s.replicas = o.replicas;
      s.counter_replicas = o.counter_replicas;
      s.counter_mode = parse_counter_mode(o.counter_mode);
      s.counter_se_cap = o.se_cap;
      s.perturbation = make_holder(cmd, o.h_order, o.h_amp, o.h_law);
      s.rng_seed = seed;
      s.jobs = jobs;
      validate(s);
      plan.run = [=] {
        auto r = convergence_study(s);
        Outputs res;
        res.files.emplace_back("convergence.csv", to_csv(r, s.counter_mode).str());
        res.results.set("reference_eps", r.reference_eps);
        res.results.set("gamma", r.gamma);
        add_stat(res.results, "reference_variance", r.reference_variance);
        res.results.set("loglog_slope", r.slope.slope);
        res.results.set("loglog_slope_se", r.slope.slope_se);
        for (const auto& row : r.rows) add_stat(res.results, "eps_" + io::fmt(row.eps) + ".mean_pairing", row.mean_pairing);
        res.events = r.events;
        return res;
      };
    } else if (cmd == "thick-points") {
      ThickPointSetup s;
      s.grid = make_grid(cmd, grid);
      s.seed_covariance = make_seed(cmd, grid);
      s.ladder = make_ladder(cmd, grid);
      s.scheme = parse_sampling_scheme(grid.scheme);
      s.scales = o.scales;
      s.gamma = o.gamma;
      s.replicas = o.replicas;
      s.rng_seed = seed;
      s.jobs = jobs;
      validate(s);
      plan.run = [=] {
        auto r = thick_point_study(s);
        Outputs res;
        res.files.emplace_back("thickpoints.csv", to_csv(r).str());
        res.results.set("reference_eps", r.reference_eps);
        for (const auto& row : r.rows) {
          std::string k = "eps_" + io::fmt(row.eps);
          res.results.set(k + ".probability", row.probability);
          add_stat(res.results, k + ".mean_total_mass", row.mass);
        }
        res.events = r.events;
        return res;
      };
    } else if (cmd == "gamma-transfer") {
      TransferSetup s;
      s.grid = make_grid(cmd, grid);
      s.seed_covariance = make_seed(cmd, grid);
      s.ladder = make_ladder(cmd, grid);
      s.scheme = parse_sampling_scheme(grid.scheme);
      s.scales = o.scales;
      s.gamma0 = o.gamma0;
      s.gamma = o.gamma;
      s.replicas = o.replicas;
      s.rng_seed = seed;
      s.jobs = jobs;
      validate(s);
      plan.run = [=] {
        auto r = transfer_study(s);
        Outputs res;
        res.files.emplace_back("transfer.csv", to_csv(r, s.gamma0, s.gamma).str());
        res.results.set("reference_eps", r.reference_eps);
        res.results.set("inner_volume", r.inner_volume);
        for (const auto& row : r.rows) {
          std::string k = "eps_" + io::fmt(row.eps);
          add_stat(res.results, k + ".mean_total_mass", row.mass);
          add_stat(res.results, k + ".normalizer", {row.normalizer, row.normalizer_se, s.replicas});
        }
        res.events = r.events;
        return res;
      };
    } else if (cmd == "zeta-gn") {
      check_zeta_gamma(o.gamma);
      require(o.N >= 1, cmd + ".N", "must be >= 1");
      plan.run = [=] {
        auto g = zeta_gn_ratio(o.gamma, o.N);
        std::vector<std::size_t> n(g.size());
        for (std::size_t i = 0; i < n.size(); ++i) n[i] = i + 1;
        Outputs res;
        res.files.emplace_back("zeta_gn.csv", gn_csv(n, g).str());
        res.results.set("gamma", o.gamma);
        res.results.set("g_N", g.back());
        return res;
      };
    } else if (cmd == "circle-gn") {
      require(o.gamma > 0.0, cmd + ".gamma", "must be > 0");
      require(o.N >= 2, cmd + ".N", "must be >= 2 (the product starts at n = 2)");
      plan.run = [=] {
        auto c = circle_counterexample_gn(o.gamma, o.N);
        Outputs res;
        res.files.emplace_back("circle_gn.csv", gn_csv(c.n, c.g).str());
        res.results.set("gamma", o.gamma);
        res.results.set("g_N", c.g.back());
        res.results.set("decay_slope_vs_loglogN", c.decay_slope);
        return res;
      };
    } else if (cmd == "covariance-audit") {
      AuditSetup s;
      s.grid = make_grid(cmd, grid);
      s.seed_covariance = make_seed(cmd, grid);
      s.ladder = make_ladder(cmd, grid);
      s.scheme = parse_sampling_scheme(grid.scheme);
      s.replicas = o.replicas;
      s.pairs = o.pairs;
      s.rng_seed = seed;
      s.jobs = jobs;
      validate(s);
      plan.run = [=] {
        auto r = covariance_audit(s);
        Outputs res;
        res.files.emplace_back("covariance_audit.csv", to_csv(r).str());
        std::size_t bad = 0;
        for (const auto& row : r.rows) bad += std::abs(row.z()) > 3.0;
        res.results.set("rows", r.rows.size());
        res.results.set("rows_beyond_3se", bad);
        res.events = r.events;
        return res;
      };
    }
    return execute(plan, common);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return kConfig;
  } catch (const QualityError& e) {
    std::cerr << "quality error: " << e.what() << "\n";
    return kNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
