// metronome-sim: run scenarios, presets and sweeps of the sleep-and-wake
// packet retrieval simulator, or evaluate the closed-form model.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "metronome/analytics.hpp"
#include "metronome/config.hpp"
#include "metronome/error.hpp"
#include "metronome/metrics.hpp"
#include "metronome/report_io.hpp"
#include "metronome/sim.hpp"
#include "metronome/sweep.hpp"

namespace {

using namespace metronome;

constexpr const char* kOutputEnv = "METRONOME_OUTPUT_DIR";

// Scenario sources shared by run, sweep and preset.
struct ScenarioArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> flag_opts;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "scenario file (key=value lines)");
    app->add_option("-p,--preset", preset, "start from a named preset");
    app->add_option("-o,--out", out_dir, std::string("output directory (env ") + kOutputEnv + " overrides)");
    app->add_option("--set", sets, "key=value override, repeatable");
    for (const auto& key : config_keys()) {
      flag_opts[key.name] = app->add_option("--" + key.name, flags[key.name], key.help)->group("Scenario keys");
    }
  }

  ScenarioConfig resolve() const {
    std::vector<KeyValue> overrides;
    for (const auto& [key, opt] : flag_opts) {
      if (opt->count() > 0) overrides.emplace_back(key, flags.at(key));
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError({"--set expects key=value, got '" + s + "'"});
      overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!out_dir.empty()) overrides.emplace_back("output_dir", out_dir);
    if (const char* env = std::getenv(kOutputEnv); env && *env) {
      overrides.emplace_back("output_dir", env);
    }

    std::string text;
    if (!preset.empty()) {
      const auto p = preset_text(preset);
      if (!p) throw ConfigError({"unknown preset '" + preset + "'"});
      text = *p;
    }
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw Error("cannot read " + config_path);
      std::stringstream buf;
      buf << in.rdbuf();
      text += "\n" + buf.str();
    }
    if (text.empty() && overrides.empty()) {
      throw ConfigError({"no scenario given: use --config, --preset or scenario flags"});
    }
    return parse_config(text, overrides);
  }
};

int run_scenario(const ScenarioConfig& cfg, bool quiet) {
  const auto report = metrics::summarize(simulate(cfg));
  const auto files = emit_report(report, cfg, cfg.output_dir);
  if (!quiet) write_summary(std::cout, report, cfg);
  std::cerr << "wrote " << files.size() << " files to " << cfg.output_dir << '\n';
  return report.global.conservation_ok ? 0 : 3;
}

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct AnalyticArgs {
  std::string op;
  int m = 3;
  int n = 1;
  std::string t_short = "10us";
  std::string t_long = "500us";
  std::string target = "10us";
  std::string x = "0ns";
  std::string v = "10us";
  std::string busy = "0ns";
  double rho = 0.0;
  double p = 1.0;
};

SimDuration need_duration(const std::string& text, const char* what) {
  const auto d = parse_duration(text);
  if (!d) throw ConfigError({std::string(what) + ": expected a duration with unit, got '" + text + "'"});
  return *d;
}

int run_analytic(const AnalyticArgs& a) {
  analytics::ModelParams p;
  p.m_threads = a.m;
  p.n_queues = a.n;
  p.t_short = static_cast<double>(need_duration(a.t_short, "--t_short"));
  p.t_long = static_cast<double>(need_duration(a.t_long, "--t_long"));
  p.target_vacation = static_cast<double>(need_duration(a.target, "--target_vacation"));
  const double x = static_cast<double>(need_duration(a.x, "--x"));
  const double v = static_cast<double>(need_duration(a.v, "--v"));
  const double b = static_cast<double>(need_duration(a.busy, "--busy"));

  auto duration_out = [](double ns) {
    std::cout << ns << " ns (" << ns / 1e3 << " us)\n";
    return 0;
  };
  auto scalar_out = [](double value) {
    std::cout << value << '\n';
    return 0;
  };

  const std::string& op = a.op;
  if (op == "expected-busy") return duration_out(analytics::expected_busy_given_vacation(v, analytics::LoadPoint::from_rho(a.rho)));
  if (op == "load-from-periods") return scalar_out(analytics::load_from_periods(b, v));
  if (op == "cdf-high") return scalar_out(analytics::vacation_cdf_high_load(x, p));
  if (op == "cdf-low") return scalar_out(analytics::vacation_cdf_low_load(x, p));
  if (op == "pdf-high") {
    std::cout << analytics::vacation_pdf_high_load(x, p) * 1e3 << " per us\n";
    return 0;
  }
  if (op == "atom-high") return scalar_out(analytics::vacation_atom_high_load(p));
  if (op == "mean-high") return duration_out(analytics::mean_vacation_high_load(p));
  if (op == "mean-low") return duration_out(analytics::mean_vacation_low_load(p));
  if (op == "backup-success") return scalar_out(analytics::backup_success_prob(p));
  if (op == "mean-general") {
    const auto g = analytics::mean_vacation_general(p, a.p);
    std::cout << "exact " << g.exact << " ns, approx " << g.approx << " ns\n";
    return 0;
  }
  if (op == "adaptive-ts") return duration_out(analytics::adaptive_ts(a.m, a.rho, p.target_vacation));
  if (op == "adaptive-ts-mq") {
    return duration_out(analytics::adaptive_ts_multiqueue(a.m, a.n, a.rho, p.target_vacation));
  }
  throw ConfigError({"unknown analytic operation '" + op + "'"});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sleep-and-wake packet retrieval simulator"};
  app.require_subcommand(1);

  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "do not print the summary");

  ScenarioArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "simulate one scenario and write its report");
  run_args.attach(run_cmd);

  ScenarioArgs sweep_args;
  std::string sweep_key;
  std::string sweep_values;
  int jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "run one scenario per value of a key");
  sweep_args.attach(sweep_cmd);
  sweep_cmd->add_option("-k,--key", sweep_key, "config key to sweep")->required();
  sweep_cmd->add_option("-V,--values", sweep_values, "comma-separated values")->required();
  sweep_cmd->add_option("-j,--jobs", jobs, "points run concurrently")->check(CLI::PositiveNumber);

  ScenarioArgs preset_args;
  bool list_presets = false;
  auto* preset_cmd = app.add_subcommand("preset", "run a named preset scenario");
  preset_cmd->add_flag("-l,--list", list_presets, "list presets and exit");
  preset_cmd->add_option("preset", preset_args.preset, "preset name");
  preset_cmd->add_option("-o,--out", preset_args.out_dir, "output directory");
  preset_cmd->add_option("--set", preset_args.sets, "key=value override, repeatable");
  for (const auto& key : config_keys()) {
    preset_args.flag_opts[key.name] =
        preset_cmd->add_option("--" + key.name, preset_args.flags[key.name], key.help)->group("Scenario keys");
  }

  AnalyticArgs an;
  auto* analytic_cmd = app.add_subcommand("analytic", "evaluate a closed-form model quantity");
  analytic_cmd
      ->add_option("op", an.op,
                   "expected-busy | load-from-periods | cdf-high | cdf-low | pdf-high | "
                   "atom-high | mean-high | mean-low | backup-success | mean-general | "
                   "adaptive-ts | adaptive-ts-mq")
      ->required();
  analytic_cmd->add_option("--m_threads", an.m, "threads M");
  analytic_cmd->add_option("--n_queues", an.n, "queues N");
  analytic_cmd->add_option("--t_short", an.t_short, "short timer");
  analytic_cmd->add_option("--t_long", an.t_long, "long timer");
  analytic_cmd->add_option("--target_vacation", an.target, "target vacation");
  analytic_cmd->add_option("--x", an.x, "CDF/PDF argument (duration)");
  analytic_cmd->add_option("--v,--vacation", an.v, "vacation length");
  analytic_cmd->add_option("--busy", an.busy, "busy length");
  analytic_cmd->add_option("--rho", an.rho, "load");
  analytic_cmd->add_option("--p", an.p, "probability a thread is primary");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run_scenario(run_args.resolve(), quiet);

    if (preset_cmd->parsed()) {
      if (list_presets) {
        for (const auto& p : presets()) std::cout << p.name << "\t" << p.description << '\n';
        return 0;
      }
      if (preset_args.preset.empty()) throw ConfigError({"preset name required (see --list)"});
      return run_scenario(preset_args.resolve(), quiet);
    }

    if (sweep_cmd->parsed()) {
      const auto base = sweep_args.resolve();
      const auto values = split_values(sweep_values);
      const auto sweep = run_sweep(base, sweep_key, values, jobs);
      const std::filesystem::path dir = base.output_dir;
      std::filesystem::create_directories(dir);
      std::ofstream csv(dir / "sweep.csv");
      if (!csv) throw Error("cannot write " + (dir / "sweep.csv").string());
      write_sweep_csv(csv, sweep);
      write_sweep_csv(std::cout, sweep);
      bool failed = false;
      for (std::size_t i = 0; i < sweep.points.size(); ++i) {
        const auto& pt = sweep.points[i];
        if (!pt.report) {
          failed = true;
          std::cerr << sweep_key << '=' << pt.value << " failed: " << pt.error << '\n';
          continue;
        }
        auto cfg = parse_config(to_config_text(base), {{sweep_key, pt.value}});
        emit_report(*pt.report, cfg, dir / ("point_" + std::to_string(i)));
      }
      return failed ? 4 : 0;
    }

    if (analytic_cmd->parsed()) return run_analytic(an);
  } catch (const ConfigError& e) {
    for (const auto& issue : e.issues()) std::cerr << "config error: " << issue << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
