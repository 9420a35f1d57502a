#pragma once

// Command-line front end: presets for the experiment sweeps, flag parsing and
// the run / calibrate / trf subcommands.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swissgambit/harness.hpp"

namespace swissgambit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

inline constexpr const char* kOutputEnv = "SWISS_GAMBIT_OUT";

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Campaign {
  std::string label;  // output subdirectory
  ExperimentConfig config;
};

enum class SweptAxis { None, Rounds, StrengthRange };

struct Preset {
  std::string name;
  std::string description;
  SweptAxis swept = SweptAxis::None;
  std::vector<Campaign> campaigns;
};

namespace detail {

inline ExperimentConfig with_model(ModelKind m) {
  ExperimentConfig c;
  c.model = m;
  return c;
}

inline Preset rounds_sweep(const std::string& name, ModelKind m) {
  Preset p{name, std::string("rounds 5, 7, 9, 11 (") + to_string(m) + ")", SweptAxis::Rounds, {}};
  for (int r : {5, 7, 9, 11}) {
    ExperimentConfig c = with_model(m);
    c.rounds = r;
    p.campaigns.push_back({"rounds-" + std::to_string(r), c});
  }
  return p;
}

// Ranges of size 800, 1200, 1600 around 1800 Elo.
inline Preset strength_sweep(const std::string& name, ModelKind m, int rounds) {
  Preset p{name, std::string("strength range 800, 1200, 1600 around 1800 (") + to_string(m) + ")",
           SweptAxis::StrengthRange, {}};
  for (int size : {800, 1200, 1600}) {
    ExperimentConfig c = with_model(m);
    c.rounds = rounds;
    c.elo_low = 1800 - size / 2;
    c.elo_high = 1800 + size / 2;
    p.campaigns.push_back({"range-" + std::to_string(size), c});
  }
  return p;
}

}  // namespace detail

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    std::vector<Preset> v;
    v.push_back({"default", "single campaign with the standard settings", SweptAxis::None,
                 {{"default", ExperimentConfig{}}}});
    ExperimentConfig det = detail::with_model(ModelKind::Deterministic);
    det.tournaments = 200;
    v.push_back({"desk-det", "200 deterministic tournaments", SweptAxis::None, {{"desk-det", det}}});
    ExperimentConfig prob = detail::with_model(ModelKind::Probabilistic);
    prob.tournaments = 100;
    prob.sample_size = 50;
    v.push_back({"desk-prob", "100 probabilistic tournaments, sample size 50", SweptAxis::None,
                 {{"desk-prob", prob}}});
    v.push_back(detail::rounds_sweep("rounds-sweep-det", ModelKind::Deterministic));
    v.push_back(detail::rounds_sweep("rounds-sweep-prob", ModelKind::Probabilistic));
    v.push_back(detail::strength_sweep("strength-sweep-det", ModelKind::Deterministic, 5));
    v.push_back(detail::strength_sweep("strength-sweep-prob", ModelKind::Probabilistic, 11));
    return v;
  }();
  return all;
}

inline const Preset& find_preset(const std::string& name) {
  for (const Preset& p : presets())
    if (p.name == name) return p;
  throw UsageError("unknown preset: " + name);
}

// Explicit flags; each one set overrides the preset value in every campaign.
struct Overrides {
  std::optional<int> players, rounds, tournaments, sample_size, workers;
  std::optional<std::pair<Elo, Elo>> strength_range;
  std::optional<ModelKind> model;
  std::optional<Heuristic> heuristic;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  std::optional<PairingSystem> pairing;
};

inline std::vector<Campaign> resolve(const Preset& preset, const Overrides& o) {
  if (o.rounds && preset.swept == SweptAxis::Rounds)
    throw UsageError("--rounds conflicts with preset " + preset.name + ", which sweeps the number of rounds");
  if (o.strength_range && preset.swept == SweptAxis::StrengthRange)
    throw UsageError("--strength-range conflicts with preset " + preset.name + ", which sweeps the strength range");
  std::vector<Campaign> out = preset.campaigns;
  for (Campaign& c : out) {
    ExperimentConfig& cfg = c.config;
    if (o.players) cfg.players = *o.players;
    if (o.rounds) cfg.rounds = *o.rounds;
    if (o.tournaments) cfg.tournaments = *o.tournaments;
    if (o.sample_size) cfg.sample_size = *o.sample_size;
    if (o.workers) cfg.workers = *o.workers;
    if (o.strength_range) std::tie(cfg.elo_low, cfg.elo_high) = *o.strength_range;
    if (o.model) cfg.model = *o.model;
    if (o.heuristic) cfg.heuristic = *o.heuristic;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.seed) cfg.master_seed = *o.seed;
    if (o.pairing) cfg.pairing = *o.pairing;
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      throw UsageError(c.label + ": " + e.what());
    }
  }
  return out;
}

enum class Command { Run, Calibrate, TrfCheck, TrfExport, ListPresets };

struct Invocation {
  Command command = Command::Run;
  std::string preset = "default";
  Overrides overrides;
  std::filesystem::path out_dir;
  std::optional<std::string> params_file;
  std::string path;  // calibrate output, trf input or output
  int tournament = 0;
  bool quiet = false;
};

inline std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') return env;
  return "results";
}

// Parses the command line. Returns nothing when help was printed.
inline std::optional<Invocation> parse_args(int argc, const char* const* argv, std::ostream& out = std::cout) {
  Invocation inv;
  CLI::App app{"Swiss gambit simulation lab"};
  app.require_subcommand(0, 1);

  auto add_experiment_flags = [&](CLI::App& a) {
    Overrides& o = inv.overrides;
    a.add_option("--players", o.players, "number of players");
    a.add_option("--rounds", o.rounds, "number of rounds");
    a.add_option("--tournaments", o.tournaments, "tournaments per campaign");
    a.add_option("--sample-size", o.sample_size, "completions per option (probabilistic heuristics)");
    a.add_option("--workers", o.workers, "worker threads (0: all cores)");
    a.add_option("--alpha", o.alpha, "significance level of the p-value heuristic");
    a.add_option("--seed", o.seed, "master seed");
    a.add_option_function<std::vector<int>>(
         "--strength-range",
         [&](const std::vector<int>& v) { o.strength_range = std::pair<Elo, Elo>{v[0], v[1]}; },
         "uniform Elo range LO HI")
        ->expected(2);
    a.add_option_function<std::string>(
         "--model", [&](const std::string& s) { o.model = parse_model(s); }, "det or prob")
        ->check(CLI::IsMember({"det", "prob", "deterministic", "probabilistic"}));
    a.add_option_function<std::string>(
         "--heuristic", [&](const std::string& s) { o.heuristic = parse_heuristic(s); }, "gambit heuristic")
        ->check(CLI::IsMember({"optimal-det", "p-value", "mean", "median", "expected-value"}));
    a.add_option_function<std::string>(
         "--pairing", [&](const std::string& s) { o.pairing = parse_pairing_system(s); }, "pairing system")
        ->check(CLI::IsMember({"dutch", "burstein", "monrad"}));
    a.add_option("--preset", inv.preset, "experiment preset");
    a.add_option("--params", inv.params_file, "surrogate parameters JSON instead of a fresh calibration");
  };

  add_experiment_flags(app);
  std::string out_dir;
  app.add_option("--out", out_dir, std::string("output directory (default $") + kOutputEnv + " or ./results)");
  app.add_flag("--quiet", inv.quiet, "no per-campaign summary lines");

  CLI::App* calibrate = app.add_subcommand("calibrate", "fit the outcome surrogate and write its parameters");
  calibrate->add_option("--out", inv.path, "parameter file (default: stdout)");

  CLI::App* trf_check = app.add_subcommand("trf-check", "validate the pairings of a TRF file");
  trf_check->add_option("file", inv.path, "TRF file")->required();

  CLI::App* trf_export = app.add_subcommand("trf-export", "simulate one tournament and write it as TRF");
  add_experiment_flags(*trf_export);
  trf_export->add_option("--tournament", inv.tournament, "tournament index");
  trf_export->add_option("file", inv.path, "output file")->required();

  app.add_subcommand("presets", "list the experiment presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, out);
    return std::nullopt;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, out);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  if (calibrate->parsed()) inv.command = Command::Calibrate;
  if (trf_check->parsed()) inv.command = Command::TrfCheck;
  if (trf_export->parsed()) inv.command = Command::TrfExport;
  if (app.got_subcommand("presets")) inv.command = Command::ListPresets;
  if (const auto& r = inv.overrides.strength_range; r && !(r->first < r->second))
    throw UsageError("--strength-range needs LO < HI");
  if (inv.tournament < 0) throw UsageError("--tournament must not be negative");
  inv.out_dir = out_dir.empty() ? default_output_dir() : std::filesystem::path(out_dir);
  return inv;
}

inline std::string summary_line(const Campaign& c, const CampaignResult& r) {
  auto opt = [](const std::optional<double>& v) { return v ? swissgambit::detail::fmt_double(*v) : std::string("n/a"); };
  std::ostringstream s;
  s << c.label << ": gambits/tournament " << swissgambit::detail::fmt_double(r.mean_gambit_possibilities)
    << ", mean rank diff " << opt(r.mean_rank_difference) << ", total rank diff/tournament "
    << swissgambit::detail::fmt_double(r.mean_total_rank_difference) << ", mean tau diff " << opt(r.mean_tau_difference);
  return s.str();
}

inline SurrogateParams surrogate_for(const Invocation& inv) {
  return inv.params_file ? load_params(*inv.params_file) : calibrated_params();
}

inline int run_campaigns(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const std::vector<Campaign> campaigns = resolve(find_preset(inv.preset), inv.overrides);
  const SurrogateParams params = surrogate_for(inv);
  int status = kExitOk;
  for (const Campaign& c : campaigns) {
    const CampaignResult result = run_campaign(c.config, params);
    const std::filesystem::path dir = inv.out_dir / c.label;
    write_campaign(result, params, dir);
    for (const std::string& problem : validate_campaign_files(dir)) {
      err << "error: " << (dir / problem).string() << '\n';
      status = kExitRuntime;
    }
    if (!inv.quiet) out << summary_line(c, result) << '\n';
  }
  return status;
}

inline int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  switch (inv.command) {
    case Command::ListPresets:
      for (const Preset& p : presets()) out << p.name << "  " << p.description << '\n';
      return kExitOk;
    case Command::Calibrate: {
      const SurrogateParams params = fit_surrogate(reference_anchors());
      if (inv.path.empty())
        out << nlohmann::json(params).dump(2) << '\n';
      else
        save_params(params, inv.path);
      return kExitOk;
    }
    case Command::TrfCheck: {
      std::ifstream in(inv.path);
      if (!in) throw Error("cannot read " + inv.path);
      std::stringstream text;
      text << in.rdbuf();
      const Course course = import_trf(text.str());
      const auto violations = validate_course(course);
      for (const Violation& v : violations)
        out << "round " << v.round << ": " << to_string(v.kind) << ": " << v.message << '\n';
      out << course.player_count() << " players, " << course.rounds_played() << " rounds, "
          << violations.size() << " violations\n";
      return violations.empty() ? kExitOk : kExitRuntime;
    }
    case Command::TrfExport: {
      const std::vector<Campaign> campaigns = resolve(find_preset(inv.preset), inv.overrides);
      const TournamentRun run = simulate_tournament(campaigns.front().config, surrogate_for(inv), inv.tournament);
      write_text(inv.path, export_trf(run.course));
      return kExitOk;
    }
    case Command::Run:
      return run_campaigns(inv, out, err);
  }
  return kExitOk;
}

inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    const std::optional<Invocation> inv = parse_args(argc, argv, out);
    if (!inv) return kExitOk;
    return run(*inv, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for options.\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace swissgambit::cli
