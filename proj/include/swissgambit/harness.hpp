#pragma once

// Experiment harness: seeded tournament simulation, the gambit scan over every
// eligible game, impact aggregation and campaign output files.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "swissgambit/core.hpp"
#include "swissgambit/gambit.hpp"
#include "swissgambit/outcome_model.hpp"
#include "swissgambit/pairing.hpp"
#include "swissgambit/ranking.hpp"
#include "swissgambit/rng.hpp"
#include "swissgambit/simulation.hpp"

namespace swissgambit {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ExperimentConfig {
  int players = 32;
  int rounds = 5;
  int tournaments = 1000;
  int sample_size = 200;
  Elo elo_low = kDefaultEloLow;
  Elo elo_high = kDefaultEloHigh;
  ModelKind model = ModelKind::Deterministic;
  std::optional<Heuristic> heuristic;  // defaults by model
  double alpha = 0.05;
  PairingSystem pairing = PairingSystem::Dutch;
  std::uint64_t master_seed = 1;
  int workers = 0;  // 0: one per hardware thread

  Heuristic resolved_heuristic() const {
    if (heuristic) return *heuristic;
    return model == ModelKind::Deterministic ? Heuristic::OptimalDeterministic : Heuristic::PValue;
  }
  // Gambits are evaluated in rounds 1..rounds-2.
  int last_scanned_round() const { return rounds - 2; }

  void validate() const {
    if (players < 2) throw ConfigError("at least two players are required");
    if (rounds < 1) throw ConfigError("at least one round is required");
    if (rounds >= players) throw ConfigError("more rounds than a Swiss pairing can support");
    if (tournaments < 0) throw ConfigError("tournament count must not be negative");
    if (!(elo_low < elo_high)) throw ConfigError("strength range needs lo < hi");
    if (elo_high - elo_low + 1 < players) throw ConfigError("strength range too small for distinct ratings");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
    const Heuristic h = resolved_heuristic();
    if (!heuristic_fits_model(h, model))
      throw ConfigError(std::string("heuristic ") + to_string(h) + " does not apply to the " + to_string(model) +
                        " model");
    if (model == ModelKind::Probabilistic && h != Heuristic::ExpectedValue && sample_size < 2)
      throw ConfigError("sample size must be at least 2");
  }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  return nlohmann::json{{"players", c.players},
                        {"rounds", c.rounds},
                        {"tournaments", c.tournaments},
                        {"sample_size", c.sample_size},
                        {"strength_range", {c.elo_low, c.elo_high}},
                        {"model", to_string(c.model)},
                        {"heuristic", to_string(c.resolved_heuristic())},
                        {"alpha", c.alpha},
                        {"pairing", to_string(c.pairing)},
                        {"master_seed", c.master_seed},
                        {"workers", c.workers}};
}

struct TournamentRun {
  int id = 0;
  std::uint64_t seed = 0;
  Course course;
  Ranking ranking;
  Ranking truth;
};

inline std::uint64_t tournament_seed(const ExperimentConfig& config, int tournament) {
  return derive_seed({static_cast<std::uint64_t>(StreamPurpose::Tournament), config.master_seed,
                      static_cast<std::uint64_t>(tournament)});
}

// Distinct ratings drawn uniformly from the strength range (Floyd's sampling),
// sorted so that player 0 is the strongest.
inline std::vector<Player> sample_players(const ExperimentConfig& config, std::uint64_t seed) {
  Stream stream(derive_seed({static_cast<std::uint64_t>(StreamPurpose::Strengths), seed}));
  const std::int64_t span = config.elo_high - config.elo_low + 1;
  std::set<std::int64_t> chosen;
  for (std::int64_t j = span - config.players; j < span; ++j) {
    const std::int64_t t = stream.uniform_int(0, j);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<Elo> elos;
  for (std::int64_t v : chosen) elos.push_back(static_cast<Elo>(config.elo_low + v));
  std::sort(elos.begin(), elos.end(), std::greater<>());
  std::vector<Player> players;
  for (std::size_t i = 0; i < elos.size(); ++i) players.push_back(Player{static_cast<PlayerId>(i), elos[i]});
  return players;
}

inline TournamentModel model_of(const ExperimentConfig& config, const SurrogateParams& params) {
  return TournamentModel{config.model, params, config.pairing};
}

inline TournamentRun simulate_tournament(const ExperimentConfig& config, const SurrogateParams& params,
                                         int tournament) {
  TournamentRun run;
  run.id = tournament;
  run.seed = tournament_seed(config, tournament);
  Course course;
  course.players = sample_players(config, run.seed);
  course.total_rounds = config.rounds;
  Stream stream(run.seed);
  complete_in_place(course, model_of(config, params), default_resolution(config.model), &stream);
  run.ranking = final_ranking(course);
  run.truth = ground_truth(course.players);
  run.course = std::move(course);
  return run;
}

struct GambitRecord {
  int tournament = 0;
  int round = 0;
  int board = 0;
  PlayerId player = 0;
  Elo player_elo = 0;
  ResultOption actual = ResultOption::Win;
  ResultOption chosen = ResultOption::Win;
  bool beneficial = false;
  std::optional<double> p_value;
  double mean_rank_actual = 0.0;
  double mean_rank_gambit = 0.0;
  int rank_without = 0;
  int rank_with = 0;
  double tau_without = 0.0;
  double tau_with = 0.0;

  int rank_difference() const { return rank_with - rank_without; }
  double tau_difference() const { return tau_with - tau_without; }
};

struct ScanResult {
  std::vector<GambitRecord> records;
  std::int64_t decision_points = 0;
  std::int64_t evaluated_games = 0;
  std::int64_t completions = 0;
};

namespace detail {

// Gambit option reported next to the actual one: the chosen option, or the
// strongest runner-up when no gambit was chosen.
inline const OptionEvidence* reported_gambit_option(const GambitVerdict& v) {
  if (v.beneficial) return &v.evidence_for(v.chosen);
  const OptionEvidence* best = nullptr;
  for (std::size_t i = 1; i < v.evidence.size(); ++i) {
    const OptionEvidence& e = v.evidence[i];
    if (best == nullptr) {
      best = &e;
    } else if (e.p_value && best->p_value) {
      if (*e.p_value < *best->p_value) best = &e;
    } else if (e.mean_rank < best->mean_rank) {
      best = &e;
    }
  }
  return best;
}

}  // namespace detail

// Evaluates each heuristic for every eligible player in rounds 1..rounds-2.
// Beneficial verdicts are played out: in the deterministic model the chosen
// option's completion, in the probabilistic model one fresh random completion.
// One result per heuristic, in the given order.
inline std::vector<ScanResult> scan_gambits(const TournamentRun& run, const ExperimentConfig& config,
                                            const SurrogateParams& params, std::span<const Heuristic> heuristics) {
  std::vector<ScanResult> out(heuristics.size());
  const TournamentModel model = model_of(config, params);
  const GambitContext ctx{model, config.sample_size, config.alpha, config.master_seed};
  const double tau_without = kendall_tau(run.ranking, run.truth);
  // Realized rank per option; heuristics choosing the same option share it.
  std::map<ResultOption, std::pair<int, double>> realized;

  std::set<std::pair<int, int>> games;
  for (const DecisionPoint& point : decision_points(run.course, run.id, config.last_scanned_round())) {
    games.insert({point.round, point.board});
    realized.clear();
    const std::vector<GambitVerdict> verdicts = decide_all(point, heuristics, ctx);
    for (std::size_t h = 0; h < heuristics.size(); ++h) {
      const GambitVerdict& verdict = verdicts[h];
      ScanResult& scan = out[h];
      ++scan.decision_points;
      scan.completions += verdict.completions;

      GambitRecord rec;
      rec.tournament = run.id;
      rec.round = point.round;
      rec.board = point.board;
      rec.player = point.player;
      rec.player_elo = run.course.player(point.player).elo;
      rec.actual = point.actual;
      rec.chosen = verdict.chosen;
      rec.beneficial = verdict.beneficial;
      rec.rank_without = run.ranking.rank_of(point.player);
      rec.tau_without = tau_without;
      rec.mean_rank_actual = verdict.evidence.front().mean_rank;
      if (const OptionEvidence* g = detail::reported_gambit_option(verdict)) {
        rec.mean_rank_gambit = g->mean_rank;
        rec.p_value = g->p_value;
      }
      rec.rank_with = rec.rank_without;
      rec.tau_with = tau_without;
      if (verdict.beneficial) {
        auto it = realized.find(verdict.chosen);
        if (it == realized.end()) {
          Course played;
          if (config.model == ModelKind::Deterministic) {
            played = complete_course(with_option(point, verdict.chosen), model, Resolution::Deterministic, nullptr);
          } else {
            Stream stream(derive_seed({static_cast<std::uint64_t>(StreamPurpose::GambitRealization),
                                       config.master_seed, static_cast<std::uint64_t>(run.id),
                                       static_cast<std::uint64_t>(point.round), static_cast<std::uint64_t>(point.board),
                                       static_cast<std::uint64_t>(point.player),
                                       static_cast<std::uint64_t>(verdict.chosen)}));
            played = complete_course(with_option(point, verdict.chosen), model, Resolution::Sampled, &stream);
          }
          const Ranking with = final_ranking(played);
          it = realized.emplace(verdict.chosen, std::pair{with.rank_of(point.player), kendall_tau(with, run.truth)})
                   .first;
        }
        ++scan.completions;
        rec.rank_with = it->second.first;
        rec.tau_with = it->second.second;
      }
      scan.records.push_back(rec);
    }
  }
  for (ScanResult& scan : out) scan.evaluated_games = static_cast<std::int64_t>(games.size());
  return out;
}

inline ScanResult scan_gambits(const TournamentRun& run, const ExperimentConfig& config,
                               const SurrogateParams& params) {
  const Heuristic h = config.resolved_heuristic();
  return std::move(scan_gambits(run, config, params, std::span<const Heuristic>(&h, 1)).front());
}

struct ImpactReport {
  int gambit_possibilities = 0;
  std::int64_t total_rank_difference = 0;
  std::optional<double> mean_rank_difference;
  std::optional<double> mean_tau_difference;
  double tau_without = 0.0;                 // baseline ranking quality
  std::optional<double> mean_tau_with;      // mean over gambit simulations
};

// Impact measures over the beneficial records. Means are left empty when there
// are none.
inline ImpactReport aggregate(std::span<const GambitRecord> records, double baseline_tau) {
  ImpactReport r;
  r.tau_without = baseline_tau;
  double tau_diff_sum = 0.0;
  double tau_with_sum = 0.0;
  for (const GambitRecord& rec : records) {
    if (!rec.beneficial) continue;
    ++r.gambit_possibilities;
    r.total_rank_difference += rec.rank_difference();
    tau_diff_sum += rec.tau_difference();
    tau_with_sum += rec.tau_with;
  }
  if (r.gambit_possibilities > 0) {
    const double n = r.gambit_possibilities;
    r.mean_rank_difference = static_cast<double>(r.total_rank_difference) / n;
    r.mean_tau_difference = tau_diff_sum / n;
    r.mean_tau_with = tau_with_sum / n;
  }
  return r;
}

struct TournamentSummary {
  int id = 0;
  std::uint64_t seed = 0;
  ImpactReport impact;
  double draw_fraction = 0.0;
  std::int64_t decision_points = 0;
  std::int64_t evaluated_games = 0;
  std::int64_t completions = 0;
};

struct CampaignResult {
  ExperimentConfig config;
  std::vector<TournamentSummary> tournaments;
  std::vector<GambitRecord> records;  // ordered by (tournament, round, board, player)

  double mean_gambit_possibilities = 0.0;
  double mean_total_rank_difference = 0.0;
  std::optional<double> mean_rank_difference;  // pooled over beneficial records
  std::optional<double> mean_tau_difference;   // pooled over beneficial records
  double mean_tau_without = 0.0;
  std::optional<double> mean_tau_with;
  double draw_fraction = 0.0;
  double seconds = 0.0;
};

inline TournamentSummary summarize_tournament(const TournamentRun& run, const ScanResult& scan) {
  TournamentSummary s;
  s.id = run.id;
  s.seed = run.seed;
  s.impact = aggregate(scan.records, kendall_tau(run.ranking, run.truth));
  s.draw_fraction = draw_fraction(run.course);
  s.decision_points = scan.decision_points;
  s.evaluated_games = scan.evaluated_games;
  s.completions = scan.completions;
  return s;
}

namespace detail {

inline CampaignResult merge_campaign(const ExperimentConfig& config, std::vector<TournamentSummary> summaries,
                                     std::vector<std::vector<GambitRecord>>& records) {
  CampaignResult result;
  result.config = config;
  result.tournaments = std::move(summaries);
  for (auto& r : records) result.records.insert(result.records.end(), r.begin(), r.end());
  const int n = static_cast<int>(result.tournaments.size());
  if (n > 0) {
    double gp = 0.0, trd = 0.0, tw = 0.0, df = 0.0;
    for (const auto& s : result.tournaments) {
      gp += s.impact.gambit_possibilities;
      trd += static_cast<double>(s.impact.total_rank_difference);
      tw += s.impact.tau_without;
      df += s.draw_fraction;
    }
    result.mean_gambit_possibilities = gp / n;
    result.mean_total_rank_difference = trd / n;
    result.mean_tau_without = tw / n;
    result.draw_fraction = df / n;
  }
  const ImpactReport pooled = aggregate(result.records, result.mean_tau_without);
  result.mean_rank_difference = pooled.mean_rank_difference;
  result.mean_tau_difference = pooled.mean_tau_difference;
  result.mean_tau_with = pooled.mean_tau_with;
  return result;
}

}  // namespace detail

// Runs all tournaments of a campaign once and evaluates every listed heuristic
// on them; one result per heuristic. Work is spread over tournaments and merged
// by tournament index, so the worker count does not affect results.
inline std::vector<CampaignResult> run_campaigns(const ExperimentConfig& config, const SurrogateParams& params,
                                                 std::span<const Heuristic> heuristics) {
  config.validate();
  for (Heuristic h : heuristics)
    if (!heuristic_fits_model(h, config.model))
      throw ConfigError(std::string("heuristic ") + to_string(h) + " does not apply to the " +
                        to_string(config.model) + " model");
  const auto start = std::chrono::steady_clock::now();
  const int n = config.tournaments;
  const std::size_t k = heuristics.size();
  std::vector<std::vector<TournamentSummary>> summaries(k, std::vector<TournamentSummary>(static_cast<std::size_t>(n)));
  std::vector<std::vector<std::vector<GambitRecord>>> records(
      k, std::vector<std::vector<GambitRecord>>(static_cast<std::size_t>(n)));
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto work = [&] {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= n) return;
      try {
        const TournamentRun run = simulate_tournament(config, params, t);
        std::vector<ScanResult> scans =
            config.rounds >= 3 ? scan_gambits(run, config, params, heuristics) : std::vector<ScanResult>(k);
        for (std::size_t h = 0; h < k; ++h) {
          summaries[h][static_cast<std::size_t>(t)] = summarize_tournament(run, scans[h]);
          records[h][static_cast<std::size_t>(t)] = std::move(scans[h].records);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  int workers = config.workers > 0 ? config.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, n));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<CampaignResult> out;
  for (std::size_t h = 0; h < k; ++h) {
    ExperimentConfig c = config;
    c.heuristic = heuristics[h];
    out.push_back(detail::merge_campaign(c, std::move(summaries[h]), records[h]));
    out.back().seconds = seconds;
  }
  return out;
}

inline CampaignResult run_campaign(const ExperimentConfig& config, const SurrogateParams& params) {
  const Heuristic h = config.resolved_heuristic();
  return std::move(run_campaigns(config, params, std::span<const Heuristic>(&h, 1)).front());
}

// ---------------------------------------------------------------------------
// Output files.

inline const std::vector<std::string>& gambit_columns() {
  static const std::vector<std::string> cols = {
      "tournament_id", "round",      "board",         "player_id",       "player_elo",       "actual_result",
      "chosen_option", "beneficial", "p_value",       "mean_rank_actual", "mean_rank_gambit", "rank_without",
      "rank_with",     "rank_diff",  "tau_without",   "tau_with",        "tau_diff"};
  return cols;
}

inline const std::vector<std::string>& tournament_columns() {
  static const std::vector<std::string> cols = {"tournament_id",   "seed",          "n_gambit_possibilities",
                                                "total_rank_diff", "mean_rank_diff", "tau_no_gambit",
                                                "mean_tau_with_gambit", "draw_fraction"};
  return cols;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string fmt_optional(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }

inline std::string join(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) s += ',';
    s += cols[i];
  }
  return s;
}

}  // namespace detail

inline std::string gambits_csv(const CampaignResult& result) {
  std::ostringstream out;
  out << detail::join(gambit_columns()) << '\n';
  for (const GambitRecord& r : result.records) {
    out << r.tournament << ',' << r.round << ',' << r.board << ',' << r.player << ',' << r.player_elo << ','
        << to_string(r.actual) << ',' << to_string(r.chosen) << ',' << (r.beneficial ? 1 : 0) << ','
        << detail::fmt_optional(r.p_value) << ',' << detail::fmt_double(r.mean_rank_actual) << ','
        << detail::fmt_double(r.mean_rank_gambit) << ',' << r.rank_without << ',' << r.rank_with << ','
        << r.rank_difference() << ',' << detail::fmt_double(r.tau_without) << ',' << detail::fmt_double(r.tau_with)
        << ',' << detail::fmt_double(r.tau_difference()) << '\n';
  }
  return out.str();
}

inline std::string tournaments_csv(const CampaignResult& result) {
  std::ostringstream out;
  out << detail::join(tournament_columns()) << '\n';
  for (const TournamentSummary& s : result.tournaments) {
    out << s.id << ',' << s.seed << ',' << s.impact.gambit_possibilities << ',' << s.impact.total_rank_difference
        << ',' << detail::fmt_optional(s.impact.mean_rank_difference) << ','
        << detail::fmt_double(s.impact.tau_without) << ',' << detail::fmt_optional(s.impact.mean_tau_with) << ','
        << detail::fmt_double(s.draw_fraction) << '\n';
  }
  return out.str();
}

inline nlohmann::json summary_json(const CampaignResult& result, const SurrogateParams& params) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  std::int64_t decision_points = 0, completions = 0, evaluated = 0;
  for (const auto& s : result.tournaments) {
    decision_points += s.decision_points;
    completions += s.completions;
    evaluated += s.evaluated_games;
  }
  return nlohmann::json{
      {"config", to_json(result.config)},
      {"calibration", params},
      {"aggregates",
       {{"tournaments", result.tournaments.size()},
        {"mean_gambit_possibilities", result.mean_gambit_possibilities},
        {"mean_total_rank_diff", result.mean_total_rank_difference},
        {"mean_rank_diff", opt(result.mean_rank_difference)},
        {"mean_tau_diff", opt(result.mean_tau_difference)},
        {"mean_tau_no_gambit", result.mean_tau_without},
        {"mean_tau_with_gambit", opt(result.mean_tau_with)},
        {"draw_fraction", result.draw_fraction},
        {"evaluated_games", evaluated},
        {"decision_points", decision_points},
        {"prefix_simulations", completions}}},
      {"timings", {{"wall_seconds", result.seconds}}}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

inline void write_campaign(const CampaignResult& result, const SurrogateParams& params,
                           const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "gambits.csv", gambits_csv(result));
  write_text(dir / "tournaments.csv", tournaments_csv(result));
  write_text(dir / "summary.json", summary_json(result, params).dump(2) + "\n");
}

// Checks that the three output files exist and match their column layouts.
inline std::vector<std::string> validate_campaign_files(const std::filesystem::path& dir) {
  std::vector<std::string> problems;
  auto check_csv = [&](const std::string& name, const std::vector<std::string>& cols) {
    std::ifstream in(dir / name);
    if (!in) {
      problems.push_back(name + ": missing");
      return;
    }
    std::string line;
    if (!std::getline(in, line) || line != detail::join(cols)) {
      problems.push_back(name + ": unexpected header");
      return;
    }
    std::size_t row = 1;
    while (std::getline(in, line)) {
      ++row;
      const auto fields = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
      if (fields != cols.size()) problems.push_back(name + ": row " + std::to_string(row) + " has wrong field count");
    }
  };
  check_csv("gambits.csv", gambit_columns());
  check_csv("tournaments.csv", tournament_columns());
  std::ifstream in(dir / "summary.json");
  if (!in) {
    problems.push_back("summary.json: missing");
  } else {
    try {
      const auto j = nlohmann::json::parse(in);
      for (const char* key : {"config", "calibration", "aggregates", "timings"})
        if (!j.contains(key)) problems.push_back(std::string("summary.json: missing key ") + key);
    } catch (const std::exception& e) {
      problems.push_back(std::string("summary.json: ") + e.what());
    }
  }
  return problems;
}

}  // namespace swissgambit
