#pragma once

// Gambit decisions. A player who would win (or draw) a game may instead settle
// for a worse result; a heuristic compares the final ranks each option leads to
// and decides whether giving up points is beneficial.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "swissgambit/core.hpp"
#include "swissgambit/outcome_model.hpp"
#include "swissgambit/ranking.hpp"
#include "swissgambit/rng.hpp"
#include "swissgambit/simulation.hpp"
#include "swissgambit/stats.hpp"

namespace swissgambit {

// A match result seen from the gambit player's side. Ordered from most to least points.
enum class ResultOption { Win = 0, Draw = 1, Lose = 2 };

inline const char* to_string(ResultOption o) {
  switch (o) {
    case ResultOption::Win: return "win";
    case ResultOption::Draw: return "draw";
    case ResultOption::Lose: return "lose";
  }
  return "?";
}

// Options open to a player whose honest result is `actual`, actual result first.
inline std::vector<ResultOption> result_options(ResultOption actual) {
  switch (actual) {
    case ResultOption::Win: return {ResultOption::Win, ResultOption::Draw, ResultOption::Lose};
    case ResultOption::Draw: return {ResultOption::Draw, ResultOption::Lose};
    case ResultOption::Lose: return {};
  }
  return {};
}

inline ResultOption option_for(GameResult r, Color player_color) {
  if (r == GameResult::Draw) return ResultOption::Draw;
  const bool white_won = r == GameResult::WhiteWins;
  return white_won == (player_color == Color::White) ? ResultOption::Win : ResultOption::Lose;
}

inline GameResult result_for(ResultOption o, Color player_color) {
  switch (o) {
    case ResultOption::Draw: return GameResult::Draw;
    case ResultOption::Win: return player_color == Color::White ? GameResult::WhiteWins : GameResult::BlackWins;
    case ResultOption::Lose: return player_color == Color::White ? GameResult::BlackWins : GameResult::WhiteWins;
  }
  return GameResult::Draw;
}

enum class Heuristic { OptimalDeterministic, PValue, Mean, Median, ExpectedValue };

inline const char* to_string(Heuristic h) {
  switch (h) {
    case Heuristic::OptimalDeterministic: return "optimal-det";
    case Heuristic::PValue: return "p-value";
    case Heuristic::Mean: return "mean";
    case Heuristic::Median: return "median";
    case Heuristic::ExpectedValue: return "expected-value";
  }
  return "?";
}

inline Heuristic parse_heuristic(std::string_view name) {
  for (Heuristic h : {Heuristic::OptimalDeterministic, Heuristic::PValue, Heuristic::Mean, Heuristic::Median,
                      Heuristic::ExpectedValue})
    if (name == to_string(h)) return h;
  throw Error("unknown heuristic: " + std::string(name));
}

inline bool heuristic_fits_model(Heuristic h, ModelKind m) {
  return (h == Heuristic::OptimalDeterministic) == (m == ModelKind::Deterministic);
}

// The moment a player may gamble: every other game of the round is finished.
// `prefix` holds rounds 1..round with the player's own game at its actual result.
struct DecisionPoint {
  int tournament = 0;
  int round = 1;  // 1-based
  int board = 0;  // 0-based index into the round's games
  PlayerId player = 0;
  ResultOption actual = ResultOption::Win;
  Course prefix;
};

// The prefix course with the player's game set to `option`.
inline Course with_option(const DecisionPoint& point, ResultOption option) {
  Course c = point.prefix;
  PairedGame& g = c.rounds.at(static_cast<std::size_t>(point.round - 1)).games.at(static_cast<std::size_t>(point.board));
  g.expected_white.reset();
  g.result = result_for(option, g.color_of(point.player));
  return c;
}

// Decision points of a complete course in rounds 1..last_round: the winner of
// each decisive game, and both players of each drawn game. Losers have no options.
inline std::vector<DecisionPoint> decision_points(const Course& course, int tournament, int last_round) {
  std::vector<DecisionPoint> points;
  for (int r = 1; r <= last_round && r <= course.rounds_played(); ++r) {
    Course prefix = course;
    prefix.rounds.resize(static_cast<std::size_t>(r));
    const Round& round = course.rounds[static_cast<std::size_t>(r - 1)];
    for (std::size_t b = 0; b < round.games.size(); ++b) {
      const PairedGame& g = round.games[b];
      if (!g.result) continue;
      for (PlayerId p : {g.white, g.black}) {
        const ResultOption actual = option_for(*g.result, g.color_of(p));
        if (actual == ResultOption::Lose) continue;
        points.push_back(DecisionPoint{tournament, r, static_cast<int>(b), p, actual, prefix});
      }
    }
  }
  return points;
}

// Per-option statistics behind a verdict.
struct OptionEvidence {
  ResultOption option = ResultOption::Win;
  std::vector<int> ranks;  // one entry for single-simulation heuristics
  double mean_rank = 0.0;
  double median_rank = 0.0;
  std::optional<double> p_value;  // gambit options under the p-value heuristic
};

struct GambitVerdict {
  bool beneficial = false;
  ResultOption actual = ResultOption::Win;
  ResultOption chosen = ResultOption::Win;
  std::vector<OptionEvidence> evidence;  // actual option first
  std::int64_t completions = 0;          // prefix simulations run

  const OptionEvidence& evidence_for(ResultOption o) const {
    for (const auto& e : evidence)
      if (e.option == o) return e;
    throw Error("no evidence for option");
  }
};

struct GambitContext {
  TournamentModel model;
  int sample_size = 200;
  double alpha = 0.05;
  std::uint64_t master_seed = 0;
};

inline int final_rank(const Course& complete, PlayerId p) { return final_ranking(complete).rank_of(p); }

namespace detail {

inline OptionEvidence single_rank_evidence(ResultOption o, int rank) {
  OptionEvidence e;
  e.option = o;
  e.ranks = {rank};
  e.mean_rank = e.median_rank = rank;
  return e;
}

// Best option by one simulated rank per option; ties keep the option that gives
// up fewer points (the actual result first).
inline GambitVerdict verdict_by_single_rank(const DecisionPoint& point, const TournamentModel& model,
                                            Resolution how) {
  GambitVerdict v;
  v.actual = v.chosen = point.actual;
  int best = std::numeric_limits<int>::max();
  for (ResultOption o : result_options(point.actual)) {
    const Course done = complete_course(with_option(point, o), model, how, nullptr);
    const int rank = final_rank(done, point.player);
    ++v.completions;
    v.evidence.push_back(single_rank_evidence(o, rank));
    if (rank < best) {
      best = rank;
      v.chosen = o;
    }
  }
  v.beneficial = v.chosen != point.actual;
  return v;
}

}  // namespace detail

// One simulation per option in the deterministic model; exact there.
inline GambitVerdict decide_deterministic(const DecisionPoint& point, const GambitContext& ctx) {
  if (ctx.model.kind != ModelKind::Deterministic) throw Error("optimal heuristic needs the deterministic model");
  return detail::verdict_by_single_rank(point, ctx.model, Resolution::Deterministic);
}

// One simulation per option where every future game credits both players with
// their expected score instead of a drawn result.
inline GambitVerdict decide_expected_value(const DecisionPoint& point, const GambitContext& ctx) {
  return detail::verdict_by_single_rank(point, ctx.model, Resolution::ExpectedValue);
}

inline std::uint64_t sample_seed(const GambitContext& ctx, const DecisionPoint& point, ResultOption o,
                                 std::uint64_t sample) {
  return derive_seed({static_cast<std::uint64_t>(StreamPurpose::GambitSample), ctx.master_seed,
                      static_cast<std::uint64_t>(point.tournament), static_cast<std::uint64_t>(point.round),
                      static_cast<std::uint64_t>(point.board), static_cast<std::uint64_t>(point.player),
                      static_cast<std::uint64_t>(o), sample});
}

// Final ranks of the player over `sample_size` random completions per option.
inline std::vector<OptionEvidence> sample_option_ranks(const DecisionPoint& point, const GambitContext& ctx,
                                                       std::int64_t* completions = nullptr) {
  if (ctx.sample_size < 2) throw Error("sample size must be at least 2");
  std::vector<OptionEvidence> out;
  for (ResultOption o : result_options(point.actual)) {
    OptionEvidence e;
    e.option = o;
    const Course prefix = with_option(point, o);
    e.ranks.reserve(static_cast<std::size_t>(ctx.sample_size));
    for (int s = 0; s < ctx.sample_size; ++s) {
      Stream stream(sample_seed(ctx, point, o, static_cast<std::uint64_t>(s)));
      const Course done = complete_course(prefix, ctx.model, default_resolution(ctx.model.kind), &stream);
      e.ranks.push_back(final_rank(done, point.player));
    }
    const Summary sum = summarize(std::span<const int>(e.ranks));
    e.mean_rank = sum.mean;
    e.median_rank = sum.median;
    out.push_back(std::move(e));
    if (completions) *completions += ctx.sample_size;
  }
  return out;
}

// Gambit only if some option's ranks are significantly smaller (Welch, one-tailed,
// p < alpha). The most significant option wins; ties go to the smaller mean.
inline GambitVerdict verdict_pvalue(ResultOption actual, std::vector<OptionEvidence> evidence, double alpha) {
  GambitVerdict v;
  v.actual = v.chosen = actual;
  const OptionEvidence& base = evidence.front();
  double best_p = 2.0;
  double best_mean = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < evidence.size(); ++i) {
    OptionEvidence& e = evidence[i];
    e.p_value = welch_one_tailed(std::span<const int>(e.ranks), std::span<const int>(base.ranks)).p_one_tailed;
    if (!(*e.p_value < alpha)) continue;
    if (*e.p_value < best_p || (*e.p_value == best_p && e.mean_rank < best_mean)) {
      best_p = *e.p_value;
      best_mean = e.mean_rank;
      v.chosen = e.option;
    }
  }
  v.beneficial = v.chosen != actual;
  v.evidence = std::move(evidence);
  return v;
}

namespace detail {

template <typename Key>
GambitVerdict verdict_by_statistic(ResultOption actual, std::vector<OptionEvidence> evidence, Key key) {
  GambitVerdict v;
  v.actual = v.chosen = actual;
  double best = key(evidence.front());
  for (std::size_t i = 1; i < evidence.size(); ++i) {
    if (key(evidence[i]) < best) {
      best = key(evidence[i]);
      v.chosen = evidence[i].option;
    }
  }
  v.beneficial = v.chosen != actual;
  v.evidence = std::move(evidence);
  return v;
}

}  // namespace detail

inline GambitVerdict verdict_mean(ResultOption actual, std::vector<OptionEvidence> evidence) {
  return detail::verdict_by_statistic(actual, std::move(evidence), [](const OptionEvidence& e) { return e.mean_rank; });
}

inline GambitVerdict verdict_median(ResultOption actual, std::vector<OptionEvidence> evidence) {
  return detail::verdict_by_statistic(actual, std::move(evidence),
                                      [](const OptionEvidence& e) { return e.median_rank; });
}

inline GambitVerdict decide_pvalue(const DecisionPoint& point, const GambitContext& ctx) {
  std::int64_t n = 0;
  GambitVerdict v = verdict_pvalue(point.actual, sample_option_ranks(point, ctx, &n), ctx.alpha);
  v.completions = n;
  return v;
}

inline GambitVerdict decide_mean(const DecisionPoint& point, const GambitContext& ctx) {
  std::int64_t n = 0;
  GambitVerdict v = verdict_mean(point.actual, sample_option_ranks(point, ctx, &n));
  v.completions = n;
  return v;
}

inline GambitVerdict decide_median(const DecisionPoint& point, const GambitContext& ctx) {
  std::int64_t n = 0;
  GambitVerdict v = verdict_median(point.actual, sample_option_ranks(point, ctx, &n));
  v.completions = n;
  return v;
}

inline GambitVerdict decide(const DecisionPoint& point, Heuristic h, const GambitContext& ctx) {
  switch (h) {
    case Heuristic::OptimalDeterministic: return decide_deterministic(point, ctx);
    case Heuristic::PValue: return decide_pvalue(point, ctx);
    case Heuristic::Mean: return decide_mean(point, ctx);
    case Heuristic::Median: return decide_median(point, ctx);
    case Heuristic::ExpectedValue: return decide_expected_value(point, ctx);
  }
  throw Error("unknown heuristic");
}

inline bool uses_samples(Heuristic h) {
  return h == Heuristic::PValue || h == Heuristic::Mean || h == Heuristic::Median;
}

// Verdicts of several heuristics at one decision point. The sampled heuristics
// share one set of completions; each verdict equals the one `decide` returns.
inline std::vector<GambitVerdict> decide_all(const DecisionPoint& point, std::span<const Heuristic> heuristics,
                                             const GambitContext& ctx) {
  std::optional<std::vector<OptionEvidence>> samples;
  std::int64_t n = 0;
  std::vector<GambitVerdict> out;
  for (Heuristic h : heuristics) {
    if (!uses_samples(h)) {
      out.push_back(decide(point, h, ctx));
      continue;
    }
    if (!samples) samples = sample_option_ranks(point, ctx, &n);
    GambitVerdict v = h == Heuristic::PValue ? verdict_pvalue(point.actual, *samples, ctx.alpha)
                      : h == Heuristic::Mean ? verdict_mean(point.actual, *samples)
                                             : verdict_median(point.actual, *samples);
    v.completions = n;
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Expected final rank of a prefix course.

// Enumerate every completion with its probability. Throws when the completion
// tree has more than `max_leaves` leaves.
struct ExactEnumeration {
  std::size_t max_leaves = 10'000;
};

// Average over random completions.
struct SampledCompletion {
  int samples = 200;
  std::uint64_t seed = 0;
};

using Completer = std::variant<ExactEnumeration, SampledCompletion>;

namespace detail {

inline void enumerate_completions(Course& course, PlayerId player, const TournamentModel& model, double weight,
                                  std::size_t max_leaves, std::size_t& leaves, double& acc) {
  if (course.rounds_played() == course.total_rounds) {
    if (++leaves > max_leaves) throw Error("completion tree exceeds the exact enumeration limit");
    acc += weight * final_rank(course, player);
    return;
  }
  Round round = pair_round(course, model.pairing);
  const std::size_t games = round.games.size();
  std::vector<OutcomeDistribution> dists;
  for (const PairedGame& g : round.games)
    dists.push_back(distribution(course.player(g.white).elo, course.player(g.black).elo, model.params));
  std::vector<int> choice(games, 0);
  for (;;) {
    double w = weight;
    for (std::size_t i = 0; i < games; ++i) {
      const GameResult r = kAllResults[choice[i]];
      round.games[i].result = r;
      w *= r == GameResult::WhiteWins ? dists[i].p_white_win
           : r == GameResult::Draw    ? dists[i].p_draw
                                      : dists[i].p_black_win;
    }
    if (w > 0.0) {
      course.rounds.push_back(round);
      enumerate_completions(course, player, model, w, max_leaves, leaves, acc);
      course.rounds.pop_back();
    }
    std::size_t i = 0;
    while (i < games && ++choice[i] == 3) choice[i++] = 0;
    if (i == games) break;
  }
}

}  // namespace detail

// Probability-weighted final rank of `player` over the completions of `prefix`.
// In the deterministic model there is a single completion.
inline double expected_final_rank(const Course& prefix, PlayerId player, const TournamentModel& model,
                                  const Completer& completer) {
  for (const Round& r : prefix.rounds)
    if (!r.complete()) throw Error("prefix must include the current round's results");
  if (model.kind == ModelKind::Deterministic)
    return final_rank(complete_course(prefix, model, Resolution::Deterministic, nullptr), player);
  if (const auto* exact = std::get_if<ExactEnumeration>(&completer)) {
    Course c = prefix;
    std::size_t leaves = 0;
    double acc = 0.0;
    detail::enumerate_completions(c, player, model, 1.0, exact->max_leaves, leaves, acc);
    return acc;
  }
  const auto& sampled = std::get<SampledCompletion>(completer);
  if (sampled.samples < 1) throw Error("need at least one sample");
  double sum = 0.0;
  for (int s = 0; s < sampled.samples; ++s) {
    Stream stream(derive_seed({sampled.seed, static_cast<std::uint64_t>(s)}));
    sum += final_rank(complete_course(prefix, model, Resolution::Sampled, &stream), player);
  }
  return sum / sampled.samples;
}

}  // namespace swissgambit
