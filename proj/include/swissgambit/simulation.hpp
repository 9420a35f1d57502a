#pragma once

// Completing a prefix course: pair the next round, resolve its games under the
// chosen result model, repeat until every round is played.

#include <string_view>

#include "swissgambit/core.hpp"
#include "swissgambit/outcome_model.hpp"
#include "swissgambit/pairing.hpp"
#include "swissgambit/ranking.hpp"
#include "swissgambit/rng.hpp"

namespace swissgambit {

enum class ModelKind { Deterministic, Probabilistic };

inline const char* to_string(ModelKind m) { return m == ModelKind::Deterministic ? "deterministic" : "probabilistic"; }

inline ModelKind parse_model(std::string_view name) {
  if (name == "det" || name == "deterministic") return ModelKind::Deterministic;
  if (name == "prob" || name == "probabilistic") return ModelKind::Probabilistic;
  throw Error("unknown model: " + std::string(name));
}

struct TournamentModel {
  ModelKind kind = ModelKind::Deterministic;
  SurrogateParams params;
  PairingSystem pairing = PairingSystem::Dutch;
};

// How the games of future rounds are decided.
enum class Resolution {
  Deterministic,  // threshold rule
  Sampled,        // random draw from the outcome distribution
  ExpectedValue,  // both players credited with their expected score
};

inline Resolution default_resolution(ModelKind kind) {
  return kind == ModelKind::Deterministic ? Resolution::Deterministic : Resolution::Sampled;
}

inline void resolve_game(PairedGame& game, const Course& course, Resolution how, const SurrogateParams& params,
                         Stream* stream) {
  const Elo w = course.player(game.white).elo;
  const Elo b = course.player(game.black).elo;
  switch (how) {
    case Resolution::Deterministic:
      game.result = deterministic_result(w, b, params);
      break;
    case Resolution::Sampled:
      if (stream == nullptr) throw Error("sampled resolution needs a random stream");
      game.result = sample_result(distribution(w, b, params), *stream);
      break;
    case Resolution::ExpectedValue:
      game.expected_white = Score::from_share(expected_score(w, b, params));
      break;
  }
}

// Plays every remaining round of `course` in place.
inline void complete_in_place(Course& course, const TournamentModel& model, Resolution how, Stream* stream) {
  while (course.rounds_played() < course.total_rounds) {
    Round round = pair_round(course, model.pairing);
    for (PairedGame& g : round.games) resolve_game(g, course, how, model.params, stream);
    course.rounds.push_back(std::move(round));
  }
}

inline Course complete_course(Course prefix, const TournamentModel& model, Resolution how, Stream* stream) {
  complete_in_place(prefix, model, how, stream);
  return prefix;
}

inline double draw_fraction(const Course& course) {
  int games = 0;
  int draws = 0;
  for (const Round& r : course.rounds)
    for (const PairedGame& g : r.games) {
      if (!g.result) continue;
      ++games;
      if (*g.result == GameResult::Draw) ++draws;
    }
  return games == 0 ? 0.0 : static_cast<double>(draws) / games;
}

}  // namespace swissgambit
