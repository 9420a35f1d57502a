#pragma once

#include <vector>

#include "swissgambit/core.hpp"

namespace swissgambit::testing {

// Players 0..n-1 with strictly decreasing ratings, player 0 strongest.
inline std::vector<Player> ladder(int n, Elo top = 2400, Elo step = 50) {
  std::vector<Player> v;
  for (int i = 0; i < n; ++i) v.push_back(Player{i, top - i * step});
  return v;
}

inline PairedGame game(PlayerId white, PlayerId black, GameResult r) {
  return PairedGame{white, black, r, std::nullopt};
}

inline PairedGame unplayed(PlayerId white, PlayerId black) {
  return PairedGame{white, black, std::nullopt, std::nullopt};
}

inline Course empty_course(int players, int rounds) {
  Course c;
  c.players = ladder(players);
  c.total_rounds = rounds;
  return c;
}

inline void add_round(Course& c, std::vector<PairedGame> games, std::optional<PlayerId> bye = std::nullopt) {
  Round r;
  r.index = c.rounds_played() + 1;
  r.games = std::move(games);
  r.bye = bye;
  c.rounds.push_back(std::move(r));
}

}  // namespace swissgambit::testing
