#pragma once

// Domain types and bookkeeping for a Swiss-system tournament: players, colors,
// game results, rounds, courses (played history) and exact score tables.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swissgambit {

using PlayerId = int;
using Elo = int;

inline constexpr Elo kDefaultEloLow = 1000;
inline constexpr Elo kDefaultEloHigh = 2600;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CourseError : public Error {
 public:
  using Error::Error;
};

// Exact tournament score. Stored as an integer count of micro-points so that
// halves are exact and fractional expected-value scores compare by equality.
class Score {
 public:
  static constexpr std::int64_t kUnitsPerPoint = 1'000'000;

  constexpr Score() = default;

  static constexpr Score from_units(std::int64_t units) { return Score(units); }
  static constexpr Score points(std::int64_t whole) { return Score(whole * kUnitsPerPoint); }
  static constexpr Score half() { return Score(kUnitsPerPoint / 2); }
  static constexpr Score one() { return points(1); }
  static constexpr Score zero() { return Score(0); }

  // Rounds a probability-like share in [0,1] to the nearest unit.
  static Score from_share(double share) {
    if (!(share >= 0.0 && share <= 1.0)) throw Error("score share outside [0,1]");
    return Score(static_cast<std::int64_t>(share * kUnitsPerPoint + 0.5));
  }

  constexpr std::int64_t units() const { return units_; }
  constexpr double as_double() const {
    return static_cast<double>(units_) / static_cast<double>(kUnitsPerPoint);
  }

  constexpr Score operator+(Score o) const { return Score(units_ + o.units_); }
  constexpr Score operator-(Score o) const { return Score(units_ - o.units_); }
  constexpr Score& operator+=(Score o) {
    units_ += o.units_;
    return *this;
  }
  constexpr Score& operator-=(Score o) {
    units_ -= o.units_;
    return *this;
  }
  constexpr auto operator<=>(const Score&) const = default;

 private:
  constexpr explicit Score(std::int64_t units) : units_(units) {}
  std::int64_t units_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, Score s) { return os << s.as_double(); }

struct Player {
  PlayerId id = 0;
  Elo elo = 0;

  friend bool operator==(const Player&, const Player&) = default;
};

enum class Color : std::uint8_t { White, Black };

constexpr Color opposite(Color c) { return c == Color::White ? Color::Black : Color::White; }

enum class GameResult : std::uint8_t { WhiteWins, BlackWins, Draw };

inline constexpr GameResult kAllResults[] = {GameResult::WhiteWins, GameResult::Draw,
                                             GameResult::BlackWins};

// Points awarded to (white, black).
constexpr std::pair<Score, Score> points_of(GameResult r) {
  switch (r) {
    case GameResult::WhiteWins:
      return {Score::one(), Score::zero()};
    case GameResult::BlackWins:
      return {Score::zero(), Score::one()};
    case GameResult::Draw:
      return {Score::half(), Score::half()};
  }
  return {Score::zero(), Score::zero()};
}

inline const char* to_string(GameResult r) {
  switch (r) {
    case GameResult::WhiteWins:
      return "white";
    case GameResult::BlackWins:
      return "black";
    case GameResult::Draw:
      return "draw";
  }
  return "?";
}

struct PairedGame {
  PlayerId white = 0;
  PlayerId black = 0;
  std::optional<GameResult> result;
  // Fractional share for white awarded instead of a real result (expected-value
  // completions). Black receives the complement so the game sums to one point.
  std::optional<Score> expected_white;

  bool has_result() const { return result.has_value() || expected_white.has_value(); }
  bool involves(PlayerId p) const { return white == p || black == p; }
  PlayerId opponent_of(PlayerId p) const { return p == white ? black : white; }
  Color color_of(PlayerId p) const { return p == white ? Color::White : Color::Black; }

  std::pair<Score, Score> points() const {
    if (expected_white) return {*expected_white, Score::one() - *expected_white};
    if (result) return points_of(*result);
    throw CourseError("game has no result");
  }
  Score points_for(PlayerId p) const {
    auto [w, b] = points();
    return p == white ? w : b;
  }

  friend bool operator==(const PairedGame&, const PairedGame&) = default;
};

struct Round {
  int index = 1;  // 1-based
  std::vector<PairedGame> games;
  std::optional<PlayerId> bye;

  bool complete() const {
    return std::all_of(games.begin(), games.end(), [](const PairedGame& g) { return g.has_result(); });
  }

  friend bool operator==(const Round&, const Round&) = default;
};

// Pairings and results of the rounds paired so far. A course is complete once
// every round has been paired and played; otherwise it is a prefix.
struct Course {
  std::vector<Player> players;
  std::vector<Round> rounds;
  int total_rounds = 0;

  int player_count() const { return static_cast<int>(players.size()); }
  int rounds_played() const { return static_cast<int>(rounds.size()); }
  bool is_complete() const {
    return rounds_played() == total_rounds &&
           std::all_of(rounds.begin(), rounds.end(), [](const Round& r) { return r.complete(); });
  }
  const Player& player(PlayerId id) const { return players.at(static_cast<std::size_t>(id)); }

  friend bool operator==(const Course&, const Course&) = default;
};

using ScoreTable = std::vector<Score>;

// Cumulative score per player after rounds 1..round_index. A bye is worth one point.
inline ScoreTable scores_after(const Course& course, int round_index) {
  if (round_index < 0 || round_index > course.rounds_played())
    throw CourseError("round index " + std::to_string(round_index) + " out of range");
  ScoreTable scores(course.players.size(), Score::zero());
  for (int r = 0; r < round_index; ++r) {
    const Round& round = course.rounds[static_cast<std::size_t>(r)];
    for (const PairedGame& g : round.games) {
      if (!g.has_result())
        throw CourseError("missing result in round " + std::to_string(round.index));
      auto [w, b] = g.points();
      scores.at(static_cast<std::size_t>(g.white)) += w;
      scores.at(static_cast<std::size_t>(g.black)) += b;
    }
    if (round.bye) scores.at(static_cast<std::size_t>(*round.bye)) += Score::one();
  }
  return scores;
}

// Colors a player received in played games, in round order (byes skipped).
inline std::vector<Color> color_sequence(const Course& course, PlayerId p, int up_to_round) {
  std::vector<Color> seq;
  for (int r = 0; r < up_to_round && r < course.rounds_played(); ++r) {
    for (const PairedGame& g : course.rounds[static_cast<std::size_t>(r)].games) {
      if (g.involves(p)) {
        seq.push_back(g.color_of(p));
        break;
      }
    }
  }
  return seq;
}

struct Violation {
  enum class Kind { UnknownPlayer, SelfPairing, Disjointness, Rematch, ColorImbalance, TripleColor, ByeMisuse };
  Kind kind;
  int round = 0;
  PlayerId player = -1;
  std::string message;
};

inline const char* to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::UnknownPlayer: return "unknown-player";
    case Violation::Kind::SelfPairing: return "self-pairing";
    case Violation::Kind::Disjointness: return "disjointness";
    case Violation::Kind::Rematch: return "rematch";
    case Violation::Kind::ColorImbalance: return "color-imbalance";
    case Violation::Kind::TripleColor: return "triple-color";
    case Violation::Kind::ByeMisuse: return "bye";
  }
  return "?";
}

// Reports every violated course invariant with its location. The color balance
// criterion is relaxed in the final round of the tournament.
inline std::vector<Violation> validate_course(const Course& course) {
  std::vector<Violation> out;
  const int n = course.player_count();
  auto report = [&](Violation::Kind k, int round, PlayerId p, std::string msg) {
    out.push_back(Violation{k, round, p, std::move(msg)});
  };
  auto valid_id = [n](PlayerId p) { return p >= 0 && p < n; };

  for (int i = 0; i < n; ++i) {
    if (course.players[static_cast<std::size_t>(i)].id != i)
      report(Violation::Kind::UnknownPlayer, 0, i, "player ids must be dense 0..n-1");
  }

  std::vector<std::vector<int>> met(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
  std::vector<int> color_diff(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<Color>> colors(static_cast<std::size_t>(n));

  for (const Round& round : course.rounds) {
    const int r = round.index;
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (const PairedGame& g : round.games) {
      if (!valid_id(g.white) || !valid_id(g.black)) {
        report(Violation::Kind::UnknownPlayer, r, valid_id(g.white) ? g.black : g.white, "unknown player id");
        continue;
      }
      if (g.white == g.black) {
        report(Violation::Kind::SelfPairing, r, g.white, "player paired with itself");
        continue;
      }
      ++seen[static_cast<std::size_t>(g.white)];
      ++seen[static_cast<std::size_t>(g.black)];
      int& m = met[static_cast<std::size_t>(g.white)][static_cast<std::size_t>(g.black)];
      if (m > 0) {
        std::ostringstream msg;
        msg << "players " << g.white << " and " << g.black << " meet again";
        report(Violation::Kind::Rematch, r, g.white, msg.str());
      }
      ++m;
      ++met[static_cast<std::size_t>(g.black)][static_cast<std::size_t>(g.white)];
      ++color_diff[static_cast<std::size_t>(g.white)];
      --color_diff[static_cast<std::size_t>(g.black)];
      colors[static_cast<std::size_t>(g.white)].push_back(Color::White);
      colors[static_cast<std::size_t>(g.black)].push_back(Color::Black);
    }
    if (round.bye) {
      if (!valid_id(*round.bye)) {
        report(Violation::Kind::UnknownPlayer, r, *round.bye, "unknown bye player");
      } else {
        ++seen[static_cast<std::size_t>(*round.bye)];
        if (n % 2 == 0) report(Violation::Kind::ByeMisuse, r, *round.bye, "bye with an even player count");
      }
    }
    for (int p = 0; p < n; ++p) {
      const int s = seen[static_cast<std::size_t>(p)];
      if (s > 1) report(Violation::Kind::Disjointness, r, p, "player appears more than once");
      if (s == 0) report(Violation::Kind::Disjointness, r, p, "player missing from round");
    }
    const bool last_round = r == course.total_rounds;
    for (int p = 0; p < n; ++p) {
      const auto& seq = colors[static_cast<std::size_t>(p)];
      if (seen[static_cast<std::size_t>(p)] != 1 || seq.empty()) continue;
      if (!last_round && std::abs(color_diff[static_cast<std::size_t>(p)]) > 2)
        report(Violation::Kind::ColorImbalance, r, p, "color difference exceeds 2");
      const std::size_t k = seq.size();
      if (k >= 3 && seq[k - 1] == seq[k - 2] && seq[k - 2] == seq[k - 3]) {
        // Only flag the round in which the third consecutive color was assigned.
        bool played_now = std::any_of(round.games.begin(), round.games.end(),
                                      [p](const PairedGame& g) { return g.involves(p); });
        if (played_now) report(Violation::Kind::TripleColor, r, p, "same color three times in a row");
      }
    }
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Violation& v) {
  return os << "round " << v.round << ": " << to_string(v.kind) << " (player " << v.player << "): " << v.message;
}

}  // namespace swissgambit
