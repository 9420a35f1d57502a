#pragma once

// Final standings with tiebreakers, the rating-based ground truth, and Kendall
// tau rank agreement.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <tuple>
#include <vector>

#include "swissgambit/core.hpp"

namespace swissgambit {

class RankingError : public Error {
 public:
  using Error::Error;
};

// Strict order of all players, rank 1 first.
class Ranking {
 public:
  Ranking() = default;
  explicit Ranking(std::vector<PlayerId> order) : order_(std::move(order)), rank_(order_.size(), 0) {
    for (std::size_t i = 0; i < order_.size(); ++i) {
      const PlayerId p = order_[i];
      if (p < 0 || static_cast<std::size_t>(p) >= order_.size() || rank_[static_cast<std::size_t>(p)] != 0)
        throw RankingError("ranking is not a permutation of 0..n-1");
      rank_[static_cast<std::size_t>(p)] = static_cast<int>(i) + 1;
    }
  }

  std::size_t size() const { return order_.size(); }
  const std::vector<PlayerId>& order() const { return order_; }
  // 1-based rank of a player.
  int rank_of(PlayerId p) const { return rank_.at(static_cast<std::size_t>(p)); }
  PlayerId at_rank(int rank) const { return order_.at(static_cast<std::size_t>(rank - 1)); }

  friend bool operator==(const Ranking& a, const Ranking& b) { return a.order_ == b.order_; }

 private:
  std::vector<PlayerId> order_;
  std::vector<int> rank_;
};

// Sonneborn-Berger products are kept in squared score units.
struct TiebreakVector {
  Score score;
  Score buchholz_cut1;
  Score buchholz;
  std::int64_t sonneborn_berger = 0;
  Elo elo = 0;
  PlayerId id = 0;

  // True when `a` ranks ahead of `b`. The player id is the last resort, lower first.
  friend bool ranks_ahead(const TiebreakVector& a, const TiebreakVector& b) {
    return std::tie(a.score, a.buchholz_cut1, a.buchholz, a.sonneborn_berger, a.elo, b.id) >
           std::tie(b.score, b.buchholz_cut1, b.buchholz, b.sonneborn_berger, b.elo, a.id);
  }
};

// Tiebreak vectors for every player after all rounds of the course. A bye counts
// as a game won against an opponent carrying the player's own final score.
inline std::vector<TiebreakVector> tiebreak_vectors(const Course& course) {
  const int n = course.player_count();
  const ScoreTable final_scores = scores_after(course, course.rounds_played());
  std::vector<std::vector<Score>> opponent_scores(static_cast<std::size_t>(n));
  std::vector<TiebreakVector> tb(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    auto& v = tb[static_cast<std::size_t>(p)];
    v.score = final_scores[static_cast<std::size_t>(p)];
    v.elo = course.player(p).elo;
    v.id = p;
  }
  auto credit = [&](PlayerId p, Score opp_score, Score earned) {
    opponent_scores[static_cast<std::size_t>(p)].push_back(opp_score);
    tb[static_cast<std::size_t>(p)].sonneborn_berger += opp_score.units() * earned.units();
  };
  for (const Round& round : course.rounds) {
    for (const PairedGame& g : round.games) {
      auto [w, b] = g.points();
      credit(g.white, final_scores[static_cast<std::size_t>(g.black)], w);
      credit(g.black, final_scores[static_cast<std::size_t>(g.white)], b);
    }
    if (round.bye) credit(*round.bye, final_scores[static_cast<std::size_t>(*round.bye)], Score::one());
  }
  for (int p = 0; p < n; ++p) {
    auto& opp = opponent_scores[static_cast<std::size_t>(p)];
    auto& v = tb[static_cast<std::size_t>(p)];
    Score total = Score::zero();
    for (Score s : opp) total += s;
    v.buchholz = total;
    v.buchholz_cut1 = opp.empty() ? total : total - *std::min_element(opp.begin(), opp.end());
  }
  return tb;
}

inline Ranking final_ranking(const Course& course) {
  if (!course.is_complete()) throw RankingError("final ranking requires a complete course");
  const auto tb = tiebreak_vectors(course);
  std::vector<PlayerId> order(tb.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](PlayerId a, PlayerId b) {
    return ranks_ahead(tb[static_cast<std::size_t>(a)], tb[static_cast<std::size_t>(b)]);
  });
  return Ranking(std::move(order));
}

// Players ordered by descending rating.
inline Ranking ground_truth(std::span<const Player> players) {
  std::vector<Player> sorted(players.begin(), players.end());
  std::sort(sorted.begin(), sorted.end(), [](const Player& a, const Player& b) { return a.elo > b.elo; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].elo == sorted[i - 1].elo) throw RankingError("duplicate rating in ground truth");
  std::vector<PlayerId> order;
  order.reserve(sorted.size());
  for (const Player& p : sorted) order.push_back(p.id);
  return Ranking(std::move(order));
}

namespace detail {

inline std::int64_t count_inversions(std::vector<int>& v, std::vector<int>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[i] <= v[j]) {
      buf[k++] = v[i++];
    } else {
      inv += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace detail

// Number of player pairs ordered differently by the two rankings, O(n log n).
inline std::int64_t discordant_pairs(const Ranking& a, const Ranking& b) {
  if (a.size() != b.size()) throw RankingError("rankings cover different player sets");
  std::vector<int> seq;
  seq.reserve(a.size());
  for (PlayerId p : a.order()) seq.push_back(b.rank_of(p));
  std::vector<int> buf(seq.size());
  return detail::count_inversions(seq, buf, 0, seq.size());
}

inline double tau_from_discordant(std::int64_t discordant, std::size_t n) {
  if (n < 2) return 1.0;
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
  return 1.0 - 4.0 * static_cast<double>(discordant) / pairs;
}

// Normalized Kendall tau in [-1, 1]; 1 for identical rankings, -1 for reversed.
inline double kendall_tau(const Ranking& a, const Ranking& b) {
  return tau_from_discordant(discordant_pairs(a, b), a.size());
}

// Positive when the gambit moved the standings closer to the ground truth.
inline double kendall_tau_difference(const Ranking& with_gambit, const Ranking& without_gambit,
                                     const Ranking& truth) {
  return kendall_tau(with_gambit, truth) - kendall_tau(without_gambit, truth);
}

}  // namespace swissgambit
