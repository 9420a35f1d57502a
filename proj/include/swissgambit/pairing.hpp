#pragma once

// Round pairing for Swiss-system tournaments.
//
// Players are grouped into score brackets, highest score first. Each bracket
// (together with players floated down from the bracket above) is paired by the
// selected system:
//
//   Dutch     upper half S1 against lower half S2, i-th against i-th. When that
//             is illegal, S2 is transposed in lexicographic order, then single
//             S1/S2 exchanges are tried, then a general search.
//   Burstein  highest remaining against lowest remaining.
//   Monrad    highest remaining against the next highest.
//
// Players who cannot be paired inside their bracket float to the next one.
// Every accepted bracket pairing must leave the rest of the field pairable,
// which is checked with maximum-cardinality matchings.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swissgambit/core.hpp"
#include "swissgambit/matching.hpp"
#include "swissgambit/ranking.hpp"

namespace swissgambit {

class PairingError : public Error {
 public:
  using Error::Error;
};

enum class PairingSystem { Dutch, Burstein, Monrad };

inline const char* to_string(PairingSystem s) {
  switch (s) {
    case PairingSystem::Dutch: return "dutch";
    case PairingSystem::Burstein: return "burstein";
    case PairingSystem::Monrad: return "monrad";
  }
  return "?";
}

inline PairingSystem parse_pairing_system(std::string_view name) {
  if (name == "dutch") return PairingSystem::Dutch;
  if (name == "burstein") return PairingSystem::Burstein;
  if (name == "monrad") return PairingSystem::Monrad;
  throw PairingError("unknown pairing system: " + std::string(name));
}

struct ColorHistory {
  std::vector<Color> colors;

  // Number of white games minus number of black games.
  int difference() const {
    int d = 0;
    for (Color c : colors) d += c == Color::White ? 1 : -1;
    return d;
  }
  std::optional<Color> last() const {
    if (colors.empty()) return std::nullopt;
    return colors.back();
  }
  bool same_color_twice(Color c) const {
    const std::size_t k = colors.size();
    return k >= 2 && colors[k - 1] == c && colors[k - 2] == c;
  }
  // Color that reduces the imbalance, or alternates when balanced.
  std::optional<Color> due_color() const {
    const int d = difference();
    if (d > 0) return Color::Black;
    if (d < 0) return Color::White;
    if (auto l = last()) return opposite(*l);
    return std::nullopt;
  }
};

// How strictly color rules are enforced. Balance may only be relaxed in the last round.
enum class ColorRules { Strict, RelaxBalance, Ignore };

inline bool may_receive(const ColorHistory& h, Color c, ColorRules rules = ColorRules::Strict) {
  if (rules == ColorRules::Ignore) return true;
  if (h.same_color_twice(c)) return false;
  if (rules == ColorRules::RelaxBalance) return true;
  const int after = h.difference() + (c == Color::White ? 1 : -1);
  return after <= 2 && after >= -2;
}

// Colors for a pair whose first member is ranked higher. Returns (white, black),
// or nothing when no assignment is legal for both players.
//   1. a player who must receive a color gets it;
//   2. otherwise the player with the larger |color difference| gets the color
//      that reduces it;
//   3. otherwise the higher-ranked player gets the opposite of their last color,
//      and White when they have not played yet.
inline std::optional<std::pair<PlayerId, PlayerId>> try_assign_colors(PlayerId higher, PlayerId lower,
                                                                      const ColorHistory& h,
                                                                      const ColorHistory& l,
                                                                      ColorRules rules = ColorRules::Strict) {
  const bool higher_white_ok = may_receive(h, Color::White, rules) && may_receive(l, Color::Black, rules);
  const bool higher_black_ok = may_receive(h, Color::Black, rules) && may_receive(l, Color::White, rules);
  auto with_higher = [&](Color c) {
    return c == Color::White ? std::make_pair(higher, lower) : std::make_pair(lower, higher);
  };
  if (!higher_white_ok && !higher_black_ok) return std::nullopt;
  if (higher_white_ok != higher_black_ok) return with_higher(higher_white_ok ? Color::White : Color::Black);

  const int dh = std::abs(h.difference());
  const int dl = std::abs(l.difference());
  if (dh > dl) return with_higher(*h.due_color());
  if (dl > dh) return with_higher(opposite(*l.due_color()));
  if (auto last = h.last()) return with_higher(opposite(*last));
  if (auto last = l.last()) return with_higher(*last);
  return with_higher(Color::White);
}

inline std::pair<PlayerId, PlayerId> assign_colors(PlayerId higher, PlayerId lower, const ColorHistory& h,
                                                   const ColorHistory& l, ColorRules rules = ColorRules::Strict) {
  auto r = try_assign_colors(higher, lower, h, l, rules);
  if (!r) throw PairingError("no legal color assignment for players " + std::to_string(higher) + " and " +
                             std::to_string(lower));
  return *r;
}

// Snapshot of everything pairing needs after the rounds played so far.
class PairingState {
 public:
  PairingState(const Course& course, ColorRules rules = ColorRules::Strict)
      : n_(course.player_count()), rules_(rules) {
    const std::size_t n = static_cast<std::size_t>(n_);
    scores_ = scores_after(course, course.rounds_played());
    elo_.resize(n);
    for (const Player& p : course.players) elo_[static_cast<std::size_t>(p.id)] = p.elo;
    history_.resize(n);
    had_bye_.assign(n, 0);
    played_.assign(n * n, 0);
    for (const Round& round : course.rounds) {
      for (const PairedGame& g : round.games) {
        played_[static_cast<std::size_t>(g.white) * n + static_cast<std::size_t>(g.black)] = 1;
        played_[static_cast<std::size_t>(g.black) * n + static_cast<std::size_t>(g.white)] = 1;
        history_[static_cast<std::size_t>(g.white)].colors.push_back(Color::White);
        history_[static_cast<std::size_t>(g.black)].colors.push_back(Color::Black);
      }
      if (round.bye) had_bye_[static_cast<std::size_t>(*round.bye)] = 1;
    }
    order_.resize(n);
    for (int i = 0; i < n_; ++i) order_[static_cast<std::size_t>(i)] = i;
    std::sort(order_.begin(), order_.end(), [&](int a, int b) { return ranks_before(a, b); });
    position_.resize(n);
    for (std::size_t i = 0; i < n; ++i) position_[static_cast<std::size_t>(order_[i])] = static_cast<int>(i);
    compat_.assign(n * n, 0);
    for (int a = 0; a < n_; ++a)
      for (int b = a + 1; b < n_; ++b)
        if (!played(a, b)) {
          const auto [hi, lo] = position_[idx(a)] < position_[idx(b)] ? std::pair{a, b} : std::pair{b, a};
          const char ok = try_assign_colors(hi, lo, history_[idx(hi)], history_[idx(lo)], rules_).has_value();
          compat_[idx(a) * n + idx(b)] = ok;
          compat_[idx(b) * n + idx(a)] = ok;
        }
  }

  int size() const { return n_; }
  ColorRules rules() const { return rules_; }
  Score score(PlayerId p) const { return scores_[idx(p)]; }
  Elo elo(PlayerId p) const { return elo_[idx(p)]; }
  const ColorHistory& history(PlayerId p) const { return history_[idx(p)]; }
  bool had_bye(PlayerId p) const { return had_bye_[idx(p)] != 0; }
  bool played(PlayerId a, PlayerId b) const { return played_[idx(a) * idx(n_) + idx(b)] != 0; }
  bool compatible(PlayerId a, PlayerId b) const { return compat_[idx(a) * idx(n_) + idx(b)] != 0; }
  // Players in pairing order: score descending, rating descending, id ascending.
  const std::vector<PlayerId>& order() const { return order_; }
  int position(PlayerId p) const { return position_[idx(p)]; }

  bool ranks_before(PlayerId a, PlayerId b) const {
    if (scores_[idx(a)] != scores_[idx(b)]) return scores_[idx(a)] > scores_[idx(b)];
    if (elo_[idx(a)] != elo_[idx(b)]) return elo_[idx(a)] > elo_[idx(b)];
    return a < b;
  }

 private:
  static std::size_t idx(int v) { return static_cast<std::size_t>(v); }

  int n_;
  ColorRules rules_;
  ScoreTable scores_;
  std::vector<Elo> elo_;
  std::vector<ColorHistory> history_;
  std::vector<char> had_bye_;
  std::vector<char> played_;
  std::vector<char> compat_;
  std::vector<PlayerId> order_;
  std::vector<int> position_;
};

using Pair = std::pair<PlayerId, PlayerId>;  // higher-ranked first

struct BracketPairing {
  std::vector<Pair> pairs;
  std::vector<PlayerId> floaters;  // rank order
};

namespace detail {

inline std::vector<PlayerId> without(const std::vector<PlayerId>& v, std::initializer_list<PlayerId> drop) {
  std::vector<PlayerId> out;
  out.reserve(v.size());
  for (PlayerId p : v)
    if (std::find(drop.begin(), drop.end(), p) == drop.end()) out.push_back(p);
  return out;
}

// Enumerates pairings of one bracket with exactly `pairs` pairs, in the
// preference order of the pairing system. The visitor returns true to stop.
class BracketSearch {
 public:
  using Visitor = std::function<bool(const BracketPairing&)>;

  BracketSearch(const PairingState& state, PairingSystem system) : state_(state), system_(system) {}

  // Returns true when the visitor asked to stop.
  bool enumerate(const std::vector<PlayerId>& bracket, int pairs, const Visitor& visit) {
    stopped_ = false;
    visit_ = &visit;
    if (pairs == 0) return emit({}, bracket);
    if (system_ == PairingSystem::Dutch) {
      const auto split = static_cast<std::ptrdiff_t>(pairs);
      std::vector<PlayerId> s1(bracket.begin(), bracket.begin() + split);
      std::vector<PlayerId> s2(bracket.begin() + split, bracket.end());
      if (transpositions(s1, s2)) return true;
      if (exchanges(s1, s2)) return true;
    }
    return general(bracket, pairs);
  }

 private:
  bool compatible(PlayerId a, PlayerId b) const { return state_.compatible(a, b); }

  bool emit(std::vector<Pair> pairs, const std::vector<PlayerId>& floaters) {
    BracketPairing bp{std::move(pairs), floaters};
    std::sort(bp.floaters.begin(), bp.floaters.end(),
              [&](PlayerId a, PlayerId b) { return state_.position(a) < state_.position(b); });
    if ((*visit_)(bp)) stopped_ = true;
    return stopped_;
  }

  // S1[i] against S2 elements chosen in lexicographic order of S2 positions.
  bool transpositions(const std::vector<PlayerId>& s1, const std::vector<PlayerId>& s2) {
    std::vector<char> used(s2.size(), 0);
    std::vector<Pair> pairs;
    return transpose_from(0, s1, s2, used, pairs);
  }

  bool remaining_saturable(std::size_t from, const std::vector<PlayerId>& s1, const std::vector<PlayerId>& s2,
                           const std::vector<char>& used) const {
    std::vector<PlayerId> left(s1.begin() + static_cast<std::ptrdiff_t>(from), s1.end());
    std::vector<PlayerId> right;
    for (std::size_t j = 0; j < s2.size(); ++j)
      if (!used[j]) right.push_back(s2[j]);
    // Greedy in order is a sufficient witness; fall back to augmenting paths.
    std::vector<char> taken(right.size(), 0);
    bool greedy_ok = true;
    for (PlayerId a : left) {
      bool found = false;
      for (std::size_t j = 0; j < right.size(); ++j) {
        if (!taken[j] && compatible(a, right[j])) {
          taken[j] = 1;
          found = true;
          break;
        }
      }
      if (!found) {
        greedy_ok = false;
        break;
      }
    }
    if (greedy_ok) return true;
    return saturates_left(std::span<const int>(left), std::span<const int>(right),
                          [&](int a, int b) { return compatible(a, b); });
  }

  bool transpose_from(std::size_t i, const std::vector<PlayerId>& s1, const std::vector<PlayerId>& s2,
                      std::vector<char>& used, std::vector<Pair>& pairs) {
    if (i == s1.size()) {
      std::vector<PlayerId> floaters;
      for (std::size_t j = 0; j < s2.size(); ++j)
        if (!used[j]) floaters.push_back(s2[j]);
      std::vector<Pair> ordered = pairs;
      for (auto& pr : ordered)
        if (state_.position(pr.second) < state_.position(pr.first)) std::swap(pr.first, pr.second);
      return emit(std::move(ordered), floaters);
    }
    for (std::size_t j = 0; j < s2.size(); ++j) {
      if (used[j] || !compatible(s1[i], s2[j])) continue;
      used[j] = 1;
      if (remaining_saturable(i + 1, s1, s2, used)) {
        pairs.emplace_back(s1[i], s2[j]);
        const bool stop = transpose_from(i + 1, s1, s2, used, pairs);
        pairs.pop_back();
        if (stop) return true;
      }
      used[j] = 0;
    }
    return false;
  }

  // One player of S1 swapped with one of S2, smallest rank distance first and,
  // at equal distance, the lowest S1 player first.
  bool exchanges(const std::vector<PlayerId>& s1, const std::vector<PlayerId>& s2) {
    struct Swap {
      std::size_t i, j;
      std::size_t distance;
    };
    std::vector<Swap> swaps;
    for (std::size_t i = 0; i < s1.size(); ++i)
      for (std::size_t j = 0; j < s2.size(); ++j) swaps.push_back({i, j, (s1.size() - i) + j});
    std::stable_sort(swaps.begin(), swaps.end(), [](const Swap& a, const Swap& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      return a.i > b.i;
    });
    auto by_position = [&](PlayerId a, PlayerId b) { return state_.position(a) < state_.position(b); };
    for (const Swap& sw : swaps) {
      std::vector<PlayerId> a = s1, b = s2;
      std::swap(a[sw.i], b[sw.j]);
      std::sort(a.begin(), a.end(), by_position);
      std::sort(b.begin(), b.end(), by_position);
      if (transpositions(a, b)) return true;
    }
    return false;
  }

  // Partner preference for the top remaining player.
  std::vector<PlayerId> partner_order(const std::vector<PlayerId>& remaining) const {
    std::vector<PlayerId> rest(remaining.begin() + 1, remaining.end());
    switch (system_) {
      case PairingSystem::Monrad:
        return rest;
      case PairingSystem::Burstein:
        std::reverse(rest.begin(), rest.end());
        return rest;
      case PairingSystem::Dutch: {
        const std::ptrdiff_t ideal = static_cast<std::ptrdiff_t>(remaining.size() / 2) - 1;
        std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>> keyed;
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(rest.size()); ++k)
          keyed.emplace_back(std::abs(k - ideal), k);
        std::sort(keyed.begin(), keyed.end());
        std::vector<PlayerId> out;
        for (auto [d, k] : keyed) out.push_back(rest[static_cast<std::size_t>(k)]);
        return out;
      }
    }
    return rest;
  }

  bool perfectly_pairable(const std::vector<PlayerId>& v) const {
    return has_perfect_matching(std::span<const int>(v), [&](int a, int b) { return compatible(a, b); });
  }

  // Complete search: floaters chosen from the bottom up, the rest paired
  // perfectly in the system's partner order.
  bool general(const std::vector<PlayerId>& bracket, int pairs) {
    const std::size_t float_count = bracket.size() - 2 * static_cast<std::size_t>(pairs);
    std::vector<std::size_t> chosen;
    return choose_floaters(bracket, float_count, bracket.size(), chosen);
  }

  bool choose_floaters(const std::vector<PlayerId>& bracket, std::size_t need, std::size_t below,
                       std::vector<std::size_t>& chosen) {
    if (need == 0) {
      std::vector<PlayerId> rest, floaters;
      for (std::size_t k = 0; k < bracket.size(); ++k) {
        if (std::find(chosen.begin(), chosen.end(), k) != chosen.end())
          floaters.push_back(bracket[k]);
        else
          rest.push_back(bracket[k]);
      }
      if (!perfectly_pairable(rest)) return false;
      std::vector<Pair> pairs;
      return pair_perfectly(rest, floaters, pairs);
    }
    for (std::size_t k = below; k-- > need - 1;) {
      chosen.push_back(k);
      const bool stop = choose_floaters(bracket, need - 1, k, chosen);
      chosen.pop_back();
      if (stop) return true;
    }
    return false;
  }

  bool pair_perfectly(const std::vector<PlayerId>& remaining, const std::vector<PlayerId>& floaters,
                      std::vector<Pair>& pairs) {
    if (remaining.empty()) return emit(pairs, floaters);
    const PlayerId top = remaining.front();
    for (PlayerId partner : partner_order(remaining)) {
      if (!compatible(top, partner)) continue;
      std::vector<PlayerId> rest = without(remaining, {top, partner});
      if (!perfectly_pairable(rest)) continue;
      pairs.emplace_back(top, partner);
      const bool stop = pair_perfectly(rest, floaters, pairs);
      pairs.pop_back();
      if (stop) return true;
    }
    return false;
  }

  const PairingState& state_;
  PairingSystem system_;
  const Visitor* visit_ = nullptr;
  bool stopped_ = false;
};

}  // namespace detail

// Largest number of pairs that can be formed inside the bracket.
inline int max_bracket_pairs(const PairingState& state, const std::vector<PlayerId>& bracket) {
  return max_matching_size(std::span<const int>(bracket),
                           [&](int a, int b) { return state.compatible(a, b); });
}

// First pairing of a single bracket in the system's preference order, using as
// many pairs as the bracket admits. Leftover players are returned as floaters.
inline BracketPairing pair_bracket(const PairingState& state, const std::vector<PlayerId>& bracket,
                                   PairingSystem system) {
  const int pairs = max_bracket_pairs(state, bracket);
  detail::BracketSearch search(state, system);
  BracketPairing result;
  search.enumerate(bracket, pairs, [&](const BracketPairing& bp) {
    result = bp;
    return true;
  });
  return result;
}

namespace detail {

inline std::vector<std::vector<PlayerId>> score_brackets(const PairingState& state,
                                                         const std::vector<PlayerId>& ranked) {
  std::vector<std::vector<PlayerId>> brackets;
  for (PlayerId p : ranked) {
    if (brackets.empty() || state.score(brackets.back().front()) != state.score(p)) brackets.emplace_back();
    brackets.back().push_back(p);
  }
  return brackets;
}

inline std::vector<PlayerId> merge_ranked(const PairingState& state, std::vector<PlayerId> a,
                                          const std::vector<PlayerId>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end(), [&](PlayerId x, PlayerId y) { return state.position(x) < state.position(y); });
  return a;
}

// First candidate per bracket; fails when the last bracket cannot absorb its floaters.
inline std::optional<std::vector<Pair>> pair_brackets_fast(const PairingState& state,
                                                           const std::vector<std::vector<PlayerId>>& brackets,
                                                           PairingSystem system) {
  std::vector<Pair> pairs;
  std::vector<PlayerId> carry;
  for (const auto& residents : brackets) {
    const std::vector<PlayerId> bracket = merge_ranked(state, carry, residents);
    BracketPairing bp = pair_bracket(state, bracket, system);
    pairs.insert(pairs.end(), bp.pairs.begin(), bp.pairs.end());
    carry = std::move(bp.floaters);
  }
  if (!carry.empty()) return std::nullopt;
  return pairs;
}

// Pairs the highest remaining player with the nearest-ranked partner that keeps
// the rest perfectly pairable. Always succeeds when `remaining` is pairable.
inline void pair_greedy_feasible(const PairingState& state, std::vector<PlayerId> remaining,
                                 std::vector<Pair>& pairs) {
  auto compat = [&](int a, int b) { return state.compatible(a, b); };
  while (!remaining.empty()) {
    const PlayerId top = remaining.front();
    bool done = false;
    for (std::size_t k = 1; k < remaining.size() && !done; ++k) {
      const PlayerId partner = remaining[k];
      if (!state.compatible(top, partner)) continue;
      std::vector<PlayerId> rest = without(remaining, {top, partner});
      if (!has_perfect_matching(std::span<const int>(rest), compat)) continue;
      pairs.emplace_back(top, partner);
      remaining = std::move(rest);
      done = true;
    }
    if (!done) throw PairingError("pairing infeasible");
  }
}

inline constexpr int kCandidateBudget = 64;

// One top-down pass: each bracket takes the first candidate (most pairs first)
// whose floaters leave the lower brackets perfectly pairable; the last bracket
// must pair completely. Empty when some bracket exhausts its budget.
inline std::optional<std::vector<Pair>> pair_brackets_checked(const PairingState& state,
                                                              const std::vector<std::vector<PlayerId>>& brackets,
                                                              PairingSystem system) {
  auto compat = [&](int a, int b) { return state.compatible(a, b); };
  std::vector<Pair> pairs;
  std::vector<PlayerId> carry;
  BracketSearch search(state, system);
  for (std::size_t bi = 0; bi < brackets.size(); ++bi) {
    const std::vector<PlayerId> bracket = merge_ranked(state, carry, brackets[bi]);
    std::optional<BracketPairing> accepted;
    if (bi + 1 == brackets.size()) {
      if (bracket.size() % 2 != 0 || !has_perfect_matching(std::span<const int>(bracket), compat))
        return std::nullopt;
      search.enumerate(bracket, static_cast<int>(bracket.size() / 2), [&](const BracketPairing& bp) {
        accepted = bp;
        return true;
      });
    } else {
      std::vector<PlayerId> lower;
      for (std::size_t k = bi + 1; k < brackets.size(); ++k)
        lower.insert(lower.end(), brackets[k].begin(), brackets[k].end());
      // Feasibility depends only on the floater set.
      std::map<std::vector<PlayerId>, bool> absorbable;
      for (int p = max_bracket_pairs(state, bracket); p >= 0 && !accepted; --p) {
        int budget = kCandidateBudget;
        search.enumerate(bracket, p, [&](const BracketPairing& bp) {
          if (--budget < 0) return true;
          auto [it, fresh] = absorbable.try_emplace(bp.floaters, false);
          if (fresh) {
            std::vector<PlayerId> rest = bp.floaters;
            rest.insert(rest.end(), lower.begin(), lower.end());
            it->second = has_perfect_matching(std::span<const int>(rest), compat);
          }
          if (!it->second) return false;
          accepted = bp;
          return true;
        });
      }
    }
    if (!accepted) return std::nullopt;
    pairs.insert(pairs.end(), accepted->pairs.begin(), accepted->pairs.end());
    carry = accepted->floaters;
  }
  return pairs;
}

// Checked passes, merging the two lowest brackets after every failure until a
// single bracket remains.
inline std::vector<Pair> pair_brackets_collapsing(const PairingState& state,
                                                  std::vector<std::vector<PlayerId>> brackets,
                                                  PairingSystem system) {
  for (;;) {
    if (auto pairs = pair_brackets_checked(state, brackets, system)) return std::move(*pairs);
    if (brackets.size() <= 1) break;
    std::vector<PlayerId> last = std::move(brackets.back());
    brackets.pop_back();
    brackets.back() = merge_ranked(state, std::move(brackets.back()), last);
  }
  std::vector<Pair> pairs;
  pair_greedy_feasible(state, brackets.empty() ? std::vector<PlayerId>{} : brackets.front(), pairs);
  return pairs;
}

inline std::optional<PlayerId> choose_bye(const PairingState& state) {
  if (state.size() % 2 == 0) return std::nullopt;
  auto compat = [&](int a, int b) { return state.compatible(a, b); };
  const auto& order = state.order();
  for (int pass = 0; pass < 2; ++pass) {
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (pass == 0 && state.had_bye(*it)) continue;
      std::vector<PlayerId> rest = without(order, {*it});
      if (has_perfect_matching(std::span<const int>(rest), compat)) return *it;
    }
  }
  return order.back();
}

}  // namespace detail

// Sorts games so that board 1 holds the pair with the best-placed player.
inline void order_boards(const PairingState& state, std::vector<PairedGame>& games) {
  std::sort(games.begin(), games.end(), [&](const PairedGame& a, const PairedGame& b) {
    return std::min(state.position(a.white), state.position(a.black)) <
           std::min(state.position(b.white), state.position(b.black));
  });
}

// Pairing of the next round of `course`. Color balance is relaxed only when
// the final round cannot be paired otherwise.
inline Round pair_round(const Course& course, PairingSystem system = PairingSystem::Dutch) {
  const int next = course.rounds_played() + 1;
  if (next > course.total_rounds) throw PairingError("all rounds have already been paired");
  for (const Round& r : course.rounds)
    if (!r.complete()) throw PairingError("previous round " + std::to_string(r.index) + " is not complete");
  if (course.player_count() < 2) throw PairingError("at least two players are required");

  const bool last_round = next == course.total_rounds;
  const ColorRules attempts[] = {ColorRules::Strict, ColorRules::RelaxBalance};
  for (ColorRules rules : attempts) {
    if (rules != ColorRules::Strict && !last_round) break;
    PairingState state(course, rules);
    const std::optional<PlayerId> bye = detail::choose_bye(state);
    std::vector<PlayerId> pool = bye ? detail::without(state.order(), {*bye}) : state.order();
    if (!has_perfect_matching(std::span<const int>(pool),
                              [&](int a, int b) { return state.compatible(a, b); }))
      continue;

    const auto brackets = detail::score_brackets(state, pool);
    std::vector<Pair> pairs;
    if (auto fast = detail::pair_brackets_fast(state, brackets, system))
      pairs = std::move(*fast);
    else
      pairs = detail::pair_brackets_collapsing(state, brackets, system);

    Round round;
    round.index = next;
    round.bye = bye;
    for (auto [a, b] : pairs) {
      const bool a_first = state.position(a) < state.position(b);
      const PlayerId hi = a_first ? a : b;
      const PlayerId lo = a_first ? b : a;
      auto [white, black] = assign_colors(hi, lo, state.history(hi), state.history(lo), state.rules());
      round.games.push_back(PairedGame{white, black, std::nullopt, std::nullopt});
    }
    order_boards(state, round.games);
    return round;
  }
  throw PairingError("no legal pairing exists for round " + std::to_string(next));
}

// ---------------------------------------------------------------------------
// TRF(x) tournament report export and import.

namespace detail {

inline char trf_result_code(const PairedGame& g, PlayerId p) {
  if (g.expected_white) throw Error("fractional results cannot be written as TRF");
  if (!g.result) return ' ';
  switch (*g.result) {
    case GameResult::Draw: return '=';
    case GameResult::WhiteWins: return p == g.white ? '1' : '0';
    case GameResult::BlackWins: return p == g.black ? '1' : '0';
  }
  return ' ';
}

inline void put_field(std::string& line, std::size_t col, const std::string& text) {
  // `col` is the 1-based column of the first character.
  if (line.size() < col - 1 + text.size()) line.resize(col - 1 + text.size(), ' ');
  line.replace(col - 1, text.size(), text);
}

inline std::string right_aligned(long long value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%*lld", width, value);
  return buf;
}

}  // namespace detail

// One 001 line per player (starting rank = id + 1) with rating, points, rank
// and per-round opponent/color/result blocks, preceded by the XXR round count.
inline std::string export_trf(const Course& course) {
  std::ostringstream out;
  out << "012 Swiss gambit simulation\n";
  out << "XXR " << course.total_rounds << "\n";
  bool scored = true;
  for (const Round& r : course.rounds) scored = scored && r.complete();
  const ScoreTable scores = scored ? scores_after(course, course.rounds_played()) : ScoreTable(course.players.size());
  std::optional<Ranking> ranking;
  if (course.is_complete()) ranking = final_ranking(course);

  for (const Player& p : course.players) {
    std::string line(89, ' ');
    detail::put_field(line, 1, "001");
    detail::put_field(line, 5, detail::right_aligned(p.id + 1, 4));
    char name[34];
    std::snprintf(name, sizeof name, "%-33s", ("Player " + std::to_string(p.id + 1)).c_str());
    detail::put_field(line, 15, name);
    detail::put_field(line, 49, detail::right_aligned(p.elo, 4));
    char pts[8];
    std::snprintf(pts, sizeof pts, "%4.1f", scores[static_cast<std::size_t>(p.id)].as_double());
    detail::put_field(line, 81, pts);
    detail::put_field(line, 86, detail::right_aligned(ranking ? ranking->rank_of(p.id) : p.id + 1, 4));
    for (const Round& round : course.rounds) {
      std::string block;
      if (round.bye && *round.bye == p.id) {
        block = "0000 - U";
      } else {
        for (const PairedGame& g : round.games) {
          if (!g.involves(p.id)) continue;
          block = detail::right_aligned(g.opponent_of(p.id) + 1, 4) + " " +
                  (g.color_of(p.id) == Color::White ? "w" : "b") + " " + detail::trf_result_code(g, p.id);
          break;
        }
      }
      if (block.empty()) block = "        ";
      line += "  " + block;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << "\n";
  }
  return out.str();
}

// Rebuilds a course from a TRF document written by export_trf. Boards are
// ordered the same way the pairing engine orders them.
inline Course import_trf(const std::string& text) {
  Course course;
  std::istringstream in(text);
  std::string line;
  struct Block {
    int opponent;
    char color;
    char result;
  };
  std::vector<std::vector<Block>> blocks;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("XXR", 0) == 0) {
      course.total_rounds = std::stoi(line.substr(3));
    } else if (line.rfind("001", 0) == 0) {
      if (line.size() < 52) throw Error("truncated TRF player line");
      const int start = std::stoi(line.substr(4, 4));
      const int elo = std::stoi(line.substr(48, 4));
      if (start != course.player_count() + 1) throw Error("TRF player lines must be ordered by starting rank");
      course.players.push_back(Player{start - 1, elo});
      std::vector<Block> mine;
      for (std::size_t pos = 91; pos < line.size(); pos += 10) {
        std::string chunk = line.substr(pos, 8);
        chunk.resize(8, ' ');
        const std::string opp = chunk.substr(0, 4);
        if (opp == "    ") {
          mine.push_back({-2, ' ', ' '});
          continue;
        }
        mine.push_back({std::stoi(opp) - 1, chunk[5], chunk[7]});
      }
      blocks.push_back(std::move(mine));
    }
  }
  std::size_t round_count = 0;
  for (const auto& b : blocks) round_count = std::max(round_count, b.size());
  if (course.total_rounds < static_cast<int>(round_count)) course.total_rounds = static_cast<int>(round_count);

  for (std::size_t r = 0; r < round_count; ++r) {
    Round round;
    round.index = static_cast<int>(r) + 1;
    for (std::size_t p = 0; p < blocks.size(); ++p) {
      if (r >= blocks[p].size()) continue;
      const Block& b = blocks[p][r];
      if (b.opponent == -2) continue;
      if (b.opponent == -1) {
        round.bye = static_cast<PlayerId>(p);
        continue;
      }
      if (b.color != 'w') continue;
      PairedGame g{static_cast<PlayerId>(p), b.opponent, std::nullopt, std::nullopt};
      switch (b.result) {
        case '1': g.result = GameResult::WhiteWins; break;
        case '0': g.result = GameResult::BlackWins; break;
        case '=': g.result = GameResult::Draw; break;
        case ' ': break;
        default: throw Error(std::string("unsupported TRF result code '") + b.result + "'");
      }
      round.games.push_back(g);
    }
    Course before = course;
    before.rounds.resize(r);
    bool ordered = std::all_of(before.rounds.begin(), before.rounds.end(), [](const Round& x) { return x.complete(); });
    if (ordered) order_boards(PairingState(before), round.games);
    course.rounds.push_back(std::move(round));
  }
  return course;
}

}  // namespace swissgambit
