#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "swissgambit/gambit.hpp"

using namespace swissgambit;
using namespace swissgambit::testing;

namespace {

TournamentModel model_of(ModelKind kind) {
  static const SurrogateParams params = calibrated_params();
  return TournamentModel{kind, params, PairingSystem::Dutch};
}

OptionEvidence evidence(ResultOption o, std::vector<int> ranks) {
  OptionEvidence e;
  e.option = o;
  e.ranks = std::move(ranks);
  const Summary s = summarize(std::span<const int>(e.ranks));
  e.mean_rank = s.mean;
  e.median_rank = s.median;
  return e;
}

Course played_course(int players, int rounds, ModelKind kind, std::uint64_t seed) {
  std::vector<Player> field;
  Stream strengths(seed);
  for (int i = 0; i < players; ++i) field.push_back({i, static_cast<Elo>(2400 - 25 * i - strengths.uniform_int(0, 20))});
  Course c;
  c.players = field;
  c.total_rounds = rounds;
  Stream s(seed + 1);
  return complete_course(c, model_of(kind), default_resolution(kind), &s);
}

}  // namespace

TEST(Options, PerActualResult) {
  EXPECT_EQ(result_options(ResultOption::Win),
            (std::vector<ResultOption>{ResultOption::Win, ResultOption::Draw, ResultOption::Lose}));
  EXPECT_EQ(result_options(ResultOption::Draw), (std::vector<ResultOption>{ResultOption::Draw, ResultOption::Lose}));
  EXPECT_TRUE(result_options(ResultOption::Lose).empty());
}

TEST(Options, ColorMapping) {
  for (Color c : {Color::White, Color::Black})
    for (ResultOption o : {ResultOption::Win, ResultOption::Draw, ResultOption::Lose})
      EXPECT_EQ(option_for(result_for(o, c), c), o);
  EXPECT_EQ(result_for(ResultOption::Win, Color::Black), GameResult::BlackWins);
  EXPECT_EQ(option_for(GameResult::WhiteWins, Color::Black), ResultOption::Lose);
}

TEST(Heuristics, ParseAndModelFit) {
  EXPECT_EQ(parse_heuristic("p-value"), Heuristic::PValue);
  EXPECT_THROW(parse_heuristic("bogus"), Error);
  EXPECT_TRUE(heuristic_fits_model(Heuristic::OptimalDeterministic, ModelKind::Deterministic));
  EXPECT_FALSE(heuristic_fits_model(Heuristic::Mean, ModelKind::Deterministic));
  EXPECT_TRUE(heuristic_fits_model(Heuristic::Median, ModelKind::Probabilistic));
}

TEST(DecisionPoints, WinnersAndBothDrawers) {
  Course c = empty_course(4, 2);
  add_round(c, {game(0, 2, GameResult::WhiteWins), game(3, 1, GameResult::Draw)});
  add_round(c, {game(1, 0, GameResult::BlackWins), game(2, 3, GameResult::Draw)});
  const auto pts = decision_points(c, 0, 1);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[0].player, 0);
  EXPECT_EQ(pts[0].actual, ResultOption::Win);
  EXPECT_EQ(pts[1].actual, ResultOption::Draw);
  EXPECT_EQ(pts[2].actual, ResultOption::Draw);
  EXPECT_EQ(pts[0].prefix.rounds_played(), 1);
  EXPECT_EQ(decision_points(c, 0, 2).size(), 6u);
}

TEST(DecisionPoints, WithOptionRewritesOnlyOwnGame) {
  Course c = empty_course(4, 2);
  add_round(c, {game(0, 2, GameResult::WhiteWins), game(3, 1, GameResult::Draw)});
  const DecisionPoint pt{0, 1, 0, 0, ResultOption::Win, c};
  const Course lose = with_option(pt, ResultOption::Lose);
  EXPECT_EQ(lose.rounds[0].games[0].result, GameResult::BlackWins);
  EXPECT_EQ(lose.rounds[0].games[1], c.rounds[0].games[1]);
}

// The optimal heuristic agrees with direct simulation of every option.
TEST(Deterministic, ChoosesBestSimulatedOption) {
  const GambitContext ctx{model_of(ModelKind::Deterministic), 200, 0.05, 1};
  int gambits = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Course c = played_course(16, 5, ModelKind::Deterministic, seed);
    for (const DecisionPoint& pt : decision_points(c, 0, 3)) {
      int best_rank = 1 << 30;
      ResultOption best = pt.actual;
      for (ResultOption o : result_options(pt.actual)) {
        Course sim = with_option(pt, o);
        while (sim.rounds_played() < sim.total_rounds) {
          Round r = pair_round(sim);
          for (PairedGame& g : r.games)
            g.result = deterministic_result(sim.player(g.white).elo, sim.player(g.black).elo, ctx.model.params);
          sim.rounds.push_back(r);
        }
        const int rank = final_ranking(sim).rank_of(pt.player);
        if (rank < best_rank) {
          best_rank = rank;
          best = o;
        }
      }
      const GambitVerdict v = decide(pt, Heuristic::OptimalDeterministic, ctx);
      ASSERT_EQ(v.chosen, best);
      EXPECT_EQ(v.beneficial, best != pt.actual);
      EXPECT_EQ(v.completions, static_cast<std::int64_t>(result_options(pt.actual).size()));
      gambits += v.beneficial;
    }
  }
  EXPECT_GT(gambits, 0);
}

TEST(Deterministic, RejectsProbabilisticModel) {
  const Course c = played_course(8, 3, ModelKind::Probabilistic, 3);
  const GambitContext ctx{model_of(ModelKind::Probabilistic), 200, 0.05, 1};
  EXPECT_THROW(decide(decision_points(c, 0, 1).front(), Heuristic::OptimalDeterministic, ctx), Error);
}

TEST(Verdicts, PValuePicksSignificantOption) {
  const std::vector<OptionEvidence> ev = {evidence(ResultOption::Win, {5, 6, 5, 6, 5, 6, 5, 6}),
                                          evidence(ResultOption::Draw, {1, 2, 1, 2, 1, 2, 1, 2}),
                                          evidence(ResultOption::Lose, {4, 5, 4, 5, 4, 5, 4, 5})};
  const GambitVerdict v = verdict_pvalue(ResultOption::Win, ev, 0.05);
  EXPECT_TRUE(v.beneficial);
  EXPECT_EQ(v.chosen, ResultOption::Draw);
  ASSERT_TRUE(v.evidence_for(ResultOption::Draw).p_value);
  EXPECT_LT(*v.evidence_for(ResultOption::Draw).p_value, *v.evidence_for(ResultOption::Lose).p_value);
  EXPECT_FALSE(v.evidence_for(ResultOption::Win).p_value);
}

TEST(Verdicts, AlphaBounds) {
  const std::vector<OptionEvidence> ev = {evidence(ResultOption::Draw, {3, 4, 3, 4}),
                                          evidence(ResultOption::Lose, {3, 4, 3, 4})};
  // Identical samples give p = 1/2: only alpha = 1 accepts the gambit.
  EXPECT_FALSE(verdict_pvalue(ResultOption::Draw, ev, 0.0).beneficial);
  EXPECT_FALSE(verdict_pvalue(ResultOption::Draw, ev, 0.5).beneficial);
  EXPECT_TRUE(verdict_pvalue(ResultOption::Draw, ev, 1.0).beneficial);
  const std::vector<OptionEvidence> strong = {evidence(ResultOption::Draw, {9, 9, 9, 9}),
                                              evidence(ResultOption::Lose, {1, 1, 1, 1})};
  EXPECT_FALSE(verdict_pvalue(ResultOption::Draw, strong, 0.0).beneficial);
}

TEST(Verdicts, MeanAndMedianDiffer) {
  // Mean favors the draw, median does not.
  const std::vector<OptionEvidence> ev = {evidence(ResultOption::Win, {2, 2, 2, 2, 9}),
                                          evidence(ResultOption::Draw, {1, 1, 2, 3, 3})};
  EXPECT_TRUE(verdict_mean(ResultOption::Win, ev).beneficial);
  EXPECT_FALSE(verdict_median(ResultOption::Win, ev).beneficial);
  const std::vector<OptionEvidence> tied = {evidence(ResultOption::Win, {2, 4}), evidence(ResultOption::Draw, {3, 3})};
  EXPECT_FALSE(verdict_mean(ResultOption::Win, tied).beneficial);
}

TEST(Sampling, DecideAllMatchesDecide) {
  const Course c = played_course(8, 3, ModelKind::Probabilistic, 9);
  const GambitContext ctx{model_of(ModelKind::Probabilistic), 20, 0.05, 4};
  const Heuristic hs[] = {Heuristic::PValue, Heuristic::Mean, Heuristic::Median, Heuristic::ExpectedValue};
  for (const DecisionPoint& pt : decision_points(c, 2, 1)) {
    const auto all = decide_all(pt, hs, ctx);
    for (std::size_t i = 0; i < 4; ++i) {
      const GambitVerdict one = decide(pt, hs[i], ctx);
      EXPECT_EQ(all[i].chosen, one.chosen);
      EXPECT_EQ(all[i].completions, one.completions);
      for (std::size_t k = 0; k < one.evidence.size(); ++k) EXPECT_EQ(all[i].evidence[k].ranks, one.evidence[k].ranks);
    }
  }
}

TEST(Sampling, CompletionCountAndReproducibility) {
  const Course c = played_course(8, 3, ModelKind::Probabilistic, 10);
  const GambitContext ctx{model_of(ModelKind::Probabilistic), 30, 0.05, 4};
  for (const DecisionPoint& pt : decision_points(c, 0, 1)) {
    const GambitVerdict a = decide(pt, Heuristic::Mean, ctx);
    const GambitVerdict b = decide(pt, Heuristic::Mean, ctx);
    EXPECT_EQ(a.completions, 30 * static_cast<std::int64_t>(result_options(pt.actual).size()));
    EXPECT_EQ(a.evidence.front().ranks, b.evidence.front().ranks);
    for (const auto& e : a.evidence) EXPECT_EQ(e.ranks.size(), 30u);
  }
  GambitContext tiny = ctx;
  tiny.sample_size = 1;
  EXPECT_THROW(decide(decision_points(c, 0, 1).front(), Heuristic::Mean, tiny), Error);
}

// Four players, one round left: two games with three outcomes each.
TEST(ExpectedRank, ExactEnumerationMatchesNineLeafOracle) {
  const TournamentModel model = model_of(ModelKind::Probabilistic);
  Course c = empty_course(4, 2);
  add_round(c, {game(0, 2, GameResult::Draw), game(3, 1, GameResult::WhiteWins)});
  const Round next = pair_round(c);
  ASSERT_EQ(next.games.size(), 2u);
  const GameResult all[] = {GameResult::WhiteWins, GameResult::Draw, GameResult::BlackWins};
  auto prob = [&](const PairedGame& g, GameResult r) {
    const OutcomeDistribution d = distribution(c.player(g.white).elo, c.player(g.black).elo, model.params);
    return r == GameResult::WhiteWins ? d.p_white_win : r == GameResult::Draw ? d.p_draw : d.p_black_win;
  };
  for (PlayerId p = 0; p < 4; ++p) {
    double expected = 0.0, mass = 0.0;
    for (GameResult r0 : all)
      for (GameResult r1 : all) {
        Course done = c;
        Round r = next;
        r.games[0].result = r0;
        r.games[1].result = r1;
        done.rounds.push_back(r);
        const double w = prob(next.games[0], r0) * prob(next.games[1], r1);
        mass += w;
        expected += w * final_ranking(done).rank_of(p);
      }
    EXPECT_NEAR(mass, 1.0, 1e-12);
    EXPECT_NEAR(expected_final_rank(c, p, model, ExactEnumeration{}), expected, 1e-12) << "player " << p;
    EXPECT_NEAR(expected_final_rank(c, p, model, SampledCompletion{20000, 3}), expected, 0.03) << "player " << p;
  }
  EXPECT_THROW(expected_final_rank(c, 0, model, ExactEnumeration{8}), Error);
}

TEST(ExpectedRank, DeterministicModelHasOneCompletion) {
  const TournamentModel model = model_of(ModelKind::Deterministic);
  Course c = empty_course(4, 2);
  add_round(c, {game(0, 2, GameResult::WhiteWins), game(3, 1, GameResult::Draw)});
  const Course done = complete_course(c, model, Resolution::Deterministic, nullptr);
  EXPECT_DOUBLE_EQ(expected_final_rank(c, 0, model, ExactEnumeration{}), final_ranking(done).rank_of(0));
}

TEST(ExpectedValue, ResolvesWithFractionalScores) {
  const TournamentModel model = model_of(ModelKind::Probabilistic);
  Course c = empty_course(4, 2);
  add_round(c, {game(0, 2, GameResult::WhiteWins), game(3, 1, GameResult::Draw)});
  const Course done = complete_course(c, model, Resolution::ExpectedValue, nullptr);
  ASSERT_TRUE(done.is_complete());
  const PairedGame& g = done.rounds[1].games[0];
  ASSERT_TRUE(g.expected_white);
  EXPECT_EQ(g.expected_white->units(),
            Score::from_share(expected_score(done.player(g.white).elo, done.player(g.black).elo, model.params)).units());
}
