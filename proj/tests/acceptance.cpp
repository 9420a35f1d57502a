// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "swissgambit/harness.hpp"

using namespace swissgambit;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt("%.4f", *v) : "n/a"; }

const SurrogateParams& params() {
  static const SurrogateParams p = calibrated_params();
  return p;
}

void calibration() {
  const auto start = std::chrono::steady_clock::now();
  const SurrogateParams p = fit_surrogate(reference_anchors());
  const double secs = seconds_since(start);
  const double residual = max_residual(reference_anchors(), p);
  report("calibration", residual <= 0.02 && secs < 1.0,
         "max residual " + fmt("%.5f", residual) + " (limit 0.02), fit " + fmt("%.4f", secs) + " s");
}

void deterministic_rule() {
  const GameResult a = deterministic_result(1200, 1400, params());
  const GameResult b = deterministic_result(2200, 2400, params());
  report("deterministic-rule", a == GameResult::BlackWins && b == GameResult::Draw,
         std::string("1200w-1400b -> ") + to_string(a) + ", 2200w-2400b -> " + to_string(b));
}

double mean_draw_fraction(ModelKind kind) {
  ExperimentConfig c;
  c.elo_low = 1400;
  c.elo_high = 2200;
  c.tournaments = 200;
  c.model = kind;
  double sum = 0.0;
  for (int t = 0; t < c.tournaments; ++t) sum += draw_fraction(simulate_tournament(c, params(), t).course);
  return sum / c.tournaments;
}

void draw_coupling() {
  const auto start = std::chrono::steady_clock::now();
  const double det = mean_draw_fraction(ModelKind::Deterministic);
  const double prob = mean_draw_fraction(ModelKind::Probabilistic);
  const double secs = seconds_since(start);
  report("draw-coupling", std::abs(det - prob) <= 0.05 && secs < 120.0,
         "deterministic " + fmt("%.4f", det) + ", probabilistic " + fmt("%.4f", prob) + ", |diff| " +
             fmt("%.4f", std::abs(det - prob)) + " (limit 0.05), " + fmt("%.1f", secs) + " s");
}

std::set<std::pair<int, int>> first_round(PairingSystem s) {
  Course c;
  for (int i = 0; i < 8; ++i) c.players.push_back({i, static_cast<Elo>(2400 - 50 * i)});
  c.total_rounds = 5;
  std::set<std::pair<int, int>> out;
  for (const PairedGame& g : pair_round(c, s).games) out.insert({std::min(g.white, g.black) + 1, std::max(g.white, g.black) + 1});
  return out;
}

void pairing_golden() {
  using S = std::set<std::pair<int, int>>;
  const bool dutch = first_round(PairingSystem::Dutch) == S{{1, 5}, {2, 6}, {3, 7}, {4, 8}};
  const bool burstein = first_round(PairingSystem::Burstein) == S{{1, 8}, {2, 7}, {3, 6}, {4, 5}};
  const bool monrad = first_round(PairingSystem::Monrad) == S{{1, 2}, {3, 4}, {5, 6}, {7, 8}};
  int invalid = 0;
  for (int t = 0; t < 1000; ++t) {
    Course c;
    for (int i = 0; i < 32; ++i) c.players.push_back({i, static_cast<Elo>(2600 - 50 * i)});
    c.total_rounds = 5;
    Stream s(derive_seed({99, static_cast<std::uint64_t>(t)}));
    while (c.rounds_played() < c.total_rounds) {
      Round r = pair_round(c);
      for (PairedGame& g : r.games) g.result = kAllResults[s.uniform_int(0, 2)];
      c.rounds.push_back(std::move(r));
    }
    if (!validate_course(c).empty()) ++invalid;
  }
  report("pairing-golden", dutch && burstein && monrad && invalid == 0,
         std::string("dutch ") + (dutch ? "ok" : "wrong") + ", burstein " + (burstein ? "ok" : "wrong") + ", monrad " +
             (monrad ? "ok" : "wrong") + ", invalid random courses " + std::to_string(invalid) + "/1000");
}

void kendall() {
  const double diff = tau_from_discordant(4, 8) - tau_from_discordant(1, 8);
  const bool exact = diff == -2.0 / 7.0;
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> size(1, 64);
  int mismatches = 0;
  for (int k = 0; k < 1000; ++k) {
    const int n = size(rng);
    std::vector<PlayerId> a(static_cast<std::size_t>(n)), b;
    std::iota(a.begin(), a.end(), 0);
    b = a;
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    const Ranking ra(a), rb(b);
    std::int64_t brute = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q)
        if ((ra.rank_of(p) < ra.rank_of(q)) != (rb.rank_of(p) < rb.rank_of(q))) ++brute;
    if (brute != discordant_pairs(ra, rb)) ++mismatches;
  }
  report("kendall", exact && mismatches == 0,
         "n=8, D 1 -> 4: tau difference " + fmt("%.6f", diff) + " (required -2/7 = " + fmt("%.6f", -2.0 / 7.0) +
             "), merge-sort vs brute force mismatches " + std::to_string(mismatches) + "/1000");
}

double t_tail_by_quadrature(double t, double df) {
  const double log_norm = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) - 0.5 * std::log(df * M_PI);
  auto density = [&](double x) { return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(x * x / df)); };
  const double upper = std::abs(t);
  const int intervals = 200000;
  const double h = upper / intervals;
  double sum = density(0.0) + density(upper);
  for (int i = 1; i < intervals; ++i) sum += density(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  const double mass = sum * h / 3.0;
  return t >= 0.0 ? 0.5 - mass : 0.5 + mass;
}

void welch() {
  double worst = 0.0;
  for (double df : {1.0, 5.0, 30.0, 199.0})
    for (double t : {0.0, 0.5, 1.0, 2.0, 4.0})
      worst = std::max(worst, std::abs(student_t_upper_tail(t, df) - t_tail_by_quadrature(t, df)));
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> rank(1, 32);
  int rejections = 0;
  for (int k = 0; k < 10000; ++k) {
    std::vector<int> g(50), a(50);
    for (int& x : g) x = rank(rng);
    for (int& x : a) x = rank(rng);
    if (welch_one_tailed(std::span<const int>(g), std::span<const int>(a)).p_one_tailed < 0.05) ++rejections;
  }
  const double frac = rejections / 10000.0;
  report("welch", worst <= 1e-8 && frac >= 0.03 && frac <= 0.07,
         "max |p - oracle| " + fmt("%.2e", worst) + " (limit 1e-8), null rejection rate " + fmt("%.4f", frac) +
             " (band [0.03, 0.07])");
}

void accounting() {
  ExperimentConfig det;
  const TournamentRun run = simulate_tournament(det, params(), 0);
  const std::int64_t games = scan_gambits(run, det, params()).evaluated_games;
  ExperimentConfig prob;
  prob.model = ModelKind::Probabilistic;
  const TournamentRun prun = simulate_tournament(prob, params(), 0);
  const ScanResult scan = scan_gambits(prun, prob, params());
  report("accounting", games == 48 && scan.evaluated_games == 48 && scan.completions >= 28800,
         "scanned games " + std::to_string(games) + " (det), " + std::to_string(scan.evaluated_games) +
             " (prob); prefix simulations at sample 200: " + std::to_string(scan.completions) + " (minimum 28800)");
}

void parallel_determinism() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig c;
  c.tournaments = 10;
  c.workers = 1;
  const auto dir = std::filesystem::temp_directory_path() / "swissgambit_acceptance";
  std::filesystem::remove_all(dir);
  const CampaignResult one = run_campaign(c, params());
  c.workers = 8;
  const CampaignResult eight = run_campaign(c, params());
  write_campaign(one, params(), dir / "w1");
  write_campaign(eight, params(), dir / "w8");
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const bool same = slurp(dir / "w1" / "gambits.csv") == slurp(dir / "w8" / "gambits.csv") &&
                    slurp(dir / "w1" / "tournaments.csv") == slurp(dir / "w8" / "tournaments.csv");
  std::filesystem::remove_all(dir);
  const double secs = seconds_since(start);
  report("parallel-determinism", same && secs < 60.0,
         std::string(same ? "byte-identical" : "outputs differ") + " with 1 and 8 workers, " + fmt("%.1f", secs) + " s");
}

CampaignResult det_campaign(int rounds, Elo lo, Elo hi) {
  ExperimentConfig c;
  c.tournaments = 200;
  c.rounds = rounds;
  c.elo_low = lo;
  c.elo_high = hi;
  const CampaignResult r = run_campaign(c, params());
  std::printf("  det rounds=%d range=[%d,%d]: gambits %.3f, total rank diff %.3f, mean rank diff %s, "
              "tau diff %s, %.1f s\n",
              rounds, lo, hi, r.mean_gambit_possibilities, r.mean_total_rank_difference,
              fmt_opt(r.mean_rank_difference).c_str(), fmt_opt(r.mean_tau_difference).c_str(), r.seconds);
  std::fflush(stdout);
  return r;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  calibration();
  deterministic_rule();
  draw_coupling();
  pairing_golden();
  kendall();
  welch();
  accounting();
  parallel_determinism();

  // Deterministic trends.
  std::vector<CampaignResult> by_rounds;
  for (int r : {5, 7, 9, 11}) by_rounds.push_back(det_campaign(r, 1000, 2600));
  std::vector<CampaignResult> by_range;
  for (int size : {800, 1200}) by_range.push_back(det_campaign(5, 1800 - size / 2, 1800 + size / 2));
  by_range.push_back(by_rounds.front());  // 1600 around 1800 is the default range
  bool increasing = true;
  for (std::size_t i = 1; i < by_rounds.size(); ++i)
    increasing = increasing && by_rounds[i].mean_gambit_possibilities > by_rounds[i - 1].mean_gambit_possibilities;
  const double g5 = by_rounds.front().mean_gambit_possibilities;
  const double g11 = by_rounds.back().mean_gambit_possibilities;
  const double trd5 = by_rounds.front().mean_total_rank_difference;
  const double trd11 = by_rounds.back().mean_total_rank_difference;
  bool range_increasing = true;
  for (std::size_t i = 1; i < by_range.size(); ++i)
    range_increasing =
        range_increasing && by_range[i].mean_gambit_possibilities > by_range[i - 1].mean_gambit_possibilities;
  const bool trend_ok = increasing && g5 >= 5 && g5 <= 25 && g11 >= 25 && g11 <= 90 && trd5 < 0 && trd11 < 0 &&
                        std::abs(trd11) >= 3 * std::abs(trd5) && range_increasing;
  std::ostringstream trend;
  trend << "gambits by rounds 5/7/9/11: " << fmt("%.2f", by_rounds[0].mean_gambit_possibilities) << "/"
        << fmt("%.2f", by_rounds[1].mean_gambit_possibilities) << "/"
        << fmt("%.2f", by_rounds[2].mean_gambit_possibilities) << "/" << fmt("%.2f", g11)
        << (increasing ? " (increasing)" : " (not increasing)") << "; total rank diff 5: " << fmt("%.2f", trd5)
        << ", 11: " << fmt("%.2f", trd11) << " (ratio " << fmt("%.2f", trd5 != 0 ? trd11 / trd5 : 0.0)
        << "); gambits by range 800/1200/1600: " << fmt("%.2f", by_range[0].mean_gambit_possibilities) << "/"
        << fmt("%.2f", by_range[1].mean_gambit_possibilities) << "/"
        << fmt("%.2f", by_range[2].mean_gambit_possibilities);
  report("deterministic-trends", trend_ok, trend.str());

  // Probabilistic properties; one set of tournaments shared by the three heuristics.
  ExperimentConfig prob;
  prob.model = ModelKind::Probabilistic;
  prob.tournaments = 100;
  prob.sample_size = 50;
  const Heuristic hs[] = {Heuristic::PValue, Heuristic::Mean, Heuristic::Median};
  const auto results = run_campaigns(prob, params(), hs);
  const CampaignResult& pv = results[0];
  const CampaignResult& mean = results[1];
  const CampaignResult& median = results[2];
  std::printf("  prob p-value: gambits %.3f, mean rank diff %s, tau diff %s; mean: gambits %.3f, mean rank diff %s; "
              "median: gambits %.3f, mean rank diff %s; %.1f s\n",
              pv.mean_gambit_possibilities, fmt_opt(pv.mean_rank_difference).c_str(),
              fmt_opt(pv.mean_tau_difference).c_str(), mean.mean_gambit_possibilities,
              fmt_opt(mean.mean_rank_difference).c_str(), median.mean_gambit_possibilities,
              fmt_opt(median.mean_rank_difference).c_str(), pv.seconds);
  const double gp = pv.mean_gambit_possibilities;
  const bool few = gp < 1.0 && gp < 0.1 * g5;
  const bool centered = pv.mean_rank_difference && *pv.mean_rank_difference >= -1.0 && *pv.mean_rank_difference <= 1.0;
  auto worse = [&](const CampaignResult& r) {
    return r.mean_rank_difference && *r.mean_rank_difference >= 0.0 &&
           (!pv.mean_rank_difference || *r.mean_rank_difference > *pv.mean_rank_difference);
  };
  report("probabilistic-properties", few && centered && worse(mean) && worse(median),
         "p-value gambits/tournament " + fmt("%.3f", gp) + " (need < 1 and < " + fmt("%.3f", 0.1 * g5) +
             "), mean rank diff " + fmt_opt(pv.mean_rank_difference) + " (band [-1, 1]); mean heuristic " +
             fmt_opt(mean.mean_rank_difference) + ", median heuristic " + fmt_opt(median.mean_rank_difference) +
             " (need >= 0 and above p-value)");

  const auto& det5 = by_rounds.front();
  auto in_band = [](const std::optional<double>& v) { return v && *v >= -0.05 && *v <= 0.01; };
  report("ranking-quality", in_band(det5.mean_tau_difference) && in_band(pv.mean_tau_difference),
         "mean tau diff deterministic " + fmt_opt(det5.mean_tau_difference) + ", probabilistic " +
             fmt_opt(pv.mean_tau_difference) + " (band [-0.05, 0.01])");

  std::printf("%d of 11 criteria failed, %.1f s total\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
