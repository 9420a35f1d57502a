#pragma once

// Match outcome model. A logistic expected score with a white advantage that
// depends on the mean rating of the pair, and a draw probability whose intensity
// grows with mean rating. The five parameters are calibrated to a small table of
// reference outcome probabilities.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "swissgambit/core.hpp"
#include "swissgambit/rng.hpp"

namespace swissgambit {

class CalibrationError : public Error {
 public:
  using Error::Error;
};

struct OutcomeDistribution {
  double p_white_win = 0.0;
  double p_black_win = 0.0;
  double p_draw = 0.0;

  bool valid(double tol = 1e-12) const {
    auto in01 = [](double p) { return p >= 0.0 && p <= 1.0; };
    return in01(p_white_win) && in01(p_black_win) && in01(p_draw) &&
           std::abs(p_white_win + p_black_win + p_draw - 1.0) <= tol;
  }
};

// Elo offsets are measured from this reference mean rating.
inline constexpr double kReferenceElo = 2000.0;

struct SurrogateParams {
  double sigma = 400.0;  // logistic scale, Elo points
  double c0 = 0.0;       // white advantage at the reference rating, Elo points
  double c1 = 0.0;       // change of white advantage per Elo point of mean rating
  double d0 = 0.0;       // draw intensity at the reference rating
  double d1 = 0.0;       // change of draw intensity per Elo point of mean rating
  double residual = 0.0; // max absolute probability residual of the fit that produced these

  bool valid() const { return sigma > 0.0 && std::isfinite(sigma) && std::isfinite(c0) && std::isfinite(c1) &&
                              std::isfinite(d0) && std::isfinite(d1); }

  double white_advantage(double mean_elo) const { return c0 + c1 * (mean_elo - kReferenceElo); }
  double draw_intensity(double mean_elo) const { return d0 + d1 * (mean_elo - kReferenceElo); }
};

inline void to_json(nlohmann::json& j, const SurrogateParams& p) {
  j = nlohmann::json{{"sigma", p.sigma}, {"c0", p.c0}, {"c1", p.c1},
                     {"d0", p.d0},       {"d1", p.d1}, {"residual", p.residual}};
}

inline void from_json(const nlohmann::json& j, SurrogateParams& p) {
  j.at("sigma").get_to(p.sigma);
  j.at("c0").get_to(p.c0);
  j.at("c1").get_to(p.c1);
  j.at("d0").get_to(p.d0);
  j.at("d1").get_to(p.d1);
  p.residual = j.value("residual", 0.0);
  if (!p.valid()) throw CalibrationError("invalid surrogate parameters");
}

inline void save_params(const SurrogateParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << nlohmann::json(p).dump(2) << '\n';
}

inline SurrogateParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  return nlohmann::json::parse(in).get<SurrogateParams>();
}

// Expected score of white (win = 1, draw = 1/2).
inline double expected_score(Elo white_elo, Elo black_elo, const SurrogateParams& params) {
  const double delta = static_cast<double>(white_elo - black_elo);
  const double mean = 0.5 * static_cast<double>(white_elo + black_elo);
  return 1.0 / (1.0 + std::pow(10.0, -(delta + params.white_advantage(mean)) / params.sigma));
}

inline OutcomeDistribution distribution(Elo white_elo, Elo black_elo, const SurrogateParams& params) {
  const double e = expected_score(white_elo, black_elo, params);
  const double mean = 0.5 * static_cast<double>(white_elo + black_elo);
  const double raw = params.draw_intensity(mean) * 4.0 * e * (1.0 - e);
  const double draw = std::clamp(raw, 0.0, 2.0 * std::min(e, 1.0 - e));
  OutcomeDistribution d;
  d.p_draw = draw;
  d.p_white_win = std::max(0.0, e - 0.5 * draw);
  d.p_black_win = std::max(0.0, 1.0 - e - 0.5 * draw);
  return d;
}

// Inverse-CDF draw in the fixed category order WhiteWins, Draw, BlackWins.
inline GameResult sample_result(const OutcomeDistribution& dist, Stream& stream) {
  const double u = stream.uniform();
  if (u < dist.p_white_win) return GameResult::WhiteWins;
  if (u < dist.p_white_win + dist.p_draw) return GameResult::Draw;
  return GameResult::BlackWins;
}

inline constexpr double kDrawThreshold = 0.20;

// Draw when the draw probability reaches the threshold, otherwise the stronger player wins.
inline GameResult deterministic_result(Elo white_elo, Elo black_elo, const SurrogateParams& params) {
  if (distribution(white_elo, black_elo, params).p_draw >= kDrawThreshold) return GameResult::Draw;
  if (white_elo == black_elo) return GameResult::Draw;
  return white_elo > black_elo ? GameResult::WhiteWins : GameResult::BlackWins;
}

struct CalibrationAnchor {
  Elo white_elo = 0;
  Elo black_elo = 0;
  OutcomeDistribution target;
};

// Reference outcome probabilities the surrogate is calibrated against.
inline std::vector<CalibrationAnchor> reference_anchors() {
  return {
      {1200, 1400, {0.26, 0.57, 0.17}},
      {2200, 2400, {0.14, 0.55, 0.31}},
      {2400, 2200, {0.63, 0.11, 0.26}},
  };
}

inline double max_residual(const std::vector<CalibrationAnchor>& anchors, const SurrogateParams& params) {
  double worst = 0.0;
  for (const auto& a : anchors) {
    const OutcomeDistribution d = distribution(a.white_elo, a.black_elo, params);
    worst = std::max({worst, std::abs(d.p_white_win - a.target.p_white_win),
                      std::abs(d.p_black_win - a.target.p_black_win), std::abs(d.p_draw - a.target.p_draw)});
  }
  return worst;
}

inline constexpr double kCalibrationTolerance = 0.02;

namespace detail {

struct WeightedAnchor {
  CalibrationAnchor anchor;
  double weight;
};

// Parameters are optimized in scaled coordinates so the simplex steps are comparable.
inline constexpr std::array<double, 5> kParamScale = {100.0, 10.0, 0.01, 0.1, 1e-4};

inline SurrogateParams unpack(const gsl_vector* x) {
  SurrogateParams p;
  p.sigma = gsl_vector_get(x, 0) * kParamScale[0];
  p.c0 = gsl_vector_get(x, 1) * kParamScale[1];
  p.c1 = gsl_vector_get(x, 2) * kParamScale[2];
  p.d0 = gsl_vector_get(x, 3) * kParamScale[3];
  p.d1 = gsl_vector_get(x, 4) * kParamScale[4];
  return p;
}

inline double fit_loss(const gsl_vector* x, void* data) {
  const auto& anchors = *static_cast<const std::vector<WeightedAnchor>*>(data);
  const SurrogateParams p = unpack(x);
  if (!(p.sigma > 1.0)) return 1e6;
  double loss = 0.0;
  for (const auto& wa : anchors) {
    const OutcomeDistribution d = distribution(wa.anchor.white_elo, wa.anchor.black_elo, p);
    const double rw = d.p_white_win - wa.anchor.target.p_white_win;
    const double rb = d.p_black_win - wa.anchor.target.p_black_win;
    const double rd = d.p_draw - wa.anchor.target.p_draw;
    loss += wa.weight * (rw * rw + rb * rb + rd * rd);
  }
  return loss;
}

// Identical anchors are merged and weights normalized, so duplicating the input
// leaves the objective bit-for-bit unchanged.
inline std::vector<WeightedAnchor> canonical_anchors(const std::vector<CalibrationAnchor>& anchors) {
  std::map<std::tuple<Elo, Elo, double, double, double>, int> counts;
  for (const auto& a : anchors)
    ++counts[{a.white_elo, a.black_elo, a.target.p_white_win, a.target.p_black_win, a.target.p_draw}];
  std::vector<WeightedAnchor> out;
  const double total = static_cast<double>(anchors.size());
  for (const auto& [key, count] : counts) {
    auto [w, b, pw, pb, pd] = key;
    out.push_back({{w, b, {pw, pb, pd}}, static_cast<double>(count) / total});
  }
  return out;
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

inline SurrogateParams nelder_mead(std::vector<WeightedAnchor>& anchors, const std::array<double, 5>& start,
                                   double* loss_out) {
  gsl_multimin_function fn{&fit_loss, 5, &anchors};
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(5));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(5));
  for (std::size_t i = 0; i < 5; ++i) {
    gsl_vector_set(x.get(), i, start[i] / kParamScale[i]);
    gsl_vector_set(step.get(), i, 0.5);
  }
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 5));
  gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), step.get());
  for (int iter = 0; iter < 20000; ++iter) {
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), 1e-11) == GSL_SUCCESS) break;
  }
  *loss_out = gsl_multimin_fminimizer_minimum(m.get());
  return unpack(gsl_multimin_fminimizer_x(m.get()));
}

}  // namespace detail

// Least-squares fit of the five surrogate parameters to the anchors by a
// restarted Nelder-Mead search. Throws CalibrationError when the best fit
// misses any anchor probability by more than kCalibrationTolerance.
inline SurrogateParams fit_surrogate(const std::vector<CalibrationAnchor>& anchors) {
  if (anchors.empty()) throw CalibrationError("at least one anchor is required");
  for (const auto& a : anchors)
    if (!a.target.valid(1e-9)) throw CalibrationError("anchor target is not a probability distribution");

  auto weighted = detail::canonical_anchors(anchors);
  gsl_error_handler_t* previous = gsl_set_error_handler_off();

  SurrogateParams best;
  double best_loss = INFINITY;
  for (double sigma0 : {300.0, 400.0, 500.0}) {
    for (double d00 : {0.2, 0.4}) {
      std::array<double, 5> start = {sigma0, 30.0, 0.0, d00, 0.0};
      // Two passes: the restart collapses a degenerate simplex.
      double loss = 0.0;
      SurrogateParams p = detail::nelder_mead(weighted, start, &loss);
      start = {p.sigma, p.c0, p.c1, p.d0, p.d1};
      p = detail::nelder_mead(weighted, start, &loss);
      if (loss < best_loss) {
        best_loss = loss;
        best = p;
      }
    }
  }
  gsl_set_error_handler(previous);

  best.residual = max_residual(anchors, best);
  if (!best.valid() || !(best.residual <= kCalibrationTolerance))
    throw CalibrationError("surrogate fit residual " + std::to_string(best.residual) + " exceeds tolerance");
  return best;
}

// Fit against the built-in reference table.
inline SurrogateParams calibrated_params() {
  static const SurrogateParams params = fit_surrogate(reference_anchors());
  return params;
}

}  // namespace swissgambit
