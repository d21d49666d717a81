#include "rankone/construction.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace rankone {

void validate_params(const FrequencyParams& p, double betaCap) {
  if (!(p.m > 0.0) || !std::isfinite(p.m)) {
    throw std::invalid_argument("frequency params: m must be positive");
  }
  if (!(p.beta > 0.0) || !(p.beta <= betaCap)) {
    throw std::invalid_argument("frequency params: beta outside (0, cap]");
  }
  double inv = std::round(1.0 / p.beta);
  if (!(inv >= 1.0) || p.beta != 1.0 / inv) {
    throw std::invalid_argument("frequency params: 1/beta must be an integer");
  }
  if (p.q < 1) {
    throw std::invalid_argument("frequency params: q must be >= 1");
  }
}

double omega(const FrequencyParams& p, std::int64_t y) {
  double scale = p.m * double(p.q) / (p.beta * p.beta);
  return scale * std::exp(p.beta * double(y) / double(p.q));
}

StageGeometry derive_stage_geometry(const FrequencyParams& p) {
  validate_params(p);
  StageGeometry g;
  if (p.q == 1) {
    g.h = (p.m / p.beta) * std::expm1(p.beta);
    g.positions = {0.0};
    g.hNext = g.h;
    return g;
  }
  double scale = p.m * double(p.q) / (p.beta * p.beta);
  g.positions.resize(p.q);
  for (std::int64_t y = 0; y < p.q; ++y) {
    // omega(y) - omega(0), formed without the large-constant cancellation
    g.positions[y] = scale * std::expm1(p.beta * double(y) / double(p.q));
  }
  g.h = g.positions[1];
  g.spacers.resize(p.q - 1);
  for (std::int64_t j = 0; j + 1 < p.q; ++j) {
    if (!(g.positions[j] < g.positions[j + 1])) {
      throw std::invalid_argument(
          "stage geometry: frequency law lost monotonicity in binary64");
    }
    g.spacers[j] = g.positions[j + 1] - g.positions[j] - g.h;
    if (g.spacers[j] < 0.0) {
      throw std::invalid_argument("stage geometry: negative spacer");
    }
  }
  g.hNext = g.positions.back() + g.h;
  return g;
}

double TowerSchedule::height(std::size_t level) const {
  if (level < stages.size()) return stages[level].geom.h;
  if (level == stages.size()) return stages.back().geom.hNext;
  throw std::out_of_range("schedule height: level past the stacked top");
}

double chain_m(double hNext, double beta, std::int64_t q) {
  if (q == 1) return hNext * beta / std::expm1(beta);
  return hNext * beta * beta / (double(q) * std::expm1(beta / double(q)));
}

TowerSchedule build_schedule(
    double m0, const std::vector<std::pair<double, std::int64_t>>& betaQ,
    std::vector<double> xis) {
  if (betaQ.empty()) throw std::invalid_argument("schedule: no stages");
  TowerSchedule s;
  double m = m0;
  for (const auto& [beta, q] : betaQ) {
    FrequencyParams p{m, beta, q};
    Stage st{p, derive_stage_geometry(p)};
    double hNext = st.geom.hNext;
    s.stages.push_back(std::move(st));
    if (s.stages.size() < betaQ.size()) {
      auto [nb, nq] = betaQ[s.stages.size()];
      m = chain_m(hNext, nb, nq);
    }
  }
  if (xis.empty()) xis.assign(s.stages.size(), 0.0);
  if (xis.size() != s.stages.size()) {
    throw std::invalid_argument("schedule: xis must match stage count");
  }
  s.xis = std::move(xis);
  s.depth = std::int64_t(s.stages.size());
  return s;
}

TowerSchedule make_schedule(const std::vector<FrequencyParams>& params,
                            std::vector<double> xis, std::int64_t depth) {
  if (params.empty()) throw std::invalid_argument("schedule: no stages");
  TowerSchedule s;
  for (const FrequencyParams& p : params) {
    s.stages.push_back({p, derive_stage_geometry(p)});
  }
  for (std::size_t n = 0; n + 1 < s.stages.size(); ++n) {
    double hn = s.stages[n].geom.hNext;
    double h1 = s.stages[n + 1].geom.h;
    if (std::fabs(hn - h1) > 1e-9 * std::fabs(hn)) {
      throw std::invalid_argument("schedule: stage heights do not chain");
    }
  }
  if (xis.empty()) xis.assign(s.stages.size(), 0.0);
  if (xis.size() != s.stages.size()) {
    throw std::invalid_argument("schedule: xis must match stage count");
  }
  s.xis = std::move(xis);
  s.depth = depth < 0 ? std::int64_t(s.stages.size()) : depth;
  if (s.depth < 0 || s.depth > std::int64_t(s.stages.size())) {
    throw std::invalid_argument("schedule: depth out of range");
  }
  return s;
}

namespace {
double stage_log_ratio(const Stage& st) {
  return std::log(st.geom.hNext / (double(st.params.q) * st.geom.h));
}
}  // namespace

std::vector<double> derive_gammas(const TowerSchedule& s, std::size_t depth,
                                  double divergenceBound) {
  if (depth > s.size()) {
    throw std::invalid_argument("derive_gammas: depth past schedule end");
  }
  double logSum = 0.0;
  for (const Stage& st : s.stages) logSum += stage_log_ratio(st);
  if (!(logSum <= divergenceBound)) {
    throw ScheduleDivergence("schedule mass product diverges: sum log ratio " +
                             std::to_string(logSum));
  }
  std::vector<double> g(depth + 1, 0.0);
  double prod = 1.0;  // prod of q_k h_k / hNext_k going down from depth
  for (std::size_t k = depth; k-- > 0;) {
    const Stage& st = s.stages[k];
    prod *= double(st.params.q) * st.geom.h / st.geom.hNext;
    g[k] = 1.0 - prod;
  }
  return g;
}

double gamma_tail_log_bound(const TowerSchedule& s, std::size_t depth) {
  double t = 0.0;
  for (std::size_t k = depth; k < s.size(); ++k) {
    t += stage_log_ratio(s.stages[k]);
  }
  return t;
}

PlanarFrames derive_planar_frames(const TowerSchedule& s) {
  PlanarFrames f;
  f.psis.push_back(Mat2::identity());
  f.angles.push_back(0.0);
  double angle = 0.0;
  for (std::size_t n = 0; n < s.size(); ++n) {
    double xi = s.xis[n];
    Mat2 v{1.0, -xi, xi, 1.0};
    f.psis.push_back(v * f.psis.back());
    angle += std::atan(xi);
    f.angles.push_back(angle);
    const Stage& st = s.stages[n];
    f.ells.push_back(double(st.params.q) * st.geom.h * std::exp(st.params.beta));
  }
  return f;
}

std::string schedule_to_json(const TowerSchedule& s) {
  nlohmann::json j;
  j["stages"] = nlohmann::json::array();
  for (const Stage& st : s.stages) {
    j["stages"].push_back({{"m", st.params.m},
                           {"beta", st.params.beta},
                           {"q", st.params.q}});
  }
  j["xis"] = s.xis;
  j["depth"] = s.depth;
  return j.dump(2);
}

TowerSchedule schedule_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("schedule json: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("schedule json: not an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "stages" && key != "xis" && key != "depth") {
      throw ConfigError("schedule json: unknown key '" + key + "'");
    }
  }
  if (!j.contains("stages") || !j["stages"].is_array() || j["stages"].empty()) {
    throw ConfigError("schedule json: missing or empty 'stages'");
  }
  std::vector<FrequencyParams> params;
  for (const auto& e : j["stages"]) {
    if (!e.is_object()) throw ConfigError("schedule json: bad stage entry");
    for (const auto& [key, _] : e.items()) {
      if (key != "m" && key != "beta" && key != "q") {
        throw ConfigError("schedule json: unknown stage key '" + key + "'");
      }
    }
    if (!e.contains("m") || !e.contains("beta") || !e.contains("q")) {
      throw ConfigError("schedule json: stage needs m, beta, q");
    }
    params.push_back({e["m"].get<double>(), e["beta"].get<double>(),
                      e["q"].get<std::int64_t>()});
  }
  std::vector<double> xis;
  if (j.contains("xis")) xis = j["xis"].get<std::vector<double>>();
  std::int64_t depth = -1;
  if (j.contains("depth")) depth = j["depth"].get<std::int64_t>();
  try {
    return make_schedule(params, std::move(xis), depth);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("schedule json: ") + e.what());
  }
}

}  // namespace rankone
