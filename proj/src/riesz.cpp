#include "rankone/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "rankone/density_io.hpp"
#include "rankone/expsum.hpp"

namespace rankone {

namespace {

SampledDensity half_window_grid(const Window& g, std::size_t cells) {
  if (cells == 0) throw std::invalid_argument("riesz: empty grid");
  SampledDensity d;
  d.step = g.length() / double(cells);
  d.origin = {g.a + 0.5 * d.step, 0.0};
  d.nx = cells;
  d.ny = 1;
  d.values.assign(cells, 1.0);
  return d;
}

}  // namespace

RieszState make_unit_state(const Window& g, std::size_t cells) {
  RieszState st;
  st.window = g;
  st.density = half_window_grid(g, cells);
  return st;
}

SampledDensity sinc_seed_grid(const Window& g, std::size_t cells, double h0) {
  if (!(h0 > 0.0)) throw std::invalid_argument("seed: h0 must be > 0");
  SampledDensity d = half_window_grid(g, cells);
  const double pi = kTwoPi / 2.0;
  for (std::size_t k = 0; k < d.nx; ++k) {
    double x = pi * d.tau1(k) * h0;
    double s = std::sin(x) / x;
    d.values[k] = h0 * s * s;
  }
  return d;
}

RieszState make_seeded_state(const Window& g, std::size_t cells, double h0) {
  RieszState st;
  st.window = g;
  st.density = sinc_seed_grid(g, cells, h0);
  return st;
}

double window_mass(const RieszState& state) {
  return 2.0 * state.density.step *
         pairwise_sum(state.density.values.data(), state.density.values.size());
}

void accumulate(RieszState& state, const SampledDensity& qn) {
  if (!state.density.same_grid(qn)) {
    throw GridMismatch("stage grid differs from the state grid");
  }
  const std::size_t n = qn.values.size();
  std::vector<double> dev(n);
  double sup = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double v = qn.values[k];
    dev[k] = std::fabs(v - 1.0);
    sup = std::max(sup, v);
  }
  StageDiagnostics d;
  d.Mn = std::max(1.0, sup);
  d.epsN = 2.0 * qn.step * pairwise_sum(dev.data(), n);
  double prodM = d.Mn;
  for (const StageDiagnostics& s : state.stages) prodM *= s.Mn;
  d.alphaN = d.epsN > 0.0 ? std::sqrt(d.epsN * prodM) : 0.0;

  double* out = state.density.values.data();
  const double* in = qn.values.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < std::int64_t(n); ++k) out[k] *= in[k];

  state.stages.push_back(d);
  state.pi0 *= 1.0 + d.alphaN;
  if (d.epsN > 0.0) state.exceptionalMass += d.epsN / d.alphaN;
}

CertificateRecord check_summability(const std::vector<StageDiagnostics>& stages,
                                    const CertificateCaps& caps) {
  CertificateRecord rec;
  for (const StageDiagnostics& d : stages) {
    rec.alphaSum += d.alphaN;
    rec.pi0 *= 1.0 + d.alphaN;
    if (d.epsN > 0.0 && d.alphaN > 0.0) {
      rec.borelCantelliSum += d.epsN / d.alphaN;
    }
  }
  rec.majorantBound = rec.pi0 * rec.alphaSum;
  rec.certified = rec.alphaSum <= caps.alphaCap &&
                  rec.borelCantelliSum <= caps.borelCantelliCap;
  return rec;
}

RateBound convergence_rate_bound(const std::vector<StageDiagnostics>& stages,
                                 const Window& g, double eps0Cap) {
  RateBound r;
  double pi0 = 1.0;
  for (const StageDiagnostics& d : stages) {
    r.eps0 += d.alphaN;
    pi0 *= 1.0 + d.alphaN;
  }
  r.deviationBound = pi0 - 1.0;
  r.measureBound = g.measure() - 2.0 * r.eps0;
  r.withinRateLaw = r.eps0 >= eps0Cap || r.deviationBound < 3.0 * r.eps0 ||
                    r.eps0 == 0.0;
  return r;
}

SampledDensity counterexample_multiplier(int n, std::size_t cells) {
  if (n < 0) throw std::invalid_argument("counterexample: n must be >= 0");
  if (n > 40) throw std::invalid_argument("counterexample: n too large");
  std::size_t blocks = std::size_t(1) << (n + 1);
  if (cells % blocks != 0) {
    throw std::invalid_argument(
        "counterexample: cells must be a multiple of 2^(n+1)");
  }
  SampledDensity d;
  d.step = 1.0 / double(cells);
  d.origin = {0.5 * d.step, 0.0};
  d.nx = cells;
  d.ny = 1;
  d.values.resize(cells);
  double lo = 1.0 - std::pow(2.0, -n);        // dyadic, exact
  double mid = 1.0 - std::pow(2.0, -n - 1);
  for (std::size_t k = 0; k < cells; ++k) {
    double t = (double(k) + 0.5) * d.step;
    d.values[k] = t < lo ? 1.0 : (t < mid ? 0.0 : 2.0);
  }
  return d;
}

SampledDensity counterexample_product(int N) {
  if (N < 0 || N > 24) {
    throw std::invalid_argument("counterexample: N outside [0, 24]");
  }
  std::size_t cells = std::size_t(1) << (N + 1);
  SampledDensity prod = counterexample_multiplier(0, cells);
  for (int n = 1; n <= N; ++n) {
    SampledDensity q = counterexample_multiplier(n, cells);
    for (std::size_t k = 0; k < cells; ++k) prod.values[k] *= q.values[k];
  }
  return prod;
}

AtomReport detect_atom(const std::vector<RieszState>& states,
                       double zeroRadius) {
  if (states.empty()) throw std::invalid_argument("atom: no states");
  if (!(zeroRadius > 0.0)) {
    throw std::invalid_argument("atom: zeroRadius must be > 0");
  }
  for (std::size_t i = 1; i < states.size(); ++i) {
    if (states[i].window.a > states[i - 1].window.a ||
        states[i].window.measure() < states[i - 1].window.measure()) {
      throw std::invalid_argument("atom: windows must grow toward zero");
    }
  }
  if (states.back().window.a > zeroRadius) {
    throw std::invalid_argument("atom: final window stops short of the radius");
  }
  AtomReport rep;
  rep.zeroRadius = zeroRadius;
  for (const RieszState& st : states) {
    rep.windowIntegrals.push_back(window_mass(st));
  }
  rep.atomEstimate = std::max(0.0, 1.0 - rep.windowIntegrals.back());
  return rep;
}

double stage_covariance(const SampledDensity& a, const SampledDensity& b) {
  if (!a.same_grid(b)) throw GridMismatch("covariance: grids differ");
  const std::size_t n = a.values.size();
  double ma = pairwise_sum(a.values.data(), n) / double(n);
  double mb = pairwise_sum(b.values.data(), n) / double(n);
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) {
    t[k] = (a.values[k] - ma) * (b.values[k] - mb);
  }
  return pairwise_sum(t.data(), n) / double(n);
}

std::string riesz_state_to_json(const RieszState& state) {
  nlohmann::json j;
  j["window"] = {{"a", state.window.a}, {"b", state.window.b}};
  j["grid"] = {{"origin", {state.density.origin[0], state.density.origin[1]}},
               {"step", state.density.step},
               {"nx", state.density.nx},
               {"ny", state.density.ny}};
  j["pi0"] = state.pi0;
  j["exceptionalMass"] = state.exceptionalMass;
  nlohmann::json stages = nlohmann::json::array();
  for (const StageDiagnostics& d : state.stages) {
    stages.push_back({{"Mn", d.Mn}, {"epsN", d.epsN}, {"alphaN", d.alphaN}});
  }
  j["stages"] = std::move(stages);
  return j.dump();
}

namespace {

void require_keys(const nlohmann::json& j, const char* where,
                  std::initializer_list<const char*> keys) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) {
      throw ConfigError(std::string(where) + ": unknown key '" + it.key() +
                        "'");
    }
  }
  for (const char* k : keys) {
    if (!j.contains(k)) {
      throw ConfigError(std::string(where) + ": missing key '" + k + "'");
    }
  }
}

}  // namespace

RieszState riesz_state_from_json(const std::string& jsonText,
                                 const std::string& densityCsv) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(jsonText);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
  try {
    require_keys(j, "checkpoint",
                 {"window", "grid", "pi0", "exceptionalMass", "stages"});
    require_keys(j["window"], "checkpoint window", {"a", "b"});
    require_keys(j["grid"], "checkpoint grid", {"origin", "step", "nx", "ny"});
    RieszState st;
    st.window = Window{j["window"]["a"].get<double>(),
                       j["window"]["b"].get<double>()};
    st.density.origin = {j["grid"]["origin"][0].get<double>(),
                         j["grid"]["origin"][1].get<double>()};
    st.density.step = j["grid"]["step"].get<double>();
    st.density.nx = j["grid"]["nx"].get<std::size_t>();
    st.density.ny = j["grid"]["ny"].get<std::size_t>();
    st.pi0 = j["pi0"].get<double>();
    st.exceptionalMass = j["exceptionalMass"].get<double>();
    for (const nlohmann::json& sj : j["stages"]) {
      require_keys(sj, "checkpoint stage", {"Mn", "epsN", "alphaN"});
      st.stages.push_back({sj["Mn"].get<double>(), sj["epsN"].get<double>(),
                           sj["alphaN"].get<double>()});
    }
    st.density.values = density_values_from_csv(densityCsv);
    if (st.density.values.size() != st.density.nx * st.density.ny) {
      throw ConfigError("checkpoint: density length does not match the grid");
    }
    return st;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
}

}  // namespace rankone
