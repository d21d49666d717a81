#include "rankone/commands.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"
#include "rankone/construction.hpp"
#include "rankone/density_io.hpp"
#include "rankone/expsum.hpp"
#include "rankone/flatness.hpp"
#include "rankone/flowsim.hpp"
#include "rankone/planar.hpp"
#include "rankone/riesz.hpp"
#include "rankone/search.hpp"
#include "rankone/types.hpp"

namespace rankone {

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

// strict schema: every present key must be known, every required key present
void require_keys(const json& j, const std::string& ctx,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional) {
  if (!j.is_object()) throw ConfigError(ctx + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : required) known = known || item.key() == k;
    for (const char* k : optional) known = known || item.key() == k;
    if (!known) {
      throw ConfigError("unknown key \"" + item.key() + "\" in " + ctx);
    }
  }
  for (const char* k : required) {
    if (!j.contains(k)) {
      throw ConfigError("missing key \"" + std::string(k) + "\" in " + ctx);
    }
  }
}

double get_num(const json& j, const char* key, const std::string& ctx) {
  if (!j.at(key).is_number()) {
    throw ConfigError("key \"" + std::string(key) + "\" in " + ctx +
                      " must be a number");
  }
  return j.at(key).get<double>();
}

std::int64_t get_int(const json& j, const char* key, const std::string& ctx) {
  if (!j.at(key).is_number_integer()) {
    throw ConfigError("key \"" + std::string(key) + "\" in " + ctx +
                      " must be an integer");
  }
  return j.at(key).get<std::int64_t>();
}

Window get_window(const json& j, const std::string& ctx) {
  require_keys(j, ctx, {"a", "b"}, {});
  double a = get_num(j, "a", ctx);
  double b = get_num(j, "b", ctx);
  try {
    return Window(a, b);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
}

struct ScheduleConfig {
  double m0 = 1.0;
  std::vector<std::pair<double, std::int64_t>> betaQ;
  std::vector<double> xis;
  bool hasXis = false;

  TowerSchedule build() const {
    if (betaQ.empty()) return TowerSchedule{};
    return build_schedule(m0, betaQ, xis);
  }
  json echo(const TowerSchedule& built) const {
    json stages = json::array();
    for (const auto& [beta, q] : betaQ) {
      stages.push_back(json{{"beta", beta}, {"q", q}});
    }
    return json{{"m0", m0}, {"stages", stages}, {"xis", built.xis}};
  }
};

ScheduleConfig get_schedule(const json& j) {
  const std::string ctx = "schedule";
  require_keys(j, ctx, {"m0", "stages"}, {"xis"});
  ScheduleConfig sc;
  sc.m0 = get_num(j, "m0", ctx);
  if (!j.at("stages").is_array()) {
    throw ConfigError("key \"stages\" in schedule must be an array");
  }
  for (const auto& stage : j.at("stages")) {
    require_keys(stage, "schedule stage", {"beta", "q"}, {});
    sc.betaQ.emplace_back(get_num(stage, "beta", "schedule stage"),
                          get_int(stage, "q", "schedule stage"));
  }
  if (j.contains("xis")) {
    sc.hasXis = true;
    if (!j.at("xis").is_array() || j.at("xis").size() != sc.betaQ.size()) {
      throw ConfigError(
          "key \"xis\" in schedule must be an array with one entry per stage");
    }
    for (const auto& x : j.at("xis")) {
      if (!x.is_number()) {
        throw ConfigError("key \"xis\" in schedule must hold numbers");
      }
      sc.xis.push_back(x.get<double>());
    }
  }
  return sc;
}

struct CommonParams {
  std::uint64_t seed = 0;
  int threads = 0;
};

// flags override the config file; the resolved values go into the echo
CommonParams resolve_common(const json& cfg, const CommandOptions& opt,
                            const std::string& ctx) {
  CommonParams c;
  if (cfg.contains("seed")) {
    const json& s = cfg.at("seed");
    if (!(s.is_number_unsigned() ||
          (s.is_number_integer() && s.get<std::int64_t>() >= 0))) {
      throw ConfigError("key \"seed\" in " + ctx +
                        " must be a nonnegative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (cfg.contains("threads")) {
    std::int64_t t = get_int(cfg, "threads", ctx);
    if (t < 0) throw ConfigError("key \"threads\" in " + ctx + " must be >= 0");
    c.threads = int(t);
  }
  if (opt.seedFromFlag) c.seed = opt.seed;
  if (opt.threadsFromFlag) c.threads = opt.threads;
#ifdef _OPENMP
  if (c.threads > 0) omp_set_num_threads(c.threads);
#endif
  return c;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("short write to " + path.string());
}

std::filesystem::path prepare_out_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec || !std::filesystem::is_directory(p)) {
    throw ConfigError("cannot create output directory: " + dir);
  }
  return p;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

template <typename Body>
int run_command(const CommandOptions& opt, const char* name, Body body) {
  std::ostream& err = opt.err ? *opt.err : std::cerr;
  try {
    return body();
  } catch (const NoneFound& e) {
    err << name << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << name << ": " << e.what() << "\n";
    return 1;
  }
}

json report_to_json(const FlatnessReport& r) {
  return json{{"l1Defect", r.l1Defect},
              {"l1SquareDefect", r.l1SquareDefect},
              {"l2Defect", r.l2Defect},
              {"supBound", r.supBound},
              {"gridStep", r.gridStep},
              {"refinementError", r.refinementError}};
}

// stage multiplier sampled on the exact grid the state carries
SampledDensity stage_on_state_grid(const ExpSum1D& s, const RieszState& st) {
  return eval_grid(s, st.density.origin[0], st.density.step, st.density.nx);
}

}  // namespace

int cmd_flat_search(const CommandOptions& opt) {
  return run_command(opt, "flat-search", [&]() -> int {
    const std::string ctx = "flat-search config";
    json cfg = load_config(opt.configPath);
    require_keys(cfg, ctx,
                 {"window", "eps", "m", "beta", "qMin", "qMax"},
                 {"qStride", "seed", "threads"});
    SearchSpec spec;
    spec.window = get_window(cfg.at("window"), "window");
    spec.eps = get_num(cfg, "eps", ctx);
    spec.m = get_num(cfg, "m", ctx);
    spec.beta = get_num(cfg, "beta", ctx);
    spec.qMin = get_int(cfg, "qMin", ctx);
    spec.qMax = get_int(cfg, "qMax", ctx);
    spec.qStride = cfg.contains("qStride") ? get_int(cfg, "qStride", ctx) : 1;
    CommonParams common = resolve_common(cfg, opt, ctx);
    validate_search_spec(spec);

    auto dir = prepare_out_dir(opt.outDir);
    json resolved{{"window", {{"a", spec.window.a}, {"b", spec.window.b}}},
                  {"eps", spec.eps},
                  {"m", spec.m},
                  {"beta", spec.beta},
                  {"qMin", spec.qMin},
                  {"qMax", spec.qMax},
                  {"qStride", spec.qStride},
                  {"seed", common.seed},
                  {"threads", common.threads}};
    write_text(dir / "resolved_config.json", dump(resolved));

    json hits = json::array();
    int code = 0;
    try {
      for (const FlatQHit& h : find_flat_q(spec)) {
        hits.push_back(json{{"q", h.q}, {"report", report_to_json(h.report)}});
      }
    } catch (const NoneFound&) {
      code = 2;
    }
    write_text(dir / "hits.json", dump(hits));
    return code;
  });
}

int cmd_riesz(const CommandOptions& opt) {
  return run_command(opt, "riesz", [&]() -> int {
    const std::string ctx = "riesz config";
    json cfg = load_config(opt.configPath);
    require_keys(cfg, ctx, {"schedule", "windows", "cells"},
                 {"h0", "zeroRadius", "seed", "threads"});
    ScheduleConfig sc = get_schedule(cfg.at("schedule"));
    TowerSchedule sched = sc.build();

    if (!cfg.at("windows").is_array() || cfg.at("windows").empty()) {
      throw ConfigError("key \"windows\" in " + ctx +
                        " must be a nonempty array");
    }
    std::vector<Window> windows;
    for (const auto& w : cfg.at("windows")) {
      windows.push_back(get_window(w, "windows entry"));
    }
    for (std::size_t k = 1; k < windows.size(); ++k) {
      if (windows[k].a > windows[k - 1].a || windows[k].b < windows[k - 1].b) {
        throw ConfigError("key \"windows\" in " + ctx +
                          " must be nested and increasing");
      }
    }
    std::int64_t cells = get_int(cfg, "cells", ctx);
    if (cells < 1) throw ConfigError("key \"cells\" in " + ctx + " must be >= 1");
    double h0 = cfg.contains("h0") ? get_num(cfg, "h0", ctx) : 0.0;
    if (h0 < 0.0) throw ConfigError("key \"h0\" in " + ctx + " must be >= 0");
    double zeroRadius = cfg.contains("zeroRadius")
                            ? get_num(cfg, "zeroRadius", ctx)
                            : windows.back().a;
    CommonParams common = resolve_common(cfg, opt, ctx);

    auto dir = prepare_out_dir(opt.outDir);
    json windowsEcho = json::array();
    for (const Window& w : windows) {
      windowsEcho.push_back(json{{"a", w.a}, {"b", w.b}});
    }
    json resolved{{"schedule", sc.echo(sched)}, {"windows", windowsEcho},
                  {"cells", cells},             {"h0", h0},
                  {"zeroRadius", zeroRadius},   {"seed", common.seed},
                  {"threads", common.threads}};
    write_text(dir / "resolved_config.json", dump(resolved));

    std::vector<ExpSum1D> sums;
    for (const Stage& stage : sched.stages) {
      sums.push_back(ExpSum1D::from_geometry(stage.geom));
    }
    std::vector<RieszState> states;
    for (const Window& w : windows) {
      RieszState st = h0 > 0.0 ? make_seeded_state(w, std::size_t(cells), h0)
                               : make_unit_state(w, std::size_t(cells));
      for (const ExpSum1D& s : sums) accumulate(st, stage_on_state_grid(s, st));
      states.push_back(std::move(st));
    }
    const RieszState& last = states.back();

    write_text(dir / "density.csv", density_to_csv(last.density));
    write_text(dir / "state.json", riesz_state_to_json(last));

    CertificateRecord cert = check_summability(last.stages);
    RateBound rate = convergence_rate_bound(last.stages, last.window);
    json certificate{{"alphaSum", cert.alphaSum},
                     {"borelCantelliSum", cert.borelCantelliSum},
                     {"pi0", cert.pi0},
                     {"majorantBound", cert.majorantBound},
                     {"certified", cert.certified},
                     {"eps0", rate.eps0},
                     {"measureBound", rate.measureBound},
                     {"deviationBound", rate.deviationBound},
                     {"withinRateLaw", rate.withinRateLaw}};
    write_text(dir / "certificate.json", dump(certificate));

    AtomReport atoms = detect_atom(states, zeroRadius);
    json atomsJson{{"windowIntegrals", atoms.windowIntegrals},
                   {"atomEstimate", atoms.atomEstimate},
                   {"zeroRadius", atoms.zeroRadius}};
    write_text(dir / "atoms.json", dump(atomsJson));
    return 0;
  });
}

int cmd_flow(const CommandOptions& opt) {
  return run_command(opt, "flow", [&]() -> int {
    const std::string ctx = "flow config";
    json cfg = load_config(opt.configPath);
    require_keys(cfg, ctx, {"schedule", "baseDepth", "level", "profile", "tGrid"},
                 {"profileCells", "spectrum", "monteCarlo", "seed", "threads"});
    ScheduleConfig sc = get_schedule(cfg.at("schedule"));
    if (sc.betaQ.empty()) {
      throw ConfigError("key \"stages\" in schedule must be nonempty for flow");
    }
    TowerSchedule sched = sc.build();
    std::int64_t baseDepth = get_int(cfg, "baseDepth", ctx);
    std::int64_t level = get_int(cfg, "level", ctx);
    if (baseDepth < 0) {
      throw ConfigError("key \"baseDepth\" in " + ctx + " must be >= 0");
    }
    std::string profile = cfg.at("profile").is_string()
                              ? cfg.at("profile").get<std::string>()
                              : std::string();
    if (profile != "indicator" && profile != "bump") {
      throw ConfigError("key \"profile\" in " + ctx +
                        " must be \"indicator\" or \"bump\"");
    }
    std::int64_t profileCells =
        cfg.contains("profileCells") ? get_int(cfg, "profileCells", ctx)
                                     : std::int64_t(kDefaultProfileCells);
    if (profileCells < 1) {
      throw ConfigError("key \"profileCells\" in " + ctx + " must be >= 1");
    }
    const json& tg = cfg.at("tGrid");
    require_keys(tg, "tGrid", {"tStart", "tStep", "count"}, {});
    TGrid grid{get_num(tg, "tStart", "tGrid"), get_num(tg, "tStep", "tGrid"),
               std::size_t(get_int(tg, "count", "tGrid"))};
    if (!(grid.tStep > 0.0) || get_int(tg, "count", "tGrid") < 1) {
      throw ConfigError("tGrid requires tStep > 0 and count >= 1");
    }
    CommonParams common = resolve_common(cfg, opt, ctx);

    json resolved{{"schedule", sc.echo(sched)},
                  {"baseDepth", baseDepth},
                  {"level", level},
                  {"profile", profile},
                  {"profileCells", profileCells},
                  {"tGrid",
                   {{"tStart", grid.tStart},
                    {"tStep", grid.tStep},
                    {"count", std::int64_t(grid.count)}}},
                  {"seed", common.seed},
                  {"threads", common.threads}};
    if (cfg.contains("spectrum")) {
      const json& sp = cfg.at("spectrum");
      require_keys(sp, "spectrum", {"origin", "step", "count"}, {});
      resolved["spectrum"] = {{"origin", get_num(sp, "origin", "spectrum")},
                              {"step", get_num(sp, "step", "spectrum")},
                              {"count", get_int(sp, "count", "spectrum")}};
    }
    if (cfg.contains("monteCarlo")) {
      const json& mc = cfg.at("monteCarlo");
      require_keys(mc, "monteCarlo", {"depth", "samples", "times"}, {});
      if (!mc.at("times").is_array() || mc.at("times").empty()) {
        throw ConfigError("key \"times\" in monteCarlo must be a nonempty array");
      }
      for (const auto& t : mc.at("times")) {
        if (!t.is_number()) {
          throw ConfigError("key \"times\" in monteCarlo must hold numbers");
        }
      }
      resolved["monteCarlo"] = {{"depth", get_int(mc, "depth", "monteCarlo")},
                                {"samples", get_int(mc, "samples", "monteCarlo")},
                                {"times", mc.at("times")}};
    }
    auto dir = prepare_out_dir(opt.outDir);
    write_text(dir / "resolved_config.json", dump(resolved));

    LevelFunction f =
        profile == "indicator"
            ? make_indicator_function(sched, int(baseDepth),
                                      std::size_t(profileCells))
            : make_bump_function(sched, int(baseDepth),
                                 std::size_t(profileCells));
    CorrelationTrace trace = correlation_analytic(f, sched, int(level), grid);
    write_text(dir / "trace.csv", trace_to_csv(trace));

    if (resolved.contains("spectrum")) {
      const json& sp = resolved.at("spectrum");
      std::int64_t count = sp.at("count").get<std::int64_t>();
      if (count < 1) {
        throw ConfigError("key \"count\" in spectrum must be >= 1");
      }
      SampledDensity spec = correlation_spectrum(
          trace, sp.at("origin").get<double>(), sp.at("step").get<double>(),
          std::size_t(count));
      write_text(dir / "spectrum.csv", density_to_csv(spec));
    }

    if (resolved.contains("monteCarlo")) {
      const json& mc = resolved.at("monteCarlo");
      std::int64_t depth = mc.at("depth").get<std::int64_t>();
      std::int64_t samples = mc.at("samples").get<std::int64_t>();
      if (samples < 1) {
        throw ConfigError("key \"samples\" in monteCarlo must be >= 1");
      }
      json rows = json::array();
      std::uint64_t i = 0;
      for (const auto& tj : mc.at("times")) {
        double t = tj.get<double>();
        MonteCarloEstimate est = correlation_monte_carlo(
            f, sched, int(depth), t, std::size_t(samples), common.seed + i);
        rows.push_back(json{{"t", t},
                            {"re", est.value.real()},
                            {"im", est.value.imag()},
                            {"stderr", est.stderrEstimate},
                            {"kept", est.kept},
                            {"escaped", est.escaped}});
        ++i;
      }
      write_text(dir / "mc.json", dump(rows));
    }
    return 0;
  });
}

int cmd_planar(const CommandOptions& opt) {
  return run_command(opt, "planar", [&]() -> int {
    const std::string ctx = "planar config";
    json cfg = load_config(opt.configPath);
    require_keys(cfg, ctx,
                 {"schedule", "extent", "cells", "strips", "tubeHalfWidth"},
                 {"h0", "collapseThreshold", "seed", "threads"});
    ScheduleConfig sc = get_schedule(cfg.at("schedule"));
    if (sc.betaQ.size() < 2) {
      throw ConfigError(
          "key \"stages\" in schedule needs >= 2 stages for planar");
    }
    // rotated preset unless the config pins xis; stage n turns by atan(xi_n)
    if (!sc.hasXis) {
      for (std::size_t n = 0; n < sc.betaQ.size(); ++n) {
        sc.xis.push_back(std::ldexp(1.0, -int(n) - 1));
      }
    }
    TowerSchedule sched = sc.build();
    double extent = get_num(cfg, "extent", ctx);
    std::int64_t cells = get_int(cfg, "cells", ctx);
    const json& strips = cfg.at("strips");
    require_keys(strips, "strips", {"a0", "b0"}, {});
    double a0 = get_num(strips, "a0", "strips");
    double b0 = get_num(strips, "b0", "strips");
    double tube = get_num(cfg, "tubeHalfWidth", ctx);
    double h0 = cfg.contains("h0") ? get_num(cfg, "h0", ctx) : 0.0;
    if (h0 < 0.0) throw ConfigError("key \"h0\" in " + ctx + " must be >= 0");
    double threshold = cfg.contains("collapseThreshold")
                           ? get_num(cfg, "collapseThreshold", ctx)
                           : 0.5;
    CommonParams common = resolve_common(cfg, opt, ctx);

    auto dir = prepare_out_dir(opt.outDir);
    json resolved{{"schedule", sc.echo(sched)},
                  {"extent", extent},
                  {"cells", cells},
                  {"strips", {{"a0", a0}, {"b0", b0}}},
                  {"tubeHalfWidth", tube},
                  {"h0", h0},
                  {"collapseThreshold", threshold},
                  {"seed", common.seed},
                  {"threads", common.threads}};
    write_text(dir / "resolved_config.json", dump(resolved));

    PlanarFrames frames = derive_planar_frames(sched);
    PlanarRieszState state =
        h0 > 0.0 ? make_planar_seeded_state(extent, std::size_t(cells), h0)
                 : make_planar_unit_state(extent, std::size_t(cells));

    std::size_t n = sched.size();
    std::vector<ExpSum2D> stages2d;
    std::vector<StripSet> stripSets;
    std::vector<Window> stripWindows;
    std::vector<double> ratios;
    for (std::size_t k = 0; k < n; ++k) {
      double ak = a0 * std::pow(4.0, -double(k));
      double bk = b0 * std::pow(2.0, double(k));
      ExpSum1D f = ExpSum1D::from_geometry(sched.stages[k].geom);
      StripSet strip = make_strip(ak, bk, frames.psis[k]);
      ExpSum2D stage{f, f, frames.psis[k].transpose()};
      accumulate_2d(state, stage, strip);
      stages2d.push_back(stage);
      stripSets.push_back(strip);
      stripWindows.emplace_back(ak, bk);

      // mass fraction the current strip holds of the accumulated density
      std::vector<double> masked(state.grid.values.size(), 0.0);
      for (std::size_t iy = 0; iy < state.grid.ny; ++iy) {
        for (std::size_t ix = 0; ix < state.grid.nx; ++ix) {
          Vec2 tau{state.grid.tau1(ix), state.grid.tau2(iy)};
          if (strip_contains(strip, tau)) {
            masked[iy * state.grid.nx + ix] = state.grid.at(ix, iy);
          }
        }
      }
      double total = pairwise_sum(state.grid.values);
      ratios.push_back(total > 0.0 ? pairwise_sum(masked) / total : 0.0);
    }

    json stageRows = json::array();
    for (std::size_t k = 0; k < n; ++k) {
      double limitRadius = -1.0;
      for (std::size_t m = 0; m < n; ++m) {
        if (m == k) continue;
        double r = strip_intersection_radius(stripSets[k], stripSets[m]);
        if (std::isfinite(r) && (limitRadius < 0.0 || r < limitRadius)) {
          limitRadius = r;
        }
      }
      stageRows.push_back(json{{"q", sched.stages[k].params.q},
                               {"a", stripWindows[k].a},
                               {"b", stripWindows[k].b},
                               {"stripMassRatio", ratios[k]},
                               {"limitRadius", limitRadius},
                               {"massBound",
                                strip_mass_bound(stages2d[k], stripSets[k],
                                                 limitRadius)},
                               {"Mn", state.stages[k].Mn},
                               {"epsN", state.stages[k].epsN},
                               {"alphaN", state.stages[k].alphaN}});
    }
    json stagesJson{{"stages", stageRows},
                    {"pi0", state.pi0},
                    {"exceptionalMass", state.exceptionalMass}};
    write_text(dir / "stages.json", dump(stagesJson));

    RegionMap regions = classify_regions(state, frames.angles.back(), tube);
    write_text(dir / "regions.csv", region_masses_to_csv(regions));

    RenderPaths rendered = render_density(state, (dir / "density").string());
    (void)rendered;

    bool rotated = true;
    for (double xi : sched.xis) rotated = rotated && xi > 0.0;
    if (rotated) {
      CollapseReport collapse =
          validate_collapse_condition(sched, stripWindows, threshold);
      json collapseJson{{"ratios", collapse.ratios},
                        {"tailRadii", collapse.tailRadii},
                        {"decreasing", collapse.decreasing},
                        {"belowThreshold", collapse.belowThreshold},
                        {"passes", collapse.passes}};
      write_text(dir / "collapse.json", dump(collapseJson));

      std::string radii = "n,m,radius,cap\n";
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t m = i + 1; m < n; ++m) {
          double r = strip_intersection_radius(stripSets[i], stripSets[m]);
          double phi = frames.angles[m] - frames.angles[i];
          double cap =
              3.0 * (stripWindows[i].a + stripWindows[m].a) / std::sin(phi);
          radii += std::to_string(i) + "," + std::to_string(m) + "," +
                   format_double(r) + "," + format_double(cap) + "\n";
        }
      }
      write_text(dir / "radii.csv", radii);
    }
    return 0;
  });
}

int cmd_torus(const CommandOptions& opt) {
  return run_command(opt, "torus", [&]() -> int {
    const std::string ctx = "torus config";
    json cfg = load_config(opt.configPath);
    require_keys(cfg, ctx, {"K", "eps", "tMax", "dt"}, {"seed", "threads"});
    TorusProbe probe;
    probe.K = int(get_int(cfg, "K", ctx));
    probe.eps = get_num(cfg, "eps", ctx);
    probe.tMax = get_num(cfg, "tMax", ctx);
    probe.dt = get_num(cfg, "dt", ctx);
    CommonParams common = resolve_common(cfg, opt, ctx);
    validate_torus_probe(probe);

    auto dir = prepare_out_dir(opt.outDir);
    json resolved{{"K", probe.K},     {"eps", probe.eps},
                  {"tMax", probe.tMax}, {"dt", probe.dt},
                  {"seed", common.seed}, {"threads", common.threads}};
    write_text(dir / "resolved_config.json", dump(resolved));

    std::optional<double> ret = torus_return_time(probe);
    json result{{"found", ret.has_value()}};
    if (ret) {
      result["returnTime"] = *ret;
    } else {
      result["returnTime"] = nullptr;
    }
    write_text(dir / "return.json", dump(result));
    return ret ? 0 : 2;
  });
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"flat exponential sums, Riesz products, and rank-one flow spectra"};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* desc;
    int (*fn)(const CommandOptions&);
  };
  const Entry entries[] = {
      {"flat-search", "scan stage degrees for window-flat sums",
       cmd_flat_search},
      {"riesz", "accumulate a spectral product over nested windows", cmd_riesz},
      {"flow", "correlation traces and spectra of a tower flow", cmd_flow},
      {"planar", "planar product accumulation with region analysis",
       cmd_planar},
      {"torus", "first near-return of the log-frequency torus line",
       cmd_torus},
  };

  std::string config, out;
  int threads = 0;
  std::uint64_t seed = 0;
  int rc = 0;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.desc);
    sub->add_option("--config", config, "JSON experiment config")->required();
    sub->add_option("--out", out, "output directory for artifacts")->required();
    sub->add_option("--threads", threads, "cap the OpenMP worker count");
    sub->add_option("--seed", seed, "override the config seed");
    sub->callback([&, sub]() {
      CommandOptions opt;
      opt.configPath = config;
      opt.outDir = out;
      opt.threads = threads;
      opt.threadsFromFlag = sub->count("--threads") > 0;
      opt.seed = seed;
      opt.seedFromFlag = sub->count("--seed") > 0;
      rc = e.fn(opt);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help lands here with exit code 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  return rc;
}

}  // namespace rankone
