// Times the OpenMP grid kernels against their serial references and checks
// the outputs agree bit for bit. Run with OMP_NUM_THREADS to vary the
// parallel side. Optional argv[1] sets repetitions (best-of, default 3).
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "rankone/construction.hpp"
#include "rankone/expsum.hpp"
#include "rankone/reference.hpp"

using namespace rankone;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = Clock::now();
    f();
    best = std::min(best,
                    std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return best;
}

bool same_bits(const SampledDensity& a, const SampledDensity& b) {
  if (a.values.size() != b.values.size()) return false;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (a.values[i] != b.values[i]) return false;
  }
  return true;
}

void report(const char* name, double ts, double tp, bool same) {
  std::printf("%-28s %12.4f %12.4f %7.2fx %6s\n", name, ts, tp, ts / tp,
              same ? "same" : "DIFF");
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  std::printf("%-28s %12s %12s %8s %6s\n", "kernel", "serial[s]", "openmp[s]",
              "speedup", "bits");

  {
    ExpSum1D s =
        ExpSum1D::from_geometry(derive_stage_geometry({0.4, 0.25, 512}));
    const std::size_t count = 200000;
    double step = nyquist_step(s) * 0.9;
    SampledDensity serial, parallel;
    double ts =
        time_best_of(reps, [&] { serial = ref::eval_grid(s, 0.0, step, count); });
    double tp =
        time_best_of(reps, [&] { parallel = eval_grid(s, 0.0, step, count); });
    report("eval_grid q=512 n=2e5", ts, tp, same_bits(serial, parallel));
  }

  {
    ExpSum1D s =
        ExpSum1D::from_geometry(derive_stage_geometry({0.4, 0.25, 4096}));
    const std::size_t count = 50000;
    double step = nyquist_step(s) * 0.9;
    SampledDensity serial, parallel;
    double ts =
        time_best_of(reps, [&] { serial = ref::eval_grid(s, 0.0, step, count); });
    double tp =
        time_best_of(reps, [&] { parallel = eval_grid(s, 0.0, step, count); });
    report("eval_grid q=4096 n=5e4", ts, tp, same_bits(serial, parallel));
  }

  {
    TowerSchedule sched = build_schedule(0.4, {{0.25, 48}, {0.25, 48}},
                                         {0.5, 0.25});
    PlanarFrames frames = derive_planar_frames(sched);
    ExpSum1D f =
        ExpSum1D::from_geometry(derive_stage_geometry({0.4, 0.25, 48}));
    ExpSum2D s2{f, f, frames.psis[1]};  // rotated frame, generic path
    const std::size_t n = 640;
    double step = nyquist_step(f) * 0.9;
    SampledDensity serial, parallel;
    double ts = time_best_of(reps, [&] {
      serial = ref::eval_grid_2d(s2, Vec2{0.0, 0.0}, step, n, n);
    });
    double tp = time_best_of(reps, [&] {
      parallel = eval_grid_2d(s2, Vec2{0.0, 0.0}, step, n, n);
    });
    report("eval_grid_2d q=48 640^2", ts, tp, same_bits(serial, parallel));
  }
  return 0;
}
