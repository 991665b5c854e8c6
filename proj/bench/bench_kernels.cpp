// Serial reference vs OpenMP kernels: wall time and bitwise agreement.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>

#include "epictrl/chunglu.hpp"
#include "epictrl/instances.hpp"
#include "epictrl/percolate.hpp"
#include "epictrl/saa.hpp"

using namespace epictrl;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

bool same(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void row(const char* name, double serial_ms, double parallel_ms, bool equal) {
  std::printf("%-28s %12.2f %12.2f %8.2fx  %s\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, equal ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::stoi(argv[1]) : 3;
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-28s %12s %12s %9s  %s\n", "kernel", "serial ms", "parallel ms", "ser/par", "result");
  bool all_equal = true;

  {
    InstanceSpec spec;
    spec.n = 400;
    spec.m = 1600;
    spec.p_min = 0.05;
    spec.p_max = 0.4;
    const ContactNetwork g = random_instance(spec, 11);
    InfectionEstimate a, b;
    const double ts = time_ms([&] { a = serial::estimate_infections(g, no_intervention(), 2000, 5); }, reps);
    const double tp = time_ms([&] { b = estimate_infections(g, no_intervention(), 2000, 5); }, reps);
    const bool eq = same(a.mean, b.mean) && same(a.half_width, b.half_width);
    all_equal &= eq;
    row("monte carlo percolation", ts, tp, eq);
  }
  {
    InstanceSpec spec;
    spec.n = 12;
    spec.m = 20;
    const ContactNetwork g = random_instance(spec, 12);
    InfectionEstimate a, b;
    const double ts = time_ms([&] { a = serial::exact_expected_infections(g, no_intervention()); }, reps);
    const double tp = time_ms([&] { b = exact_expected_infections(g, no_intervention()); }, reps);
    const bool eq = std::abs(a.mean - b.mean) <= 1e-12 * a.mean;
    all_equal &= eq;
    row("exact enumeration (m=20)", ts, tp, eq);
  }
  {
    const ChungLuModel model = build_model(10, 2.5, 1, 4);
    PathCensus a, b;
    const double ts = time_ms([&] { a = serial::estimate_gamma(model, 0.5, 2000, 5, 9); }, reps);
    const double tp = time_ms([&] { b = estimate_gamma(model, 0.5, 2000, 5, 9); }, reps);
    bool eq = same(a.total, b.total);
    for (std::size_t k = 0; k < a.counts.size(); ++k) eq &= same(a.counts[k], b.counts[k]);
    all_equal &= eq;
    row("path census (2000 graphs)", ts, tp, eq);
  }
  {
    InstanceSpec spec;
    spec.n = 10;
    spec.m = 16;
    const ContactNetwork g = random_instance(spec, 13);
    const SampleSet set = draw_samples(g, 40, 3);
    BruteForceResult a, b;
    const double ts = time_ms([&] { a = serial::brute_force_optimum(set, 3.0, RemovalMode::Edge); }, reps);
    const double tp = time_ms([&] { b = brute_force_optimum(set, 3.0, RemovalMode::Edge); }, reps);
    const bool eq = a.best.members == b.best.members && same(a.h, b.h);
    all_equal &= eq;
    row("brute force (16 edges)", ts, tp, eq);
  }
  return all_equal ? 0 : 1;
}
