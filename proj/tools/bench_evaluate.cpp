// Benchmark: OpenMP out-of-sample evaluation kernel against the serial
// reference on the ten-region fixture. Both paths must produce identical
// results; the speedup column is the point of the exercise.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "resplan/evaluation.hpp"
#include "resplan/experiment.hpp"
#include "resplan/fixtures.hpp"

using namespace resplan;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

bool identical(const PlanEvaluation& a, const PlanEvaluation& b) {
  bool same = a.operating == b.operating && a.capacity == b.capacity &&
              a.shipping == b.shipping && a.inventory == b.inventory &&
              a.penalty == b.penalty && a.total == b.total &&
              a.unmet_mean == b.unmet_mean && a.unmet_std == b.unmet_std;
  for (int q = 0; q < 5; ++q) same = same && a.unmet_percentile[q] == b.unmet_percentile[q];
  return same && a.scenario_cost == b.scenario_cost &&
         a.scenario_unmet == b.scenario_unmet &&
         a.region_unmet_pct == b.region_unmet_pct &&
         a.period_backlog == b.period_backlog;
}

}  // namespace

int main(int argc, char** argv) {
  int scenarios = 800;
  int repeats = 3;
  CLI::App app{"Timing comparison of the parallel and serial plan evaluators"};
  app.add_option("-n,--scenarios", scenarios, "out-of-sample scenario count")
      ->check(CLI::PositiveNumber);
  app.add_option("-r,--repeats", repeats, "timed repetitions per variant")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  ExperimentConfig config = us10_config();
  config.out_sample_count = scenarios;
  Instance base = us10_instance();
  ExperimentInputs inputs = prepare_experiment(config, base);
  ApproachResult sp = solve_approach(inputs, "sp");

  std::printf("instance: %d DCs, %d regions, %d periods; %d scenarios, %d repeats\n",
              inputs.instance.num_dcs(), inputs.instance.num_sites(),
              inputs.instance.periods, scenarios, repeats);
#ifdef _OPENMP
  std::printf("openmp: enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled at build time; both rows run serially\n");
#endif

  // untimed warmup so page faults and lazy allocations hit neither row
  PlanEvaluation serial = out_of_sample_evaluate_serial(
      inputs.instance, sp.plan.open, sp.plan.capacity, inputs.out_sample);
  PlanEvaluation parallel = out_of_sample_evaluate(
      inputs.instance, sp.plan.open, sp.plan.capacity, inputs.out_sample);
  if (!identical(serial, parallel)) {
    std::printf("FAIL: serial and parallel evaluations differ\n");
    return 1;
  }

  double serial_best = 1e300, parallel_best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    double t0 = now_ms();
    serial = out_of_sample_evaluate_serial(inputs.instance, sp.plan.open,
                                           sp.plan.capacity, inputs.out_sample);
    double t1 = now_ms();
    parallel = out_of_sample_evaluate(inputs.instance, sp.plan.open, sp.plan.capacity,
                                      inputs.out_sample);
    double t2 = now_ms();
    serial_best = std::min(serial_best, t1 - t0);
    parallel_best = std::min(parallel_best, t2 - t1);
    if (!identical(serial, parallel)) {
      std::printf("FAIL: serial and parallel evaluations differ on repeat %d\n", r);
      return 1;
    }
  }

  std::printf("serial   : %9.2f ms\n", serial_best);
  std::printf("parallel : %9.2f ms\n", parallel_best);
  std::printf("speedup  : %9.2fx\n", serial_best / parallel_best);
  std::printf("results identical across variants (total %.6f, unmet mean %.6f)\n",
              serial.total, serial.unmet_mean);
  return 0;
}
