// Compares the OpenMP batch kernels against their serial references on the
// solver-heavy workloads: the binary fixed-point scan, damped multistarts,
// and separator enumeration over simulator oracles.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "subcausal/axioms.hpp"
#include "subcausal/fixtures.hpp"
#include "subcausal/reveal.hpp"
#include "subcausal/scr.hpp"

using namespace subcausal;
namespace fx = subcausal::fixtures;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch())
      .count();
}

template <typename F>
double time_ms(F&& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    double t0 = now_ms();
    f();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

}  // namespace

int main() {
  printf("threads available: %d\n\n", omp_get_max_threads());

  // Binary scan on the self-confirming menu.
  {
    auto menu = fx::multiplicity_menu(Rat(3, 4), Rat(1, 100000));
    auto model = fx::multiplicity_model(30.0);
    scr::MenuPredictor pred(menu, model);
    std::vector<double> ws;
    for (int i = 1; i < 200000; ++i) {
      double z = i / 200000.0;
      ws.push_back(std::log(z / (1 - z)));
    }
    std::vector<double> out;
    double serial = time_ms([&] { scr::response_gap_grid_serial(pred, ws, &out); }, 3);
    std::vector<double> out_par;
    double parallel = time_ms([&] { scr::response_gap_grid(pred, ws, &out_par, true); }, 3);
    bool identical = out == out_par;
    printf("binary gap scan (%zu evals): serial %.1f ms, openmp %.1f ms (x%.2f), identical=%d\n",
           ws.size(), serial, parallel, serial / parallel, identical);
  }

  // Multistart damped iteration on a 4-action menu.
  {
    auto space = fx::running_space();
    std::vector<probspace::Action> acts;
    for (int i = 0; i < 4; ++i)
      acts.push_back(axioms::random_action(space, 100 + i));
    probspace::Menu menu(acts, true);
    auto model = fx::model_rp(6.0);
    scr::MenuPredictor pred(menu, model);
    scr::SolveParams params;
    params.multistart = 512;
    std::vector<std::vector<double>> starts;
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    for (int s = 0; s < 512; ++s) {
      std::vector<double> sigma(4);
      double total = 0;
      for (auto& x : sigma) total += (x = unif(rng));
      for (auto& x : sigma) x /= total;
      starts.push_back(sigma);
    }
    std::vector<scr::StartResult> res_s, res_p;
    double serial = time_ms([&] { scr::run_starts_serial(pred, starts, params, &res_s); }, 3);
    double parallel = time_ms([&] { scr::run_starts(pred, starts, params, &res_p, true); }, 3);
    bool identical = true;
    for (size_t i = 0; i < res_s.size(); ++i)
      identical = identical && res_s[i].sigma == res_p[i].sigma;
    printf("multistart (512 starts): serial %.1f ms, openmp %.1f ms (x%.2f), identical=%d\n",
           serial, parallel, serial / parallel, identical);
  }

  // Separator enumeration battery over the six running-example oracles.
  {
    auto run = [&](bool parallel) {
      for (const auto& [name, R] : fx::running_dags()) {
        reveal::SimulatorOracle oracle(fx::running_model(name, 6.0));
        reveal::RevealParams rp;
        rp.parallel = parallel;
        reveal::minimal_separators(oracle, rp);
      }
    };
    double serial = time_ms([&] { run(false); }, 3);
    double parallel = time_ms([&] { run(true); }, 3);
    printf("separator batteries (6 oracles): serial %.1f ms, openmp %.1f ms (x%.2f)\n",
           serial, parallel, serial / parallel);
  }
  return 0;
}
