// Populations after the field reversal for the turn-off-time series starting
// from m = +2 and from m = 0, closed form next to direct integration.

#include <cstdio>

#include "majorana/experiments.hpp"

using namespace majorana;

namespace {

void print_series(int two_m0, const std::vector<double>& taus) {
  SweepConfig c;
  c.sys = SpinSystem(4);
  c.base_model.B_yI = 0.3e-4;
  c.base_model.B_yQ = 0.2e-4;
  c.base_model.B_zI = 50e-4;
  c.base_model.B_zQ = 45e-4;
  c.base_model.tau_q = 117.7e-6;
  c.base_model.tau_i = taus.front();
  c.two_m0 = two_m0;
  c.tau_i_values = taus;
  c.parallel = true;
  const EngineReport report = compare_engines(c);

  std::printf("initial m = %d\n", two_m0 / 2);
  std::printf("%10s %8s  %-44s %s\n", "tau_i(us)", "flip_p", "analytic m=+2..-2", "numeric m=+2..-2");
  for (const SweepRecord& r : report.sweep.records) {
    std::printf("%10.1f %8.4f  ", r.tau_i * 1e6, r.flip_p);
    for (int k = 0; k < 5; ++k) std::printf("%8.4f ", r.analytic(k));
    std::printf("   ");
    for (int k = 0; k < 5; ++k) std::printf("%8.4f ", r.numeric(k));
    std::printf("\n");
  }
  std::printf("max |analytic - numeric| = %.2e\n\n", report.max_abs_diff());
}

}  // namespace

int main() {
  print_series(4, {117.7e-6, 30.3e-6, 16.1e-6, 11.4e-6, 7.7e-6, 5.8e-6, 4.4e-6});
  print_series(0, {157.6e-6, 31.3e-6, 19.5e-6, 16.6e-6, 8.8e-6, 7.9e-6, 4.3e-6});
}
