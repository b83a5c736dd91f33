// |c_2|^2 against time for three rotation frequencies at a fixed Larmor
// frequency. Writes rotation_traces.csv (t in us relative to the reversal).

#include <cstdio>
#include <fstream>

#include "majorana/analytic.hpp"
#include "majorana/experiments.hpp"
#include "majorana/propagator.hpp"

using namespace majorana;

int main() {
  const SpinSystem sys(4);
  FieldModel base;
  base.B_yI = 0.3e-4;
  base.B_yQ = 0.2e-4;
  base.B_zI = 50e-4;
  base.B_zQ = 45e-4;
  base.tau_q = 117.7e-6;
  base.tau_i = 10e-6;

  const double f_rots[] = {0.6e6, 1.2e6, 2.8e6};
  const int n = 1201;
  const double half_width = 3e-6;
  std::vector<TimeTrace> traces;
  std::printf("f_Lar at reversal = %.3f MHz\n", larmor_frequency(sys, base.A_y()) / 1e6);
  for (double f_rot : f_rots) {
    const FieldModel ramp = ramp_for_rotation_frequency(base, f_rot);
    PropagationSettings s;
    s.t_start = reversal_time(ramp) - half_width;
    s.t_end = reversal_time(ramp) + half_width;
    s.basis_out = MeasurementBasis::FieldAligned;
    traces.push_back(time_trace(sys, ramp, 4, s, n));
    std::printf("f_Rot = %.1f MHz: final |c_2|^2 = %.4f, activity window = %.3f us, dt formula = %.3f us\n",
                f_rot / 1e6, traces.back().populations(n - 1, 0), activity_window(traces.back(), 0) * 1e6,
                transition_window(sys, ramp) * 1e6);
  }

  std::ofstream out("rotation_traces.csv");
  out << "t_us,c2_0.6MHz,c2_1.2MHz,c2_2.8MHz\n";
  for (int i = 0; i < n; ++i) {
    out << (-half_width + 2 * half_width * i / (n - 1)) * 1e6;
    for (const TimeTrace& t : traces) out << ',' << t.populations(i, 0);
    out << '\n';
  }
  std::printf("wrote rotation_traces.csv\n");
}
