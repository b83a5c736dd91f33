#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "majorana/cli.hpp"

namespace majorana::cli {
namespace {

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

std::string body(const std::string& csv) {
  // Strip the comment block.
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    out += line + '\n';
  }
  return out;
}

TEST(CmdAnalytic, DefaultRunWritesOneRowPerPointAndState) {
  io::RunConfig c;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_analytic(c, out, err), kOk);
  const std::string b = body(out.str());
  EXPECT_EQ(b.rfind("tau_i_s,m,probability,theta_rad,flip_p,f_rot_hz,window_s\n", 0), 0u);
  EXPECT_EQ(count_lines(b), 1 + 7 * 5);
}

TEST(CmdAnalytic, NoReversalAnywhereIsDegenerate) {
  io::RunConfig c;
  io::apply_override(c, "tau_i=117.7us, 150us");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_analytic(c, out, err), kAllDegenerate);
}

TEST(CmdAnalytic, OutputReloadsAsConfig) {
  io::RunConfig c;
  io::apply_override(c, "m0=0");
  io::apply_override(c, "tau_i=16.6us");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_analytic(c, out, err), kOk);
  io::RunConfig back;
  std::istringstream in(out.str());
  io::apply_text(back, in, "csv");
  EXPECT_EQ(io::echo(back), io::echo(c));
}

TEST(CmdSimulate, RotationTrace) {
  io::RunConfig c;
  io::apply_override(c, "f_rot=1.2MHz");
  io::apply_override(c, "n_samples=201");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_simulate(c, out, err), kOk);
  const std::string b = body(out.str());
  EXPECT_EQ(b.rfind("t_s,B_y_T,B_z_T,p_m2,p_m1,p_m0,p_mm1,p_mm2\n", 0), 0u);
  EXPECT_EQ(count_lines(b), 202);
}

TEST(CmdSimulate, NoReversalReportsDegenerate) {
  io::RunConfig c;
  io::apply_override(c, "tau_i=117.7us");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_simulate(c, out, err), kAllDegenerate);
}

TEST(CmdSweep, AgreementReportOnStderr) {
  io::RunConfig c;
  io::apply_override(c, "tau_i=30.3us, 5.8us");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_sweep(c, out, err), kOk);
  EXPECT_EQ(count_lines(body(out.str())), 1 + 2 * 5);
  EXPECT_NE(err.str().find("max abs_diff"), std::string::npos);
  EXPECT_EQ(err.str().find("FLAGGED"), std::string::npos);
}

TEST(CmdSweep, IntegratorFailureExitCode) {
  io::RunConfig c;
  io::apply_override(c, "tau_i=5.8us");
  io::apply_override(c, "engines=numeric");
  io::apply_override(c, "max_step=1e-30s");  // forces the step below time resolution
  std::ostringstream out, err;
  EXPECT_EQ(cmd_sweep(c, out, err), kIntegratorFailure);
}

TEST(CmdValidate, DefaultsPass) {
  io::RunConfig c;
  std::ostringstream out;
  EXPECT_EQ(cmd_validate(c, out), kOk) << out.str();
  EXPECT_NE(out.str().find("all invariants hold"), std::string::npos);
}

TEST(CmdValidate, WrongConstantFails) {
  io::RunConfig c;
  c.K = 10 * default_K(c.sys);
  std::ostringstream out;
  EXPECT_EQ(cmd_validate(c, out), kValidationFailure);
  EXPECT_NE(out.str().find("FAIL"), std::string::npos);
}

}  // namespace
}  // namespace majorana::cli
