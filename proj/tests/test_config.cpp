#include <sstream>

#include <gtest/gtest.h>

#include "majorana/io/csv.hpp"
#include "majorana/io/run_config.hpp"
#include "majorana/io/units.hpp"

namespace majorana::io {
namespace {

TEST(Units, ParseQuantities) {
  EXPECT_DOUBLE_EQ(parse_quantity("x", "117.7us", Dimension::Time), 117.7e-6);
  EXPECT_DOUBLE_EQ(parse_quantity("x", "117.7 us", Dimension::Time), 117.7e-6);
  EXPECT_DOUBLE_EQ(parse_quantity("x", "2ms", Dimension::Time), 2e-3);
  EXPECT_DOUBLE_EQ(parse_quantity("x", "0.3G", Dimension::Field), 0.3e-4);
  EXPECT_DOUBLE_EQ(parse_quantity("x", "5mT", Dimension::Field), 5e-3);
  EXPECT_DOUBLE_EQ(parse_quantity("x", "1.2MHz", Dimension::Frequency), 1.2e6);
  EXPECT_DOUBLE_EQ(parse_quantity("x", "3 G/us", Dimension::FieldRate), 3e-4 / 1e-6);
  EXPECT_DOUBLE_EQ(parse_quantity("x", "1e-6 s", Dimension::Time), 1e-6);
  EXPECT_DOUBLE_EQ(parse_quantity("x", "4.4\u00b5s", Dimension::Time), 4.4e-6);
  // Physical quantities always carry a unit.
  EXPECT_THROW(parse_quantity("x", "1e-6", Dimension::Time), ConfigError);
}

TEST(Units, MalformedQuantityNamesField) {
  try {
    parse_quantity("tau_i", "117.7ms?", Dimension::Time);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "tau_i");
    EXPECT_NE(std::string(e.what()).find("117.7ms?"), std::string::npos);
  }
  EXPECT_THROW(parse_quantity("B_zI", "50 furlongs", Dimension::Field), ConfigError);
  EXPECT_THROW(parse_quantity("B_zI", "G", Dimension::Field), ConfigError);
  EXPECT_THROW(parse_quantity("tau_q", "5 G", Dimension::Time), ConfigError);
}

TEST(Units, Lists) {
  const auto v = parse_quantity_list("tau_i", "117.7us, 30.3 us,4.4us", Dimension::Time);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_DOUBLE_EQ(v[1], 30.3e-6);
  EXPECT_THROW(parse_quantity_list("tau_i", "1us,,2us", Dimension::Time), ConfigError);
}

TEST(Units, HalfIntegers) {
  EXPECT_EQ(parse_two_m("m0", "2"), 4);
  EXPECT_EQ(parse_two_m("m0", "-3/2"), -3);
  EXPECT_EQ(parse_two_m("m0", "1/2"), 1);
  EXPECT_THROW(parse_two_m("m0", "2/4"), ConfigError);
  EXPECT_THROW(parse_two_m("m0", "4/2"), ConfigError);
  EXPECT_THROW(parse_two_m("m0", "x"), ConfigError);
  EXPECT_EQ(format_two_m(-3), "-3/2");
  EXPECT_EQ(format_two_m(4), "2");
}

TEST(RunConfig, DefaultsValidate) {
  const RunConfig c;
  EXPECT_NO_THROW(validate(c));
  EXPECT_EQ(c.sys.two_J, 4);
  EXPECT_EQ(c.tau_i_values.size(), 7u);
}

TEST(RunConfig, ApplyTextAndOverrides) {
  RunConfig c;
  std::istringstream in("# comment\nspin = 1/2\nm0 = -1/2\n\nB_zI = 40 G\ntau_i = 10us, 5us\nK = 1e10 /T/s\n");
  apply_text(c, in, "test");
  EXPECT_EQ(c.sys.two_J, 1);
  EXPECT_EQ(c.two_m0, -1);
  EXPECT_DOUBLE_EQ(c.field.B_zI, 40e-4);
  EXPECT_EQ(c.tau_i_values.size(), 2u);
  EXPECT_EQ(*c.K, 1e10);
  apply_override(c, "K=default");
  EXPECT_FALSE(c.K.has_value());
  EXPECT_NO_THROW(validate(c));
}

TEST(RunConfig, UnknownKeyRejected) {
  RunConfig c;
  try {
    apply_override(c, "bogus=1");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "bogus");
  }
  EXPECT_THROW(apply_override(c, "no equals sign"), ConfigError);
}

TEST(RunConfig, CrossFieldValidation) {
  RunConfig c;
  c.two_m0 = 6;
  EXPECT_THROW(validate(c), ConfigError);
  c = RunConfig();
  c.t_start = 0.0;
  EXPECT_THROW(validate(c), ConfigError);
  c = RunConfig();
  apply_override(c, "rel_tol=0.1");
  try {
    validate(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "rel_tol");
  }
}

TEST(RunConfig, EchoRoundTripIsBitIdentical) {
  RunConfig c;
  apply_override(c, "B_yI=0.123456789012345 G");
  apply_override(c, "tau_i=117.7us, 3.3333333333333us");
  apply_override(c, "K=6.1e10 /T/s");
  apply_override(c, "t_start=1.1us");
  apply_override(c, "t_end=9.7us");
  apply_override(c, "f_rot=0.6MHz");
  apply_override(c, "max_step=1ns");
  apply_override(c, "field_mode=exponential");

  std::ostringstream csv;
  CsvWriter w(csv, c, {"a", "b"});
  w.row({"1", "2"});

  RunConfig back;
  std::istringstream in(csv.str());
  apply_text(back, in, "csv");
  EXPECT_EQ(echo(back), echo(c));
  EXPECT_EQ(back.field.B_yI, c.field.B_yI);
  EXPECT_EQ(back.tau_i_values, c.tau_i_values);
  EXPECT_EQ(back.K, c.K);
  EXPECT_EQ(back.t_start, c.t_start);
  EXPECT_EQ(back.max_step, c.max_step);
  EXPECT_EQ(back.sys.mu_B, c.sys.mu_B);
  EXPECT_EQ(back.field.mode, FieldMode::ExactExponential);
}

TEST(Csv, LayoutAndLabels) {
  RunConfig c;
  std::ostringstream out;
  CsvWriter w(out, c, {"x", "label"});
  w.row({CsvWriter::cell(0.1), "a,b"});
  const std::string s = out.str();
  EXPECT_EQ(s.rfind(kEchoMarker, 0), 0u);
  EXPECT_NE(s.find("\nx,label\n0.10000000000000001,\"a,b\"\n"), std::string::npos);
  EXPECT_EQ(m_label(4), "m2");
  EXPECT_EQ(m_label(-2), "mm1");
  EXPECT_EQ(m_label(1), "m1_2");
  EXPECT_EQ(m_label(-3), "mm3_2");
  EXPECT_EQ(m_cell(-3), "-1.5");
  EXPECT_EQ(m_cell(0), "0");
}

}  // namespace
}  // namespace majorana::io
