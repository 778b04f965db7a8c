#include "covep/errors.hpp"
#include "covep/field_io.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace covep;
using covep::test::box;
using covep::test::torus;

namespace {

std::string one_form_csv(const AlgebraOneForm& sigma) {
  std::ostringstream os;
  write_one_form_csv(os, sigma);
  return os.str();
}

std::string replace_line(const std::string& text, int line, const std::string& with) {
  std::istringstream is(text);
  std::ostringstream os;
  std::string row;
  for (int k = 0; std::getline(is, row); ++k) os << (k == line ? with : row) << "\n";
  return os.str();
}

std::string drop_line(const std::string& text, int line) {
  std::istringstream is(text);
  std::ostringstream os;
  std::string row;
  for (int k = 0; std::getline(is, row); ++k)
    if (k != line) os << row << "\n";
  return os.str();
}

void expect_input_error(const std::string& csv, const BundlePtr& b, const std::string& fragment = {}) {
  std::istringstream is(csv);
  try {
    read_one_form_csv(is, b);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    if (!fragment.empty()) EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(FormatDouble, RoundTripsExactly) {
  for (double x : {0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::numeric_limits<double>::max(),
                   std::numeric_limits<double>::denorm_min()}) {
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(FieldIo, OneFormRoundTripIsExact) {
  SeededRng rng(1);
  const auto b = torus(GroupModel::su2(), {5, 4});
  const auto sigma = random_one_form(b, rng, FourierSpec{3, 1.0});
  std::istringstream is(one_form_csv(sigma));
  EXPECT_EQ((read_one_form_csv(is, b) - sigma).max_abs(), 0.0);
}

TEST(FieldIo, GroupFieldRoundTripIsExact) {
  for (const auto& g : {GroupModel::su2(), GroupModel::so3(), GroupModel::abelian(3)}) {
    SeededRng rng(2);
    const auto b = box(g, {4, 3, 3});
    const auto s = random_group_field(b, rng, FourierSpec{3, 1.0});
    std::ostringstream os;
    write_group_field_csv(os, s);
    std::istringstream is(os.str());
    const auto t = read_group_field_csv(is, b);
    for (NodeIndex v = 0; v < s.node_count(); ++v) EXPECT_LT(payload_distance(s[v], t[v]), 1e-15);
  }
}

TEST(FieldIo, CurvatureCsvListsOrderedPairs) {
  const auto b = torus(GroupModel::so3(), {3, 3, 3});
  std::ostringstream os;
  write_curvature_csv(os, CurvatureField(b));
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "idx0,idx1,idx2,gamma,i,j,value");
  std::size_t rows = 0;
  for (std::string row; std::getline(is, row);) ++rows;
  EXPECT_EQ(rows, 27u * 3u * 3u);
}

TEST(FieldIo, HeaderFormats) {
  const auto b = torus(GroupModel::su2(), {3, 3});
  auto first_line = [](const std::string& s) { return s.substr(0, s.find('\n')); };
  EXPECT_EQ(first_line(one_form_csv(AlgebraOneForm(b))), "idx0,idx1,alpha,i,value");
  std::ostringstream a, c, g;
  write_algebra_field_csv(a, AlgebraField(b));
  write_coalgebra_field_csv(c, CoalgebraField(b));
  write_group_field_csv(g, GroupField(b, b->group().identity()));
  EXPECT_EQ(first_line(a.str()), "idx0,idx1,alpha,value");
  EXPECT_EQ(first_line(c.str()), "idx0,idx1,beta,value");
  EXPECT_EQ(first_line(g.str()), "idx0,idx1,comp,value");
}

TEST(FieldIo, RejectsMalformedOneForms) {
  SeededRng rng(3);
  const auto b = torus(GroupModel::su2(), {3, 3});
  const std::string good = one_form_csv(random_one_form(b, rng, FourierSpec{3, 1.0}));
  expect_input_error("", b);
  expect_input_error(replace_line(good, 0, "idx0,idx1,alpha,value"), b, "header");
  expect_input_error(replace_line(good, 1, "0,0,0,0"), b);
  expect_input_error(replace_line(good, 1, "0,0,0,0,abc"), b);
  expect_input_error(replace_line(good, 1, "0,0,0,0,1.0extra"), b);
  expect_input_error(replace_line(good, 1, "0,x,0,0,1.0"), b);
  expect_input_error(replace_line(good, 1, "0,7,0,0,1.0"), b);
  expect_input_error(replace_line(good, 1, "0,0,3,0,1.0"), b);
  expect_input_error(replace_line(good, 1, "0,0,0,2,1.0"), b);
  expect_input_error(drop_line(good, 5), b, "missing");
  expect_input_error(replace_line(good, 2, "0,0,0,0,1.0"), b, "duplicate");
}

TEST(FieldIo, RejectsInvalidGroupPayloads) {
  const auto g = GroupModel::su2();
  const auto b = torus(g, {3});
  std::ostringstream os;
  write_group_field_csv(os, GroupField(b, g.identity()));
  // First row is node 0 comp 0 (w = 1); make the quaternion non-unit.
  std::istringstream is(replace_line(os.str(), 1, "0,0,2.0"));
  try {
    read_group_field_csv(is, b);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos) << e.what();
  }
}
