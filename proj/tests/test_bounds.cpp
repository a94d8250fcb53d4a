#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mclt/bounds.hpp"
#include "mclt/error.hpp"
#include "mclt/mds.hpp"
#include "mclt/nfunc.hpp"

using namespace mclt;

namespace {

BoundInputs unit_v(BoundInputs in) {
  for (const double q : {0.5, 1.0, 1.5}) in.v_norms[q] = 0.0;
  return in;
}

double sum_terms(const BoundReport& r) {
  double s = 0.0;
  for (const auto& [name, v] : r.terms) s += v;
  return s;
}

}  // namespace

TEST(BoundIds, RoundTrip) {
  for (const auto id : all_bounds()) EXPECT_EQ(parse_bound_id(to_string(id)), id);
  EXPECT_THROW(parse_bound_id("thm99"), ParameterError);
  EXPECT_EQ(all_bounds().size(), 13U);
}

TEST(VTerm, DeterministicScheduleIsZero) {
  const std::vector<std::vector<double>> rows(5, std::vector<double>(4, 0.25));
  EXPECT_EQ(v_term(rows, 1.0, 0.5), 0.0);
  EXPECT_EQ(v_term(rows, 1.0, 1.0), 0.0);
  EXPECT_THROW(v_term(rows, 0.0, 1.0), DomainError);
}

TEST(VTerm, MixtureFiniteSum) {
  // V_n² = (1 + (n-1)B)/n with B = 1 ± 1/2, so E|V_n² - 1| = (n-1)/(2n).
  for (const std::size_t n : {4U, 100U, 10000U}) {
    const double nn = static_cast<double>(n);
    std::vector<std::vector<double>> rows;
    for (const double b : {0.5, 1.5}) {
      std::vector<double> s2(n, b / nn);
      s2[0] = 1.0 / nn;
      rows.push_back(s2);
    }
    EXPECT_NEAR(v_term(rows, 1.0, 1.0), std::sqrt((nn - 1.0) / (2.0 * nn)), 1e-12);
  }
}

TEST(VNorm, QuasiNorm) {
  const std::vector<double> v{1.25, 0.75, 1.0, 1.0};
  // E|V - 1|^{1/2} = 0.5 * 0.5 = 0.25, so ‖·‖_{1/2} = 0.0625.
  EXPECT_NEAR(v_norm(v, 0.5), 0.0625, 1e-15);
}

TEST(Thm21, SecondFormArithmetic) {
  BoundInputs in;
  in.p = 4.0;
  in.L_phi = 0.05;
  in.v_norms[0.5] = 0.01;
  const auto r = rhs_w1(BoundId::thm21_ii, in);
  EXPECT_NEAR(r.term("pL"), 0.2, 1e-15);
  EXPECT_NEAR(r.term("v_term"), 0.1, 1e-15);
  EXPECT_NEAR(r.value, 0.3, 1e-15);
  EXPECT_EQ(r.value, sum_terms(r));
}

TEST(Thm21, SecondFormNeedsPAboveTwo) {
  BoundInputs in;
  in.p = 2.0;
  in.L_phi = 0.1;
  in.v_norms[0.5] = 0.0;
  EXPECT_THROW(rhs_w1(BoundId::thm21_ii, in), DomainError);
}

TEST(Thm21, FirstFormLogFactor) {
  BoundInputs in;
  in.L_phi = 1.0;
  in.v_norms[0.5] = 0.04;
  const auto r = rhs_w1(BoundId::thm21_i, in);
  EXPECT_NEAR(r.details.at("log_factor"), std::log(std::numbers::e + 1.0), 1e-15);
  EXPECT_NEAR(r.value, std::log(std::numbers::e + 1.0) + 0.2, 1e-15);
}

TEST(Thm21, MissingInput) {
  BoundInputs in;
  in.L_phi = 1.0;
  EXPECT_THROW(rhs_w1(BoundId::thm21_i, in), ParameterError);
}

TEST(Thm21, MinimumOfBothForms) {
  // min{p, log(e + L_p^{-2})} L_p is the pointwise minimum of the two reports.
  for (const double L : {1e-4, 0.01, 0.3, 2.0}) {
    for (const double p : {2.5, 3.0, 6.0}) {
      BoundInputs in = unit_v({});
      in.p = p;
      in.L_phi = L;
      const double lo = std::min(rhs_w1(BoundId::thm21_i, in).value, rhs_w1(BoundId::thm21_ii, in).value);
      EXPECT_NEAR(lo, std::min(p, std::log(std::numbers::e + 1.0 / (L * L))) * L, 1e-15);
    }
  }
}

TEST(Thm21, OrderingPrecondition) {
  BoundInputs in = unit_v({});
  in.nf = NFunction::exp_poly();
  in.p = 3.0;
  in.L_phi = 0.1;
  EXPECT_NO_THROW(rhs_w1(BoundId::thm21_i, in));
  EXPECT_THROW(rhs_w1(BoundId::thm21_ii, in), DomainError);
}

TEST(Priors, Joos91FirstTerm) {
  const double n = 400.0;
  BoundInputs in;
  in.M = 1.0;
  in.s_n = std::sqrt(n);
  in.v_norms[1.0] = 0.0;
  const auto r = rhs_w1(BoundId::prior_joos91, in);
  EXPECT_NEAR(r.term("M_log"), std::log(std::numbers::e + n) / std::sqrt(n), 1e-15);
  EXPECT_EQ(r.term("v_term"), 0.0);
}

TEST(Priors, HaeuslerJoosExponents) {
  BoundInputs in;
  in.p = 3.0;
  in.L_p = 0.008;
  in.q = 2.0;
  in.v_norms[2.0] = 0.2;
  const auto r = rhs_w1(BoundId::prior_haeusler_joos, in);
  EXPECT_NEAR(r.term("L_pow"), std::pow(0.008, 0.75), 1e-15);
  EXPECT_NEAR(r.term("v_term"), std::pow(0.2, 0.4), 1e-15);
}

TEST(Priors, FanMaAndRollinAndFanSu) {
  BoundInputs in = unit_v({});
  in.L3 = 0.1;
  in.L_p = 0.2;
  in.p = 2.5;
  in.s_n = 2.0;
  in.max_norm_2q = 0.5;
  const auto fm = rhs_w1(BoundId::prior_fanma, in);
  EXPECT_NEAR(fm.value, 0.1 + 0.0 + 0.25, 1e-15);
  EXPECT_NEAR(rhs_w1(BoundId::prior_rollin, in).value, 0.1, 1e-15);
  EXPECT_NEAR(rhs_w1(BoundId::prior_fansu, in).value, 0.2, 1e-15);
  in.v_norms[1.0] = 0.3;
  EXPECT_THROW(rhs_w1(BoundId::prior_rollin, in), DomainError);
  in.p = 3.5;
  EXPECT_THROW(rhs_w1(BoundId::prior_fansu, in), DomainError);
}

TEST(Thm22, FirstFormArithmetic) {
  BoundInputs in;
  in.nf = NFunction::power(3.0);
  in.L_phi = 0.1;
  in.v_norms[1.0] = 0.04;
  const auto r = rhs_w2(BoundId::thm22_i, in);
  EXPECT_NEAR(r.value, 0.3, 1e-15);
}

TEST(Thm22, FirstFormPrecondition) {
  BoundInputs in;
  in.nf = NFunction::power(4.0);
  in.L_phi = 0.1;
  in.v_norms[1.0] = 0.0;
  EXPECT_THROW(rhs_w2(BoundId::thm22_i, in), DomainError);
  in.nf = NFunction::power(1.5);
  EXPECT_THROW(rhs_w2(BoundId::thm22_i, in), DomainError);
}

TEST(Thm22, SecondFormGrowthForPowers) {
  // g⁻¹ inverts x -> φ(x)/x; for x^p the middle term is n^{1/4 + 1/(2p² - 2p)} ‖Y‖_p / s_n.
  for (const double p : {3.0, 4.0, 6.0}) {
    for (const std::size_t n : {64U, 4096U}) {
      BoundInputs in;
      in.nf = NFunction::power(p);
      in.L_phi = 0.0;
      in.norm_phi = 1.0;
      in.s_n = 1.0;
      in.n = n;
      in.v_norms[1.0] = 0.0;
      const auto r = rhs_w2(BoundId::thm22_ii, in);
      const double expect = std::pow(static_cast<double>(n), 0.25 + 1.0 / (2.0 * p * p - 2.0 * p));
      EXPECT_NEAR(r.term("g_term"), expect, 1e-9 * expect) << p << " " << n;
    }
  }
}

TEST(Thm22, SecondFormCubicIsCubeRoot) {
  BoundInputs in;
  in.nf = NFunction::power(3.0);
  in.L_phi = 0.0;
  in.norm_phi = 2.0;
  in.s_n = 4.0;
  in.n = 1000;
  in.v_norms[1.0] = 0.0;
  EXPECT_NEAR(rhs_w2(BoundId::thm22_ii, in).term("g_term"), 0.5 * 10.0, 1e-9);
  in.nf = NFunction::power(2.5);
  EXPECT_THROW(rhs_w2(BoundId::thm22_ii, in), DomainError);
}

TEST(Thm23, Arithmetic) {
  BoundInputs in;
  in.L3 = 0.1;
  in.v_norms[1.5] = 0.04;
  EXPECT_NEAR(rhs_w3(in).value, 0.3, 1e-15);
  in.v_norms[1.5] = 0.0;
  EXPECT_EQ(rhs_w3(in).value, 0.1);
}

TEST(Thm23, RademacherLyapunov) {
  for (const std::size_t n : {8U, 64U, 1000U}) {
    const auto m = MdsModel::make(ModelKind::iid_rademacher, n);
    EXPECT_NEAR(m.lyapunov_power_exact(3.0), std::pow(static_cast<double>(n), -1.0 / 6.0), 1e-13);
  }
}

TEST(Cor33, UnitVarianceReducesToLyapunov) {
  BoundInputs in = unit_v({});
  in.nf = NFunction::power(3.0);
  in.L_phi = 0.07;
  EXPECT_EQ(evaluate_bound(BoundId::cor33_i, 1, in).value, 0.07);
  EXPECT_EQ(evaluate_bound(BoundId::cor33_i, 2, in).value, 0.07);
  in.v_norms[0.5] = 0.1;
  EXPECT_THROW(evaluate_bound(BoundId::cor33_i, 1, in), DomainError);
}

TEST(Cor33, VarianceFloorCases) {
  BoundInputs in = unit_v({});
  in.nf = NFunction::power(3.0);
  in.n = 100;
  in.s_n = 2.0;
  in.M_phi = 0.5;
  in.sigma_floor = 0.1;
  const auto w1 = evaluate_bound(BoundId::cor33_ii, 1, in);
  EXPECT_NEAR(w1.value, 0.5 / (0.01 * 2.0) * std::log(100.0), 1e-12);
  const auto w2 = evaluate_bound(BoundId::cor33_ii, 2, in);
  EXPECT_NEAR(w2.value, std::sqrt(0.5) * 2.0 / (0.1 * std::sqrt(8.0)), 1e-12);
  in.nf = NFunction::power(2.5);
  const auto w1p = evaluate_bound(BoundId::cor33_ii, 1, in);
  EXPECT_NEAR(w1p.value, 0.5 * 4.0 / (0.5 * 0.01 * std::pow(2.0, 2.5)), 1e-12);
}

TEST(Cor33, BoundedIncrementCases) {
  BoundInputs in = unit_v({});
  in.nf = NFunction::power(3.0);
  in.s_n = 10.0;
  in.theta = 2.0;
  EXPECT_NEAR(evaluate_bound(BoundId::cor33_iii, 1, in).value, 0.2 * std::log(std::numbers::e + 10.0), 1e-15);
  EXPECT_NEAR(evaluate_bound(BoundId::cor33_iii, 2, in).value, std::sqrt(0.2), 1e-15);
}

TEST(EvaluateBound, RejectsWrongOrder) {
  BoundInputs in = unit_v({});
  in.L3 = 0.1;
  EXPECT_THROW(evaluate_bound(BoundId::thm23, 1, in), DomainError);
  EXPECT_THROW(evaluate_bound(BoundId::thm21_i, 2, in), DomainError);
}

TEST(BoundReport, DigestAndSum) {
  BoundInputs in = unit_v({});
  in.nf = NFunction::power(3.0);
  in.L_phi = 0.1;
  in.n = 64;
  in.s_n = 1.0;
  in.reps = 10;
  in.seed = 5;
  const auto r = rhs_w1(BoundId::thm21_i, in);
  EXPECT_EQ(r.value, sum_terms(r));
  EXPECT_NE(r.inputs_digest.find("nfunction=power:3"), std::string::npos);
  EXPECT_NE(r.inputs_digest.find("seed=5"), std::string::npos);
  for (const auto& [name, v] : r.terms) EXPECT_GE(v, 0.0);
}
