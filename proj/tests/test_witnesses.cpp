#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "json.hpp"
#include "oracle.hpp"
#include "qcausal/errors.hpp"
#include "qcausal/witnesses.hpp"

using namespace qcausal;
constexpr double pi = std::numbers::pi;

namespace {

const SubsystemLayout kTwo{"A", "B"};

ComplexMatrix werner(double w) {
  return w * phi_plus() + (1.0 - w) * 0.25 * ComplexMatrix::identity(4);
}

CausalMap coh() { return family_map({}); }
CausalMap theta_map(double theta) { return family_map({theta, 1.0, 0.0, {}}); }

}  // namespace

TEST(ProjectivePair, CompletenessAndOrthogonality) {
  const ProjectivePair pp(BlochVector::from_angles(0.4, 1.3));
  EXPECT_LT(max_abs_diff(pp.plus + pp.minus, ComplexMatrix::identity(2)), 1e-12);
  EXPECT_LT(max_abs_diff(pp.plus * pp.plus, pp.plus), 1e-12);
  EXPECT_NEAR(std::abs(trace_of_product(pp.plus, pp.minus)), 0.0, 1e-12);
}

TEST(Negativity, KnownStates) {
  EXPECT_NEAR(negativity(phi_plus(), kTwo, "B"), 0.5, 1e-12);
  EXPECT_NEAR(negativity(phi_plus(), kTwo, "A"), 0.5, 1e-12);
  EXPECT_EQ(negativity(kron(BlochVector::x_axis().projector(1), BlochVector::z_axis().projector(-1)), kTwo, "B"), 0.0);
  EXPECT_EQ(negativity(werner(1.0 / 3.0), kTwo, "B"), 0.0);
  for (double w : {0.2, 0.5, 0.8, 1.0}) EXPECT_NEAR(negativity(werner(w), kTwo, "B"), std::max(0.0, (3 * w - 1) / 4), 1e-12);
}

TEST(InducedState, IdentityMapConditionedOnC) {
  const InducedState s = induced_state(theta_map(0.0), Conditioned::C, BlochVector::z_axis().projector(+1));
  EXPECT_NEAR(s.prob, 0.5, 1e-12);
  EXPECT_LT(max_abs_diff(s.state, phi_plus()), 1e-12);
  EXPECT_EQ(s.layout, (SubsystemLayout{"B", "D"}));
}

TEST(InducedState, SwapMapConditionedOnBIsProduct) {
  const auto s = induced_state(theta_map(pi), Conditioned::B, BlochVector::x_axis().projector(-1), -1);
  EXPECT_EQ(s.layout, (SubsystemLayout{"C", "D"}));
  const ComplexMatrix expect = kron(BlochVector::x_axis().projector(-1), 0.5 * ComplexMatrix::identity(2));
  EXPECT_LT(max_abs_diff(s.state, expect), 1e-12);
}

TEST(InducedState, ZeroProbabilityOutcome) {
  // The swap hands the pure E state |0> to B, so b = -1 never occurs.
  FragmentSpec spec = family_fragment({pi, 1.0, 0.0, {}});
  spec.initial_state = kron(BlochVector::z_axis().projector(1), BlochVector::z_axis().projector(1));
  const CausalMap m = build_causal_map(spec);
  EXPECT_THROW(induced_state(m, Conditioned::B, BlochVector::z_axis().projector(-1)), ZeroProbabilityError);
}

TEST(PreparedState, Endpoints) {
  const ComplexMatrix d = BlochVector::y_axis().projector(+1);
  EXPECT_LT(max_abs_diff(prepared_state_cb(theta_map(pi), d).state, phi_plus()), 1e-12);
  const auto id = prepared_state_cb(theta_map(0.0), d);
  EXPECT_LT(max_abs_diff(id.state, kron(0.5 * ComplexMatrix::identity(2), d)), 1e-12);
  EXPECT_EQ(negativity(id), 0.0);
}

TEST(Covariance, DefinitionChecks) {
  auto cd_state = [](const ComplexMatrix& rho) {
    InducedState s;
    s.state = rho;
    s.layout = SubsystemLayout{"C", "D"};
    return s;
  };
  EXPECT_NEAR(covariance_xy(cd_state(phi_plus())), 0.0, 1e-15);
  EXPECT_NEAR(covariance_xy(cd_state(0.25 * (ComplexMatrix::identity(4) + kron(pauli::X(), pauli::Y())))), 1.0, 1e-15);
  const auto prod = kron(BlochVector::x_axis().projector(1), BlochVector::y_axis().projector(1));
  EXPECT_NEAR(covariance_xy(cd_state(prod)), 0.0, 1e-15);
  InducedState wrong = cd_state(phi_plus());
  wrong.layout = SubsystemLayout{"B", "D"};
  EXPECT_THROW(covariance_xy(wrong), ArgumentError);
}

TEST(CcdWitness, ParadigmValues) {
  EXPECT_NEAR(c_cd_witness(theta_map(0.0)), 0.0, 1e-12);
  EXPECT_NEAR(c_cd_witness(theta_map(pi)), 0.0, 1e-12);
  EXPECT_NEAR(c_cd_witness(family_map({pi / 2, 0.0, 0.0, {}})), 0.0, 1e-12);
  EXPECT_NEAR(c_cd_witness(coh()), oracle::c_cd(oracle::to_eigen(coh().choi())), 1e-12);
  EXPECT_NEAR(c_cd_witness(coh()), 0.5, 1e-12);
}

TEST(Search, PureEndpoints) {
  EXPECT_NEAR(search_pathway_cc(theta_map(pi)).min_negativity, 0.5, 1e-9);
  EXPECT_NEAR(search_pathway_cc(theta_map(0.0)).min_negativity, 0.0, 1e-12);
  EXPECT_NEAR(search_pathway_ce(theta_map(0.0)).min_negativity, 0.5, 1e-9);
  EXPECT_NEAR(search_pathway_ce(theta_map(pi)).min_negativity, 0.0, 1e-12);
  EXPECT_NEAR(search_berkson(theta_map(0.0)).min_negativity, 0.0, 1e-12);
  EXPECT_NEAR(search_berkson(theta_map(pi)).min_negativity, 0.0, 1e-12);
}

TEST(Search, AtLeastReferenceBasis) {
  const oracle::Mat tau = oracle::to_eigen(coh().choi());
  double ref_cc = 1, ref_ce = 1, ref_b = 1;
  for (int s : {+1, -1}) {
    ref_cc = std::min(ref_cc, oracle::negativity(oracle::prepared(tau, oracle::projector(0, 1, 0, s)), 1));
    ref_ce = std::min(ref_ce, oracle::negativity(oracle::condition(tau, 0, oracle::projector(1, 0, 0, s)).state, 1));
    ref_b = std::min(ref_b, oracle::negativity(oracle::condition(tau, 1, oracle::projector(0, 0, 1, s)).state, 1));
  }
  EXPECT_GE(search_pathway_cc(coh()).min_negativity, ref_cc - 1e-12);
  EXPECT_GE(search_pathway_ce(coh()).min_negativity, ref_ce - 1e-12);
  EXPECT_GE(search_berkson(coh()).min_negativity, ref_b - 1e-12);
  EXPECT_NEAR(ref_b, (std::sqrt(2.0) - 1.0) / 4.0, 1e-12);
}

TEST(Search, ReportedBasisAttainsValue) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const CausalMap m = build_causal_map(oracle::random_fragment(rng));
    const auto r = search_berkson(m);
    const ProjectivePair pp(r.basis);
    double v = 1;
    for (int s : {+1, -1}) v = std::min(v, negativity(induced_state(m, Conditioned::B, pp[s], s)));
    EXPECT_NEAR(v, r.min_negativity, 1e-12);
  }
}

TEST(EntanglementBreaking, IdentityMap) {
  const auto eb = entanglement_breaking_flags(theta_map(0.0));
  EXPECT_TRUE(eb.common_cause);
  EXPECT_FALSE(eb.cause_effect);
  const auto sw = entanglement_breaking_flags(theta_map(pi));
  EXPECT_FALSE(sw.common_cause);
  EXPECT_TRUE(sw.cause_effect);
}

TEST(Classify, Paradigms) {
  EXPECT_EQ(classify(coh()).class_label, CausalClass::Coh);
  EXPECT_EQ(classify(family_map({pi / 2, 0.0, 0.0, {}})).class_label, CausalClass::ProbQ);
  EXPECT_EQ(classify(family_map({pi / 2, 1.0, 1.0, DephasingAxes::xyz()})).class_label, CausalClass::PhysC);
  EXPECT_EQ(classify(family_map({pi / 2, 1.0, 1.0, DephasingAxes::zzz()})).class_label, CausalClass::ProbC);
}

TEST(Classify, ThetaZeroFlags) {
  const auto r = classify(theta_map(0.0));
  EXPECT_TRUE(r.flags.ce_quantum);
  EXPECT_FALSE(r.flags.cc_quantum);
  EXPECT_FALSE(r.flags.berkson);
  EXPECT_FALSE(r.flags.physical_mixture);
  EXPECT_EQ(r.class_label, CausalClass::ProbQ);
}

TEST(AssignClass, LatticeRules) {
  WitnessReport r;
  auto with = [&](double c_cd, double cc, double ce, double berkson, double cc_marg, double ce_marg) {
    r.c_cd = c_cd;
    r.search_cc.min_negativity = cc;
    r.search_ce.min_negativity = ce;
    r.search_berkson.min_negativity = berkson;
    r.cc_marginal_negativity = cc_marg;
    r.ce_marginal_negativity = ce_marg;
    assign_class(r, WitnessThresholds::uniform(1e-7));
    return r.class_label;
  };
  EXPECT_EQ(with(0, 0, 0, 0, 0, 0), CausalClass::ProbC);
  EXPECT_EQ(with(0, 0.1, 0, 0, 0.1, 0), CausalClass::ProbQ);
  EXPECT_EQ(with(0.2, 0, 0, 0, 0, 0), CausalClass::PhysC);
  EXPECT_EQ(with(0.2, 0.1, 0, 0, 0.1, 0), CausalClass::PhysQ);
  EXPECT_EQ(with(0.2, 0.1, 0.1, 0.05, 0.1, 0.1), CausalClass::Coh);
  // Berkson alone is not enough when both pathways are entanglement breaking.
  EXPECT_EQ(with(0.2, 0, 0, 0.05, 0, 0), CausalClass::PhysC);
  EXPECT_EQ(with(std::nan(""), 0, 0, 0, 0, 0), CausalClass::Undetermined);
  // Small values below epsilon are treated as zero.
  EXPECT_EQ(with(5e-8, 0, 0, 0, 0, 0), CausalClass::ProbC);
}

TEST(CausalClass, StringRoundTrip) {
  for (auto c : {CausalClass::ProbC, CausalClass::ProbQ, CausalClass::PhysC, CausalClass::PhysQ, CausalClass::Coh,
                 CausalClass::Undetermined})
    EXPECT_EQ(causal_class_from_string(to_string(c)), c);
  EXPECT_EQ(to_string(CausalClass::Undetermined), "undetermined");
  EXPECT_THROW(causal_class_from_string("Quantum"), ArgumentError);
}

TEST(ReportJson, CarriesAllFields) {
  const auto j = nlohmann::json::parse(witness_report_to_json(classify(coh())));
  for (const char* key : {"c_cd", "neg_bd_plus", "neg_cd_minus", "search_berkson", "basis_cc", "physical_mixture",
                          "ce_entanglement_breaking", "class", "epsilon"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["class"], "Coh");
}
