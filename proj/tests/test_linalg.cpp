#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "qcausal/errors.hpp"
#include "qcausal/linalg.hpp"

using namespace qcausal;

namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g;
  ComplexMatrix m(dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) m(r, c) = {g(rng), g(rng)};
  return m;
}

ComplexMatrix bell() {
  ComplexMatrix phi(4);
  phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 0.5;
  return phi;
}

}  // namespace

TEST(ComplexMatrix, ArithmeticAndAdjoint) {
  const ComplexMatrix a{{1.0, {0.0, 2.0}}, {3.0, 4.0}};
  const ComplexMatrix b = a.adjoint();
  EXPECT_EQ(b(0, 1), complex(3.0, 0.0));
  EXPECT_EQ(b(1, 0), complex(0.0, -2.0));
  EXPECT_EQ(a.trace(), complex(5.0, 0.0));
  EXPECT_EQ((a * ComplexMatrix::identity(2)), a);
  EXPECT_NEAR((a - a).max_abs(), 0.0, 0.0);
  EXPECT_FALSE(a.is_hermitian());
  EXPECT_TRUE((a + b).is_hermitian());
}

TEST(ComplexMatrix, PauliAlgebra) {
  const complex i{0.0, 1.0};
  EXPECT_LT(max_abs_diff(pauli::X() * pauli::Y(), i * pauli::Z()), 1e-15);
  EXPECT_LT(max_abs_diff(pauli::swap() * pauli::swap(), ComplexMatrix::identity(4)), 1e-15);
}

TEST(Kron, OrderingMostSignificantFirst) {
  const ComplexMatrix k = kron(pauli::Z(), pauli::I());
  EXPECT_EQ(k(0, 0), complex(1.0));
  EXPECT_EQ(k(1, 1), complex(1.0));
  EXPECT_EQ(k(2, 2), complex(-1.0));
  std::mt19937_64 rng(3);
  const auto a = random_matrix(rng, 2), b = random_matrix(rng, 4);
  EXPECT_LT((oracle::to_eigen(kron(a, b)) - oracle::kron(oracle::to_eigen(a), oracle::to_eigen(b))).norm(), 1e-14);
  EXPECT_EQ(kron({a, b, a}).dim(), 16u);
}

TEST(SubsystemLayout, RejectsDuplicatesAndUnknownLabels) {
  EXPECT_THROW(SubsystemLayout({"A", "A"}), ArgumentError);
  const SubsystemLayout l{"C", "B", "D"};
  EXPECT_EQ(l.index_of("D"), 2u);
  EXPECT_EQ(l.shift_of("C"), 2u);
  EXPECT_THROW((void)l.index_of("Q"), ArgumentError);
}

TEST(PartialTrace, MatchesOracleOnRandomStates) {
  std::mt19937_64 rng(11);
  const SubsystemLayout l{"C", "B", "D"};
  for (int trial = 0; trial < 20; ++trial) {
    const oracle::Mat rho = oracle::random_density(rng, 8, 3);
    const ComplexMatrix m = oracle::from_eigen(rho);
    EXPECT_LT((oracle::to_eigen(partial_trace(m, l, {"C", "D"})) - oracle::trace_out(rho, 1, 3)).norm(), 1e-14);
    EXPECT_LT((oracle::to_eigen(partial_trace(m, l, {"B", "D"})) - oracle::trace_out(rho, 0, 3)).norm(), 1e-14);
    EXPECT_LT(
        (oracle::to_eigen(partial_transpose(m, l, "B")) - oracle::partial_transpose(rho, 1, 3)).norm(), 1e-14);
  }
}

TEST(PartialTrace, KeepsLayoutOrder) {
  const ComplexMatrix rho = kron({pauli::Z(), pauli::X(), pauli::I()});
  const SubsystemLayout l{"C", "B", "D"};
  EXPECT_LT(max_abs_diff(partial_trace(rho, l, {"C", "B"}), 2.0 * kron(pauli::Z(), pauli::X())), 1e-15);
  EXPECT_LT(max_abs_diff(partial_trace(rho, l, {"B", "C"}), 2.0 * kron(pauli::Z(), pauli::X())), 1e-15);
  EXPECT_THROW(partial_trace(rho, l, {"Q"}), ArgumentError);
}

TEST(PermuteSubsystems, RoundTrip) {
  std::mt19937_64 rng(5);
  const auto m = random_matrix(rng, 8);
  const SubsystemLayout a{"C", "B", "D"}, b{"D", "C", "B"};
  EXPECT_LT(max_abs_diff(permute_subsystems(permute_subsystems(m, a, b), b, a), m), 1e-15);
  const ComplexMatrix p = kron({pauli::X(), pauli::Y(), pauli::Z()});
  EXPECT_LT(max_abs_diff(permute_subsystems(p, a, b), kron({pauli::Z(), pauli::X(), pauli::Y()})), 1e-15);
}

TEST(ApplyLeft, EqualsExpandedOperator) {
  std::mt19937_64 rng(7);
  const SubsystemLayout l{"C", "E", "D", "R"};
  const oracle::Mat rho = oracle::random_density(rng, 16, 2);
  const oracle::Mat u = oracle::random_unitary(rng, 4);
  const ComplexMatrix out = conjugate(oracle::from_eigen(u), oracle::from_eigen(rho), l, {"D", "E"});
  const oracle::Mat full = oracle::embed2(u, 2, 1, 4);
  EXPECT_LT((oracle::to_eigen(out) - full * rho * full.adjoint()).norm(), 1e-13);
  EXPECT_THROW(apply_left(ComplexMatrix::identity(4), oracle::from_eigen(rho), l, {"D"}), ArgumentError);
}

TEST(Eigen, ReconstructsRandomHermitian) {
  std::mt19937_64 rng(13);
  for (std::size_t dim : {1u, 2u, 3u, 4u, 8u, 16u}) {
    const auto h = random_matrix(rng, dim).hermitian_part();
    const EigenSystem es = hermitian_eigensystem(h);
    ASSERT_EQ(es.values.size(), dim);
    EXPECT_TRUE(std::is_sorted(es.values.begin(), es.values.end()));
    ComplexMatrix rebuilt(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
          rebuilt(r, c) += es.values[k] * es.vectors[k][r] * std::conj(es.vectors[k][c]);
    }
    EXPECT_LT(max_abs_diff(rebuilt, h), 1e-12) << "dim " << dim;
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b) {
        complex dot = 0;
        for (std::size_t r = 0; r < dim; ++r) dot += std::conj(es.vectors[a][r]) * es.vectors[b][r];
        EXPECT_NEAR(std::abs(dot - complex(a == b ? 1.0 : 0.0)), 0.0, 1e-12);
      }
  }
}

TEST(Eigen, MatchesSturmOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 16);
    const oracle::Mat h = oracle::random_hermitian(rng, dim);
    const auto got = hermitian_eigenvalues(oracle::from_eigen(h));
    const auto want = oracle::eigenvalues(h);
    for (int k = 0; k < dim; ++k) EXPECT_NEAR(got[k], want[k], 1e-9);
  }
}

TEST(Eigen, DegenerateSpectra) {
  EXPECT_EQ(hermitian_eigenvalues(ComplexMatrix::identity(8)), std::vector<double>(8, 1.0));
  const auto v = hermitian_eigenvalues(pauli::swap());
  EXPECT_NEAR(v[0], -1.0, 1e-14);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(v[k], 1.0, 1e-14);
}

TEST(Eigen, RejectsNonHermitian) {
  const ComplexMatrix a{{0.0, 1.0}, {0.0, 0.0}};
  EXPECT_THROW(hermitian_eigenvalues(a), ContractViolation);
}

TEST(TraceNorm, KnownValues) {
  EXPECT_NEAR(trace_norm(pauli::Z()), 2.0, 1e-14);
  const SubsystemLayout l{"A", "B"};
  EXPECT_NEAR(trace_norm(partial_transpose(bell(), l, "B")), 2.0, 1e-14);
  EXPECT_NEAR(min_eigenvalue(partial_transpose(bell(), l, "B")), -0.5, 1e-14);
}
