#include <doctest.h>

#include <cmath>
#include <limits>

#include "qgrad/k_truncation.hpp"
#include "test_util.hpp"

using namespace qgrad;

namespace {

// dense reference C_E on (ancilla, v) with the ancilla as the top bit
Eigen::MatrixXd dense_CE(int n_v) {
  const int dv = 1 << n_v;
  Eigen::MatrixXd ce = Eigen::MatrixXd::Identity(2 * dv, 2 * dv);
  ce(dv, dv) = -1.0;  // ancilla = 1, v = |0...0>
  return ce;
}

StateVector state_with_v_amps(const Eigen::VectorXd& v_amps, int chi) {
  DressedState d;
  d.d = static_cast<int>(v_amps.size()) - 1;
  d.amps = v_amps;
  d.cos_gamma = v_amps(0);
  return StateVector::from_dressed(d, chi);
}

}  // namespace

TEST_SUITE("k_truncation") {

TEST_CASE("(I + E)/2 equals the truncation projector exactly") {
  for (int dim : {2, 4, 8, 16}) {
    const Eigen::MatrixXd e = e_gate_matrix(dim);
    CHECK(((e * e) - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((0.5 * (Eigen::MatrixXd::Identity(dim, dim) + e) - k_matrix(dim))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("circuit route removes the |0> component and reports its weight") {
  Eigen::VectorXd v(4);
  v << 0.5, 0.5, std::sqrt(0.5), 0.0;  // (a, b, c) with a^2 = 0.25
  StateVector s = state_with_v_amps(v, 2);
  auto [p, out] = apply_K_via_circuit(s);
  CHECK(p == doctest::Approx(0.75).epsilon(1e-12));
  const double norm = std::sqrt(0.75);
  CHECK(std::abs(out.amps[0]) < 1e-14);
  CHECK(std::abs(out.amps[1] - cx(0.5 / norm, 0)) < 1e-12);
  CHECK(std::abs(out.amps[2] - cx(std::sqrt(0.5) / norm, 0)) < 1e-12);
}

TEST_CASE("K on |0> is a zero branch") {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
  v(0) = 1.0;
  StateVector s = state_with_v_amps(v, 2);
  CHECK_THROWS_AS(apply_K_via_circuit(s), ZeroBranchError);
  CHECK_THROWS_AS(apply_K_projector(s), ZeroBranchError);
}

TEST_CASE("circuit and projector routes agree on random states") {
  std::mt19937_64 rng(81);
  for (int round = 0; round < 10; ++round) {
    Eigen::VectorXd v = testutil::random_vector(4, rng);
    v /= v.norm();
    StateVector s = state_with_v_amps(v, 3);
    auto [pc, sc] = apply_K_via_circuit(s);
    auto [pp, sp] = apply_K_projector(s);
    CHECK(std::abs(pc - pp) < 1e-12);
    double diff = 0;
    for (std::size_t i = 0; i < sc.amps.size(); ++i)
      diff = std::max(diff, std::abs(sc.amps[i] - sp.amps[i]));
    CHECK(diff < 1e-12);
  }
}

TEST_CASE("Toffoli decomposition of C_E") {
  SUBCASE("n_v = 1: X conjugated CZ, no Toffolis") {
    const TruncationGateSet set = toffoli_decompose_CE(1);
    CHECK(set.toffoli_count == 0);
    CHECK(set.ancilla_count == 0);
    CHECK((set.compose_dense() - dense_CE(1)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("n_v = 2..4: exact equality on the work = 0 subspace") {
    for (int n_v = 2; n_v <= 4; ++n_v) {
      const TruncationGateSet set = toffoli_decompose_CE(n_v);
      CHECK(set.toffoli_count == 2 * (n_v - 1));
      CHECK(set.ancilla_count == n_v - 1);
      const Eigen::MatrixXd full = set.compose_dense();
      const Eigen::MatrixXd ref = dense_CE(n_v);
      const long main_dim = 1L << (n_v + 1);
      // work ancillas start and end in |0>: block equality and no leakage
      CHECK((full.topLeftCorner(main_dim, main_dim) - ref).cwiseAbs().maxCoeff() == 0.0);
      const long total_dim = full.rows();
      for (long col = 0; col < main_dim; ++col)
        for (long row = main_dim; row < total_dim; ++row) CHECK(full(row, col) == 0.0);
    }
  }
  SUBCASE("n_v = 2 gate list is one Toffoli plus its uncompute") {
    const TruncationGateSet set = toffoli_decompose_CE(2);
    int toffolis = 0;
    for (const ElementaryGate& g : set.gates)
      if (g.kind == ElementaryGate::Kind::Toffoli) ++toffolis;
    CHECK(toffolis == 2);
  }
}

TEST_CASE("trap-state detection") {
  std::mt19937_64 rng(82);
  const Eigen::MatrixXd q = testutil::random_orthogonal(4, rng);
  Eigen::VectorXd lambdas(4);
  lambdas << 0.4, -0.3, 0.2, -0.1;
  const GradientOperator op =
      GradientOperator::from_matrix(q * lambdas.asDiagonal() * q.transpose());

  DressedState eigstate;
  eigstate.d = 3;
  eigstate.amps = q.col(1);
  eigstate.cos_gamma = q.col(1)(0);
  CHECK(is_trap_state(eigstate, op, 1e-10));

  DressedState generic = encode(Eigen::Vector3d(0.7, -0.2, 1.1));
  CHECK_FALSE(is_trap_state(generic, op, 1e-6));
  CHECK(is_trap_state(generic, op, std::numeric_limits<double>::infinity()));
}

}  // TEST_SUITE
