#include "doctest.h"

#include <cmath>
#include <sstream>

#include "rcd/chains.hpp"
#include "rcd/errors.hpp"

using namespace rcd;

namespace {

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

double max_row_error(const ChainMatrix& c) {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < c.states(); ++r) {
    double s = 0.0;
    for (SparseRows::InnerIterator it(c.transitions, r); it; ++it) {
      CHECK(it.value() >= 0.0);
      s += it.value();
    }
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

}  // namespace

TEST_CASE("zero chain n=2 has rows (0.4, 0.6)") {
  const Eigen::MatrixXd p = zero_chain(2).dense();
  CHECK(p(0, 0) == doctest::Approx(0.4));
  CHECK(p(0, 1) == doctest::Approx(0.6));
  CHECK(p(1, 0) == doctest::Approx(0.4));
  CHECK(p(1, 1) == doctest::Approx(0.6));
}

TEST_CASE("zero and accelerated chains are stochastic birth-death chains") {
  for (int n : {2, 3, 8, 64, 1024}) {
    const ChainMatrix z = zero_chain(n);
    const ChainMatrix a = accelerated_chain(n);
    CHECK(max_row_error(z) < 1e-14);
    CHECK(max_row_error(a) < 1e-14);
    for (Eigen::Index r = 0; r < n; ++r) CHECK(a.transitions.coeff(r, r) == 0.0);
    // Conditioning on a move: P_acc(x, x+1) = P(x, x+1) / (1 - P(x, x)).
    if (n > 2) {
      const double stay = z.transitions.coeff(1, 1);
      CHECK(a.transitions.coeff(1, 2) == doctest::Approx(z.transitions.coeff(1, 2) / (1.0 - stay)));
    }
  }
  CHECK_THROWS_AS(zero_chain(1), InvalidInput);
  CHECK_THROWS_AS(accelerated_chain(0), InvalidInput);
}

TEST_CASE("zero stationary law matches 3^x C(n,x) / (4^n - 1)") {
  for (int n : {2, 5, 8, 20}) {
    const Distribution pi = zero_stationary(n);
    const double total = std::pow(4.0, n) - 1.0;
    for (int x = 1; x <= n; ++x) {
      CHECK(pi.weights[x - 1] == doctest::Approx(std::pow(3.0, x) * binomial(n, x) / total).epsilon(1e-13));
    }
  }
  const Distribution big = zero_stationary(100000);
  CHECK(std::abs(big.weights.sum() - 1.0) < 1e-12);
  CHECK(zero_log_pi_min(2) == doctest::Approx(std::log(6.0 / 15.0)));
}

TEST_CASE("zero stationary law is a reversible fixed point") {
  for (int n : {2, 8, 64, 1024}) {
    const ChainMatrix c = zero_chain(n);
    const Distribution pi = zero_stationary(n);
    CHECK(fixed_point_residual(c, pi) < 1e-12);
    CHECK(detailed_balance_residual(c, pi) < 1e-12);
  }
}

TEST_CASE("accelerated chain stationary law is reversible") {
  const ChainMatrix a = accelerated_chain(10);
  const Distribution pi = stationary_distribution(a);
  CHECK(std::abs(pi.weights.sum() - 1.0) < 1e-12);
  CHECK(fixed_point_residual(a, pi) < 1e-12);
  CHECK(detailed_balance_residual(a, pi) < 1e-12);
}

TEST_CASE("full Haar chain at n=2 is uniform over the 15 strings") {
  const ChainMatrix c = full_chain(2, haar_ghat(4, 2));
  const Eigen::MatrixXd p = c.dense();
  CHECK(p.rows() == 15);
  CHECK((p.array() - 1.0 / 15.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("full chains are stochastic with a uniform fixed point") {
  const GateEnsemble cnot = GateEnsemble::explicit_gates({{1.0, cnot_gate()}}, "cnot");
  for (int n : {2, 3, 4}) {
    for (const auto& g : {haar_ghat(4, 2), ensemble_ghat(cnot, 2)}) {
      const ChainMatrix c = full_chain(n, g);
      CHECK(c.states() == (Eigen::Index{1} << (2 * n)) - 1);
      CHECK(max_row_error(c) < 1e-12);
      const Distribution u{StateSpace::Full, n, Eigen::VectorXd::Constant(c.states(), 1.0 / c.states())};
      CHECK(fixed_point_residual(c, u) < 1e-12);
    }
  }
  CHECK_THROWS_AS(full_chain(1, haar_ghat(4, 2)), InvalidInput);
  CHECK_THROWS_AS(full_chain(9, haar_ghat(4, 2)), InvalidInput);
  CHECK_THROWS_AS(full_chain(3, haar_ghat(4, 1)), InvalidInput);
}

TEST_CASE("power iteration finds the uniform law of a full chain") {
  const ChainMatrix c = full_chain(3, haar_ghat(4, 2));
  const Distribution pi = stationary_distribution(c);
  CHECK((pi.weights.array() - 1.0 / 63.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("Haar full chain lumps onto the zero chain") {
  for (int n : {2, 3, 4}) {
    const LumpReport r = lump_check(full_chain(n, haar_ghat(4, 2)), n);
    CHECK(r.max_deviation < 1e-12);
    CHECK((r.lumped - zero_chain(n).dense()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("a non-universal gate does not lump onto the zero chain") {
  const GateEnsemble cnot = GateEnsemble::explicit_gates({{1.0, cnot_gate()}}, "cnot");
  const LumpReport r = lump_check(full_chain(3, ensemble_ghat(cnot, 2)), 3);
  CHECK(r.max_deviation > 0.1);
}

TEST_CASE("iterate checks tags and preserves mass") {
  const ChainMatrix c = zero_chain(6);
  const Distribution d = iterate(c, point_mass(c, 0), 25);
  CHECK(d.weights.sum() == doctest::Approx(1.0));
  CHECK(iterate(c, point_mass(c, 3), 0).weights[3] == 1.0);
  const ChainMatrix other = accelerated_chain(6);
  CHECK_THROWS_AS(iterate(other, point_mass(c, 0), 1), InvalidInput);
  CHECK_THROWS_AS(iterate(c, point_mass(c, 0), -1), InvalidInput);
  CHECK_THROWS_AS(point_mass(c, 6), InvalidInput);
}

TEST_CASE("pauli weight counts non-identity letters") {
  CHECK(pauli_weight(0) == 0);
  CHECK(pauli_weight(PauliString::parse("XIZY").index()) == 3);
  CHECK(pauli_weight(PauliString::parse("IIII").index()) == 0);
  CHECK(pauli_weight(PauliString::parse("YYYYYYYY").index()) == 8);
}

TEST_CASE("chain CSV has one header line and full-precision triplets") {
  std::ostringstream out;
  write_chain_csv(out, zero_chain(2), "command=chain");
  CHECK(out.str() == "# space=zero n=2 command=chain\n0,0,0.40000000000000002\n0,1,0.59999999999999998\n"
                     "1,0,0.40000000000000002\n1,1,0.59999999999999998\n");
  CHECK(state_space_from_string("full") == StateSpace::Full);
  CHECK_THROWS_AS(state_space_from_string("other"), InvalidInput);
}
