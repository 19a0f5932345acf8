#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <map>

#include "rcd/chains.hpp"
#include "rcd/errors.hpp"
#include "rcd/metrics.hpp"
#include "rcd/simulate.hpp"
#include "rcd/spectral.hpp"

using namespace rcd;

namespace {

const GateEnsemble& haar() {
  static const GateEnsemble e = GateEnsemble::haar_u4();
  return e;
}

double offdiag_mass(const CoeffTensor& c) {
  const std::uint64_t side = std::uint64_t{1} << (2 * c.n);
  double s = 0.0;
  for (std::uint64_t a = 0; a < side; ++a)
    for (std::uint64_t b = 0; b < side; ++b)
      if (a != b) s += std::abs(c[a * side + b]);
  return s;
}

}  // namespace

TEST_CASE("circuit sampling is deterministic and empty at t=0") {
  CHECK(sample_circuit(4, 0, haar(), 1).steps.empty());
  const Circuit a = sample_circuit(4, 20, haar(), 99), b = sample_circuit(4, 20, haar(), 99);
  REQUIRE(a.steps.size() == 20);
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].first == b.steps[i].first);
    CHECK(a.steps[i].second == b.steps[i].second);
    CHECK(a.steps[i].gate == b.steps[i].gate);
    CHECK(a.steps[i].first != a.steps[i].second);
  }
  CHECK_THROWS_AS(sample_circuit(1, 3, haar(), 0), InvalidInput);
}

TEST_CASE("unordered pairs are uniform") {
  const int steps = 100000;
  const Circuit c = sample_circuit(4, steps, clifford2_group(), 5);
  std::map<std::pair<int, int>, int> counts;
  for (const auto& s : c.steps) ++counts[{std::min(s.first, s.second), std::max(s.first, s.second)}];
  CHECK(counts.size() == 6);
  const double p = 1.0 / 6.0, se = std::sqrt(p * (1 - p) / steps);
  for (const auto& [pair, count] : counts) CHECK(std::abs(count / double(steps) - p) < 3.0 * se);
}

TEST_CASE("circuit unitary applies gates on the named qubits") {
  Circuit c{3, {{2, 0, cnot_gate()}}};
  const DenseOperator u = c.unitary();
  // Control on qubit 2 (low bit), target qubit 0 (high bit): |001> -> |101>.
  CHECK(std::abs(u(5, 1) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(u(0, 0) - Complex(1, 0)) < 1e-15);
  const DenseOperator v = sample_circuit(4, 30, haar(), 3).unitary();
  CHECK(unitarity_residual(v) < 1e-12);
}

TEST_CASE("first-moment decay at n=2 Haar vanishes after one step") {
  const CoeffTensor init = zero_state_k1(2);
  const DecayCurve c = decay_k1(2, 3, haar(), init, 50, 1);
  CHECK(c.kind == "k1-sum");
  CHECK(c.points[0].value == doctest::Approx(3.0 / 2.0));
  CHECK(c.points[0].std_error == 0.0);
  CHECK(c.points[1].value < 1e-12);
}

TEST_CASE("off-diagonal decay at n=2 Haar vanishes after one step") {
  const CoeffTensor init = zero_state_k2(2);
  const DecayCurve c = decay_k2_offdiag(2, 2, haar(), init, 20, 1);
  CHECK(c.kind == "k2-offdiag-sum");
  CHECK(c.points[0].value == doctest::Approx(offdiag_mass(init)));
  CHECK(c.points[0].value == doctest::Approx(3.0));
  CHECK(c.points[1].value < 1e-12);
}

TEST_CASE("decay t=0 reproduces an arbitrary input") {
  DenseOperator rho = DenseOperator::Zero(8, 8);
  rho(0, 0) = 0.5;
  rho(7, 7) = 0.5;
  rho(0, 7) = rho(7, 0) = 0.5;
  const CoeffTensor c = expand_pauli(rho, 3, 1);
  double mass = 0.0;
  for (std::uint64_t p = 1; p < c.size(); ++p) mass += std::abs(c[p]);
  const DecayCurve d = decay_k1(3, 0, haar(), rho, 3, 4);
  REQUIRE(d.points.size() == 1);
  CHECK(d.points[0].value == doctest::Approx(mass));
}

TEST_CASE("Haar per-string decay obeys exp(-t d / n)") {
  const int n = 4, t_max = 12;
  const CoeffTensor init = zero_state_k1(n);
  const PairMap g = PairMap::from_moment(haar_ghat(4, 1));
  const std::size_t trials = 400;
  std::vector<std::vector<double>> sums(t_max + 1, std::vector<double>(init.size(), 0.0));
  std::vector<std::vector<double>> squares = sums;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(trial_seed(77, trial));
    std::vector<double> gamma = init.values;
    for (int t = 0; t <= t_max; ++t) {
      if (t > 0) {
        const auto [i, j] = sample_pair(n, rng);
        g.apply(gamma, n, i, j);
      }
      for (std::size_t p = 0; p < gamma.size(); ++p) {
        sums[t][p] += std::abs(gamma[p]);
        squares[t][p] += gamma[p] * gamma[p];
      }
    }
  }
  for (int t = 0; t <= t_max; ++t)
    for (std::uint64_t p = 1; p < init.size(); ++p) {
      if (init[p] == 0.0) continue;
      const double mean = sums[t][p] / trials;
      const double se = std::sqrt(std::max(0.0, squares[t][p] / trials - mean * mean) / trials);
      CHECK(mean <= std::exp(-double(t) * pauli_weight(p) / n) * std::abs(init[p]) + 3.0 * se + 1e-15);
    }
}

TEST_CASE("Monte Carlo decay agrees with the exact expected map") {
  // Survival of a nonzero string is a rare event at large t; past t = 6 a
  // finite sample can contain no survivor and its standard error collapses.
  const int n = 3, t_max = 6;
  for (const GateEnsemble* ens : {&haar(), &clifford2_group()}) {
    const CoeffTensor k1 = zero_state_k1(n);
    const DecayCurve mc = decay_k1(n, t_max, *ens, k1, 2000, 11);
    const ExpectedMap m1 = expected_coeff_map(n, *ens, 1);
    std::vector<double> g = k1.values;
    for (int t = 0; t <= t_max; ++t) {
      if (t > 0) g = m1.apply(g);
      double exact = 0.0;
      for (std::size_t p = 1; p < g.size(); ++p) exact += std::abs(g[p]);
      CHECK(std::abs(mc.points[t].value - exact) <= 3.0 * mc.points[t].std_error + 1e-12);
    }

    const CoeffTensor k2 = zero_state_k2(n);
    const DecayCurve mc2 = decay_k2_offdiag(n, t_max, *ens, k2, 1000, 12);
    const ExpectedMap m2 = expected_coeff_map(n, *ens, 2);
    CoeffTensor h = k2;
    for (int t = 0; t <= t_max; ++t) {
      if (t > 0) h.values = m2.apply(h.values);
      CHECK(std::abs(mc2.points[t].value - offdiag_mass(h)) <= 3.0 * mc2.points[t].std_error + 1e-12);
    }
  }
}

TEST_CASE("sampled mode conserves purity") {
  const int n = 3;
  const CoeffTensor init = zero_state_k1(n);
  const DecayCurve c = decay_k1(n, 15, haar(), init, 20, 8, DecayMode::Sampled);
  CHECK(c.points.size() == 16);
  // Conjugation keeps sum gamma^2 = 1 and gamma(0) = 2^{-3/2}, so the l1 mass
  // over p != 0 is at least sqrt(1 - 1/8).
  for (const auto& p : c.points) CHECK(p.value >= std::sqrt(0.875) - 1e-12);
}

TEST_CASE("curves are identical for any worker count") {
  const CoeffTensor init = zero_state_k1(4);
  setenv("RCD_THREADS", "1", 1);
  const DecayCurve a = decay_k1(4, 40, clifford2_group(), init, 64, 7, DecayMode::Sampled);
  setenv("RCD_THREADS", "3", 1);
  const DecayCurve b = decay_k1(4, 40, clifford2_group(), init, 64, 7, DecayMode::Sampled);
  unsetenv("RCD_THREADS");
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].value == b.points[i].value);
    CHECK(a.points[i].std_error == b.points[i].std_error);
  }
}

TEST_CASE("decay size caps") {
  CHECK_THROWS_AS(decay_k1(11, 1, haar(), CoeffTensor(2, 1), 1, 0), InvalidInput);
  CHECK_THROWS_AS(decay_k2_offdiag(6, 1, haar(), CoeffTensor(2, 2), 1, 0), InvalidInput);
  CHECK_THROWS_AS(decay_k1(3, 1, haar(), zero_state_k1(2), 1, 0), InvalidInput);
  CHECK_THROWS_AS(decay_k1(2, 1, haar(), zero_state_k1(2), 0, 0), InvalidInput);
  CHECK_THROWS_AS(decay_mode_from_string("other"), InvalidInput);
}

TEST_CASE("decay bounds") {
  const CoeffTensor init = zero_state_k1(2);
  CHECK(k1_decay_bound(init, 0) == doctest::Approx(1.5));
  CHECK(k1_decay_bound(init, 1) == doctest::Approx(0.5 * (2 * std::exp(-0.5) + std::exp(-1.0))));
  CHECK(k2_offdiag_bound(2, 0) == doctest::Approx(16.0 * 15.0));
}

TEST_CASE("trajectory statistics") {
  const TrajectoryReport empty = zero_trajectory(5, 0, 3, 1);
  CHECK(empty.path == std::vector<int>{3});

  const long steps = 200000;
  const TrajectoryReport two = zero_trajectory(2, steps, 2, 4);
  // Occupancy of a chain with i.i.d. rows (0.4, 0.6) is binomial.
  const double se = std::sqrt(0.24 / (steps + 1));
  CHECK(std::abs(two.occupancy[0] / double(steps + 1) - 0.4) < 3.0 * se);
  long moves = 0;
  for (const auto& [len, count] : two.waiting_histogram) {
    CHECK(len >= 1);
    moves += count;
  }
  long changes = 0;
  for (std::size_t i = 1; i < two.path.size(); ++i) changes += two.path[i] != two.path[i - 1];
  CHECK(moves == changes);
  CHECK_THROWS_AS(zero_trajectory(4, 10, 5, 0), InvalidInput);
}

TEST_CASE("trajectory occupancy converges to the stationary law") {
  const long steps = 1000000;
  const TrajectoryReport r = zero_trajectory(16, steps, 1, 21);
  const Distribution pi = zero_stationary(16);
  double tv = 0.0;
  for (int x = 0; x < 16; ++x) tv += std::abs(r.occupancy[x] / double(steps + 1) - pi.weights[x]);
  CHECK(0.5 * tv < 0.02);
}

TEST_CASE("trajectory final window concentrates at 3n/4") {
  const int n = 256;
  const TrajectoryReport r = zero_trajectory(n, 1000000, 1, 9);
  const Distribution pi = zero_stationary(n);
  double mean = 0.0, second = 0.0;
  for (int x = 1; x <= n; ++x) {
    mean += x * pi.weights[x - 1];
    second += double(x) * x * pi.weights[x - 1];
  }
  CHECK(mean == doctest::Approx(0.75 * n).epsilon(1e-12));
  const double sd = std::sqrt(second - mean * mean);
  const double effective = r.window * eigen_gap(zero_chain(n)).gap / 2.0;
  CHECK(std::abs(r.window_mean - 0.75 * n) < 3.0 * sd / std::sqrt(effective));
}

TEST_CASE("frame potentials") {
  const GateEnsemble id = GateEnsemble::explicit_gates({{1.0, Gate::Identity()}}, "identity");
  const Estimate e = frame_potential(id, 2, 50, 1);
  CHECK(e.value == 256.0);
  CHECK(e.std_error == 0.0);
  const Estimate h = frame_potential(haar(), 1, 20000, 2);
  CHECK(std::abs(h.value - 1.0) < 3.0 * h.std_error);
  const Estimate cl = frame_potential(clifford2_group(), 2, 20000, 3);
  CHECK(std::abs(cl.value - 2.0) < 3.0 * cl.std_error);
  const Estimate circuit = circuit_frame_potential(2, 1, haar(), 1, 4000, 4);
  CHECK(std::abs(circuit.value - 1.0) < 3.0 * circuit.std_error);
  CHECK_THROWS_AS(frame_potential(id, 3, 10, 0), InvalidInput);
}
