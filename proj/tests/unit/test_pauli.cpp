#include "doctest.h"

#include <random>
#include <vector>

#include "rcd/errors.hpp"
#include "rcd/pauli.hpp"

using namespace rcd;

namespace {

DenseOperator random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  DenseOperator a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = Complex(g(rng), g(rng));
  return a + a.adjoint();
}

DenseOperator random_matrix(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  DenseOperator a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = Complex(g(rng), g(rng));
  return a;
}

}  // namespace

TEST_CASE("pauli strings round trip through index and text") {
  const auto p = PauliString::parse("XIZY");
  CHECK(p.str() == "XIZY");
  CHECK(p.weight() == 3);
  CHECK(p.index() == 1 * 64 + 0 * 16 + 3 * 4 + 2);
  CHECK(PauliString::from_index(p.index(), 4) == p);
  CHECK(PauliString::parse("1032") == p);
  CHECK(PauliString::parse("IIII").is_identity());
  CHECK_THROWS_AS(PauliString::parse("XQ"), InvalidInput);
}

TEST_CASE("qubit 0 is the leftmost tensor factor") {
  const DenseOperator xz = PauliString::parse("XZ").matrix();
  // X (x) Z maps |00> to |10>, the basis index 2 when qubit 0 is the high bit.
  CHECK(std::abs(xz(2, 0) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(xz(3, 1) - Complex(-1, 0)) < 1e-15);
}

TEST_CASE("expand and reconstruct are inverse on hermitian operators") {
  std::mt19937_64 rng(3);
  for (int n : {1, 2, 3}) {
    const DenseOperator rho = random_hermitian(1 << n, rng);
    const CoeffTensor c = expand_pauli(rho, n, 1);
    CHECK(c.size() == (std::size_t{1} << (2 * n)));
    CHECK((reconstruct(c) - rho).cwiseAbs().maxCoeff() < 1e-12);
    // Orthonormality: the Hilbert-Schmidt norm is the coefficient 2-norm.
    CHECK(c.sum_of_squares() == doctest::Approx(rho.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("pure zero state has equal weight on I/Z strings") {
  const int n = 3;
  DenseOperator rho = DenseOperator::Zero(8, 8);
  rho(0, 0) = 1.0;
  const CoeffTensor c = expand_pauli(rho, n, 1);
  const double v = 1.0 / std::sqrt(8.0);
  for (std::uint64_t p = 0; p < c.size(); ++p) {
    const auto s = PauliString::from_index(p, n).str();
    const bool iz = s.find_first_of("XY") == std::string::npos;
    CHECK(c[p] == doctest::Approx(iz ? v : 0.0).epsilon(1e-14));
  }
}

TEST_CASE("two-copy expansion indexes the concatenated string") {
  std::mt19937_64 rng(5);
  const DenseOperator a = random_hermitian(2, rng);
  const DenseOperator b = random_hermitian(2, rng);
  DenseOperator ab(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) ab.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
  const CoeffTensor ca = expand_pauli(a, 1, 1), cb = expand_pauli(b, 1, 1);
  const CoeffTensor cab = expand_pauli(ab, 1, 2);
  for (std::uint64_t p = 0; p < 4; ++p)
    for (std::uint64_t q = 0; q < 4; ++q) CHECK(cab[cab.pair_index(p, q)] == doctest::Approx(ca[p] * cb[q]));
}

TEST_CASE("expand_pauli rejects mismatched sizes and non-hermitian input") {
  std::mt19937_64 rng(7);
  CHECK_THROWS_AS(expand_pauli(DenseOperator::Identity(4, 4), 1, 1), InvalidInput);
  CHECK_THROWS_AS(expand_pauli(random_matrix(2, rng), 1, 1), NumericFailure);
}

TEST_CASE("swap matrix exchanges tensor factors") {
  std::mt19937_64 rng(11);
  const DenseOperator f = swap_matrix(4);
  const DenseOperator a = random_matrix(4, rng), b = random_matrix(4, rng);
  DenseOperator ab(16, 16), ba(16, 16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      ab.block(4 * i, 4 * j, 4, 4) = a(i, j) * b;
      ba.block(4 * i, 4 * j, 4, 4) = b(i, j) * a;
    }
  CHECK((f * ab * f - ba).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((f * f - DenseOperator::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(swap_matrix(3), InvalidInput);
}

TEST_CASE("permutation traces agree with matrix products") {
  std::mt19937_64 rng(13);
  std::vector<DenseOperator> m;
  for (int i = 0; i < 3; ++i) m.push_back(random_matrix(2, rng));
  const std::vector<int> identity{0, 1, 2};
  const Complex direct = m[0].trace() * m[1].trace() * m[2].trace();
  CHECK(std::abs(permutation_trace(identity, m) - direct) < 1e-10);

  const std::vector<int> cycle{1, 2, 0};
  const Complex via_cycles = cycle_product_trace(cycle, m);
  const Complex contracted = contracted_permutation_trace(cycle, m);
  CHECK(std::abs(via_cycles - contracted) < 1e-10 * std::max(1.0, std::abs(contracted)));
  // A single 3-cycle gives the trace of a product of all three factors.
  const Complex product = (m[1] * m[2] * m[0]).trace();
  const Complex other = (m[2] * m[1] * m[0]).trace();
  CHECK(std::min(std::abs(via_cycles - product), std::abs(via_cycles - other)) < 1e-10);
}
