#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rcd/moments.hpp"

namespace rcd {

enum class StateSpace { Full, Zero, Accelerated };

std::string to_string(StateSpace space);
StateSpace state_space_from_string(const std::string& name);

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;

/// Row-stochastic transition matrix P(x, y) = Pr[x -> y].
///   Full(n):        states are the 4^n - 1 nonzero Pauli strings, state s <-> index s + 1.
///   Zero(n):        states x = 1..n (count of non-identity sites), state s <-> x = s + 1.
///   Accelerated(n): same states as Zero, conditioned on moving.
struct ChainMatrix {
  StateSpace space = StateSpace::Zero;
  int n = 0;
  SparseRows transitions;

  Eigen::Index states() const { return transitions.rows(); }
  bool tridiagonal() const { return space != StateSpace::Full; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(transitions); }
};

struct Distribution {
  StateSpace space = StateSpace::Zero;
  int n = 0;
  Eigen::VectorXd weights;
};

inline constexpr int kMaxFullChainQubits = 8;
inline constexpr int kMaxZeroChainQubits = 1'000'000;

/// P = (1/(n(n-1))) sum_{i != j} Ghat^(ij) restricted to the diagonal
/// (p, p) sector, with the identity string removed.
ChainMatrix full_chain(int n, const MomentMatrix& pair_ghat);
ChainMatrix zero_chain(int n);
ChainMatrix accelerated_chain(int n);

/// pi_0(x) = 3^x C(n, x) / (4^n - 1).
Distribution zero_stationary(int n);
/// ln pi_0(1) = ln(3n) - ln(4^n - 1), finite even when pi_0 underflows.
double zero_log_pi_min(int n);

/// Stationary distribution: detailed-balance recursion for the birth-death
/// chains, lazy power iteration to residual 1e-13 for full chains.
Distribution stationary_distribution(const ChainMatrix& chain);

Distribution point_mass(const ChainMatrix& chain, Eigen::Index state);

/// init * P^t by repeated sparse multiplication.
Distribution iterate(const ChainMatrix& chain, const Distribution& init, long t);

/// max over (x, y) of |pi(x) P(x, y) - pi(y) P(y, x)|.
double detailed_balance_residual(const ChainMatrix& chain, const Distribution& pi);

/// || pi P - pi ||_1.
double fixed_point_residual(const ChainMatrix& chain, const Distribution& pi);

struct LumpReport {
  /// Largest spread of aggregated class-to-class probability among members of one class.
  double within_class_deviation = 0.0;
  /// Largest |aggregated - zero_chain(n)| entry.
  double zero_chain_deviation = 0.0;
  double max_deviation = 0.0;
  /// Aggregated n x n weight-class transition matrix (averaged over members).
  Eigen::MatrixXd lumped;
};

/// Projects a full chain onto Hamming-weight classes and compares with zero_chain(n).
LumpReport lump_check(const ChainMatrix& full, int n);

/// Number of non-identity letters of a base-4 Pauli index.
int pauli_weight(std::uint64_t index);

/// CSV triplets "row,col,value" after a single '#' header line.
void write_chain_csv(std::ostream& out, const ChainMatrix& chain, const std::string& provenance = "");

}  // namespace rcd
