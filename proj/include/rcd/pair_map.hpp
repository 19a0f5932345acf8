#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rcd/moments.hpp"

namespace rcd {

/// Sparse linear action on the Pauli labels of one qubit pair, for k copies.
/// Pair labels are 16^k-dimensional: for k = 2 the label of (a1 b1, a2 b2)
/// is (4 a1 + b1) * 16 + (4 a2 + b2).
class PairMap {
 public:
  struct Entry {
    int row;
    int col;
    double value;
  };

  PairMap() = default;
  /// Keeps entries with |value| > drop_tol.
  PairMap(const Eigen::MatrixXd& dense, int k, double drop_tol = 1e-15);
  static PairMap from_moment(const MomentMatrix& m, double drop_tol = 1e-15);

  int k() const { return k_; }
  int dim() const { return dim_; }
  const std::vector<Entry>& entries() const { return entries_; }
  /// Entries grouped by column (input label).
  const std::vector<std::vector<Entry>>& by_column() const { return by_column_; }

  /// In-place action on an n-qubit coefficient vector of size 4^{nk} with
  /// the pair's first label digit on qubit `first`, second on `second`.
  void apply(std::vector<double>& values, const struct PairLayout& layout) const;
  void apply(std::vector<double>& values, int n, int first, int second) const;

 private:
  int k_ = 0;
  int dim_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::vector<Entry>> by_column_;
};

/// Index geometry of one ordered qubit pair inside a flat 4^{nk} coefficient
/// vector: offsets[label] is added to each context base, and the contexts are
/// the flat indices whose digits at the pair positions are all 0.
struct PairLayout {
  int n = 0;
  int k = 0;
  int first = 0;
  int second = 0;
  std::vector<std::uint64_t> offsets;
  std::vector<std::uint64_t> contexts;

  static PairLayout make(int n, int k, int first, int second);
};

/// Layouts for every ordered pair (i, j), i != j, in lexicographic order.
std::vector<PairLayout> all_pair_layouts(int n, int k);

}  // namespace rcd
