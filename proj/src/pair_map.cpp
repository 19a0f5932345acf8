#include "rcd/pair_map.hpp"

#include <algorithm>

#include "rcd/errors.hpp"

namespace rcd {

PairMap::PairMap(const Eigen::MatrixXd& dense, int k, double drop_tol) : k_(k) {
  if (k != 1 && k != 2) throw InvalidInput("PairMap: k must be 1 or 2");
  dim_ = k == 1 ? 16 : 256;
  if (dense.rows() != dim_ || dense.cols() != dim_) throw InvalidInput("PairMap: wrong dimension");
  by_column_.resize(dim_);
  for (int c = 0; c < dim_; ++c)
    for (int r = 0; r < dim_; ++r) {
      const double v = dense(r, c);
      if (std::abs(v) > drop_tol) {
        entries_.push_back({r, c, v});
        by_column_[c].push_back({r, c, v});
      }
    }
}

PairMap PairMap::from_moment(const MomentMatrix& m, double drop_tol) {
  if (m.d != 4) throw InvalidInput("PairMap: moment operator must have d = 4");
  return PairMap(m.entries, m.k, drop_tol);
}

PairLayout PairLayout::make(int n, int k, int first, int second) {
  if (first == second || first < 0 || second < 0 || first >= n || second >= n) {
    throw InvalidInput("pair layout needs two distinct qubits in [0, n)");
  }
  if (k != 1 && k != 2) throw InvalidInput("pair layout: k must be 1 or 2");
  PairLayout layout{n, k, first, second, {}, {}};
  const int digits = n * k;
  // Base-4 digit position (0 = least significant) of qubit q in copy c.
  auto position = [&](int c, int q) { return n * (k - 1 - c) + (n - 1 - q); };

  const int labels = k == 1 ? 16 : 256;
  layout.offsets.resize(labels);
  for (int label = 0; label < labels; ++label) {
    std::uint64_t off = 0;
    for (int c = 0; c < k; ++c) {
      const int local = (label >> (4 * (k - 1 - c))) & 15;
      off += static_cast<std::uint64_t>(local >> 2) << (2 * position(c, first));
      off += static_cast<std::uint64_t>(local & 3) << (2 * position(c, second));
    }
    layout.offsets[label] = off;
  }

  std::vector<int> free_positions;
  for (int pos = 0; pos < digits; ++pos) {
    bool used = false;
    for (int c = 0; c < k; ++c) used = used || pos == position(c, first) || pos == position(c, second);
    if (!used) free_positions.push_back(pos);
  }
  const std::uint64_t count = std::uint64_t{1} << (2 * free_positions.size());
  layout.contexts.resize(count);
  for (std::uint64_t j = 0; j < count; ++j) {
    std::uint64_t base = 0;
    for (std::size_t f = 0; f < free_positions.size(); ++f) {
      base |= ((j >> (2 * f)) & 3) << (2 * free_positions[f]);
    }
    layout.contexts[j] = base;
  }
  return layout;
}

std::vector<PairLayout> all_pair_layouts(int n, int k) {
  std::vector<PairLayout> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) out.push_back(PairLayout::make(n, k, i, j));
  return out;
}

void PairMap::apply(std::vector<double>& values, const PairLayout& layout) const {
  if (layout.k != k_) throw InvalidInput("PairMap::apply: copy count mismatch");
  const std::uint64_t expected = std::uint64_t{1} << (2 * layout.n * layout.k);
  if (values.size() != expected) throw InvalidInput("PairMap::apply: vector has wrong size");
  std::vector<double> in(dim_), out(dim_);
  for (const auto base : layout.contexts) {
    for (int l = 0; l < dim_; ++l) in[l] = values[base + layout.offsets[l]];
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& e : entries_) out[e.row] += e.value * in[e.col];
    for (int l = 0; l < dim_; ++l) values[base + layout.offsets[l]] = out[l];
  }
}

void PairMap::apply(std::vector<double>& values, int n, int first, int second) const {
  apply(values, PairLayout::make(n, k_, first, second));
}

}  // namespace rcd
