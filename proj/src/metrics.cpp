#include "rcd/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "rcd/errors.hpp"

namespace rcd {

namespace {

void check_map_size(int n, int k) {
  if (k != 1 && k != 2) throw InvalidInput("coefficient map: k must be 1 or 2");
  const int cap = k == 2 ? kMaxMapQubitsK2 : kMaxMapQubitsK1;
  if (n < 1 || n > cap) {
    throw InvalidInput("coefficient map: n = " + std::to_string(n) + " exceeds the cap " + std::to_string(cap));
  }
}

void check_explicit_size(int n, int k) {
  if (n * k > kMaxExplicitMapDigits) throw InvalidInput("explicit coefficient map limited to 4^{nk} <= 4096");
}

struct Deviation {
  double l1 = 0.0;
  double l2 = 0.0;
};

Deviation deviation(const std::vector<double>& gamma, int n, double target) {
  const std::uint64_t side = std::uint64_t{1} << (2 * n);
  Deviation d;
  for (std::uint64_t i = 1; i < gamma.size(); ++i) {
    const bool diagonal = i / side == i % side;
    const double e = gamma[i] - (diagonal ? target : 0.0);
    d.l1 += std::abs(e);
    d.l2 += e * e;
  }
  return d;
}

void check_init(int n, const CoeffTensor& init) {
  if (init.n != n || init.k != 2) throw InvalidInput("design: initial coefficients must be a k = 2 tensor on n qubits");
}

// max_{c != 0} || (M^t - T) e_c ||_2 for t = 0..t_max, columns handled in batches.
std::vector<double> max_column_deviation(int n, long t_max, const Eigen::SparseMatrix<double>& m) {
  const Eigen::Index dim = Eigen::Index{1} << (4 * n);
  const std::uint64_t side = std::uint64_t{1} << (2 * n);
  const double uniform = 1.0 / static_cast<double>(side - 1);
  std::vector<double> worst(static_cast<std::size_t>(t_max + 1), 0.0);
  constexpr Eigen::Index kBatch = 256;

  for (Eigen::Index start = 1; start < dim; start += kBatch) {
    const Eigen::Index width = std::min(kBatch, dim - start);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(dim, width);
    for (Eigen::Index c = 0; c < width; ++c) x(start + c, c) = 1.0;
    for (long t = 0; t <= t_max; ++t) {
      if (t > 0) x = m * x;
      for (Eigen::Index c = 0; c < width; ++c) {
        const auto col = static_cast<std::uint64_t>(start + c);
        double ss = 0.0;
        if (col / side == col % side) {
          // The twirl column is uniform on (q, q), q != 0.
          for (Eigen::Index i = 0; i < dim; ++i) {
            const auto row = static_cast<std::uint64_t>(i);
            const double e = x(i, c) - (row != 0 && row / side == row % side ? uniform : 0.0);
            ss += e * e;
          }
        } else {
          ss = x.col(c).squaredNorm();
        }
        worst[t] = std::max(worst[t], std::sqrt(std::max(ss, 0.0)));
      }
    }
  }
  return worst;
}

}  // namespace

ExpectedMap::ExpectedMap(Kind kind, int n, int k, std::string label, PairMap pair)
    : kind_(kind), n_(n), k_(k), label_(std::move(label)), pair_(std::move(pair)) {
  check_map_size(n, k);
  if (kind_ == Kind::CircuitStep) {
    if (n < 2) throw InvalidInput("circuit step map needs n >= 2");
    if (pair_.k() != k) throw InvalidInput("circuit step map: pair operator has the wrong copy count");
    layouts_ = all_pair_layouts(n, k);
  }
}

std::vector<double> ExpectedMap::apply(const std::vector<double>& v) const {
  if (v.size() != dim()) throw InvalidInput("ExpectedMap::apply: vector has wrong size");
  std::vector<double> out(v.size(), 0.0);
  if (kind_ == Kind::HaarTwirl) {
    out[0] = v[0];
    if (k_ == 2) {
      const std::uint64_t side = std::uint64_t{1} << (2 * n_);
      double sum = 0.0;
      for (std::uint64_t p = 1; p < side; ++p) sum += v[p * side + p];
      const double avg = sum / static_cast<double>(side - 1);
      for (std::uint64_t p = 1; p < side; ++p) out[p * side + p] = avg;
    }
    return out;
  }
  const double w = 1.0 / static_cast<double>(layouts_.size());
  for (const auto& layout : layouts_) {
    for (const auto base : layout.contexts) {
      for (const auto& e : pair_.entries()) {
        out[base + layout.offsets[e.row]] += w * e.value * v[base + layout.offsets[e.col]];
      }
    }
  }
  return out;
}

std::vector<double> ExpectedMap::apply_power(std::vector<double> v, long t) const {
  if (t < 0) throw InvalidInput("ExpectedMap::apply_power: t must be non-negative");
  for (long s = 0; s < t; ++s) v = apply(v);
  return v;
}

Eigen::SparseMatrix<double> ExpectedMap::sparse() const {
  check_explicit_size(n_, k_);
  const auto d = static_cast<Eigen::Index>(dim());
  std::vector<Eigen::Triplet<double>> trips;
  if (kind_ == Kind::HaarTwirl) {
    trips.emplace_back(0, 0, 1.0);
    if (k_ == 2) {
      const Eigen::Index side = Eigen::Index{1} << (2 * n_);
      const double avg = 1.0 / static_cast<double>(side - 1);
      for (Eigen::Index q = 1; q < side; ++q)
        for (Eigen::Index p = 1; p < side; ++p) trips.emplace_back(q * side + q, p * side + p, avg);
    }
  } else {
    const double w = 1.0 / static_cast<double>(layouts_.size());
    for (const auto& layout : layouts_)
      for (const auto base : layout.contexts)
        for (const auto& e : pair_.entries()) {
          trips.emplace_back(static_cast<Eigen::Index>(base + layout.offsets[e.row]),
                             static_cast<Eigen::Index>(base + layout.offsets[e.col]), w * e.value);
        }
  }
  Eigen::SparseMatrix<double> m(d, d);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Eigen::MatrixXd ExpectedMap::dense() const { return Eigen::MatrixXd(sparse()); }

MapSpectrum ExpectedMap::spectrum(double tol) const {
  const Eigen::SparseMatrix<double> m = sparse();
  const auto dim = m.rows();

  // Coordinates coupled by a nonzero entry share a block; eigenvalues of M
  // are the union of the blocks' eigenvalues.
  std::vector<Eigen::Index> parent(dim);
  for (Eigen::Index i = 0; i < dim; ++i) parent[i] = i;
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index c = 0; c < m.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it) parent[find(it.row())] = find(c);
  std::vector<std::vector<Eigen::Index>> blocks;
  std::vector<Eigen::Index> block_of(dim, -1);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto root = find(i);
    if (block_of[root] < 0) {
      block_of[root] = static_cast<Eigen::Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[block_of[root]].push_back(i);
  }

  const Eigen::MatrixXd full = Eigen::MatrixXd(m);
  const bool symmetric = (full - full.transpose()).cwiseAbs().maxCoeff() < 1e-12;
  std::vector<double> moduli;
  for (const auto& idx : blocks) {
    const auto b = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sub(b, b);
    for (Eigen::Index r = 0; r < b; ++r)
      for (Eigen::Index c = 0; c < b; ++c) sub(r, c) = full(idx[r], idx[c]);
    if (symmetric) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sub, Eigen::EigenvaluesOnly);
      if (solver.info() != Eigen::Success) throw NumericFailure("map eigensolver did not converge");
      for (Eigen::Index i = 0; i < b; ++i) moduli.push_back(std::abs(solver.eigenvalues()[i]));
    } else {
      Eigen::EigenSolver<Eigen::MatrixXd> solver(sub, false);
      if (solver.info() != Eigen::Success) throw NumericFailure("map eigensolver did not converge");
      for (Eigen::Index i = 0; i < b; ++i) moduli.push_back(std::abs(solver.eigenvalues()[i]));
    }
  }
  MapSpectrum s;
  for (double v : moduli) {
    if (v > 1.0 - tol) {
      ++s.unit_modulus_count;
    } else {
      s.second_modulus = std::max(s.second_modulus, v);
    }
  }
  return s;
}

ExpectedMap expected_coeff_map(int n, const GateEnsemble& ens, int k) {
  check_map_size(n, k);
  return ExpectedMap(ExpectedMap::Kind::CircuitStep, n, k, ens.label(), PairMap::from_moment(pair_moment(ens, k)));
}

ExpectedMap haar_twirl_target(int n, int k) {
  return ExpectedMap(ExpectedMap::Kind::HaarTwirl, n, k, "haar-twirl");
}

DesignTarget design_target(const CoeffTensor& init) {
  if (init.k != 2) throw InvalidInput("design_target: needs k = 2 coefficients");
  const std::uint64_t side = std::uint64_t{1} << (2 * init.n);
  double total = 0.0, off_identity = 0.0;
  bool nonnegative = true;
  for (std::uint64_t p = 0; p < side; ++p) {
    const double g = init[p * side + p];
    nonnegative = nonnegative && g >= -1e-15;
    total += g;
    if (p != 0) off_identity += g;
  }
  if (nonnegative && std::abs(total - 1.0) < 1e-12) {
    const double d = std::pow(2.0, init.n);
    return {"unit-sum", 1.0 / (d * (d + 1.0))};
  }
  return {"general", off_identity / static_cast<double>(side - 1)};
}

double design_l2(int n, long t, const GateEnsemble& ens, const CoeffTensor& init) {
  check_init(n, init);
  const auto gamma = expected_coeff_map(n, ens, 2).apply_power(init.values, t);
  return deviation(gamma, n, design_target(init).value).l2;
}

double design_l1(int n, long t, const GateEnsemble& ens, const CoeffTensor& init) {
  check_init(n, init);
  const auto gamma = expected_coeff_map(n, ens, 2).apply_power(init.values, t);
  return deviation(gamma, n, design_target(init).value).l1;
}

std::vector<double> diamond_curve(int n, long t_max, const GateEnsemble& ens) {
  if (t_max < 0) throw InvalidInput("diamond bound: t must be non-negative");
  if (n < 1 || n > 3) throw InvalidInput("diamond bound limited to 1 <= n <= 3");
  if (n == 1 && t_max > 0) throw InvalidInput("diamond bound: n = 1 has no qubit pairs, only t = 0 is defined");
  const auto d = static_cast<Eigen::Index>(std::uint64_t{1} << (4 * n));
  Eigen::SparseMatrix<double> m(d, d);
  if (t_max > 0) m = expected_coeff_map(n, ens, 2).sparse();
  auto worst = max_column_deviation(n, t_max, m);
  const double scale = std::pow(2.0, 2 * n);
  for (auto& w : worst) w *= scale;
  return worst;
}

double diamond_bound(int n, long t, const GateEnsemble& ens) { return diamond_curve(n, t, ens).back(); }

std::vector<DesignReport> design_curve(int n, long t_max, const GateEnsemble& ens, const CoeffTensor& init) {
  check_init(n, init);
  if (t_max < 0) throw InvalidInput("design: t must be non-negative");
  const ExpectedMap map = expected_coeff_map(n, ens, 2);
  const DesignTarget target = design_target(init);
  std::vector<double> diamonds;
  if (n <= 3) diamonds = diamond_curve(n, t_max, ens);

  std::vector<DesignReport> out;
  std::vector<double> gamma = init.values;
  for (long t = 0; t <= t_max; ++t) {
    if (t > 0) gamma = map.apply(gamma);
    const Deviation dev = deviation(gamma, n, target.value);
    DesignReport r{n, t, ens.label(), target.name, dev.l1, dev.l2, std::nullopt};
    if (!diamonds.empty()) r.diamond_upper_bound = diamonds[static_cast<std::size_t>(t)];
    out.push_back(std::move(r));
  }
  return out;
}

std::string design_json(const DesignReport& r, const std::string& header) {
  nlohmann::ordered_json j;
  if (!header.empty()) j["header"] = header;
  j["n"] = r.n;
  j["t"] = r.t;
  j["ensemble"] = r.ensemble;
  j["target"] = r.target;
  j["l1"] = r.l1;
  j["l2"] = r.l2;
  j["diamond_upper_bound"] =
      r.diamond_upper_bound ? nlohmann::ordered_json(*r.diamond_upper_bound) : nlohmann::ordered_json(nullptr);
  return j.dump(2);
}

}  // namespace rcd
