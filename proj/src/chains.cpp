#include "rcd/chains.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "rcd/errors.hpp"

namespace rcd {

namespace {

constexpr double kNegativeDust = -1e-14;

void check_zero_n(int n) {
  if (n < 2 || n > kMaxZeroChainQubits) {
    throw InvalidInput("zero chain needs 2 <= n <= 1000000, got " + std::to_string(n));
  }
}

// Builds a row-major matrix from per-row sorted (col, value) lists.
SparseRows assemble(Eigen::Index rows, Eigen::Index cols,
                    const std::vector<std::vector<std::pair<std::int64_t, double>>>& data) {
  std::int64_t nnz = 0;
  for (const auto& r : data) nnz += static_cast<std::int64_t>(r.size());
  SparseRows m(rows, cols);
  m.reserve(nnz);
  for (Eigen::Index r = 0; r < rows; ++r) {
    m.startVec(r);
    for (const auto& [c, v] : data[r]) m.insertBack(r, c) = v;
  }
  m.finalize();
  return m;
}

SparseRows tridiagonal(int n, const std::vector<double>& down, const std::vector<double>& stay,
                       const std::vector<double>& up) {
  SparseRows m(n, n);
  m.reserve(3 * static_cast<std::int64_t>(n));
  for (int s = 0; s < n; ++s) {
    m.startVec(s);
    if (s > 0 && down[s] != 0.0) m.insertBack(s, s - 1) = down[s];
    if (stay[s] != 0.0) m.insertBack(s, s) = stay[s];
    if (s + 1 < n && up[s] != 0.0) m.insertBack(s, s + 1) = up[s];
  }
  m.finalize();
  return m;
}

// Normalizes log-weights into a probability vector.
Eigen::VectorXd from_log_weights(const std::vector<long double>& logw) {
  const long double top = *std::max_element(logw.begin(), logw.end());
  long double total = 0.0L;
  for (auto lw : logw) total += std::exp(lw - top);
  const long double log_total = top + std::log(total);
  Eigen::VectorXd out(static_cast<Eigen::Index>(logw.size()));
  for (std::size_t i = 0; i < logw.size(); ++i) out[i] = static_cast<double>(std::exp(logw[i] - log_total));
  return out;
}

Distribution birth_death_stationary(const ChainMatrix& chain) {
  const auto n = chain.states();
  std::vector<long double> logw(n, 0.0L);
  for (Eigen::Index s = 0; s + 1 < n; ++s) {
    const double up = chain.transitions.coeff(s, s + 1);
    const double down = chain.transitions.coeff(s + 1, s);
    if (up <= 0.0 || down <= 0.0) throw NumericFailure("birth-death chain is not irreducible");
    logw[s + 1] = logw[s] + std::log(static_cast<long double>(up)) - std::log(static_cast<long double>(down));
  }
  return {chain.space, chain.n, from_log_weights(logw)};
}

Distribution power_stationary(const ChainMatrix& chain) {
  const auto n = chain.states();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (long iter = 0; iter < 1'000'000; ++iter) {
    const Eigen::VectorXd next = chain.transitions.transpose() * v;
    if ((next - v).lpNorm<1>() < 1e-13) return {chain.space, chain.n, v};
    v = 0.5 * (v + next);
  }
  throw NumericFailure("stationary_distribution: power iteration did not reach residual 1e-13");
}

void check_same_space(const ChainMatrix& chain, const Distribution& d, const char* op) {
  if (chain.space != d.space || chain.n != d.n || chain.states() != d.weights.size()) {
    throw InvalidInput(std::string(op) + ": distribution does not match the chain's state space");
  }
}

}  // namespace

std::string to_string(StateSpace space) {
  switch (space) {
    case StateSpace::Full: return "full";
    case StateSpace::Zero: return "zero";
    case StateSpace::Accelerated: return "accelerated";
  }
  return "unknown";
}

StateSpace state_space_from_string(const std::string& name) {
  if (name == "full") return StateSpace::Full;
  if (name == "zero") return StateSpace::Zero;
  if (name == "accelerated") return StateSpace::Accelerated;
  throw InvalidInput("unknown chain '" + name + "' (expected full, zero or accelerated)");
}

int pauli_weight(std::uint64_t index) {
  return std::popcount((index | (index >> 1)) & 0x5555555555555555ULL);
}

ChainMatrix full_chain(int n, const MomentMatrix& pair_ghat) {
  if (pair_ghat.d != 4 || pair_ghat.k != 2 || pair_ghat.entries.rows() != 256) {
    throw InvalidInput("full_chain: needs the d = 4, k = 2 pair moment operator");
  }
  if (n < 2 || n > kMaxFullChainQubits) {
    throw InvalidInput("full_chain: n must lie in [2, 8], got " + std::to_string(n));
  }

  // Pair transitions a -> b on the 16 two-qubit labels, read off the diagonal sector.
  std::array<std::vector<std::pair<int, double>>, 16> pair_moves;
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) {
      double p = pair_ghat.entries(b * 16 + b, a * 16 + a);
      if (p < kNegativeDust) throw NumericFailure("full_chain: negative transition probability");
      if (p <= 0.0) continue;
      if (a != 0 && b == 0) throw NumericFailure("full_chain: moment operator maps a Pauli to identity");
      pair_moves[a].push_back({b, p});
    }

  const std::uint64_t num_states = (std::uint64_t{1} << (2 * n)) - 1;
  const double pair_weight = 1.0 / (static_cast<double>(n) * (n - 1));
  std::vector<std::vector<std::pair<std::int64_t, double>>> rows(num_states);
  std::vector<std::pair<std::int64_t, double>> scratch;

  for (std::uint64_t s = 0; s < num_states; ++s) {
    const std::uint64_t x = s + 1;
    scratch.clear();
    for (int i = 0; i < n; ++i) {
      const int shift_i = 2 * (n - 1 - i);
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const int shift_j = 2 * (n - 1 - j);
        const int li = static_cast<int>((x >> shift_i) & 3);
        const int lj = static_cast<int>((x >> shift_j) & 3);
        const std::uint64_t rest = x & ~((std::uint64_t{3} << shift_i) | (std::uint64_t{3} << shift_j));
        for (const auto& [b, p] : pair_moves[4 * li + lj]) {
          const std::uint64_t y = rest | (static_cast<std::uint64_t>(b >> 2) << shift_i) |
                                  (static_cast<std::uint64_t>(b & 3) << shift_j);
          scratch.push_back({static_cast<std::int64_t>(y - 1), p * pair_weight});
        }
      }
    }
    std::sort(scratch.begin(), scratch.end());
    auto& row = rows[s];
    double total = 0.0;
    for (const auto& [c, v] : scratch) {
      if (!row.empty() && row.back().first == c) {
        row.back().second += v;
      } else {
        row.push_back({c, v});
      }
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw NumericFailure("full_chain: row mass is not conserved");
    for (auto& entry : row) entry.second /= total;
  }

  return {StateSpace::Full, n,
          assemble(static_cast<Eigen::Index>(num_states), static_cast<Eigen::Index>(num_states), rows)};
}

ChainMatrix zero_chain(int n) {
  check_zero_n(n);
  std::vector<double> down(n), stay(n), up(n);
  const double denom = 5.0 * n * (n - 1.0);
  for (int x = 1; x <= n; ++x) {
    const double xd = x;
    down[x - 1] = 2.0 * xd * (xd - 1.0) / denom;
    up[x - 1] = 6.0 * xd * (n - xd) / denom;
    stay[x - 1] = 1.0 - 2.0 * xd * (3.0 * n - 2.0 * xd - 1.0) / denom;
  }
  return {StateSpace::Zero, n, tridiagonal(n, down, stay, up)};
}

ChainMatrix accelerated_chain(int n) {
  check_zero_n(n);
  std::vector<double> down(n), stay(n, 0.0), up(n);
  for (int x = 1; x <= n; ++x) {
    const double xd = x;
    const double denom = 3.0 * n - 2.0 * xd - 1.0;
    down[x - 1] = (xd - 1.0) / denom;
    up[x - 1] = 3.0 * (n - xd) / denom;
  }
  return {StateSpace::Accelerated, n, tridiagonal(n, down, stay, up)};
}

Distribution zero_stationary(int n) {
  check_zero_n(n);
  // ln(3^x C(n, x)) by the ratio 3(n - x)/(x + 1), then divide by 4^n - 1.
  std::vector<long double> logw(n);
  logw[0] = std::log(3.0L * n);
  for (int x = 1; x < n; ++x) {
    logw[x] = logw[x - 1] + std::log(3.0L * (n - x) / (x + 1.0L));
  }
  const long double log_total = n * std::log(4.0L) + std::log1p(-std::pow(4.0L, -n));
  Eigen::VectorXd w(n);
  for (int x = 0; x < n; ++x) w[x] = static_cast<double>(std::exp(logw[x] - log_total));
  return {StateSpace::Zero, n, w};
}

double zero_log_pi_min(int n) {
  check_zero_n(n);
  const long double log_total = n * std::log(4.0L) + std::log1p(-std::pow(4.0L, -n));
  return static_cast<double>(std::log(3.0L * n) - log_total);
}

Distribution stationary_distribution(const ChainMatrix& chain) {
  switch (chain.space) {
    case StateSpace::Zero: return zero_stationary(chain.n);
    case StateSpace::Accelerated: return birth_death_stationary(chain);
    case StateSpace::Full: return power_stationary(chain);
  }
  throw InvalidInput("stationary_distribution: unknown state space");
}

Distribution point_mass(const ChainMatrix& chain, Eigen::Index state) {
  if (state < 0 || state >= chain.states()) throw InvalidInput("point_mass: state out of range");
  Distribution d{chain.space, chain.n, Eigen::VectorXd::Zero(chain.states())};
  d.weights[state] = 1.0;
  return d;
}

Distribution iterate(const ChainMatrix& chain, const Distribution& init, long t) {
  check_same_space(chain, init, "iterate");
  if (t < 0) throw InvalidInput("iterate: t must be non-negative");
  Eigen::VectorXd v = init.weights;
  for (long step = 0; step < t; ++step) v = chain.transitions.transpose() * v;
  return {init.space, init.n, v};
}

double detailed_balance_residual(const ChainMatrix& chain, const Distribution& pi) {
  check_same_space(chain, pi, "detailed_balance_residual");
  const SparseRows flow = pi.weights.asDiagonal() * chain.transitions;
  const SparseRows flow_t = flow.transpose();
  const SparseRows diff = flow - flow_t;
  double worst = 0.0;
  for (std::int64_t i = 0; i < diff.nonZeros(); ++i) worst = std::max(worst, std::abs(diff.valuePtr()[i]));
  return worst;
}

double fixed_point_residual(const ChainMatrix& chain, const Distribution& pi) {
  check_same_space(chain, pi, "fixed_point_residual");
  const Eigen::VectorXd next = chain.transitions.transpose() * pi.weights;
  return (next - pi.weights).lpNorm<1>();
}

LumpReport lump_check(const ChainMatrix& full, int n) {
  if (full.space != StateSpace::Full || full.n != n) {
    throw InvalidInput("lump_check: expects a full chain on n qubits");
  }
  const ChainMatrix zero = zero_chain(n);
  const Eigen::MatrixXd target = zero.dense();

  LumpReport rep;
  rep.lumped = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd lo = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::infinity());
  Eigen::MatrixXd hi = Eigen::MatrixXd::Constant(n, n, -std::numeric_limits<double>::infinity());
  std::vector<long> members(n, 0);
  Eigen::VectorXd agg(n);

  for (Eigen::Index s = 0; s < full.states(); ++s) {
    const int w = pauli_weight(static_cast<std::uint64_t>(s) + 1);
    agg.setZero();
    for (SparseRows::InnerIterator it(full.transitions, s); it; ++it) {
      agg[pauli_weight(static_cast<std::uint64_t>(it.col()) + 1) - 1] += it.value();
    }
    ++members[w - 1];
    for (int v = 0; v < n; ++v) {
      rep.lumped(w - 1, v) += agg[v];
      lo(w - 1, v) = std::min(lo(w - 1, v), agg[v]);
      hi(w - 1, v) = std::max(hi(w - 1, v), agg[v]);
      rep.zero_chain_deviation = std::max(rep.zero_chain_deviation, std::abs(agg[v] - target(w - 1, v)));
    }
  }
  for (int w = 0; w < n; ++w) {
    rep.lumped.row(w) /= static_cast<double>(members[w]);
    rep.within_class_deviation = std::max(rep.within_class_deviation, (hi.row(w) - lo.row(w)).maxCoeff());
  }
  rep.max_deviation = std::max(rep.within_class_deviation, rep.zero_chain_deviation);
  return rep;
}

void write_chain_csv(std::ostream& out, const ChainMatrix& chain, const std::string& provenance) {
  out << "# space=" << to_string(chain.space) << " n=" << chain.n;
  if (!provenance.empty()) out << ' ' << provenance;
  out << '\n';
  char buf[64];
  for (Eigen::Index r = 0; r < chain.states(); ++r) {
    for (SparseRows::InnerIterator it(chain.transitions, r); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << r << ',' << it.col() << ',' << buf << '\n';
    }
  }
}

}  // namespace rcd
