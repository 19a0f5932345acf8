#include "rcd/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "rcd/chains.hpp"
#include "rcd/errors.hpp"
#include "rcd/pair_map.hpp"

namespace rcd {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void check_trials(std::size_t trials) {
  if (trials < 1) throw InvalidInput("trials must be at least 1");
}

std::vector<DecayPoint> summarize(const std::vector<std::vector<double>>& rows) {
  const std::size_t len = rows.front().size();
  const double count = static_cast<double>(rows.size());
  std::vector<DecayPoint> points(len);
  for (std::size_t t = 0; t < len; ++t) {
    double sum = 0.0;
    for (const auto& r : rows) sum += r[t];
    const double mean = sum / count;
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[t] - mean) * (r[t] - mean);
    const double var = rows.size() > 1 ? ss / (count - 1.0) : 0.0;
    points[t] = {static_cast<long>(t), mean, std::sqrt(var / count)};
  }
  return points;
}

Eigen::MatrixXd transfer_kron(const TransferMatrix& r) {
  Eigen::MatrixXd out(256, 256);
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) out.block(a * 16, b * 16, 16, 16) = r(a, b) * r;
  return out;
}

// Per-step coefficient evolution shared by the k = 1 and k = 2 decay curves.
std::vector<double> evolve_trial(int n, int k, int t_max, const GateEnsemble& ens, const PairMap& averaged,
                                 const std::vector<PairLayout>& layouts, std::vector<double> gamma,
                                 DecayMode mode, std::mt19937_64& rng,
                                 const std::function<double(const std::vector<double>&)>& measure) {
  std::vector<double> curve;
  curve.reserve(t_max + 1);
  curve.push_back(measure(gamma));
  for (int t = 0; t < t_max; ++t) {
    const auto [i, j] = sample_pair(n, rng);
    const PairLayout& layout = layouts[static_cast<std::size_t>(i * n + j)];
    if (mode == DecayMode::Averaged) {
      averaged.apply(gamma, layout);
    } else {
      const TransferMatrix r = pauli_transfer(ens.sample(rng));
      const PairMap step = k == 1 ? PairMap(Eigen::MatrixXd(r), 1) : PairMap(transfer_kron(r), 2);
      step.apply(gamma, layout);
    }
    curve.push_back(measure(gamma));
  }
  return curve;
}

std::vector<PairLayout> layouts_by_pair(int n, int k) {
  std::vector<PairLayout> out(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) out[static_cast<std::size_t>(i * n + j)] = PairLayout::make(n, k, i, j);
  return out;
}

Estimate estimate(const std::vector<std::vector<double>>& rows) {
  const auto p = summarize(rows);
  return {p[0].value, p[0].std_error};
}

}  // namespace

DenseOperator Circuit::unitary() const {
  if (n < 2 || n > kMaxCircuitUnitaryQubits) throw InvalidInput("Circuit::unitary: n must lie in [2, 10]");
  DenseOperator u = DenseOperator::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (const auto& step : steps) apply_gate_left(u, step, n);
  return u;
}

void apply_gate_left(DenseOperator& u, const CircuitStep& step, int n) {
  if (step.first == step.second || step.first < 0 || step.second < 0 || step.first >= n || step.second >= n) {
    throw InvalidInput("circuit step needs two distinct qubits in [0, n)");
  }
  const Eigen::Index bit_a = Eigen::Index{1} << (n - 1 - step.first);
  const Eigen::Index bit_b = Eigen::Index{1} << (n - 1 - step.second);
  const Eigen::Index dim = u.rows();
  Eigen::Matrix<Complex, 4, Eigen::Dynamic> block(4, u.cols());
  for (Eigen::Index base = 0; base < dim; ++base) {
    if (base & (bit_a | bit_b)) continue;
    const Eigen::Index rows[4] = {base, base | bit_b, base | bit_a, base | bit_a | bit_b};
    for (int r = 0; r < 4; ++r) block.row(r) = u.row(rows[r]);
    block = step.gate * block;
    for (int r = 0; r < 4; ++r) u.row(rows[r]) = block.row(r);
  }
}

std::pair<int, int> sample_pair(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> first(0, n - 1), second(0, n - 2);
  const int i = first(rng);
  int j = second(rng);
  if (j >= i) ++j;
  return {i, j};
}

Circuit sample_circuit(int n, int t, const GateEnsemble& ens, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("sample_circuit: n must be at least 2");
  if (t < 0) throw InvalidInput("sample_circuit: t must be non-negative");
  std::mt19937_64 rng(seed);
  Circuit c{n, {}};
  c.steps.reserve(static_cast<std::size_t>(t));
  for (int s = 0; s < t; ++s) {
    const auto [i, j] = sample_pair(n, rng);
    c.steps.push_back({i, j, ens.sample(rng)});
  }
  return c;
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return splitmix64(splitmix64(master) ^ (trial * 0xD1B54A32D192ED03ULL));
}

int worker_count() {
  if (const char* env = std::getenv("RCD_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::vector<double>> run_trials(
    std::size_t trials, std::uint64_t seed,
    const std::function<std::vector<double>(std::size_t, std::mt19937_64&)>& fn) {
  std::vector<std::vector<double>> out(trials);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < trials; i += stride) {
      std::mt19937_64 rng(trial_seed(seed, i));
      out[i] = fn(i, rng);
    }
  };
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(worker_count(), trials));
  if (workers <= 1) {
    work(0, 1);
    return out;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex guard;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        work(w, workers);
      } catch (...) {
        std::lock_guard lock(guard);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

DecayMode decay_mode_from_string(const std::string& name) {
  if (name == "averaged") return DecayMode::Averaged;
  if (name == "sampled") return DecayMode::Sampled;
  throw InvalidInput("unknown decay mode '" + name + "' (expected averaged or sampled)");
}

CoeffTensor zero_state_k1(int n) {
  if (n < 1 || n > kMaxDecayK1Qubits) throw InvalidInput("zero_state_k1: n must lie in [1, 10]");
  CoeffTensor c(n, 1);
  const double v = std::pow(2.0, -0.5 * n);
  // Strings over {I, Z}: every base-4 digit is 0 or 3.
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::uint64_t idx = 0;
    for (int q = 0; q < n; ++q)
      if (mask >> q & 1) idx |= std::uint64_t{3} << (2 * q);
    c[idx] = v;
  }
  return c;
}

CoeffTensor zero_state_k2(int n) {
  if (n < 1 || n > kMaxDecayK2Qubits) throw InvalidInput("zero_state_k2: n must lie in [1, 5]");
  const CoeffTensor one = zero_state_k1(n);
  CoeffTensor c(n, 2);
  for (std::uint64_t a = 0; a < one.size(); ++a) {
    if (one[a] == 0.0) continue;
    for (std::uint64_t b = 0; b < one.size(); ++b) c[c.pair_index(a, b)] = one[a] * one[b];
  }
  return c;
}

DecayCurve decay_k1(int n, int t_max, const GateEnsemble& ens, const CoeffTensor& init, std::size_t trials,
                    std::uint64_t seed, DecayMode mode) {
  if (n < 2 || n > kMaxDecayK1Qubits) throw InvalidInput("decay_k1: n must lie in [2, 10]");
  if (init.n != n || init.k != 1) throw InvalidInput("decay_k1: initial coefficients do not match n, k = 1");
  if (t_max < 0) throw InvalidInput("decay_k1: t must be non-negative");
  check_trials(trials);
  const PairMap averaged = mode == DecayMode::Averaged ? PairMap::from_moment(pair_moment(ens, 1)) : PairMap();
  const auto layouts = layouts_by_pair(n, 1);
  auto measure = [](const std::vector<double>& g) {
    double s = 0.0;
    for (std::size_t p = 1; p < g.size(); ++p) s += std::abs(g[p]);
    return s;
  };
  const auto rows = run_trials(trials, seed, [&](std::size_t, std::mt19937_64& rng) {
    return evolve_trial(n, 1, t_max, ens, averaged, layouts, init.values, mode, rng, measure);
  });
  return {"k1-sum", summarize(rows)};
}

DecayCurve decay_k1(int n, int t_max, const GateEnsemble& ens, const DenseOperator& init, std::size_t trials,
                    std::uint64_t seed, DecayMode mode) {
  return decay_k1(n, t_max, ens, expand_pauli(init, n, 1), trials, seed, mode);
}

DecayCurve decay_k2_offdiag(int n, int t_max, const GateEnsemble& ens, const CoeffTensor& init,
                            std::size_t trials, std::uint64_t seed, DecayMode mode) {
  if (n < 2 || n > kMaxDecayK2Qubits) throw InvalidInput("decay_k2_offdiag: n must lie in [2, 5]");
  if (init.n != n || init.k != 2) throw InvalidInput("decay_k2_offdiag: initial coefficients do not match n, k = 2");
  if (t_max < 0) throw InvalidInput("decay_k2_offdiag: t must be non-negative");
  check_trials(trials);
  const PairMap averaged = mode == DecayMode::Averaged ? PairMap::from_moment(pair_moment(ens, 2)) : PairMap();
  const auto layouts = layouts_by_pair(n, 2);
  const std::uint64_t side = std::uint64_t{1} << (2 * n);
  auto measure = [side](const std::vector<double>& g) {
    double s = 0.0;
    for (std::uint64_t p1 = 0; p1 < side; ++p1)
      for (std::uint64_t p2 = 0; p2 < side; ++p2)
        if (p1 != p2) s += std::abs(g[p1 * side + p2]);
    return s;
  };
  const auto rows = run_trials(trials, seed, [&](std::size_t, std::mt19937_64& rng) {
    return evolve_trial(n, 2, t_max, ens, averaged, layouts, init.values, mode, rng, measure);
  });
  return {"k2-offdiag-sum", summarize(rows)};
}

double k1_decay_bound(const CoeffTensor& init, long t) {
  if (init.k != 1) throw InvalidInput("k1_decay_bound: needs k = 1 coefficients");
  double total = 0.0;
  for (std::uint64_t p = 1; p < init.size(); ++p) {
    total += std::exp(-static_cast<double>(t) * pauli_weight(p) / init.n) * std::abs(init[p]);
  }
  return total;
}

double k2_offdiag_bound(int n, long t) {
  return std::pow(4.0, n) * (std::pow(1.0 + 3.0 * std::exp(-static_cast<double>(t) / n), n) - 1.0);
}

TrajectoryReport zero_trajectory(int n, long steps, int start, std::uint64_t seed) {
  if (start < 1 || start > n) throw InvalidInput("zero_trajectory: start must lie in [1, n]");
  if (steps < 0) throw InvalidInput("zero_trajectory: steps must be non-negative");
  const ChainMatrix chain = zero_chain(n);
  std::vector<double> down(n + 1, 0.0), up(n + 1, 0.0);
  for (int x = 1; x <= n; ++x) {
    if (x > 1) down[x] = chain.transitions.coeff(x - 1, x - 2);
    if (x < n) up[x] = chain.transitions.coeff(x - 1, x);
  }

  TrajectoryReport rep;
  rep.n = n;
  rep.occupancy.assign(n, 0);
  rep.path.reserve(static_cast<std::size_t>(steps) + 1);
  rep.window = std::max<long>(1, steps / 10);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  int x = start;
  long held = 0;
  rep.path.push_back(x);
  ++rep.occupancy[x - 1];
  for (long s = 0; s < steps; ++s) {
    const double u = unit(rng);
    ++held;
    int next = x;
    if (u < down[x]) {
      next = x - 1;
    } else if (u < down[x] + up[x]) {
      next = x + 1;
    }
    if (next != x) {
      ++rep.waiting_histogram[held];
      held = 0;
      x = next;
    }
    rep.path.push_back(x);
    ++rep.occupancy[x - 1];
  }
  const auto total = static_cast<long>(rep.path.size());
  const long begin = std::max<long>(0, total - rep.window);
  double sum = 0.0;
  for (long i = begin; i < total; ++i) sum += rep.path[i];
  rep.window_mean = sum / static_cast<double>(total - begin);
  return rep;
}

Estimate frame_potential(const GateEnsemble& ens, int k, std::size_t trials, std::uint64_t seed) {
  if (k != 1 && k != 2) throw InvalidInput("frame_potential: k must be 1 or 2");
  check_trials(trials);
  const auto rows = run_trials(trials, seed, [&](std::size_t, std::mt19937_64& rng) {
    const Gate u = ens.sample(rng);
    const Gate v = ens.sample(rng);
    const double a = std::abs((u.adjoint() * v).trace());
    return std::vector<double>{std::pow(a, 2 * k)};
  });
  return estimate(rows);
}

Estimate circuit_frame_potential(int n, int t, const GateEnsemble& ens, int k, std::size_t trials,
                                 std::uint64_t seed) {
  if (k != 1 && k != 2) throw InvalidInput("circuit_frame_potential: k must be 1 or 2");
  if (n < 2 || n > kMaxCircuitUnitaryQubits) throw InvalidInput("circuit_frame_potential: n must lie in [2, 10]");
  check_trials(trials);
  const auto rows = run_trials(trials, seed, [&](std::size_t, std::mt19937_64& rng) {
    const DenseOperator u = sample_circuit(n, t, ens, rng()).unitary();
    const DenseOperator v = sample_circuit(n, t, ens, rng()).unitary();
    const double a = std::abs((u.adjoint() * v).trace());
    return std::vector<double>{std::pow(a, 2 * k)};
  });
  return estimate(rows);
}

void write_decay_csv(std::ostream& out, const DecayCurve& curve, const std::string& header) {
  if (!header.empty()) out << header << '\n';
  out << "t,value,stderr\n";
  char buf[96];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", p.t, p.value, p.std_error);
    out << buf;
  }
}

std::string decay_json(const DecayCurve& curve, const std::string& header) {
  nlohmann::ordered_json j;
  if (!header.empty()) j["header"] = header;
  j["kind"] = curve.kind;
  auto pts = nlohmann::ordered_json::array();
  for (const auto& p : curve.points) pts.push_back({{"t", p.t}, {"value", p.value}, {"stderr", p.std_error}});
  j["points"] = std::move(pts);
  return j.dump(2);
}

}  // namespace rcd
