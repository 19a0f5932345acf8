#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "rcd/moments.hpp"
#include "rcd/pauli.hpp"

namespace rcd {

/// One gate on the ordered qubit pair (first, second); qubits are 0-based and
/// the gate's first tensor factor acts on `first`.
struct CircuitStep {
  int first = 0;
  int second = 1;
  Gate gate = Gate::Identity();
};

struct Circuit {
  int n = 0;
  std::vector<CircuitStep> steps;

  /// Product of the steps, later steps on the left.
  DenseOperator unitary() const;
};

inline constexpr int kMaxCircuitUnitaryQubits = 10;
inline constexpr int kMaxDecayK1Qubits = 10;
inline constexpr int kMaxDecayK2Qubits = 5;

/// Uniform ordered pair i != j.
std::pair<int, int> sample_pair(int n, std::mt19937_64& rng);

Circuit sample_circuit(int n, int t, const GateEnsemble& ens, std::uint64_t seed);

/// Applies a two-qubit gate to the rows of an n-qubit operator (u <- G u).
void apply_gate_left(DenseOperator& u, const CircuitStep& step, int n);

/// Deterministic per-trial seed from the master seed and trial index.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

/// Worker count: RCD_THREADS if set, else the hardware concurrency.
int worker_count();

/// Runs fn(trial, rng) for every trial, possibly in parallel, and returns the
/// results in trial order.
std::vector<std::vector<double>> run_trials(
    std::size_t trials, std::uint64_t seed,
    const std::function<std::vector<double>(std::size_t, std::mt19937_64&)>& fn);

struct DecayPoint {
  long t = 0;
  double value = 0.0;
  double std_error = 0.0;
};

struct DecayCurve {
  std::string kind;  // "k1-sum", "k2-offdiag-sum" or "frame-potential"
  std::vector<DecayPoint> points;
};

/// Averaged: each trial samples the pair sequence and applies the
/// ensemble-averaged pair moment operator. Sampled: each trial also samples
/// the gates and applies their exact transfer matrices.
enum class DecayMode { Averaged, Sampled };

DecayMode decay_mode_from_string(const std::string& name);

/// Pauli coefficients of |0...0><0...0| and of its two-copy tensor.
CoeffTensor zero_state_k1(int n);
CoeffTensor zero_state_k2(int n);

/// Trial mean of sum_{p != 0} |gamma_t(p)| for t = 0..t_max.
DecayCurve decay_k1(int n, int t_max, const GateEnsemble& ens, const CoeffTensor& init, std::size_t trials,
                    std::uint64_t seed, DecayMode mode = DecayMode::Averaged);
DecayCurve decay_k1(int n, int t_max, const GateEnsemble& ens, const DenseOperator& init, std::size_t trials,
                    std::uint64_t seed, DecayMode mode = DecayMode::Averaged);

/// Trial mean of sum_{p1 != p2} |gamma_t(p1, p2)|.
DecayCurve decay_k2_offdiag(int n, int t_max, const GateEnsemble& ens, const CoeffTensor& init,
                            std::size_t trials, std::uint64_t seed, DecayMode mode = DecayMode::Averaged);

/// sum_d exp(-t d / n) * sum_{wt(p) = d} |gamma_0(p)|.
double k1_decay_bound(const CoeffTensor& init, long t);
/// 4^n [(1 + 3 exp(-t/n))^n - 1].
double k2_offdiag_bound(int n, long t);

struct TrajectoryReport {
  int n = 0;
  std::vector<int> path;
  /// occupancy[x - 1] = number of visited times (including t = 0) at x.
  std::vector<long> occupancy;
  /// Holding time before a move -> count.
  std::map<long, long> waiting_histogram;
  long window = 0;
  double window_mean = 0.0;
};

/// Samples a zero-chain path of `steps` moves from `start`; the final window
/// covers the last max(1, steps / 10) positions.
TrajectoryReport zero_trajectory(int n, long steps, int start, std::uint64_t seed);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// E |tr(U^dag V)|^{2k} for independent draws from the ensemble.
Estimate frame_potential(const GateEnsemble& ens, int k, std::size_t trials, std::uint64_t seed);
/// Same with U, V random circuits of t steps on n qubits.
Estimate circuit_frame_potential(int n, int t, const GateEnsemble& ens, int k, std::size_t trials,
                                 std::uint64_t seed);

void write_decay_csv(std::ostream& out, const DecayCurve& curve, const std::string& header = "");
std::string decay_json(const DecayCurve& curve, const std::string& header = "");

}  // namespace rcd
