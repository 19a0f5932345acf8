#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rcd/pauli.hpp"

namespace rcd {

using Gate = Eigen::Matrix4cd;
/// Pauli transfer matrix R(q, p) = tr(sigma_q U sigma_p U^dag) / 4 of a two-qubit gate.
using TransferMatrix = Eigen::Matrix<double, 16, 16>;

struct WeightedGate {
  double weight = 0.0;
  Gate matrix = Gate::Identity();
};

/// A distribution over two-qubit gates: either the Haar measure on U(4) or an
/// explicit weighted finite set.
class GateEnsemble {
 public:
  enum class Kind { HaarU4, Explicit };

  static GateEnsemble haar_u4();
  /// Weights must be positive and sum to 1 within 1e-6 (they are then
  /// renormalized); each gate must be unitary within 1e-10.
  static GateEnsemble explicit_gates(std::vector<WeightedGate> gates, std::string label);
  /// {"gates": [{"weight": w, "matrix": [[[re, im] x4] x4]}], "label": "..."}
  static GateEnsemble from_json_text(const std::string& text);
  static GateEnsemble from_json_file(const std::string& path);

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  const std::vector<WeightedGate>& gates() const { return gates_; }

  /// Draws one gate: Haar-distributed or according to the weights.
  Gate sample(std::mt19937_64& rng) const;

 private:
  GateEnsemble(Kind kind, std::string label, std::vector<WeightedGate> gates);

  Kind kind_;
  std::string label_;
  std::vector<WeightedGate> gates_;
  std::vector<double> cumulative_;
};

/// Real moment operator Ghat(q; p) with rows indexed by the output tuple q
/// and columns by the input tuple p; dimension (d^2)^k.
struct MomentMatrix {
  int d = 0;
  int k = 0;
  Eigen::MatrixXd entries;
};

struct GapReport {
  int k = 0;
  int unit_modulus_count = 0;
  double second_modulus = 0.0;
  bool is_gapped = false;
  double tol = 0.0;
};

struct ProjectorReport {
  double idempotence_residual = 0.0;  // max |M^2 - M|
  double symmetry_residual = 0.0;     // max |M - M^T|
  bool passed = false;
};

/// Options for Monte Carlo estimation of the Haar-U(4) moment operator.
struct MonteCarlo {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

inline constexpr double kDefaultGapTol = 1e-8;

/// Closed-form Haar moment operator for k in {1, 2}.
MomentMatrix haar_ghat(int d, int k);

/// Ensemble-averaged Ghat for d = 4. Exact for explicit ensembles; the
/// Haar-U(4) ensemble requires a Monte Carlo sample count.
MomentMatrix ensemble_ghat(const GateEnsemble& ens, int k,
                           std::optional<MonteCarlo> monte_carlo = std::nullopt);

/// Exact pair moment operator: haar_ghat(4, k) for Haar-U(4), ensemble_ghat otherwise.
MomentMatrix pair_moment(const GateEnsemble& ens, int k);

/// G = sum_i w_i U_i^{(x)k} (x) (U_i^*)^{(x)k}; explicit ensembles only.
Eigen::MatrixXcd ensemble_g(const GateEnsemble& ens, int k);

GapReport gap_report(const Eigen::MatrixXcd& m, int k, double tol = kDefaultGapTol);
GapReport gap_report(const MomentMatrix& m, double tol = kDefaultGapTol);

/// Haar-distributed U(4) element (QR of a complex Gaussian with phase fix).
Gate sample_haar_u4(std::mt19937_64& rng);

/// Uniform ensemble over the 11520-element two-qubit Clifford group modulo
/// phase. Enumerated on first use and cached.
const GateEnsemble& clifford2_group();

/// "haar-u4", "clifford2" or "file:PATH".
GateEnsemble ensemble_from_spec(const std::string& spec);

ProjectorReport projector_check(const MomentMatrix& m, double tol);

TransferMatrix pauli_transfer(const Gate& u);

/// Largest entry of |U U^dag - I|.
double unitarity_residual(const Eigen::MatrixXcd& u);

/// Standard two-qubit gates (control on the first qubit for CNOT).
Gate cnot_gate();
Gate hadamard_on(int qubit);
Gate phase_on(int qubit);

}  // namespace rcd
