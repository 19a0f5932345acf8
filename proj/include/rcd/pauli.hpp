#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace rcd {

using Complex = std::complex<double>;
using DenseOperator = Eigen::MatrixXcd;

/// Dense operators are limited to n*k <= 12 qubits (4096 x 4096).
inline constexpr int kMaxDenseQubits = 12;

/// A word over {0,1,2,3} labelling sigma_{p_1} (x) ... (x) sigma_{p_n}.
/// Index order is base 4 with qubit 0 as the most significant digit.
class PauliString {
 public:
  explicit PauliString(std::vector<std::uint8_t> letters);

  static PauliString from_index(std::uint64_t index, int n);
  /// Accepts digits "0123" or letters "IXYZ".
  static PauliString parse(std::string_view text);

  int size() const { return static_cast<int>(letters_.size()); }
  std::uint8_t operator[](int qubit) const { return letters_[qubit]; }
  std::uint64_t index() const;
  /// Number of non-identity letters.
  int weight() const;
  bool is_identity() const { return weight() == 0; }
  std::string str() const;
  DenseOperator matrix() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::vector<std::uint8_t> letters_;
};

/// Real Pauli coefficients gamma over k-tuples of n-qubit strings. The flat
/// index of (p_1, ..., p_k) is p_1 * 4^{n(k-1)} + ... + p_k, which is also
/// the index of the concatenated nk-qubit string.
struct CoeffTensor {
  int n = 0;
  int k = 1;
  std::vector<double> values;

  CoeffTensor() = default;
  CoeffTensor(int n, int k);

  std::size_t size() const { return values.size(); }
  double& operator[](std::uint64_t i) { return values[i]; }
  double operator[](std::uint64_t i) const { return values[i]; }

  /// Flat index of the pair (p1, p2) in a k = 2 tensor.
  std::uint64_t pair_index(std::uint64_t p1, std::uint64_t p2) const {
    return p1 * (std::uint64_t{1} << (2 * n)) + p2;
  }
  double sum_of_squares() const;
};

/// Sparse description of sigma_p on N qubits: sigma_p |c> = phase(c) |c ^ flip>.
struct PauliAction {
  std::uint64_t flip_mask = 0;
  std::uint64_t sign_mask = 0;  // bits where the letter is Y or Z
  int y_count = 0;

  static PauliAction of(std::uint64_t index, int num_qubits);
  Complex phase(std::uint64_t column) const;
};

/// Single-qubit Pauli matrix sigma_letter.
const Eigen::Matrix2cd& pauli_matrix(int letter);

/// Dense sigma_p for the index p on num_qubits qubits.
DenseOperator pauli_operator(std::uint64_t index, int num_qubits);

/// gamma(p) = 2^{-nk/2} tr(sigma_p rho) for rho on n*k qubits.
CoeffTensor expand_pauli(const DenseOperator& rho, int n, int k);

/// rho = 2^{-nk/2} sum_p gamma(p) sigma_p.
DenseOperator reconstruct(const CoeffTensor& coeffs);

/// Swap F|i,j> = |j,i> on two d-dimensional systems, d a power of two.
DenseOperator swap_matrix(int d);

/// tr(P_C (A_1 (x) ... (x) A_c)) where P_C|j_1..j_c> = |j_{C(1)}..j_{C(c)}>.
/// `perm[m]` is the 0-based image C(m). Evaluated both by direct index
/// contraction and as a product of cyclic traces; the two must agree within
/// 1e-10 (relative to the magnitude) or NumericFailure is thrown.
Complex permutation_trace(std::span<const int> perm, std::span<const DenseOperator> mats);

/// Product of traces over the cycles of `perm`: for each cycle starting at s,
/// tr(A_{C(s)} A_{C^2(s)} ... A_s).
Complex cycle_product_trace(std::span<const int> perm, std::span<const DenseOperator> mats);

/// Brute-force sum_i prod_m A_m[i_{C^{-1}(m)}, i_m].
Complex contracted_permutation_trace(std::span<const int> perm,
                                     std::span<const DenseOperator> mats);

}  // namespace rcd
