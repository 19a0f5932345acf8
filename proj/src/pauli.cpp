#include "rcd/pauli.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "rcd/errors.hpp"

namespace rcd {

namespace {

constexpr double kHermitianResidue = 1e-9;

void check_qubits(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxDenseQubits) {
    throw InvalidInput("qubit count " + std::to_string(num_qubits) + " outside [1, " +
                       std::to_string(kMaxDenseQubits) + "]");
  }
}

std::uint8_t letter_of(char c) {
  switch (c) {
    case '0': case 'I': case 'i': return 0;
    case '1': case 'X': case 'x': return 1;
    case '2': case 'Y': case 'y': return 2;
    case '3': case 'Z': case 'z': return 3;
    default: throw InvalidInput(std::string("invalid Pauli letter '") + c + "'");
  }
}

}  // namespace

PauliString::PauliString(std::vector<std::uint8_t> letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw InvalidInput("Pauli string must have at least one qubit");
  for (auto l : letters_) {
    if (l > 3) throw InvalidInput("Pauli letters must lie in {0,1,2,3}");
  }
}

PauliString PauliString::from_index(std::uint64_t index, int n) {
  if (n < 1 || n > 31) throw InvalidInput("Pauli string length must lie in [1, 31]");
  if (index >> (2 * n) != 0) throw InvalidInput("Pauli index out of range for n qubits");
  std::vector<std::uint8_t> letters(n);
  for (int q = n - 1; q >= 0; --q) {
    letters[q] = static_cast<std::uint8_t>(index & 3);
    index >>= 2;
  }
  return PauliString(std::move(letters));
}

PauliString PauliString::parse(std::string_view text) {
  std::vector<std::uint8_t> letters;
  letters.reserve(text.size());
  for (char c : text) letters.push_back(letter_of(c));
  return PauliString(std::move(letters));
}

std::uint64_t PauliString::index() const {
  std::uint64_t idx = 0;
  for (auto l : letters_) idx = (idx << 2) | l;
  return idx;
}

int PauliString::weight() const {
  return static_cast<int>(std::count_if(letters_.begin(), letters_.end(),
                                        [](std::uint8_t l) { return l != 0; }));
}

std::string PauliString::str() const {
  static constexpr std::array<char, 4> kNames{'I', 'X', 'Y', 'Z'};
  std::string s;
  for (auto l : letters_) s.push_back(kNames[l]);
  return s;
}

DenseOperator PauliString::matrix() const { return pauli_operator(index(), size()); }

CoeffTensor::CoeffTensor(int n_, int k_) : n(n_), k(k_) {
  if (n < 1 || (k != 1 && k != 2)) throw InvalidInput("CoeffTensor needs n >= 1 and k in {1,2}");
  if (2 * n * k > 62) throw InvalidInput("CoeffTensor too large");
  values.assign(std::size_t{1} << (2 * n * k), 0.0);
}

double CoeffTensor::sum_of_squares() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

PauliAction PauliAction::of(std::uint64_t index, int num_qubits) {
  PauliAction a;
  for (int q = 0; q < num_qubits; ++q) {
    const auto letter = (index >> (2 * (num_qubits - 1 - q))) & 3;
    const std::uint64_t bit = std::uint64_t{1} << (num_qubits - 1 - q);
    if (letter == 1 || letter == 2) a.flip_mask |= bit;
    if (letter == 2 || letter == 3) a.sign_mask |= bit;
    if (letter == 2) ++a.y_count;
  }
  return a;
}

Complex PauliAction::phase(std::uint64_t column) const {
  static constexpr std::array<Complex, 4> kPowersOfI{Complex(1, 0), Complex(0, 1),
                                                     Complex(-1, 0), Complex(0, -1)};
  Complex ph = kPowersOfI[y_count & 3];
  if (std::popcount(column & sign_mask) & 1) ph = -ph;
  return ph;
}

const Eigen::Matrix2cd& pauli_matrix(int letter) {
  static const std::array<Eigen::Matrix2cd, 4> kPaulis = [] {
    std::array<Eigen::Matrix2cd, 4> m;
    const Complex i(0, 1);
    m[0] << 1, 0, 0, 1;
    m[1] << 0, 1, 1, 0;
    m[2] << 0, -i, i, 0;
    m[3] << 1, 0, 0, -1;
    return m;
  }();
  if (letter < 0 || letter > 3) throw InvalidInput("Pauli letter out of range");
  return kPaulis[letter];
}

DenseOperator pauli_operator(std::uint64_t index, int num_qubits) {
  check_qubits(num_qubits);
  const std::uint64_t dim = std::uint64_t{1} << num_qubits;
  const auto action = PauliAction::of(index, num_qubits);
  DenseOperator op = DenseOperator::Zero(dim, dim);
  for (std::uint64_t c = 0; c < dim; ++c) op(c ^ action.flip_mask, c) = action.phase(c);
  return op;
}

CoeffTensor expand_pauli(const DenseOperator& rho, int n, int k) {
  if (k != 1 && k != 2) throw InvalidInput("expand_pauli: k must be 1 or 2");
  if (n < 1) throw InvalidInput("expand_pauli: n must be positive");
  const int total = n * k;
  check_qubits(total);
  const std::uint64_t dim = std::uint64_t{1} << total;
  if (static_cast<std::uint64_t>(rho.rows()) != dim || static_cast<std::uint64_t>(rho.cols()) != dim) {
    throw InvalidInput("expand_pauli: operator is " + std::to_string(rho.rows()) + "x" +
                       std::to_string(rho.cols()) + ", expected dimension " + std::to_string(dim));
  }
  CoeffTensor out(n, k);
  const double norm = std::pow(2.0, -0.5 * total);
  double worst_imag = 0.0;
  for (std::uint64_t p = 0; p < out.size(); ++p) {
    const auto action = PauliAction::of(p, total);
    Complex tr(0, 0);
    for (std::uint64_t c = 0; c < dim; ++c) tr += action.phase(c) * rho(c, c ^ action.flip_mask);
    tr *= norm;
    worst_imag = std::max(worst_imag, std::abs(tr.imag()));
    out[p] = tr.real();
  }
  if (worst_imag >= kHermitianResidue) {
    throw NumericFailure("expand_pauli: imaginary residue " + std::to_string(worst_imag) +
                         " indicates a non-Hermitian operator");
  }
  return out;
}

DenseOperator reconstruct(const CoeffTensor& coeffs) {
  const int total = coeffs.n * coeffs.k;
  check_qubits(total);
  const std::uint64_t dim = std::uint64_t{1} << total;
  if (coeffs.size() != dim * dim) throw InvalidInput("reconstruct: malformed coefficient tensor");
  const double norm = std::pow(2.0, -0.5 * total);
  DenseOperator rho = DenseOperator::Zero(dim, dim);
  for (std::uint64_t p = 0; p < coeffs.size(); ++p) {
    const double g = coeffs[p];
    if (g == 0.0) continue;
    const auto action = PauliAction::of(p, total);
    for (std::uint64_t c = 0; c < dim; ++c) rho(c ^ action.flip_mask, c) += g * norm * action.phase(c);
  }
  return rho;
}

DenseOperator swap_matrix(int d) {
  if (d < 2 || d > 64 || !std::has_single_bit(static_cast<unsigned>(d))) {
    throw InvalidInput("swap_matrix: d must be a power of two in [2, 64], got " + std::to_string(d));
  }
  DenseOperator f = DenseOperator::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) f(j * d + i, i * d + j) = 1.0;
  return f;
}

namespace {

Eigen::Index validate_permutation(std::span<const int> perm, std::span<const DenseOperator> mats) {
  const auto c = perm.size();
  if (c == 0 || mats.size() != c) throw InvalidInput("permutation_trace: need one matrix per item");
  std::vector<bool> seen(c, false);
  for (int image : perm) {
    if (image < 0 || static_cast<std::size_t>(image) >= c || seen[image]) {
      throw InvalidInput("permutation_trace: not a permutation");
    }
    seen[image] = true;
  }
  const auto dim = mats[0].rows();
  for (const auto& m : mats) {
    if (m.rows() != dim || m.cols() != dim) {
      throw InvalidInput("permutation_trace: matrices must be square with equal dimension");
    }
  }
  return dim;
}

}  // namespace

Complex cycle_product_trace(std::span<const int> perm, std::span<const DenseOperator> mats) {
  const auto dim = validate_permutation(perm, mats);
  std::vector<bool> visited(perm.size(), false);
  Complex result(1, 0);
  for (std::size_t s = 0; s < perm.size(); ++s) {
    if (visited[s]) continue;
    DenseOperator product = DenseOperator::Identity(dim, dim);
    std::size_t m = perm[s];
    while (true) {
      product = product * mats[m];
      visited[m] = true;
      if (m == s) break;
      m = perm[m];
    }
    result *= product.trace();
  }
  return result;
}

Complex contracted_permutation_trace(std::span<const int> perm,
                                     std::span<const DenseOperator> mats) {
  const auto dim = validate_permutation(perm, mats);
  const auto c = perm.size();
  double terms = std::pow(static_cast<double>(dim), static_cast<double>(c));
  if (terms > double(1 << 24)) throw InvalidInput("permutation_trace: contraction too large");
  std::vector<int> inverse(c);
  for (std::size_t m = 0; m < c; ++m) inverse[perm[m]] = static_cast<int>(m);

  std::vector<Eigen::Index> idx(c, 0);
  Complex total(0, 0);
  while (true) {
    Complex term(1, 0);
    for (std::size_t m = 0; m < c; ++m) term *= mats[m](idx[inverse[m]], idx[m]);
    total += term;
    std::size_t pos = 0;
    while (pos < c && ++idx[pos] == dim) idx[pos++] = 0;
    if (pos == c) break;
  }
  return total;
}

Complex permutation_trace(std::span<const int> perm, std::span<const DenseOperator> mats) {
  const Complex contracted = contracted_permutation_trace(perm, mats);
  const Complex cyclic = cycle_product_trace(perm, mats);
  const double scale = std::max(1.0, std::abs(cyclic));
  if (std::abs(contracted - cyclic) > 1e-10 * scale) {
    throw NumericFailure("permutation_trace: contraction and cycle-product paths disagree");
  }
  return cyclic;
}

}  // namespace rcd
