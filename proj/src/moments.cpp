#include "rcd/moments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "rcd/errors.hpp"

namespace rcd {

namespace {

constexpr double kUnitarityTol = 1e-10;
constexpr std::size_t kCliffordOrder = 11520;
constexpr Eigen::Index kMaxMomentDim = 4096;

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// sigma_a (x) sigma_b indexed by 4a + b.
const std::array<Gate, 16>& two_qubit_paulis() {
  static const std::array<Gate, 16> kPaulis = [] {
    std::array<Gate, 16> out;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) out[4 * a + b] = kron(pauli_matrix(a), pauli_matrix(b));
    return out;
  }();
  return kPaulis;
}

int factorial(int k) {
  int f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void check_k(int k) {
  if (k != 1 && k != 2) throw InvalidInput("copy count k must be 1 or 2, got " + std::to_string(k));
}

// Global phase fixed so the first entry (column-major) above 1e-6 in
// modulus is positive real.
Gate canonical_phase(const Gate& u) {
  for (Eigen::Index c = 0; c < 4; ++c)
    for (Eigen::Index r = 0; r < 4; ++r) {
      const Complex z = u(r, c);
      if (std::abs(z) > 1e-6) return u * (std::conj(z) / std::abs(z));
    }
  throw NumericFailure("canonical_phase: zero matrix");
}

using GateKey = std::array<std::int64_t, 32>;

struct GateKeyHash {
  std::size_t operator()(const GateKey& key) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto v : key) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

GateKey key_of(const Gate& u) {
  GateKey key{};
  for (int i = 0; i < 16; ++i) {
    const Complex z = u(i % 4, i / 4);
    key[2 * i] = std::llround(z.real() * 1e6);
    key[2 * i + 1] = std::llround(z.imag() * 1e6);
  }
  return key;
}

}  // namespace

Gate cnot_gate() {
  Gate g = Gate::Zero();
  g(0, 0) = g(1, 1) = 1.0;
  g(2, 3) = g(3, 2) = 1.0;
  return g;
}

Gate hadamard_on(int qubit) {
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  return qubit == 0 ? Gate(kron(h, id)) : Gate(kron(id, h));
}

Gate phase_on(int qubit) {
  Eigen::Matrix2cd s;
  s << 1, 0, 0, Complex(0, 1);
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  return qubit == 0 ? Gate(kron(s, id)) : Gate(kron(id, s));
}

double unitarity_residual(const Eigen::MatrixXcd& u) {
  const auto n = u.rows();
  return (u * u.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

GateEnsemble::GateEnsemble(Kind kind, std::string label, std::vector<WeightedGate> gates)
    : kind_(kind), label_(std::move(label)), gates_(std::move(gates)) {
  cumulative_.reserve(gates_.size());
  double acc = 0.0;
  for (const auto& g : gates_) cumulative_.push_back(acc += g.weight);
}

GateEnsemble GateEnsemble::haar_u4() { return GateEnsemble(Kind::HaarU4, "haar-u4", {}); }

GateEnsemble GateEnsemble::explicit_gates(std::vector<WeightedGate> gates, std::string label) {
  if (gates.empty()) throw InvalidInput("gate ensemble has no gates");
  long double total = 0.0L;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (!(gates[i].weight > 0.0)) {
      throw InvalidInput("gate " + std::to_string(i) + " has non-positive weight");
    }
    if (unitarity_residual(gates[i].matrix) > kUnitarityTol) {
      throw InvalidInput("gate " + std::to_string(i) + " is not unitary within 1e-10");
    }
    total += gates[i].weight;
  }
  if (std::abs(total - 1.0L) > 1e-6L) {
    throw InvalidInput("gate weights sum to " + std::to_string(static_cast<double>(total)) + ", expected 1 within 1e-6");
  }
  for (auto& g : gates) g.weight = static_cast<double>(g.weight / total);
  return GateEnsemble(Kind::Explicit, std::move(label), std::move(gates));
}

GateEnsemble GateEnsemble::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("gate ensemble JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("gates") || !doc["gates"].is_array()) {
    throw InvalidInput("gate ensemble JSON: missing \"gates\" array");
  }
  std::vector<WeightedGate> gates;
  for (const auto& entry : doc["gates"]) {
    if (!entry.contains("weight") || !entry["weight"].is_number() || !entry.contains("matrix")) {
      throw InvalidInput("gate ensemble JSON: each gate needs numeric \"weight\" and \"matrix\"");
    }
    const auto& rows = entry["matrix"];
    if (!rows.is_array() || rows.size() != 4) throw InvalidInput("gate matrix must have 4 rows");
    WeightedGate g;
    g.weight = entry["weight"].get<double>();
    for (int r = 0; r < 4; ++r) {
      if (!rows[r].is_array() || rows[r].size() != 4) throw InvalidInput("gate matrix rows need 4 entries");
      for (int c = 0; c < 4; ++c) {
        const auto& z = rows[r][c];
        if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
          throw InvalidInput("gate matrix entries must be [re, im]");
        }
        g.matrix(r, c) = Complex(z[0].get<double>(), z[1].get<double>());
      }
    }
    gates.push_back(g);
  }
  return explicit_gates(std::move(gates), doc.value("label", std::string("file")));
}

GateEnsemble GateEnsemble::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open gate ensemble file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

Gate GateEnsemble::sample(std::mt19937_64& rng) const {
  if (kind_ == Kind::HaarU4) return sample_haar_u4(rng);
  std::uniform_real_distribution<double> unit(0.0, cumulative_.back());
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), unit(rng));
  const auto idx = std::min<std::size_t>(it - cumulative_.begin(), gates_.size() - 1);
  return gates_[idx].matrix;
}

TransferMatrix pauli_transfer(const Gate& u) {
  const auto& paulis = two_qubit_paulis();
  TransferMatrix r;
  for (int p = 0; p < 16; ++p) {
    const Gate image = u * paulis[p] * u.adjoint();
    const Gate image_t = image.transpose();
    for (int q = 0; q < 16; ++q) r(q, p) = 0.25 * paulis[q].cwiseProduct(image_t).sum().real();
  }
  return r;
}

MomentMatrix haar_ghat(int d, int k) {
  check_k(k);
  if (d < 2) throw InvalidInput("haar_ghat: d must be at least 2");
  const Eigen::Index labels = static_cast<Eigen::Index>(d) * d;
  const Eigen::Index dim = k == 1 ? labels : labels * labels;
  if (dim > kMaxMomentDim) throw InvalidInput("haar_ghat: dimension exceeds dense cap 4096");
  MomentMatrix m{d, k, Eigen::MatrixXd::Zero(dim, dim)};
  m.entries(0, 0) = 1.0;
  if (k == 2) {
    const double w = 1.0 / static_cast<double>(labels - 1);
    for (Eigen::Index q = 1; q < labels; ++q)
      for (Eigen::Index p = 1; p < labels; ++p) m.entries(q * labels + q, p * labels + p) = w;
  }
  return m;
}

MomentMatrix ensemble_ghat(const GateEnsemble& ens, int k, std::optional<MonteCarlo> monte_carlo) {
  check_k(k);
  const Eigen::Index dim = k == 1 ? 16 : 256;
  // Extended precision keeps the average over large gate sets near 1e-16.
  using WideMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  WideMatrix acc = WideMatrix::Zero(dim, dim);

  auto accumulate = [&](const TransferMatrix& r, long double w) {
    const auto wide = r.cast<long double>();
    if (k == 1) {
      acc.noalias() += w * wide;
      return;
    }
    for (int q1 = 0; q1 < 16; ++q1)
      for (int p1 = 0; p1 < 16; ++p1) {
        const long double a = wide(q1, p1);
        if (a == 0.0L) continue;
        acc.block<16, 16>(16 * q1, 16 * p1).noalias() += (w * a) * wide;
      }
  };
  auto finish = [&] { return MomentMatrix{4, k, acc.cast<double>()}; };

  if (ens.kind() == GateEnsemble::Kind::Explicit) {
    for (const auto& g : ens.gates()) accumulate(pauli_transfer(g.matrix), g.weight);
    return finish();
  }
  if (!monte_carlo || monte_carlo->samples == 0) {
    throw InvalidInput("ensemble_ghat: haar-u4 needs a Monte Carlo sample count");
  }
  std::mt19937_64 rng(monte_carlo->seed);
  const long double w = 1.0L / static_cast<long double>(monte_carlo->samples);
  for (std::size_t s = 0; s < monte_carlo->samples; ++s) accumulate(pauli_transfer(sample_haar_u4(rng)), w);
  return finish();
}

MomentMatrix pair_moment(const GateEnsemble& ens, int k) {
  if (ens.kind() == GateEnsemble::Kind::HaarU4) return haar_ghat(4, k);
  return ensemble_ghat(ens, k);
}

Eigen::MatrixXcd ensemble_g(const GateEnsemble& ens, int k) {
  check_k(k);
  if (ens.kind() != GateEnsemble::Kind::Explicit) {
    throw InvalidInput("ensemble_g: requires an explicit ensemble");
  }
  const Eigen::Index dim = k == 1 ? 16 : 256;
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& wg : ens.gates()) {
    const Eigen::MatrixXcd u = wg.matrix;
    const Eigen::MatrixXcd uc = wg.matrix.conjugate();
    if (k == 1) {
      g.noalias() += wg.weight * kron(u, uc);
    } else {
      g.noalias() += wg.weight * kron(kron(u, u), kron(uc, uc));
    }
  }
  return g;
}

namespace {

GapReport summarize_moduli(std::vector<double> moduli, int k, double tol) {
  GapReport rep;
  rep.k = k;
  rep.tol = tol;
  for (double m : moduli) {
    if (m > 1.0 - tol) {
      ++rep.unit_modulus_count;
    } else {
      rep.second_modulus = std::max(rep.second_modulus, m);
    }
  }
  rep.is_gapped = rep.unit_modulus_count == factorial(k) && rep.second_modulus < 1.0 - tol;
  return rep;
}

void check_tol(double tol) {
  if (!(tol > 0.0 && tol < 0.5)) throw InvalidInput("gap tolerance must lie in (0, 0.5)");
}

}  // namespace

GapReport gap_report(const Eigen::MatrixXcd& m, int k, double tol) {
  check_tol(tol);
  if (m.rows() != m.cols() || m.rows() == 0) throw InvalidInput("gap_report: matrix must be square");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  if (solver.info() != Eigen::Success) throw NumericFailure("gap_report: eigensolver did not converge");
  std::vector<double> moduli;
  for (const auto& ev : solver.eigenvalues()) moduli.push_back(std::abs(ev));
  return summarize_moduli(std::move(moduli), k, tol);
}

GapReport gap_report(const MomentMatrix& m, double tol) {
  check_tol(tol);
  const auto& a = m.entries;
  if (a.rows() != a.cols() || a.rows() == 0) throw InvalidInput("gap_report: matrix must be square");
  std::vector<double> moduli;
  if ((a - a.transpose()).cwiseAbs().maxCoeff() < 1e-12) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericFailure("gap_report: eigensolver did not converge");
    for (double ev : solver.eigenvalues()) moduli.push_back(std::abs(ev));
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
    if (solver.info() != Eigen::Success) throw NumericFailure("gap_report: eigensolver did not converge");
    for (const auto& ev : solver.eigenvalues()) moduli.push_back(std::abs(ev));
  }
  return summarize_moduli(std::move(moduli), m.k, tol);
}

Gate sample_haar_u4(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Gate z;
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(r, c) = Complex(re, im);
    }
  const Eigen::HouseholderQR<Gate> qr(z);
  Gate q = qr.householderQ();
  const Gate& packed = qr.matrixQR();
  for (int c = 0; c < 4; ++c) {
    const Complex d = packed(c, c);
    q.col(c) *= d / std::abs(d);
  }
  return q;
}

const GateEnsemble& clifford2_group() {
  static const GateEnsemble kGroup = [] {
    const std::array<Gate, 5> generators{hadamard_on(0), hadamard_on(1), phase_on(0), phase_on(1),
                                         cnot_gate()};
    std::vector<Gate> elements{Gate::Identity()};
    std::unordered_set<GateKey, GateKeyHash> seen{key_of(elements.front())};
    for (std::size_t head = 0; head < elements.size(); ++head) {
      for (const auto& g : generators) {
        const Gate next = canonical_phase(g * elements[head]);
        if (seen.insert(key_of(next)).second) elements.push_back(next);
      }
      if (elements.size() > kCliffordOrder) break;
    }
    if (elements.size() != kCliffordOrder) {
      throw NumericFailure("clifford2_group: closure produced " + std::to_string(elements.size()) +
                           " elements, expected 11520");
    }
    std::vector<WeightedGate> gates;
    gates.reserve(elements.size());
    const double w = 1.0 / static_cast<double>(kCliffordOrder);
    for (const auto& e : elements) gates.push_back({w, e});
    return GateEnsemble::explicit_gates(std::move(gates), "clifford2");
  }();
  return kGroup;
}

ProjectorReport projector_check(const MomentMatrix& m, double tol) {
  const auto& a = m.entries;
  ProjectorReport rep;
  rep.idempotence_residual = (a * a - a).cwiseAbs().maxCoeff();
  rep.symmetry_residual = (a - a.transpose()).cwiseAbs().maxCoeff();
  rep.passed = rep.idempotence_residual < tol && rep.symmetry_residual < tol;
  return rep;
}

GateEnsemble ensemble_from_spec(const std::string& spec) {
  if (spec == "haar-u4") return GateEnsemble::haar_u4();
  if (spec == "clifford2") return clifford2_group();
  if (spec.rfind("file:", 0) == 0) return GateEnsemble::from_json_file(spec.substr(5));
  throw InvalidInput("ensemble: expected haar-u4, clifford2 or file:PATH, got '" + spec + "'");
}

}  // namespace rcd
