#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rcd/moments.hpp"
#include "rcd/pair_map.hpp"
#include "rcd/pauli.hpp"

namespace rcd {

inline constexpr int kMaxMapQubitsK2 = 5;
inline constexpr int kMaxMapQubitsK1 = 10;
/// Sparse and dense forms, and the diamond bound, stop at 4^{nk} = 4096.
inline constexpr int kMaxExplicitMapDigits = 6;

struct MapSpectrum {
  int unit_modulus_count = 0;
  double second_modulus = 0.0;
};

/// Linear map on the 4^{nk} Pauli coefficients of a k-copy operator.
///   CircuitStep: one random-circuit step in expectation,
///                (1/(n(n-1))) sum_{i != j} Ghat embedded on (i, j).
///   HaarTwirl:   the full Haar k-fold twirl.
class ExpectedMap {
 public:
  enum class Kind { CircuitStep, HaarTwirl };

  ExpectedMap(Kind kind, int n, int k, std::string label, PairMap pair = {});

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  int k() const { return k_; }
  const std::string& label() const { return label_; }
  std::size_t dim() const { return std::size_t{1} << (2 * n_ * k_); }

  std::vector<double> apply(const std::vector<double>& v) const;
  std::vector<double> apply_power(std::vector<double> v, long t) const;

  Eigen::SparseMatrix<double> sparse() const;
  Eigen::MatrixXd dense() const;
  /// Count of eigenvalues with modulus above 1 - tol, and the largest modulus below.
  MapSpectrum spectrum(double tol = 1e-8) const;

 private:
  Kind kind_;
  int n_;
  int k_;
  std::string label_;
  PairMap pair_;
  std::vector<PairLayout> layouts_;
};

ExpectedMap expected_coeff_map(int n, const GateEnsemble& ens, int k = 2);
ExpectedMap haar_twirl_target(int n, int k = 2);

struct DesignTarget {
  /// "unit-sum" when gamma_0(p, p) >= 0 with total 1, else "general".
  std::string name;
  double value = 0.0;
};

DesignTarget design_target(const CoeffTensor& init);

/// Deviations of gamma_t from delta_{p1 p2} * target over (p1, p2) != (0, 0).
double design_l2(int n, long t, const GateEnsemble& ens, const CoeffTensor& init);
double design_l1(int n, long t, const GateEnsemble& ens, const CoeffTensor& init);

/// 2^{2n} max_{c != 00} || (M^t - T) e_c ||_2, an upper bound on the diamond
/// distance to the Haar twirl.
double diamond_bound(int n, long t, const GateEnsemble& ens);
/// diamond_bound for t = 0..t_max.
std::vector<double> diamond_curve(int n, long t_max, const GateEnsemble& ens);

struct DesignReport {
  int n = 0;
  long t = 0;
  std::string ensemble;
  std::string target;
  double l1 = 0.0;
  double l2 = 0.0;
  std::optional<double> diamond_upper_bound;
};

/// Reports for t = 0..t_max; the diamond bound is filled in for n <= 3.
std::vector<DesignReport> design_curve(int n, long t_max, const GateEnsemble& ens, const CoeffTensor& init);

std::string design_json(const DesignReport& report, const std::string& header = "");

}  // namespace rcd
