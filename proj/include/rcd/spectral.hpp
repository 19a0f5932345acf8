#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rcd/chains.hpp"
#include "rcd/errors.hpp"

namespace rcd {

struct GapResult {
  /// min(1 - lambda_2, 1 + lambda_min) when reversible, else the gap of P P*.
  double gap = 0.0;
  bool reversible = false;
  /// 1 - sigma_2(D^{1/2} P D^{-1/2})^2, the gap of P P*.
  double gap_pp = 0.0;
  double lambda2 = 0.0;
  double lambda_min = 0.0;
  double balance_residual = 0.0;
};

inline constexpr double kReversibleTol = 1e-10;
/// Dense eigensolves are limited to chains with fewer states than this.
inline constexpr Eigen::Index kDenseStateCap = 4096;

GapResult eigen_gap(const ChainMatrix& chain);

/// Gap of P P* from the singular values of D^{1/2} P D^{-1/2} (dense, any chain).
double pp_star_gap(const ChainMatrix& chain, const Distribution& pi);

/// Half the l1 distance.
double tv_distance(const Distribution& a, const Distribution& b);

struct MixingOptions {
  long cap = 10'000'000;
  /// Random point-mass starts added for full chains.
  int random_starts = 32;
  std::uint64_t seed = 0;
};

struct MixingReport {
  double gap = 0.0;
  double gap_pp = 0.0;
  bool reversible = false;
  double epsilon = 0.0;
  long tau = 0;
  std::optional<long> tau_bound;
  /// First t with ||P^t s - pi||_2 <= eps, worst over the same starts.
  long tau2 = 0;
  std::optional<long> tau2_bound;
  Eigen::Index worst_start = 0;
  std::size_t starts_checked = 0;
  /// (t, tv distance) for the worst start, t = 0..tau.
  std::vector<std::pair<long, double>> distance_curve;
};

class MixingCapExceeded : public NumericFailure {
 public:
  MixingCapExceeded(const std::string& what, std::vector<std::pair<long, double>> partial)
      : NumericFailure(what), partial_curve(std::move(partial)) {}
  std::vector<std::pair<long, double>> partial_curve;
};

/// Point masses on every state for birth-death chains; weight-1 strings plus
/// random strings for full chains.
std::vector<Eigen::Index> default_starts(const ChainMatrix& chain, const MixingOptions& opt = {});

MixingReport mixing_time(const ChainMatrix& chain, double eps, const std::vector<Eigen::Index>& starts,
                         const MixingOptions& opt = {});
MixingReport mixing_time(const ChainMatrix& chain, double eps, const MixingOptions& opt = {});

/// ceil((1/gap) ln(1/(pi_star eps))), doubled when not reversible.
double gap_mixing_bound(double gap, double pi_star, double eps, bool reversible);
/// Same bound taking ln(pi_star), for stationary laws that underflow.
double gap_mixing_bound_log(double gap, double log_pi_star, double eps, bool reversible);
/// ceil((2/gap_pp) ln(1/eps)).
double l2_mixing_bound(double gap_pp, double eps);

std::string mixing_report_json(const MixingReport& report, const std::string& header = "");
void write_curve_csv(std::ostream& out, const std::vector<std::pair<long, double>>& curve,
                     const std::string& header = "");

}  // namespace rcd
