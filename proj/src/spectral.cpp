#include "rcd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "json.hpp"

namespace rcd {

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1)");
}

double ceil_steps(double x) { return std::max(0.0, std::ceil(x - 1e-9)); }

// D^{1/2} P D^{-1/2} as a dense matrix.
Eigen::MatrixXd similarity(const ChainMatrix& chain, const Distribution& pi) {
  if (chain.states() >= kDenseStateCap) {
    throw InvalidInput("dense eigensolve limited to fewer than 4096 states");
  }
  if (pi.weights.minCoeff() <= 0.0) throw NumericFailure("stationary distribution has empty states");
  const Eigen::VectorXd root = pi.weights.cwiseSqrt();
  return root.asDiagonal() * chain.dense() * root.cwiseInverse().asDiagonal();
}

double log_pi_min(const ChainMatrix& chain, const Distribution& pi) {
  if (chain.space == StateSpace::Zero) return zero_log_pi_min(chain.n);
  const double m = pi.weights.minCoeff();
  if (m <= 0.0) throw NumericFailure("stationary distribution underflows");
  return std::log(m);
}

}  // namespace

GapResult eigen_gap(const ChainMatrix& chain) {
  const Distribution pi = stationary_distribution(chain);
  GapResult r;
  r.balance_residual = detailed_balance_residual(chain, pi);
  r.reversible = r.balance_residual < kReversibleTol;

  if (!r.reversible) {
    r.gap_pp = pp_star_gap(chain, pi);
    r.gap = r.gap_pp;
    return r;
  }

  Eigen::VectorXd eig;
  if (chain.tridiagonal()) {
    const auto m = chain.states();
    Eigen::VectorXd diag(m), off(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index s = 0; s < m; ++s) diag[s] = chain.transitions.coeff(s, s);
    for (Eigen::Index s = 0; s + 1 < m; ++s) {
      off[s] = std::sqrt(chain.transitions.coeff(s, s + 1) * chain.transitions.coeff(s + 1, s));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericFailure("tridiagonal eigensolver did not converge");
    eig = solver.eigenvalues();
  } else {
    const Eigen::MatrixXd a = similarity(chain, pi);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericFailure("symmetric eigensolver did not converge");
    eig = solver.eigenvalues();
  }
  const auto m = eig.size();
  r.lambda2 = eig[m - 2];
  r.lambda_min = eig[0];
  r.gap = std::min(1.0 - r.lambda2, 1.0 + r.lambda_min);
  const double second = std::max(r.lambda2 * r.lambda2, r.lambda_min * r.lambda_min);
  r.gap_pp = 1.0 - second;
  return r;
}

double pp_star_gap(const ChainMatrix& chain, const Distribution& pi) {
  const Eigen::MatrixXd a = similarity(chain, pi);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  if (svd.info() != Eigen::Success) throw NumericFailure("singular value decomposition did not converge");
  const auto& s = svd.singularValues();
  if (s.size() < 2) return 1.0;
  return 1.0 - s[1] * s[1];
}

double tv_distance(const Distribution& a, const Distribution& b) {
  if (a.space != b.space || a.n != b.n || a.weights.size() != b.weights.size()) {
    throw InvalidInput("tv_distance: distributions live on different state spaces");
  }
  return 0.5 * (a.weights - b.weights).lpNorm<1>();
}

std::vector<Eigen::Index> default_starts(const ChainMatrix& chain, const MixingOptions& opt) {
  std::vector<Eigen::Index> starts;
  if (chain.space != StateSpace::Full) {
    for (Eigen::Index s = 0; s < chain.states(); ++s) starts.push_back(s);
    return starts;
  }
  for (int q = 0; q < chain.n; ++q)
    for (std::uint64_t letter = 1; letter < 4; ++letter) {
      starts.push_back(static_cast<Eigen::Index>((letter << (2 * (chain.n - 1 - q))) - 1));
    }
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, chain.states() - 1);
  for (int i = 0; i < opt.random_starts; ++i) starts.push_back(pick(rng));
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  return starts;
}

MixingReport mixing_time(const ChainMatrix& chain, double eps, const std::vector<Eigen::Index>& starts,
                         const MixingOptions& opt) {
  check_eps(eps);
  if (starts.empty()) throw InvalidInput("mixing_time: no starting states");
  const Distribution pi = stationary_distribution(chain);
  const GapResult g = eigen_gap(chain);

  MixingReport rep;
  rep.gap = g.gap;
  rep.gap_pp = g.gap_pp;
  rep.reversible = g.reversible;
  rep.epsilon = eps;
  rep.starts_checked = starts.size();
  if (g.gap > 1e-12) {
    rep.tau_bound = static_cast<long>(gap_mixing_bound_log(g.gap, log_pi_min(chain, pi), eps, g.reversible));
  }
  if (g.gap_pp > 1e-12) rep.tau2_bound = static_cast<long>(l2_mixing_bound(g.gap_pp, eps));

  const auto pt = chain.transitions.transpose();
  bool first = true;
  for (Eigen::Index s : starts) {
    Distribution v = point_mass(chain, s);
    std::vector<std::pair<long, double>> curve;
    long t = 0, tau = -1, t2 = -1;
    auto observe = [&] {
      if (tau < 0) {
        const double d = tv_distance(v, pi);
        curve.push_back({t, d});
        if (d <= eps) tau = t;
      }
      if (t2 < 0 && (v.weights - pi.weights).norm() <= eps) t2 = t;
    };
    observe();
    while (tau < 0 || t2 < 0) {
      if (t >= opt.cap) {
        throw MixingCapExceeded("mixing_time: step cap " + std::to_string(opt.cap) + " exceeded", curve);
      }
      v.weights = pt * v.weights;
      ++t;
      observe();
    }
    rep.tau2 = std::max(rep.tau2, t2);
    if (first || tau > rep.tau) {
      rep.tau = tau;
      rep.worst_start = s;
      rep.distance_curve = std::move(curve);
      first = false;
    }
  }
  return rep;
}

MixingReport mixing_time(const ChainMatrix& chain, double eps, const MixingOptions& opt) {
  return mixing_time(chain, eps, default_starts(chain, opt), opt);
}

double gap_mixing_bound(double gap, double pi_star, double eps, bool reversible) {
  if (!(pi_star > 0.0 && pi_star <= 1.0)) throw InvalidInput("pi_star must lie in (0, 1]");
  return gap_mixing_bound_log(gap, std::log(pi_star), eps, reversible);
}

double gap_mixing_bound_log(double gap, double log_pi_star, double eps, bool reversible) {
  if (!(gap > 0.0 && gap <= 1.0)) throw InvalidInput("gap must lie in (0, 1]");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidInput("eps must lie in (0, 1]");
  if (!(log_pi_star <= 0.0)) throw InvalidInput("pi_star must lie in (0, 1]");
  const double steps = (-log_pi_star - std::log(eps)) / gap;
  return ceil_steps(reversible ? steps : 2.0 * steps);
}

double l2_mixing_bound(double gap_pp, double eps) {
  if (!(gap_pp > 0.0 && gap_pp <= 1.0)) throw InvalidInput("gap must lie in (0, 1]");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidInput("eps must lie in (0, 1]");
  return ceil_steps(2.0 / gap_pp * std::log(1.0 / eps));
}

std::string mixing_report_json(const MixingReport& r, const std::string& header) {
  nlohmann::ordered_json j;
  if (!header.empty()) j["header"] = header;
  j["gap"] = r.gap;
  j["gap_pp"] = r.gap_pp;
  j["reversible"] = r.reversible;
  j["epsilon"] = r.epsilon;
  j["tau"] = r.tau;
  j["tau_bound"] = r.tau_bound ? nlohmann::ordered_json(*r.tau_bound) : nlohmann::ordered_json(nullptr);
  j["tau2"] = r.tau2;
  j["tau2_bound"] = r.tau2_bound ? nlohmann::ordered_json(*r.tau2_bound) : nlohmann::ordered_json(nullptr);
  j["worst_start"] = r.worst_start;
  j["starts_checked"] = r.starts_checked;
  auto curve = nlohmann::ordered_json::array();
  for (const auto& [t, d] : r.distance_curve) curve.push_back({t, d});
  j["distance_curve"] = std::move(curve);
  return j.dump(2);
}

void write_curve_csv(std::ostream& out, const std::vector<std::pair<long, double>>& curve,
                     const std::string& header) {
  if (!header.empty()) out << header << '\n';
  out << "t,distance\n";
  char buf[64];
  for (const auto& [t, d] : curve) {
    std::snprintf(buf, sizeof buf, "%.17g", d);
    out << t << ',' << buf << '\n';
  }
}

}  // namespace rcd
