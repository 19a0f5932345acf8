// Acceptance harness: one PASS/FAIL line per criterion.
//   rcd_acceptance            run every criterion
//   rcd_acceptance --only N   run criterion N

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rcd/chains.hpp"
#include "rcd/metrics.hpp"
#include "rcd/moments.hpp"
#include "rcd/simulate.hpp"
#include "rcd/spectral.hpp"

using namespace rcd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double band_ratio(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

Outcome haar_closed_form() {
  const MomentMatrix g = haar_ghat(4, 2);
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(256, 256);
  expect(0, 0) = 1.0;
  for (int p = 1; p < 16; ++p)
    for (int q = 1; q < 16; ++q) expect(q * 16 + q, p * 16 + p) = 1.0 / 15.0;
  const double dev = (g.entries - expect).cwiseAbs().maxCoeff();
  const ProjectorReport r = projector_check(g, 1e-12);
  return {dev == 0.0 && r.idempotence_residual < 1e-12 && r.symmetry_residual < 1e-12,
          fmt("closed-form deviation %.3g, |G^2-G| %.3g, |G-G^T| %.3g", dev, r.idempotence_residual,
              r.symmetry_residual)};
}

Outcome clifford_design() {
  const GateEnsemble& c = clifford2_group();
  const double dev = (ensemble_ghat(c, 2).entries - haar_ghat(4, 2).entries).cwiseAbs().maxCoeff();
  return {c.gates().size() == 11520 && dev < 1e-12, fmt("%zu elements, max deviation from Haar %.3g", c.gates().size(), dev)};
}

Outcome two_copy_gapped() {
  const int haar = gap_report(haar_ghat(4, 2)).unit_modulus_count;
  const int cliff = gap_report(ensemble_g(clifford2_group(), 2), 2).unit_modulus_count;
  const GateEnsemble cnot = GateEnsemble::explicit_gates({{1.0, cnot_gate()}}, "cnot");
  const int single = gap_report(ensemble_g(cnot, 2), 2).unit_modulus_count;
  return {haar == 2 && cliff == 2 && single > 2,
          fmt("unit-modulus eigenvalues: haar %d, clifford2 %d, cnot %d", haar, cliff, single)};
}

Outcome zero_chain_exact() {
  double fp = 0.0, db = 0.0;
  for (int n : {2, 8, 64, 1024}) {
    const ChainMatrix c = zero_chain(n);
    const Distribution pi = zero_stationary(n);
    fp = std::max(fp, fixed_point_residual(c, pi));
    db = std::max(db, detailed_balance_residual(c, pi));
  }
  return {fp < 1e-12 && db < 1e-12, fmt("max fixed-point residual %.3g, max detailed-balance residual %.3g", fp, db)};
}

Outcome lumpability() {
  double worst = 0.0;
  for (int n : {2, 3, 4}) worst = std::max(worst, lump_check(full_chain(n, haar_ghat(4, 2)), n).max_deviation);
  return {worst < 1e-12, fmt("max lumping deviation %.3g", worst)};
}

Outcome gap_scaling() {
  std::vector<double> products;
  bool decreasing = true;
  double previous = std::numeric_limits<double>::infinity();
  std::string rows;
  for (int n = 8; n <= 512; n *= 2) {
    const double gap = eigen_gap(zero_chain(n)).gap;
    decreasing = decreasing && gap < previous;
    previous = gap;
    products.push_back(gap * n);
    rows += fmt(" %d:%.4f", n, gap * n);
  }
  const double ratio = band_ratio(products);
  return {ratio <= 1.5 && decreasing, fmt("gap*n%s; band ratio %.3f, decreasing %s", rows.c_str(), ratio,
                                          decreasing ? "yes" : "no")};
}

Outcome mixing_scaling() {
  std::vector<double> scaled;
  bool bounded = true;
  std::string rows;
  for (int n = 8; n <= 256; n *= 2) {
    const MixingReport r = mixing_time(zero_chain(n), 0.25);
    const bool ok = r.tau_bound.has_value() && r.tau <= *r.tau_bound;
    bounded = bounded && ok;
    scaled.push_back(static_cast<double>(r.tau) / (n * std::log(static_cast<double>(n))));
    rows += fmt(" %d:%ld<=%ld", n, r.tau, r.tau_bound.value_or(-1));
  }
  const double ratio = band_ratio(scaled);
  return {ratio <= 2.0 && bounded, fmt("tau vs bound%s; tau/(n ln n) band ratio %.3f", rows.c_str(), ratio)};
}

// Per-step ratios of a decaying curve; once a value is below `floor` the curve
// counts as converged and must stay there.
bool geometric(const std::vector<double>& v, double rate, double floor, double& worst_ratio) {
  for (std::size_t t = 1; t < v.size(); ++t) {
    if (v[t - 1] < floor) {
      if (v[t] >= floor) return false;
      continue;
    }
    const double ratio = v[t] / v[t - 1];
    worst_ratio = std::max(worst_ratio, ratio);
    if (ratio > rate + 1e-6) return false;
  }
  return true;
}

Outcome exact_convergence() {
  constexpr long kSteps = 20;
  constexpr double kFloor = 1e-12;
  bool pass = true;
  std::string rows;
  for (int n : {2, 3}) {
    static const GateEnsemble haar = GateEnsemble::haar_u4();
    for (const GateEnsemble* ens : {&haar, &clifford2_group()}) {
      const GateEnsemble& e = *ens;
      const double s = expected_coeff_map(n, e).spectrum().second_modulus;
      std::vector<double> l2;
      for (const auto& r : design_curve(n, kSteps, e, zero_state_k2(n))) l2.push_back(r.l2);
      const auto diamond = diamond_curve(n, kSteps, e);
      double rl2 = 0.0, rd = 0.0;
      const bool ok = geometric(l2, s, kFloor, rl2) && geometric(diamond, s, kFloor, rd);
      pass = pass && ok;
      rows += fmt(" n=%d %s: s=%.4f l2 %.4f diamond %.4f%s;", n, e.label().c_str(), s, rl2, rd, ok ? "" : " FAIL");
    }
  }
  const GateEnsemble haar = GateEnsemble::haar_u4();
  const double l1 = design_l1(2, 1, haar, zero_state_k2(2));
  const double l2 = design_l2(2, 1, haar, zero_state_k2(2));
  pass = pass && l1 < 1e-12 && l2 < 1e-12;
  return {pass, fmt("worst step ratios:%s n=2 haar t=1 l1 %.3g l2 %.3g", rows.c_str(), l1, l2)};
}

Outcome first_moment_decay() {
  constexpr int n = 6;
  const long t_max = static_cast<long>(6 * n * std::log(static_cast<double>(n)));
  const CoeffTensor init = zero_state_k1(n);
  const DecayCurve c = decay_k1(n, static_cast<int>(t_max), GateEnsemble::haar_u4(), init, 2000, 20261016);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : c.points)
    worst = std::max(worst, p.value - k1_decay_bound(init, p.t) - 3.0 * p.std_error);
  return {worst <= 0.0, fmt("t <= %ld, max(value - bound - 3 se) = %.3g", t_max, worst)};
}

Outcome offdiag_decay() {
  constexpr int n = 4;
  const long t_max = static_cast<long>(6 * n * std::log(static_cast<double>(n)));
  const DecayCurve c =
      decay_k2_offdiag(n, static_cast<int>(t_max), GateEnsemble::haar_u4(), zero_state_k2(n), 1000, 20261016);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : c.points) worst = std::max(worst, p.value - k2_offdiag_bound(n, p.t) - 3.0 * p.std_error);
  return {worst <= 0.0, fmt("t <= %ld, max(value - bound - 3 se) = %.3g", t_max, worst)};
}

Outcome frame_witness() {
  const Estimate c = frame_potential(clifford2_group(), 2, 100000, 20261016);
  const GateEnsemble identity = GateEnsemble::explicit_gates({{1.0, Gate::Identity()}}, "identity");
  const Estimate id = frame_potential(identity, 2, 100, 1);
  const bool pass = std::abs(c.value - 2.0) <= 3.0 * c.std_error && id.value == 256.0;
  return {pass, fmt("clifford2 %.4f +- %.4f, identity %.17g", c.value, c.std_error, id.value)};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 1;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "Haar moment operator closed form", 1, haar_closed_form},
      {2, "Clifford group is an exact 2-design", 120, clifford_design},
      {3, "2-copy gapped ensembles", 60, two_copy_gapped},
      {4, "zero-chain stationary law", 10, zero_chain_exact},
      {5, "full chain lumps onto the zero chain", 30, lumpability},
      {6, "gap scales as 1/n", 120, gap_scaling},
      {7, "mixing time scales as n ln n", 180, mixing_scaling},
      {8, "exact convergence of the coefficient map", 120, exact_convergence},
      {9, "first-moment decay", 180, first_moment_decay},
      {10, "off-diagonal decay", 180, offdiag_decay},
      {11, "frame potential witness", 60, frame_witness},
  };

  int failures = 0;
  bool ran = false;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ran = true;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s %2d %s: %s (%.2f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.limit_seconds, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  if (!ran) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
