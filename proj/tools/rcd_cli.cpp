// rcdesign: command-line front end for the moment, chain, mixing and design tools.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rcd/chains.hpp"
#include "rcd/errors.hpp"
#include "rcd/metrics.hpp"
#include "rcd/moments.hpp"
#include "rcd/simulate.hpp"
#include "rcd/spectral.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string command;
  int n = 2;
  int t = 0;
  int k = 2;
  int d = 4;
  std::string ensemble = "haar-u4";
  std::string chain = "zero";
  std::string mode = "averaged";
  double eps = 0.25;
  long trials = 1000;
  std::uint64_t seed = 0;
  int start = 1;
  long cap = 10'000'000;
  std::string out;
  std::string format = "csv";
  std::vector<int> n_list;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string header_fields(const RunConfig& c) {
  return "command=" + c.command + " version=" + kVersion + " seed=" + std::to_string(c.seed);
}

std::string csv_header(const RunConfig& c) { return "# " + header_fields(c); }

rcd::ChainMatrix build_chain(const RunConfig& c, int n) {
  switch (rcd::state_space_from_string(c.chain)) {
    case rcd::StateSpace::Zero: return rcd::zero_chain(n);
    case rcd::StateSpace::Accelerated: return rcd::accelerated_chain(n);
    case rcd::StateSpace::Full: return rcd::full_chain(n, rcd::pair_moment(rcd::ensemble_from_spec(c.ensemble), 2));
  }
  throw rcd::InvalidInput("chain: unknown state space");
}

void validate(const RunConfig& c) {
  if (c.format != "csv" && c.format != "json") throw rcd::InvalidInput("format: expected csv or json");
  if (c.trials < 1) throw rcd::InvalidInput("trials: must be at least 1");
  if (c.t < 0) throw rcd::InvalidInput("t: must be non-negative");
  if (c.k != 1 && c.k != 2) throw rcd::InvalidInput("k: must be 1 or 2");
  if (!(c.eps > 0.0 && c.eps < 1.0)) throw rcd::InvalidInput("eps: must lie in (0, 1)");
  if (c.cap < 1) throw rcd::InvalidInput("cap: must be positive");
  rcd::state_space_from_string(c.chain);
  rcd::decay_mode_from_string(c.mode);
}

// Buffers the report; finish() writes it to --out (or stdout) and prints the summary.
class Emitter {
 public:
  explicit Emitter(const RunConfig& c) : config_(c) {}
  std::ostream& stream() { return body_; }
  void finish(const std::string& summary) {
    if (config_.out.empty()) {
      std::cout << body_.str();
      std::cerr << summary << '\n';
      return;
    }
    std::ofstream f(config_.out, std::ios::binary);
    if (!f) throw rcd::InvalidInput("out: cannot open '" + config_.out + "' for writing");
    f << body_.str();
    std::cout << summary << '\n';
  }

 private:
  const RunConfig& config_;
  std::ostringstream body_;
};

nlohmann::ordered_json header_json(const RunConfig& c) {
  return {{"command", c.command}, {"version", kVersion}, {"seed", c.seed}};
}

// Replaces the string header of a module JSON report with the structured one.
std::string with_header(const RunConfig& c, const std::string& module_json) {
  auto parsed = nlohmann::ordered_json::parse(module_json);
  nlohmann::ordered_json j;
  j["header"] = header_json(c);
  for (auto it = parsed.begin(); it != parsed.end(); ++it) {
    if (it.key() != "header") j[it.key()] = it.value();
  }
  return j.dump(2) + "\n";
}

void run_ghat(const RunConfig& c) {
  rcd::MomentMatrix g;
  if (c.ensemble == "haar-u4") {
    g = rcd::haar_ghat(c.d, c.k);
  } else {
    if (c.d != 4) throw rcd::InvalidInput("d: gate ensembles act on two qubits, d must be 4");
    g = rcd::ensemble_ghat(rcd::ensemble_from_spec(c.ensemble), c.k);
  }
  Emitter e(c);
  const auto dim = g.entries.rows();
  if (c.format == "csv") {
    e.stream() << csv_header(c) << " d=" << c.d << " k=" << c.k << '\n';
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index col = 0; col < dim; ++col) e.stream() << (col ? "," : "") << num(g.entries(r, col));
      e.stream() << '\n';
    }
  } else {
    nlohmann::ordered_json j;
    j["header"] = header_json(c);
    j["d"] = c.d;
    j["k"] = c.k;
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < dim; ++r) {
      std::vector<double> row(static_cast<std::size_t>(dim));
      for (Eigen::Index col = 0; col < dim; ++col) row[col] = g.entries(r, col);
      rows.push_back(row);
    }
    j["entries"] = std::move(rows);
    e.stream() << j.dump(2) << '\n';
  }
  e.finish("ghat d=" + std::to_string(c.d) + " k=" + std::to_string(c.k) + " dim=" + std::to_string(dim) +
           " trace=" + num(g.entries.trace()));
}

void run_gap(const RunConfig& c, bool chain_given) {
  Emitter e(c);
  if (!chain_given) {
    const rcd::GapReport r = rcd::gap_report(rcd::ensemble_g(rcd::ensemble_from_spec(c.ensemble), c.k), c.k);
    if (c.format == "csv") {
      e.stream() << csv_header(c) << '\n'
                 << "ensemble,k,unit_modulus_count,second_modulus,is_gapped\n"
                 << c.ensemble << ',' << c.k << ',' << r.unit_modulus_count << ',' << num(r.second_modulus) << ','
                 << (r.is_gapped ? "true" : "false") << '\n';
    } else {
      nlohmann::ordered_json j;
      j["header"] = header_json(c);
      j["ensemble"] = c.ensemble;
      j["k"] = c.k;
      j["unit_modulus_count"] = r.unit_modulus_count;
      j["second_modulus"] = r.second_modulus;
      j["is_gapped"] = r.is_gapped;
      e.stream() << j.dump(2) << '\n';
    }
    e.finish("gap ensemble=" + c.ensemble + " k=" + std::to_string(c.k) +
             " unit_modulus_count=" + std::to_string(r.unit_modulus_count) + " gapped=" + (r.is_gapped ? "yes" : "no"));
    return;
  }
  const rcd::GapResult r = rcd::eigen_gap(build_chain(c, c.n));
  if (c.format == "csv") {
    e.stream() << csv_header(c) << '\n'
               << "chain,n,gap,gap_pp,reversible,lambda2,lambda_min\n"
               << c.chain << ',' << c.n << ',' << num(r.gap) << ',' << num(r.gap_pp) << ','
               << (r.reversible ? "true" : "false") << ',' << num(r.lambda2) << ',' << num(r.lambda_min) << '\n';
  } else {
    nlohmann::ordered_json j;
    j["header"] = header_json(c);
    j["chain"] = c.chain;
    j["n"] = c.n;
    j["gap"] = r.gap;
    j["gap_pp"] = r.gap_pp;
    j["reversible"] = r.reversible;
    j["lambda2"] = r.lambda2;
    j["lambda_min"] = r.lambda_min;
    e.stream() << j.dump(2) << '\n';
  }
  e.finish("gap chain=" + c.chain + " n=" + std::to_string(c.n) + " gap=" + num(r.gap) +
           " gap_n=" + num(r.gap * c.n));
}

void run_chain(const RunConfig& c) {
  const rcd::ChainMatrix chain = build_chain(c, c.n);
  Emitter e(c);
  if (c.format == "csv") {
    rcd::write_chain_csv(e.stream(), chain, header_fields(c));
  } else {
    nlohmann::ordered_json j;
    j["header"] = header_json(c);
    j["space"] = rcd::to_string(chain.space);
    j["n"] = chain.n;
    j["states"] = chain.states();
    auto entries = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < chain.states(); ++r)
      for (rcd::SparseRows::InnerIterator it(chain.transitions, r); it; ++it) {
        entries.push_back({r, it.col(), it.value()});
      }
    j["transitions"] = std::move(entries);
    e.stream() << j.dump(2) << '\n';
  }
  e.finish("chain space=" + c.chain + " n=" + std::to_string(c.n) + " states=" + std::to_string(chain.states()) +
           " nonzeros=" + std::to_string(chain.transitions.nonZeros()));
}

void run_mix(const RunConfig& c) {
  const rcd::ChainMatrix chain = build_chain(c, c.n);
  rcd::MixingOptions opt;
  opt.cap = c.cap;
  opt.seed = c.seed;
  const rcd::MixingReport r = rcd::mixing_time(chain, c.eps, opt);
  Emitter e(c);
  if (c.format == "csv") {
    rcd::write_curve_csv(e.stream(), r.distance_curve, csv_header(c));
  } else {
    e.stream() << with_header(c, rcd::mixing_report_json(r));
  }
  e.finish("mix chain=" + c.chain + " n=" + std::to_string(c.n) + " eps=" + num(c.eps) +
           " tau=" + std::to_string(r.tau) +
           " tau_bound=" + (r.tau_bound ? std::to_string(*r.tau_bound) : std::string("none")));
}

void run_decay(const RunConfig& c) {
  const rcd::GateEnsemble ens = rcd::ensemble_from_spec(c.ensemble);
  const rcd::DecayMode mode = rcd::decay_mode_from_string(c.mode);
  const auto trials = static_cast<std::size_t>(c.trials);
  const rcd::DecayCurve curve =
      c.k == 1 ? rcd::decay_k1(c.n, c.t, ens, rcd::zero_state_k1(c.n), trials, c.seed, mode)
               : rcd::decay_k2_offdiag(c.n, c.t, ens, rcd::zero_state_k2(c.n), trials, c.seed, mode);
  Emitter e(c);
  if (c.format == "csv") {
    rcd::write_decay_csv(e.stream(), curve, csv_header(c));
  } else {
    e.stream() << with_header(c, rcd::decay_json(curve));
  }
  const auto& last = curve.points.back();
  e.finish("decay kind=" + curve.kind + " n=" + std::to_string(c.n) + " t=" + std::to_string(last.t) +
           " value=" + num(last.value) + " stderr=" + num(last.std_error));
}

void run_design(const RunConfig& c) {
  const rcd::GateEnsemble ens = rcd::ensemble_from_spec(c.ensemble);
  const auto curve = rcd::design_curve(c.n, c.t, ens, rcd::zero_state_k2(c.n));
  Emitter e(c);
  if (c.format == "csv") {
    e.stream() << csv_header(c) << '\n' << "n,t,ensemble,target,l1,l2,diamond_upper_bound\n";
    for (const auto& r : curve) {
      e.stream() << r.n << ',' << r.t << ',' << r.ensemble << ',' << r.target << ',' << num(r.l1) << ',' << num(r.l2)
                 << ',' << (r.diamond_upper_bound ? num(*r.diamond_upper_bound) : std::string("")) << '\n';
    }
  } else {
    e.stream() << with_header(c, rcd::design_json(curve.back()));
  }
  const auto& last = curve.back();
  e.finish("design n=" + std::to_string(c.n) + " t=" + std::to_string(c.t) + " target=" + last.target +
           " l1=" + num(last.l1) + " l2=" + num(last.l2));
}

void run_frame(const RunConfig& c, bool circuit) {
  const rcd::GateEnsemble ens = rcd::ensemble_from_spec(c.ensemble);
  const auto trials = static_cast<std::size_t>(c.trials);
  const rcd::Estimate est = circuit ? rcd::circuit_frame_potential(c.n, c.t, ens, c.k, trials, c.seed)
                                    : rcd::frame_potential(ens, c.k, trials, c.seed);
  Emitter e(c);
  if (c.format == "csv") {
    e.stream() << csv_header(c) << '\n' << "ensemble,k,trials,value,stderr\n"
               << c.ensemble << ',' << c.k << ',' << c.trials << ',' << num(est.value) << ',' << num(est.std_error)
               << '\n';
  } else {
    nlohmann::ordered_json j;
    j["header"] = header_json(c);
    j["ensemble"] = c.ensemble;
    j["k"] = c.k;
    j["trials"] = c.trials;
    j["value"] = est.value;
    j["stderr"] = est.std_error;
    e.stream() << j.dump(2) << '\n';
  }
  e.finish("frame ensemble=" + c.ensemble + " k=" + std::to_string(c.k) + " value=" + num(est.value) +
           " stderr=" + num(est.std_error));
}

void run_traj(const RunConfig& c) {
  const rcd::TrajectoryReport r = rcd::zero_trajectory(c.n, c.t, c.start, c.seed);
  Emitter e(c);
  if (c.format == "csv") {
    e.stream() << csv_header(c) << '\n' << "x,count\n";
    for (int x = 1; x <= c.n; ++x) e.stream() << x << ',' << r.occupancy[x - 1] << '\n';
  } else {
    nlohmann::ordered_json j;
    j["header"] = header_json(c);
    j["n"] = r.n;
    j["steps"] = c.t;
    j["start"] = c.start;
    j["occupancy"] = r.occupancy;
    auto waits = nlohmann::ordered_json::array();
    for (const auto& [len, count] : r.waiting_histogram) waits.push_back({len, count});
    j["waiting_histogram"] = std::move(waits);
    j["window"] = r.window;
    j["window_mean"] = r.window_mean;
    e.stream() << j.dump(2) << '\n';
  }
  e.finish("traj n=" + std::to_string(c.n) + " steps=" + std::to_string(c.t) +
           " window_mean=" + num(r.window_mean));
}

void run_sweep(const RunConfig& c) {
  Emitter e(c);
  e.stream() << csv_header(c) << '\n' << "n,gap,gap_n,tau,tau_n_ln_n,status\n";
  int failures = 0;
  for (int n : c.n_list) {
    try {
      const rcd::ChainMatrix chain = build_chain(c, n);
      rcd::MixingOptions opt;
      opt.cap = c.cap;
      opt.seed = c.seed;
      const rcd::MixingReport r = rcd::mixing_time(chain, c.eps, opt);
      e.stream() << n << ',' << num(r.gap) << ',' << num(r.gap * n) << ',' << r.tau << ','
                 << num(static_cast<double>(r.tau) / (n * std::log(static_cast<double>(n)))) << ",ok\n";
    } catch (const std::exception& ex) {
      ++failures;
      std::string msg = ex.what();
      for (auto& ch : msg)
        if (ch == ',' || ch == '\n') ch = ';';
      e.stream() << n << ",,,,,error: " << msg << '\n';
    }
  }
  e.finish("sweep chain=" + c.chain + " rows=" + std::to_string(c.n_list.size()) +
           " errors=" + std::to_string(failures));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment operators, Pauli-string Markov chains and design distances for random circuits"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  RunConfig c;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", c.out, "Output file (stdout when omitted)");
    sub->add_option("--format", c.format, "csv or json")->capture_default_str();
    sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  };
  auto with_n = [&](CLI::App* sub) { return sub->add_option("--n", c.n, "Qubit count")->capture_default_str(); };
  auto with_ensemble = [&](CLI::App* sub) {
    return sub->add_option("--ensemble", c.ensemble, "haar-u4, clifford2 or file:PATH")->capture_default_str();
  };
  auto with_chain = [&](CLI::App* sub) {
    return sub->add_option("--chain", c.chain, "zero, accelerated or full")->capture_default_str();
  };

  auto* ghat = app.add_subcommand("ghat", "Moment operator Ghat");
  common(ghat);
  ghat->add_option("--d", c.d, "Local dimension")->capture_default_str();
  ghat->add_option("--k", c.k, "Number of copies")->capture_default_str();
  with_ensemble(ghat);

  auto* gap = app.add_subcommand("gap", "Chain spectral gap, or ensemble 2-copy gap without --chain");
  common(gap);
  with_n(gap);
  auto* gap_chain = with_chain(gap);
  with_ensemble(gap);
  gap->add_option("--k", c.k, "Number of copies")->capture_default_str();

  auto* chain = app.add_subcommand("chain", "Transition matrix of a chain");
  common(chain);
  with_n(chain);
  with_chain(chain);
  with_ensemble(chain);

  auto* mix = app.add_subcommand("mix", "Worst-start mixing time and gap bounds");
  common(mix);
  with_n(mix);
  with_chain(mix);
  with_ensemble(mix);
  mix->add_option("--eps", c.eps, "Target total-variation distance")->capture_default_str();
  mix->add_option("--cap", c.cap, "Step cap")->capture_default_str();

  auto* decay = app.add_subcommand("decay", "Monte Carlo coefficient decay");
  common(decay);
  with_n(decay);
  with_ensemble(decay);
  decay->add_option("--k", c.k, "1 for sum |gamma(p)|, 2 for the off-diagonal sum")->capture_default_str();
  decay->add_option("--t", c.t, "Number of steps")->capture_default_str();
  decay->add_option("--trials", c.trials, "Trials")->capture_default_str();
  decay->add_option("--mode", c.mode, "averaged or sampled")->capture_default_str();

  auto* design = app.add_subcommand("design", "Exact design distances and diamond upper bound");
  common(design);
  with_n(design);
  with_ensemble(design);
  design->add_option("--t", c.t, "Number of steps")->capture_default_str();

  auto* frame = app.add_subcommand("frame", "Frame potential estimate");
  common(frame);
  auto* frame_n = with_n(frame);
  with_ensemble(frame);
  frame->add_option("--k", c.k, "Moment order")->capture_default_str();
  frame->add_option("--t", c.t, "Circuit steps when --n is given")->capture_default_str();
  frame->add_option("--trials", c.trials, "Sampled pairs")->capture_default_str();

  auto* traj = app.add_subcommand("traj", "Zero-chain trajectory statistics");
  common(traj);
  with_n(traj);
  traj->add_option("--t", c.t, "Number of steps")->capture_default_str();
  traj->add_option("--start", c.start, "Starting weight")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Gap and mixing-time rows over several n");
  common(sweep);
  with_chain(sweep);
  with_ensemble(sweep);
  sweep->add_option("--n-list", c.n_list, "Qubit counts")->delimiter(',');
  sweep->add_option("--eps", c.eps, "Target total-variation distance")->capture_default_str();
  sweep->add_option("--cap", c.cap, "Step cap")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    c.command = app.get_subcommands().front()->get_name();
    validate(c);
    if (c.command == "ghat") run_ghat(c);
    if (c.command == "gap") run_gap(c, gap_chain->count() > 0);
    if (c.command == "chain") run_chain(c);
    if (c.command == "mix") run_mix(c);
    if (c.command == "decay") run_decay(c);
    if (c.command == "design") run_design(c);
    if (c.command == "frame") run_frame(c, frame_n->count() > 0);
    if (c.command == "traj") run_traj(c);
    if (c.command == "sweep") run_sweep(c);
  } catch (const rcd::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 1;
  } catch (const rcd::NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
