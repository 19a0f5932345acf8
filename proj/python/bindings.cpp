#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rcd/chains.hpp"
#include "rcd/errors.hpp"
#include "rcd/metrics.hpp"
#include "rcd/moments.hpp"
#include "rcd/simulate.hpp"
#include "rcd/spectral.hpp"

namespace py = pybind11;

namespace {

rcd::ChainMatrix make_chain(const std::string& space, int n, const std::string& ensemble) {
  switch (rcd::state_space_from_string(space)) {
    case rcd::StateSpace::Zero: return rcd::zero_chain(n);
    case rcd::StateSpace::Accelerated: return rcd::accelerated_chain(n);
    case rcd::StateSpace::Full: return rcd::full_chain(n, rcd::pair_moment(rcd::ensemble_from_spec(ensemble), 2));
  }
  throw rcd::InvalidInput("unknown chain");
}

py::tuple curve_arrays(const rcd::DecayCurve& curve) {
  Eigen::VectorXd value(curve.points.size()), err(curve.points.size());
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    value[i] = curve.points[i].value;
    err[i] = curve.points[i].std_error;
  }
  return py::make_tuple(value, err);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Moment operators, Pauli-string Markov chains and design distances for random circuits.";

  py::register_exception<rcd::InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<rcd::NumericFailure>(m, "NumericFailure", PyExc_RuntimeError);

  m.def("haar_ghat", [](int d, int k) { return rcd::haar_ghat(d, k).entries; }, py::arg("d"), py::arg("k"));
  m.def(
      "ensemble_ghat",
      [](const std::string& ensemble, int k) { return rcd::pair_moment(rcd::ensemble_from_spec(ensemble), k).entries; },
      py::arg("ensemble"), py::arg("k") = 2);
  m.def("clifford2_size", [] { return rcd::clifford2_group().gates().size(); });

  m.def(
      "transition_matrix",
      [](const std::string& chain, int n, const std::string& ensemble) {
        return make_chain(chain, n, ensemble).dense();
      },
      py::arg("chain"), py::arg("n"), py::arg("ensemble") = "haar-u4");
  m.def("zero_stationary", [](int n) { return rcd::zero_stationary(n).weights; }, py::arg("n"));

  m.def(
      "eigen_gap",
      [](const std::string& chain, int n, const std::string& ensemble) {
        const rcd::GapResult r = rcd::eigen_gap(make_chain(chain, n, ensemble));
        py::dict out;
        out["gap"] = r.gap;
        out["gap_pp"] = r.gap_pp;
        out["reversible"] = r.reversible;
        out["lambda2"] = r.lambda2;
        out["lambda_min"] = r.lambda_min;
        return out;
      },
      py::arg("chain"), py::arg("n"), py::arg("ensemble") = "haar-u4");
  m.def(
      "mixing_time",
      [](const std::string& chain, int n, double eps, const std::string& ensemble, long cap) {
        rcd::MixingOptions opt;
        opt.cap = cap;
        const rcd::MixingReport r = rcd::mixing_time(make_chain(chain, n, ensemble), eps, opt);
        py::dict out;
        out["gap"] = r.gap;
        out["reversible"] = r.reversible;
        out["tau"] = r.tau;
        out["tau_bound"] = r.tau_bound ? py::cast(*r.tau_bound) : py::none();
        out["tau2"] = r.tau2;
        out["tau2_bound"] = r.tau2_bound ? py::cast(*r.tau2_bound) : py::none();
        out["distance_curve"] = r.distance_curve;
        return out;
      },
      py::arg("chain"), py::arg("n"), py::arg("eps"), py::arg("ensemble") = "haar-u4", py::arg("cap") = 10'000'000L);
  m.def("gap_mixing_bound", &rcd::gap_mixing_bound, py::arg("gap"), py::arg("pi_star"), py::arg("eps"),
        py::arg("reversible") = true);
  m.def("l2_mixing_bound", &rcd::l2_mixing_bound, py::arg("gap_pp"), py::arg("eps"));
  m.def(
      "tv_distance",
      [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        if (a.size() != b.size()) throw rcd::InvalidInput("tv_distance: length mismatch");
        return 0.5 * (a - b).lpNorm<1>();
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "decay_k1",
      [](int n, int t, const std::string& ensemble, std::size_t trials, std::uint64_t seed, const std::string& mode) {
        return curve_arrays(rcd::decay_k1(n, t, rcd::ensemble_from_spec(ensemble), rcd::zero_state_k1(n), trials, seed,
                                          rcd::decay_mode_from_string(mode)));
      },
      py::arg("n"), py::arg("t"), py::arg("ensemble") = "haar-u4", py::arg("trials") = 100, py::arg("seed") = 0,
      py::arg("mode") = "averaged");
  m.def(
      "decay_k2_offdiag",
      [](int n, int t, const std::string& ensemble, std::size_t trials, std::uint64_t seed, const std::string& mode) {
        return curve_arrays(rcd::decay_k2_offdiag(n, t, rcd::ensemble_from_spec(ensemble), rcd::zero_state_k2(n),
                                                  trials, seed, rcd::decay_mode_from_string(mode)));
      },
      py::arg("n"), py::arg("t"), py::arg("ensemble") = "haar-u4", py::arg("trials") = 100, py::arg("seed") = 0,
      py::arg("mode") = "averaged");

  m.def(
      "design_l2",
      [](int n, long t, const std::string& ensemble) {
        return rcd::design_l2(n, t, rcd::ensemble_from_spec(ensemble), rcd::zero_state_k2(n));
      },
      py::arg("n"), py::arg("t"), py::arg("ensemble") = "haar-u4");
  m.def(
      "design_l1",
      [](int n, long t, const std::string& ensemble) {
        return rcd::design_l1(n, t, rcd::ensemble_from_spec(ensemble), rcd::zero_state_k2(n));
      },
      py::arg("n"), py::arg("t"), py::arg("ensemble") = "haar-u4");
  m.def(
      "diamond_bound",
      [](int n, long t, const std::string& ensemble) {
        return rcd::diamond_bound(n, t, rcd::ensemble_from_spec(ensemble));
      },
      py::arg("n"), py::arg("t"), py::arg("ensemble") = "haar-u4");

  m.def(
      "frame_potential",
      [](const std::string& ensemble, int k, std::size_t trials, std::uint64_t seed) {
        const rcd::Estimate e = rcd::frame_potential(rcd::ensemble_from_spec(ensemble), k, trials, seed);
        return py::make_tuple(e.value, e.std_error);
      },
      py::arg("ensemble"), py::arg("k"), py::arg("trials"), py::arg("seed") = 0);
  m.def(
      "zero_trajectory",
      [](int n, long steps, int start, std::uint64_t seed) {
        const rcd::TrajectoryReport r = rcd::zero_trajectory(n, steps, start, seed);
        py::dict out;
        out["path"] = r.path;
        out["occupancy"] = r.occupancy;
        out["waiting_histogram"] = r.waiting_histogram;
        out["window_mean"] = r.window_mean;
        return out;
      },
      py::arg("n"), py::arg("steps"), py::arg("start"), py::arg("seed") = 0);
}
