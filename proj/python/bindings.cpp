#include "lieaut/covering.hpp"
#include "lieaut/heisenberg.hpp"
#include "lieaut/verify.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace lieaut;

namespace {

Triple to_triple(const std::array<Cx, 3>& z) { return Triple{z[0], z[1], z[2]}; }

std::string bundle_json(ReportBundle b) { return b.to_json().dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "group actions on complex domains: Moebius / covering / Heisenberg operations";

  py::class_<UniMat2>(m, "UniMat2")
      .def(py::init([](Cx a, Cx b, Cx c, Cx d) { return make_unimodular(a, b, c, d); }),
           py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"))
      .def_readonly("a", &UniMat2::a)
      .def_readonly("b", &UniMat2::b)
      .def_readonly("c", &UniMat2::c)
      .def_readonly("d", &UniMat2::d)
      .def("det", &UniMat2::det)
      .def("norm", &UniMat2::norm)
      .def("__matmul__", [](const UniMat2& g, const UniMat2& h) { return mul(g, h); })
      .def("inv", [](const UniMat2& g) { return inv(g); });

  py::class_<ProjMat2>(m, "ProjMat2")
      .def_readonly("rep", &ProjMat2::rep)
      .def("__matmul__", [](const ProjMat2& g, const ProjMat2& h) { return mul(g, h); })
      .def("inv", [](const ProjMat2& g) { return inv(g); });

  py::class_<CoverElement>(m, "CoverElement")
      .def_readonly("endpoint", &CoverElement::endpoint)
      .def_readonly("branch", &CoverElement::branch);

  m.def("projectivize", &projectivize, py::arg("g"));
  m.def("proj_distance", py::overload_cast<const ProjMat2&, const ProjMat2&>(&proj_distance));
  m.def("rotation", &rotation, py::arg("theta"));
  m.def("diag_flow", &diag_flow, py::arg("s"));
  m.def("shear", &shear, py::arg("u"));
  m.def("iwasawa", &iwasawa, py::arg("theta"), py::arg("s"), py::arg("u"));
  m.def("exp_sl2", [](double x, double y, double z, double t) {
    return exp_sl2(Sl2Element{x, y, z}, t);
  }, py::arg("x"), py::arg("y"), py::arg("z"), py::arg("t") = 1.0);

  m.def("mobius_apply", [](const UniMat2& g, Cx z) { return mobius_apply(g, z); });
  m.def("act_triple", [](const UniMat2& g, const std::array<Cx, 3>& z) {
    return act_triple(g, to_triple(z)).as_array();
  });
  m.def("psi", &psi);
  m.def("phi_prelim", &phi_prelim);
  m.def("phi_square", &phi_square);
  m.def("phi_main", py::overload_cast<const UniMat2&>(&phi_main));
  m.def("mobius_from_three_points", [](const std::array<Cx, 3>& src, const std::array<Cx, 3>& dst) {
    return mobius_from_three_points(to_triple(src), to_triple(dst));
  });

  m.def("log_continue", [](const std::vector<Cx>& values, Cx initial) {
    return log_continue(values, initial);
  }, py::arg("values"), py::arg("initial_log") = Cx(0.0));
  m.def("root_continue_k", [](const std::vector<Cx>& values, Cx initial, int k) {
    return root_continue_k(values, initial, k);
  });
  m.def("winding_number", [](const std::vector<Cx>& loop) { return winding_number(loop); });

  m.def("cover_identity", &cover_identity);
  m.def("cover_loop", &cover_loop, py::arg("n") = 1);
  m.def("make_cover", [](double theta, double s, double u, int loops) {
    return make_cover(projectivize(iwasawa(theta, s, u)), loops);
  }, py::arg("theta"), py::arg("s"), py::arg("u"), py::arg("loops") = 0);
  m.def("cover_mul", &cover_mul);
  m.def("cover_inv", &cover_inv);
  m.def("lift_action", [](const CoverElement& gt, const std::array<Cx, 3>& z, Cx w) {
    const LiftedPoint out = lift_action(gt, LiftedPoint{to_triple(z), w});
    return py::make_tuple(out.z.as_array(), out.w);
  }, py::arg("gt"), py::arg("z"), py::arg("w"));
  m.def("omega_tilde_membership", [](const std::array<Cx, 3>& z, Cx w) {
    const BranchQuery q = omega_tilde_membership(LiftedPoint{to_triple(z), w});
    return py::make_tuple(q.inside, q.branch);
  });
  m.def("phi_hat", [](const std::array<Cx, 3>& z) { return phi_hat(to_triple(z)); });

  m.def("totally_real_rank", [](const std::array<Cx, 3>& z) {
    const RankResult r = totally_real_rank(orbit_frame(to_triple(z)));
    return py::make_tuple(r.sigma_min, r.sigma_max, r.rank6);
  });
  m.def("freeness_certificate", [](const std::array<Cx, 3>& z) {
    return freeness_certificate(to_triple(z)).free_action;
  });
  m.def("tube_distance", [](const std::array<Cx, 3>& x, double radius) {
    TubeSpec spec;
    spec.radius = radius;
    const TubeDistanceResult r = tube_distance(to_triple(x), spec);
    return py::make_tuple(r.dist, py::make_tuple(r.argmin.theta, r.argmin.s, r.argmin.u));
  }, py::arg("x"), py::arg("radius") = 0.05);

  py::class_<HeisElement>(m, "HeisElement")
      .def(py::init([](double a, double b, Cx c) { return make_heis(a, b, c); }),
           py::arg("a") = 0.0, py::arg("b") = 0.0, py::arg("c") = Cx(1.0))
      .def_readonly("a", &HeisElement::a)
      .def_readonly("b", &HeisElement::b)
      .def_readonly("c", &HeisElement::c);

  m.def("heis_mul", [](const HeisElement& g, const HeisElement& h) { return heis_mul(g, h); });
  m.def("heis_act", [](const HeisElement& g, const std::array<Cx, 3>& p) {
    const HeisCPoint out = heis_mul(g, HeisCPoint{p[0], p[1], p[2]});
    return std::array<Cx, 3>{out.x, out.y, out.z};
  });
  m.def("heis_inv", &heis_inv);
  m.def("in_U", [](const std::array<Cx, 3>& p) { return in_U(HeisCPoint{p[0], p[1], p[2]}); });
  m.def("omega_membership", [](const std::array<Cx, 3>& p) {
    const HeisMembership r = omega_membership(HeisCPoint{p[0], p[1], p[2]});
    if (!r.inside) return py::make_tuple(false, py::none());
    const HeisWitness& w = *r.witness;
    return py::make_tuple(true, py::make_tuple(py::make_tuple(w.g.a, w.g.b, w.g.c),
                                               std::array<Cx, 3>{w.u.x, w.u.y, w.u.z}));
  });
  m.def("derive_C", &derive_C);
  m.def("bounding_map", [](const std::array<Cx, 3>& p, double C) {
    const HeisCPoint out = bounding_map(HeisCPoint{p[0], p[1], p[2]}, C);
    return std::array<Cx, 3>{out.x, out.y, out.z};
  }, py::arg("p"), py::arg("C"));
  m.def("bounded_embedding", [](const std::array<Cx, 3>& p, double C) {
    return bounded_embedding(HeisCPoint{p[0], p[1], p[2]}, C);
  }, py::arg("p"), py::arg("C"));

  m.def("run_lemma", [](std::uint64_t seed, std::uint64_t trials, int workers, double eps,
                        double delta, double T, double N) {
    ReportBundle b;
    b.command = "verify-lemma";
    b.reports.push_back(check_lemma(LemmaConfig{seed, trials, workers, eps, delta, T, N, false}));
    return bundle_json(std::move(b));
  }, py::arg("seed") = 1, py::arg("trials") = 10000, py::arg("workers") = 1,
     py::arg("eps") = 1.0 / 3.0, py::arg("delta") = 0.3, py::arg("T") = 10.0, py::arg("N") = 10.0);

  m.def("run_claim", [](std::uint64_t seed, std::uint64_t trials, int workers, double eps) {
    ReportBundle b;
    b.command = "verify-claim";
    b.reports.push_back(check_lemma_claim(ClaimConfig{seed, trials, workers, eps, 5.0, false}));
    return bundle_json(std::move(b));
  }, py::arg("seed") = 1, py::arg("trials") = 10000, py::arg("workers") = 1,
     py::arg("eps") = 1.0 / 3.0);

  m.def("run_winding", [] {
    ReportBundle b;
    b.command = "verify-winding";
    b.reports.push_back(winding_certification());
    return bundle_json(std::move(b));
  });

  m.def("run_heisenberg", [](std::uint64_t seed, std::uint64_t trials, int workers) {
    HeisSuiteConfig cfg;
    cfg.seed = seed;
    cfg.trials = trials;
    cfg.workers = workers;
    ReportBundle b;
    b.command = "heisenberg";
    b.reports.push_back(heis_membership_agreement(cfg));
    b.reports.push_back(heis_bound_constant_audit(cfg));
    b.reports.push_back(heis_wprime_audit(cfg));
    b.reports.push_back(heis_embedding_audit(cfg));
    return bundle_json(std::move(b));
  }, py::arg("seed") = 1, py::arg("trials") = 2000, py::arg("workers") = 1);

  m.attr("__version__") = LIEAUT_VERSION;
}
