#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "locker/bspline.hpp"
#include "locker/error.hpp"
#include "locker/fscad.hpp"
#include "locker/irls.hpp"
#include "locker/kernelw.hpp"
#include "locker/linkfam.hpp"
#include "locker/longdata.hpp"
#include "locker/simbench.hpp"
#include "locker/tuning.hpp"

namespace py = pybind11;
using namespace locker;

namespace {

// (id, response times, response values, covariate times, covariate values)
using SubjectTuple = std::tuple<std::string, std::vector<double>, std::vector<double>,
                                std::vector<double>, std::vector<double>>;

std::vector<Observation> zip(const std::vector<double>& t, const std::vector<double>& v) {
  if (t.size() != v.size()) fail(ErrorKind::Parameter, "times and values differ in length");
  std::vector<Observation> out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out.push_back({t[i], v[i]});
  return out;
}

SubjectTuple unzip(const Subject& s) {
  SubjectTuple out;
  std::get<0>(out) = s.id;
  for (const auto& o : s.response) {
    std::get<1>(out).push_back(o.time);
    std::get<2>(out).push_back(o.value);
  }
  for (const auto& o : s.covariate) {
    std::get<3>(out).push_back(o.time);
    std::get<4>(out).push_back(o.value);
  }
  return out;
}

struct PyFit {
  FitResult result;
  double rho = 0.0;
  double lambda = 0.0;
  double bandwidth = 0.0;
  EbicBreakdown ebic;
  std::vector<GridCell> table;
};

PyFit fit_dataset(const LongDataset& ds, const std::string& family, int basis_size, int degree,
                  std::optional<std::vector<double>> rho, std::optional<std::vector<double>> lambda,
                  const std::string& kernel, std::optional<double> bandwidth) {
  const Family fam = Family::from_name(family);
  const LongDataset scaled = rescale_time(ds);
  PyFit out;
  out.bandwidth = bandwidth ? *bandwidth : default_bandwidth(scaled);
  const SplineBasis basis(degree, basis_size - degree - 1, scaled.domain());
  const FitProblem problem(pair_expand(scaled, basis, {kernel_from_name(kernel), out.bandwidth}), basis);
  TuningGrid grid = TuningGrid::defaults();
  if (rho) grid.rho = *rho;
  if (lambda) grid.lambda = *lambda;
  TuneOptions tune;
  tune.base.family = fam;
  auto sel = select_rho_lambda(problem, fam, grid.rho, grid.lambda, tune);
  out.result = std::move(sel.fit);
  out.rho = sel.rho;
  out.lambda = sel.lambda;
  out.ebic = sel.best;
  out.table = std::move(sel.table);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Penalized kernel-weighted IRLS for locally sparse varying coefficient models";

  py::register_exception<Error>(m, "LockerError", PyExc_RuntimeError);
  // Registered last, so consulted first; anything not handled here falls
  // through to LockerError.
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Usage || e.kind() == ErrorKind::Parameter) {
        PyErr_SetString(PyExc_ValueError, e.what());
      } else if (e.kind() == ErrorKind::Io) {
        PyErr_SetString(PyExc_OSError, e.what());
      } else {
        throw;
      }
    }
  });

  py::class_<Domain>(m, "Domain")
      .def(py::init<double, double>(), py::arg("lo") = 0.0, py::arg("hi") = 1.0)
      .def_readwrite("lo", &Domain::lo)
      .def_readwrite("hi", &Domain::hi)
      .def("__repr__", [](const Domain& d) {
        return "Domain(" + std::to_string(d.lo) + ", " + std::to_string(d.hi) + ")";
      });

  py::class_<LongDataset>(m, "Dataset")
      .def(py::init([](const std::vector<SubjectTuple>& rows, std::optional<Domain> domain) {
             std::vector<Subject> subjects;
             for (const auto& [id, rt, rv, ct, cv] : rows) {
               subjects.push_back({id, zip(rt, rv), zip(ct, cv)});
             }
             return domain ? LongDataset(std::move(subjects), *domain)
                           : LongDataset::with_observed_domain(std::move(subjects));
           }),
           py::arg("subjects"), py::arg("domain") = py::none())
      .def_static("from_csv",
                  [](const std::filesystem::path& r, const std::filesystem::path& c,
                     std::optional<Domain> d) { return load_csv(r, c, d); },
                  py::arg("response"), py::arg("covariate"), py::arg("domain") = py::none())
      .def_property_readonly("domain", &LongDataset::domain)
      .def("__len__", &LongDataset::size)
      .def("subjects", [](const LongDataset& ds) {
        std::vector<SubjectTuple> out;
        for (const auto& s : ds.subjects()) out.push_back(unzip(s));
        return out;
      })
      .def("rescaled", &rescale_time)
      .def("response_csv", [](const LongDataset& ds) { return to_csv(ds, Channel::Response); })
      .def("covariate_csv", [](const LongDataset& ds) { return to_csv(ds, Channel::Covariate); });

  py::class_<SplineBasis>(m, "SplineBasis")
      .def(py::init<int, int, Domain>(), py::arg("degree"), py::arg("interior_knots"),
           py::arg("domain") = Domain{})
      .def_property_readonly("degree", &SplineBasis::degree)
      .def_property_readonly("size", &SplineBasis::size)
      .def_property_readonly("knots", &SplineBasis::knots)
      .def_property_readonly("breaks", &SplineBasis::breaks)
      .def("evaluate", &SplineBasis::evaluate, py::arg("t"))
      .def("roughness_matrix", &SplineBasis::roughness_matrix)
      .def("interval_gram", &SplineBasis::interval_gram, py::arg("m"));

  m.def("default_bandwidth", &default_bandwidth, py::arg("dataset"));
  m.def("scad", [](double lambda, double v, double a) { return scad({lambda, a}, v); },
        py::arg("lam"), py::arg("v"), py::arg("a") = 3.7);
  m.def("scad_deriv", [](double lambda, double v, double a) { return scad_deriv({lambda, a}, v); },
        py::arg("lam"), py::arg("v"), py::arg("a") = 3.7);

  py::class_<PyFit>(m, "Fit")
      .def_property_readonly("gamma", [](const PyFit& f) { return f.result.gamma; })
      .def_property_readonly("gamma0", [](const PyFit& f) { return f.result.gamma0(); })
      .def_property_readonly("gamma1", [](const PyFit& f) { return f.result.gamma1(); })
      .def_readonly("rho", &PyFit::rho)
      .def_readonly("lam", &PyFit::lambda)
      .def_readonly("bandwidth", &PyFit::bandwidth)
      .def_property_readonly("ebic", [](const PyFit& f) { return f.ebic.score; })
      .def_property_readonly("df", [](const PyFit& f) { return f.ebic.df; })
      .def_property_readonly("iterations", [](const PyFit& f) { return f.result.iterations; })
      .def_property_readonly("converged", [](const PyFit& f) { return f.result.converged; })
      .def_property_readonly("active", [](const PyFit& f) { return f.result.active; })
      .def("grid", [](const PyFit& f) {
        py::list rows;
        for (const auto& c : f.table) {
          py::dict d;
          d["rho"] = c.rho;
          d["lam"] = c.lambda;
          d["ok"] = c.ok;
          d["ebic"] = c.ebic.score;
          d["df"] = c.ebic.df;
          d["iterations"] = c.iterations;
          d["active_size"] = c.active_size;
          rows.append(d);
        }
        return rows;
      })
      .def("beta", [](const PyFit& f, double t) {
             const auto b = evaluate_beta(f.result, t);
             return std::make_pair(b.beta0, b.beta1);
           },
           py::arg("t"), "Coefficient functions at t on the rescaled [0, 1] axis");

  m.def("fit", &fit_dataset, py::arg("dataset"), py::arg("family") = "gaussian",
        py::arg("L") = 13, py::arg("degree") = 3, py::arg("rho") = py::none(),
        py::arg("lam") = py::none(), py::arg("kernel") = "epanechnikov",
        py::arg("bandwidth") = py::none(),
        "Rescales time to [0, 1], tunes (rho, lambda) by EBIC over the grids and fits.");

  m.def("simulate",
        [](const std::string& family, bool sparse, int n, double mrate, std::uint64_t seed,
           bool synchronous) {
          Scenario sc;
          sc.family = Family::from_name(family);
          sc.sparse = sparse;
          sc.n = n;
          sc.m = mrate;
          sc.seed = seed;
          sc.synchronous = synchronous;
          return gen_dataset(sc).data;
        },
        py::arg("family") = "gaussian", py::arg("sparse") = false, py::arg("n") = 200,
        py::arg("m") = 20.0, py::arg("seed") = 1, py::arg("synchronous") = false);

  m.def("true_beta",
        [](bool sparse, double t) {
          const TrueFunctions tf(sparse);
          return std::make_pair(tf.beta0(t), tf.beta1(t));
        },
        py::arg("sparse"), py::arg("t"));

  m.def("benchmark",
        [](const std::string& family, bool sparse, int n, double mrate, int replicates,
           std::uint64_t seed, bool synchronous, int basis_size) {
          Scenario sc;
          sc.name = family;
          sc.family = Family::from_name(family);
          sc.sparse = sparse;
          sc.n = n;
          sc.m = mrate;
          sc.seed = seed;
          sc.synchronous = synchronous;
          BenchOptions opts;
          opts.basis_size = basis_size;
          const std::vector<Scenario> v{sc};
          py::gil_scoped_release release;
          const auto rep = run_benchmark(v, replicates, opts);
          py::gil_scoped_acquire acquire;
          const auto& r = rep.rows.front();
          py::dict d;
          d["replicates"] = r.replicates;
          d["failures"] = r.failures;
          d["ise0"] = r.ise0.mean;
          d["ise1"] = r.ise1.mean;
          d["tp"] = r.tp ? py::cast(r.tp->mean) : py::none();
          d["fn"] = r.fn.mean;
          return d;
        },
        py::arg("family") = "gaussian", py::arg("sparse") = false, py::arg("n") = 200,
        py::arg("m") = 20.0, py::arg("replicates") = 2, py::arg("seed") = 1,
        py::arg("synchronous") = false, py::arg("L") = 13);
}
