#include <sstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dlab/cli.hpp"
#include "dlab/dissipative_analysis.hpp"
#include "dlab/io.hpp"
#include "dlab/manifest.hpp"
#include "dlab/oscillation_lab.hpp"
#include "dlab/scenarios.hpp"
#include "dlab/selection.hpp"
#include "dlab/weak_form.hpp"

namespace py = pybind11;
using namespace dlab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array vec_to_array(const std::vector<double>& v) {
  Array a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

Array mom_to_array(const std::vector<Vec2>& m) {
  Array a({static_cast<py::ssize_t>(m.size()), py::ssize_t{2}});
  auto r = a.mutable_unchecked<2>();
  for (std::size_t c = 0; c < m.size(); ++c) {
    r(c, 0) = m[c][0];
    r(c, 1) = m[c][1];
  }
  return a;
}

void set_rho(ConservedField& f, const Array& a) {
  if (a.ndim() != 1 || static_cast<std::size_t>(a.shape(0)) != f.size()) {
    throw IncompatibleError("rho needs shape (cell_count,)");
  }
  f.rho.assign(a.data(), a.data() + a.shape(0));
}

void set_mom(ConservedField& f, const Array& a) {
  if (a.ndim() != 2 || static_cast<std::size_t>(a.shape(0)) != f.size() || a.shape(1) != 2) {
    throw IncompatibleError("mom needs shape (cell_count, 2)");
  }
  auto r = a.unchecked<2>();
  for (std::size_t c = 0; c < f.size(); ++c) f.mom[c] = {r(c, 0), r(c, 1)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of the dissipative solution lab";
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<IncompatibleError>(m, "IncompatibleError", base.ptr());
  py::register_exception<InadmissibleBlockError>(m, "InadmissibleBlockError", base.ptr());
  py::register_exception<InfeasibleConstraintError>(m, "InfeasibleConstraintError", base.ptr());
  py::register_exception<SolverStallError>(m, "SolverStallError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<EosParams>(m, "EosParams")
      .def(py::init([](double a, double gamma) {
             EosParams e{a, gamma};
             e.validate();
             return e;
           }),
           py::arg("a") = 1.0, py::arg("gamma") = 1.4)
      .def_readwrite("a", &EosParams::a)
      .def_readwrite("gamma", &EosParams::gamma);

  m.def("pressure", &pressure, py::arg("rho"), py::arg("eos") = EosParams{});
  m.def("pressure_potential", &pressure_potential, py::arg("rho"), py::arg("eos") = EosParams{});
  m.def("total_energy_density", &total_energy_density, py::arg("rho"), py::arg("mom"),
        py::arg("eos") = EosParams{});

  py::class_<TorusGrid>(m, "TorusGrid")
      .def(py::init<int, int>(), py::arg("dim"), py::arg("cells_per_axis"))
      .def_readonly("dim", &TorusGrid::dim)
      .def_readonly("cells_per_axis", &TorusGrid::cells_per_axis)
      .def_property_readonly("cell_count", &TorusGrid::cell_count)
      .def_property_readonly("spacing", &TorusGrid::spacing)
      .def("__eq__", [](const TorusGrid& a, const TorusGrid& b) { return a == b; });

  py::class_<ConservedField>(m, "ConservedField")
      .def(py::init<const TorusGrid&, double>(), py::arg("grid"), py::arg("time") = 0.0)
      .def_readonly("grid", &ConservedField::grid)
      .def_readwrite("time", &ConservedField::time)
      .def_property("rho", [](const ConservedField& f) { return vec_to_array(f.rho); }, &set_rho)
      .def_property("mom", [](const ConservedField& f) { return mom_to_array(f.mom); }, &set_mom)
      .def("total_energy", [](const ConservedField& f, const EosParams& e) { return total_energy(f, e); },
           py::arg("eos") = EosParams{});

  m.def("constant_state", &constant_state, py::arg("grid"), py::arg("rho"), py::arg("mom") = Vec2{0.0, 0.0});
  m.def(
      "riemann_1d",
      [](const TorusGrid& g, double rl, double ul, double rr, double ur, double x0) {
        return riemann_1d(g, {rl, ul}, {rr, ur}, x0);
      },
      py::arg("grid"), py::arg("rho_left") = 1.0, py::arg("u_left") = 0.0, py::arg("rho_right") = 0.5,
      py::arg("u_right") = 0.0, py::arg("x0") = 0.0);
  m.def("acoustic_pulse", &acoustic_pulse, py::arg("grid"), py::arg("amplitude"), py::arg("eos") = EosParams{});
  m.def("smooth_wave", &smooth_wave, py::arg("grid"), py::arg("amplitude"));
  m.def("random_smooth", &random_smooth, py::arg("grid"), py::arg("seed"), py::arg("amplitude") = 0.2);

  py::class_<Trajectory>(m, "Trajectory")
      .def("__len__", &Trajectory::size)
      .def("__getitem__",
           [](const Trajectory& t, std::size_t k) {
             if (k >= t.size()) throw py::index_error();
             return t[k];
           })
      .def_property_readonly("times", &Trajectory::times);

  py::class_<ViscosityModel>(m, "ViscosityModel")
      .def(py::init([](double eps, double mu, double eta) { return ViscosityModel{eps, mu, eta}; }),
           py::arg("epsilon") = 1e-2, py::arg("shear_mu") = 1.0, py::arg("bulk_eta") = 1.0)
      .def_readwrite("epsilon", &ViscosityModel::epsilon);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init([](double end_time, double output_stride, double cfl) {
             SolverConfig c;
             c.end_time = end_time;
             c.output_stride = output_stride;
             c.cfl = cfl;
             return c;
           }),
           py::arg("end_time") = 0.2, py::arg("output_stride") = 0.01, py::arg("cfl") = 0.4)
      .def_readwrite("end_time", &SolverConfig::end_time)
      .def_readwrite("output_stride", &SolverConfig::output_stride)
      .def_readwrite("cfl", &SolverConfig::cfl);

  py::class_<EnergyLedger>(m, "EnergyLedger")
      .def_property_readonly("times", [](const EnergyLedger& l) { return vec_to_array(l.times); })
      .def_property_readonly("energy", [](const EnergyLedger& l) { return vec_to_array(l.energy); })
      .def_property_readonly("dissipation", [](const EnergyLedger& l) { return vec_to_array(l.dissipation); })
      .def_property_readonly("slack", [](const EnergyLedger& l) { return vec_to_array(l.slack); })
      .def("min_slack", &EnergyLedger::min_slack)
      .def("dissipation_monotone", &EnergyLedger::dissipation_monotone);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("trajectory", &RunResult::trajectory)
      .def_readonly("ledger", &RunResult::ledger)
      .def_readonly("steps", &RunResult::steps)
      .def_readonly("rejections", &RunResult::rejections);

  m.def("run", &run, py::arg("initial"), py::arg("eos"), py::arg("model"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::enum_<AveragingMode>(m, "AveragingMode")
      .value("Block", AveragingMode::Block)
      .value("Window", AveragingMode::Window);

  py::class_<BlockPartition>(m, "BlockPartition")
      .def(py::init<const TorusGrid&, int, AveragingMode>(), py::arg("grid"), py::arg("block"),
           py::arg("mode") = AveragingMode::Block)
      .def_readonly("block", &BlockPartition::block)
      .def_property_readonly("output_grid", &BlockPartition::output_grid);

  py::class_<DefectField>(m, "DefectField")
      .def_readonly("time", &DefectField::time)
      .def_property_readonly("rp", [](const DefectField& d) { return vec_to_array(d.Rp); })
      .def_property_readonly("rv",
                             [](const DefectField& d) {
                               Array a({static_cast<py::ssize_t>(d.Rv.size()), py::ssize_t{3}});
                               auto r = a.mutable_unchecked<2>();
                               for (std::size_t c = 0; c < d.Rv.size(); ++c) {
                                 r(c, 0) = d.Rv[c].xx;
                                 r(c, 1) = d.Rv[c].xy;
                                 r(c, 2) = d.Rv[c].yy;
                               }
                               return a;
                             })
      .def("energy", &DefectField::energy, py::arg("eos") = EosParams{})
      .def("min_rv_eigenvalue", &DefectField::min_rv_eigenvalue)
      .def("min_rp", &DefectField::min_rp);

  m.def("defect_field", &defect_field, py::arg("field"), py::arg("partition"), py::arg("eos") = EosParams{});

  py::class_<BookkeepingReport>(m, "BookkeepingReport")
      .def_readonly("max_abs", &BookkeepingReport::max_abs)
      .def_readonly("max_relative", &BookkeepingReport::max_relative);
  m.def("energy_bookkeeping", &energy_bookkeeping, py::arg("field"), py::arg("partition"),
        py::arg("eos") = EosParams{});

  py::class_<DissipativeRecord>(m, "DissipativeRecord")
      .def_readonly("trajectory", &DissipativeRecord::trajectory)
      .def_readonly("defects", &DissipativeRecord::defects)
      .def_readonly("ledger", &DissipativeRecord::ledger)
      .def_readonly("provenance", &DissipativeRecord::provenance)
      .def("defect_mass", &DissipativeRecord::defect_mass, py::arg("eos") = EosParams{});

  m.def("make_record", &make_record, py::arg("run"), py::arg("eos") = EosParams{}, py::arg("block") = 1,
        py::arg("mode") = AveragingMode::Block, py::arg("provenance") = "");

  py::class_<RecordAudit>(m, "RecordAudit")
      .def_property_readonly("ok", &RecordAudit::ok)
      .def_readonly("min_energy_slack", &RecordAudit::min_energy_slack)
      .def_readonly("problems", &RecordAudit::problems);
  m.def("audit_record", &audit_record, py::arg("record"), py::arg("eos") = EosParams{});

  py::class_<CompatibilityReport>(m, "CompatibilityReport")
      .def_property_readonly("verdict", [](const CompatibilityReport& r) { return std::string(to_string(r.verdict)); })
      .def_readonly("defect_mass", &CompatibilityReport::defect_mass)
      .def_readonly("initial_energy", &CompatibilityReport::initial_energy)
      .def_readonly("violated", &CompatibilityReport::violated);
  m.def(
      "compatibility_check",
      [](const DissipativeRecord& r, const EosParams& e) { return compatibility_check(r, e); },
      py::arg("record"), py::arg("eos") = EosParams{});

  m.def("write_record", &write_record, py::arg("directory"), py::arg("record"));
  m.def("read_record", &read_record, py::arg("directory"));

  m.def("kinetic_constraint_momentum", &kinetic_constraint_momentum, py::arg("rho"), py::arg("lambda_"),
        py::arg("eos") = EosParams{}, py::arg("dim") = 2);
  m.def(
      "tracefree_flux",
      [](double rho, Vec2 mom, int dim) {
        const Sym2 t = tracefree_flux(rho, mom, dim);
        return std::array<double, 3>{t.xx, t.xy, t.yy};
      },
      py::arg("rho"), py::arg("mom"), py::arg("dim") = 2);

  py::class_<OscillatingSequence>(m, "OscillatingSequence")
      .def_readonly("members", &OscillatingSequence::members)
      .def_readonly("periods", &OscillatingSequence::periods)
      .def_readonly("target", &OscillatingSequence::target);
  m.def("checkerboard_sequence", &checkerboard_sequence, py::arg("rho_bar"), py::arg("delta"), py::arg("n_max"),
        py::arg("grid"), py::arg("shrinking") = false);

  py::class_<WeakStarReport>(m, "WeakStarReport")
      .def_readonly("max_difference", &WeakStarReport::max_difference)
      .def_readonly("worst_ratio", &WeakStarReport::worst_ratio)
      .def_property_readonly("passed", &WeakStarReport::pass);
  m.def(
      "weakstar_polynomial",
      [](const OscillatingSequence& s, int degree) {
        return weakstar_diagnostics(s, polynomial_tests(s.target.grid, degree));
      },
      py::arg("sequence"), py::arg("degree") = 3);

  py::class_<SeparationReport>(m, "SeparationReport")
      .def_readonly("distances", &SeparationReport::distances)
      .def_readonly("estimate", &SeparationReport::estimate)
      .def_readonly("threshold", &SeparationReport::threshold)
      .def_readonly("separated", &SeparationReport::separated);
  m.def("l1_separation", &l1_separation, py::arg("sequence"));

  m.def(
      "precedes",
      [](const DissipativeRecord& a, const DissipativeRecord& b, const EosParams& e) {
        return std::string(to_string(precedes(a, b, e)));
      },
      py::arg("a"), py::arg("b"), py::arg("eos") = EosParams{});
  m.def("energy_functional", &energy_functional, py::arg("record"), py::arg("eos") = EosParams{});
  m.def(
      "select_admissible",
      [](const std::vector<DissipativeRecord>& members, const EosParams& e) {
        Ensemble ens;
        ens.members = members;
        const auto s = select_admissible(ens, e);
        py::dict out;
        out["winner"] = s.winner;
        out["functionals"] = s.functionals;
        out["minimal"] = s.minimal;
        py::list cert;
        for (const auto& c : s.certificate) cert.append(py::make_tuple(c.member, to_string(c.verdict)));
        out["certificate"] = cert;
        return out;
      },
      py::arg("members"), py::arg("eos") = EosParams{});
  m.def("convex_combine", &convex_combine, py::arg("a"), py::arg("b"), py::arg("lam"), py::arg("eos") = EosParams{});

  m.def(
      "cli_run",
      [](const std::string& command, const std::string& config, const std::string& out, int threads) {
        CliOptions o;
        o.command = command;
        o.config = config;
        o.out = out;
        o.threads = threads;
        std::ostringstream log;
        const int status = cli_run(o, log);
        return py::make_tuple(status, log.str());
      },
      py::arg("command"), py::arg("config"), py::arg("out") = "", py::arg("threads") = 1,
      "Runs one CLI command; returns (exit status, log text).");
}
