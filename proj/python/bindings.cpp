#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

#include "smpkit/capacity.hpp"
#include "smpkit/catalog.hpp"
#include "smpkit/config.hpp"
#include "smpkit/errors.hpp"
#include "smpkit/feynman_kac.hpp"
#include "smpkit/harness.hpp"
#include "smpkit/json_io.hpp"
#include "smpkit/kernels.hpp"
#include "smpkit/maxprinciple.hpp"
#include "smpkit/parallel.hpp"
#include "smpkit/potentials.hpp"

namespace py = pybind11;
using namespace smpkit;
using json = nlohmann::json;

namespace {

Point pt(const std::vector<double>& v) { return Point(std::span<const double>(v)); }

double extended(const model::ExtendedReal& v) {
  return v.infinite ? std::numeric_limits<double>::infinity() : v.value;
}

model::OperatorSpec op_from(const std::string& s) { return config::operator_from(json::parse(s)); }
model::MeasureSpec nu_from(const std::string& s) { return config::measure_from(json::parse(s)); }

kernels::ExitVariant variant_from(const std::string& v) {
  if (v == "normalized") return kernels::ExitVariant::Normalized;
  if (v == "as_printed") return kernels::ExitVariant::AsPrinted;
  throw ConfigError("variant must be normalized or as_printed");
}

}  // namespace

PYBIND11_MODULE(_smpkit, m) {
  m.doc() = "Native core of smpkit";

  static py::exception<Error> base(m, "SmpkitError", PyExc_RuntimeError);
  static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
  static py::exception<DomainError> domain_error(m, "DomainError", base.ptr());
  static py::exception<PreconditionError> precondition_error(m, "PreconditionError", base.ptr());
  static py::exception<ConvergenceError> convergence_error(m, "ConvergenceError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      config_error(e.what());
    } catch (const DomainError& e) {
      domain_error(e.what());
    } catch (const PreconditionError& e) {
      precondition_error(e.what());
    } catch (const ConvergenceError& e) {
      convergence_error(e.what());
    } catch (const Error& e) {
      base(e.what());
    }
  });

  m.def("version", [] { return std::string(harness::version()); });
  m.def("set_workers", [](int n) { set_worker_count(n); }, py::arg("n"));
  m.def("workers", [] { return worker_count(); });

  m.def(
      "validate_json",
      [](const std::string& doc) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& v : config::parse(json::parse(doc)).violations) out.emplace_back(v.field, v.rule);
        return out;
      },
      py::arg("config"));
  m.def("config_hash_json", [](const std::string& doc) { return config::config_hash(json::parse(doc)); });
  m.def(
      "run_json",
      [](const std::string& doc, int workers, bool write_files) {
        auto r = config::parse(json::parse(doc));
        if (!r.config) {
          std::string msg = "invalid config:";
          for (const auto& v : r.violations) msg += " " + v.field + " (" + v.rule + ")";
          throw ConfigError(msg);
        }
        harness::RunOptions o;
        o.workers = workers;
        o.write_files = write_files;
        harness::RunReport rr;
        {
          py::gil_scoped_release release;
          rr = harness::run(*r.config, o);
        }
        return py::make_tuple(rr.report.dump(), rr.exit_code);
      },
      py::arg("config"), py::arg("workers") = 0, py::arg("write_files") = false);
  m.def("strip_timing_json", [](const std::string& r) { return harness::strip_timing(json::parse(r)).dump(); });
  m.def("plotdata_json", [](const std::string& r, const std::string& what) {
    return harness::emit_plotdata(json::parse(r), what);
  });
  m.def("catalog_json", [] { return harness::catalog_json().dump(); });

  m.def(
      "green_ball",
      [](int d, double R, const std::vector<double>& x, const std::vector<double>& y) {
        return kernels::green_ball_brownian(d, R, pt(x), pt(y));
      },
      py::arg("d"), py::arg("R"), py::arg("x"), py::arg("y"));
  m.def(
      "green_ball_stable",
      [](int d, double alpha, double R, const std::vector<double>& x, const std::vector<double>& y) {
        return kernels::green_ball_stable(d, alpha, R, pt(x), pt(y));
      },
      py::arg("d"), py::arg("alpha"), py::arg("R"), py::arg("x"), py::arg("y"));
  m.def(
      "expected_residence",
      [](int d, double R, const std::vector<double>& x) { return kernels::expected_residence(d, R, pt(x)); },
      py::arg("d"), py::arg("R"), py::arg("x"));
  m.def(
      "exit_kernel_mass",
      [](int d, double alpha, const std::string& variant) {
        return extended(kernels::ExitKernel(d, alpha, 1.0, variant_from(variant)).total_mass());
      },
      py::arg("d"), py::arg("alpha"), py::arg("variant") = "normalized");
  m.def(
      "exit_kernel_tail",
      [](int d, double alpha, double s, const std::string& variant) {
        return extended(kernels::ExitKernel(d, alpha, 1.0, variant_from(variant)).tail_mass(s));
      },
      py::arg("d"), py::arg("alpha"), py::arg("s"), py::arg("variant") = "normalized");

  m.def(
      "volume_average",
      [](const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& x, double r) {
        auto u = [&](const Point& y) { return f(y.to_vector()); };
        return mp::volume_average(u, pt(x), r).value;
      },
      py::arg("f"), py::arg("x"), py::arg("r"));
  m.def(
      "potential_json",
      [](const std::string& measure, const std::string& op, const std::vector<double>& x) {
        return extended(potentials::potential(nu_from(measure), op_from(op), pt(x)).value);
      },
      py::arg("measure"), py::arg("operator"), py::arg("x"));
  m.def(
      "classify_json",
      [](const std::vector<double>& x, const std::string& measure, const std::string& op, double r_max, double r_min,
         int count) {
        model::RadiiSchedule radii{r_max, r_min, count};
        return io::to_json(mp::classify_point(pt(x), nu_from(measure), op_from(op), radii)).dump();
      },
      py::arg("x"), py::arg("measure"), py::arg("operator"), py::arg("r_max") = 0.5, py::arg("r_min") = 0.05,
      py::arg("count") = 4);
  m.def(
      "fk_resolvent_json",
      [](const std::vector<double>& x, const std::string& measure, const std::string& op, std::size_t n, double dt,
         std::uint64_t seed) {
        fk::FkOptions o;
        o.n = n;
        o.dt = dt;
        o.seed = seed;
        auto one = [](const Point&) { return 1.0; };
        return io::to_json(fk::fk_resolvent(pt(x), one, nu_from(measure), op_from(op), o)).dump();
      },
      py::arg("x"), py::arg("measure"), py::arg("operator"), py::arg("n") = 10000, py::arg("dt") = 1e-3,
      py::arg("seed") = 0);
  m.def(
      "capacity_c1",
      [](int n, double half, double radius) {
        auto g = capacity::Grid::cube(3, n, half);
        auto pr = capacity::CapacityProblem::riesz(g, g.cells_in_ball(Point::zero(3), radius));
        auto big = capacity::solve_c1(pr);
        auto small = capacity::solve_dual_c1(pr);
        return py::make_tuple(big.value, small.value);
      },
      py::arg("n"), py::arg("half"), py::arg("radius"));
}
