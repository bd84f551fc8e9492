// Python bindings: instance and design handles plus the main entry points of
// each stage. Long-running calls release the GIL.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "chainforge/accessibility.hpp"
#include "chainforge/des.hpp"
#include "chainforge/error.hpp"
#include "chainforge/gfa.hpp"
#include "chainforge/pareto.hpp"
#include "chainforge/pipeline.hpp"
#include "chainforge/plan.hpp"
#include "chainforge/report.hpp"
#include "chainforge/stochastic.hpp"

namespace py = pybind11;
using namespace chainforge;

namespace {

py::dict costs_dict(const stochastic::PeriodCosts& c) {
  py::dict d;
  d["inventory"] = c.inventory;
  d["unfulfilled"] = c.unfulfilled;
  d["order"] = c.order;
  d["total"] = c.total();
  return d;
}

py::dict statistic(const des::Statistic& s) {
  py::dict d;
  d["mean"] = s.mean;
  d["se"] = s.se;
  return d;
}

py::dict estimate_dict(const stochastic::EstimateResult& e) {
  py::dict d;
  d["epsilon"] = e.epsilon;
  d["replications"] = e.replications;
  d["z1"] = e.z1;
  d["z1_se"] = e.z1_se;
  d["z2"] = e.z2;
  d["z2_se"] = e.z2_se;
  d["costs"] = costs_dict(e.mean_costs);
  d["cost_se"] = costs_dict(e.cost_se);
  d["initial_inventory"] = e.initial_inventory;
  d["mean_inventory"] = e.mean_inventory;
  return d;
}

pareto::Spacing spacing_of(const std::string& s) {
  if (s == "log") return pareto::Spacing::Log;
  if (s == "linear") return pareto::Spacing::Linear;
  throw ConfigError("spacing must be 'log' or 'linear'");
}

des::Backlog backlog_of(const std::string& s) {
  if (s == "wait") return des::Backlog::Wait;
  if (s == "drop") return des::Backlog::Drop;
  throw ConfigError("backlog must be 'wait' or 'drop'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Food supply chain design, optimization and validation";
  m.attr("__version__") = CHAINFORGE_VERSION;

  auto base = py::register_exception<Error>(m, "ChainforgeError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<LinkageError>(m, "LinkageError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InfeasibleConfig>(m, "InfeasibleConfig", base.ptr());
  py::register_exception<InfeasibleBounds>(m, "InfeasibleBounds", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<InfeasiblePeriod>(m, "InfeasiblePeriod", base.ptr());

  py::class_<NetworkInstance>(m, "Instance")
      .def_readonly("name", &NetworkInstance::name)
      .def_readwrite("horizon", &NetworkInstance::horizon)
      .def_readwrite("safety_stock_fraction", &NetworkInstance::safety_stock_fraction)
      .def_property_readonly("warehouse_ids",
                             [](const NetworkInstance& i) {
                               std::vector<std::string> ids;
                               for (const auto& w : i.warehouses) ids.push_back(w.id);
                               return ids;
                             })
      .def_property_readonly("region_ids",
                             [](const NetworkInstance& i) {
                               std::vector<std::string> ids;
                               for (const auto& r : i.regions) ids.push_back(r.id);
                               return ids;
                             })
      .def_property_readonly("dc_ids",
                             [](const NetworkInstance& i) {
                               std::vector<std::string> ids;
                               for (const auto& d : i.dcs) ids.push_back(d.id);
                               return ids;
                             })
      .def_property_readonly("customer_ids",
                             [](const NetworkInstance& i) {
                               std::vector<std::string> ids;
                               for (const auto& c : i.customers) ids.push_back(c.id);
                               return ids;
                             })
      .def("validate", &NetworkInstance::validate)
      .def("to_json", [](const NetworkInstance& i) { return instance_to_json(i).dump(); })
      .def("__repr__", [](const NetworkInstance& i) {
        return "<Instance '" + i.name + "': " + std::to_string(i.warehouses.size()) +
               " warehouses, " + std::to_string(i.dcs.size()) + " DCs, " +
               std::to_string(i.customers.size()) + " customers>";
      });

  py::class_<NetworkDesign>(m, "Design")
      .def_property_readonly("dc_locations",
                             [](const NetworkDesign& d) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& p : d.dc_locations) out.emplace_back(p.x, p.y);
                               return out;
                             })
      .def_readonly("dc_supplier", &NetworkDesign::dc_supplier)
      .def_readonly("customer_dc", &NetworkDesign::customer_dc)
      .def_readonly("distances", &NetworkDesign::distances);

  m.def("load_instance", &load_instance, py::arg("path"), "Reads and validates an instance file.");
  m.def(
      "parse_instance", [](const std::string& text) { return parse_instance(nlohmann::json::parse(text)); },
      py::arg("text"), "Parses an instance from JSON text.");
  m.def("load_design", &report::load_design, py::arg("instance"), py::arg("path"));
  m.def(
      "make_design",
      [](const NetworkInstance& inst, const std::vector<std::pair<double, double>>& sites,
         std::vector<std::size_t> dc_supplier, std::vector<std::size_t> customer_dc) {
        std::vector<Point> pts;
        for (const auto& [x, y] : sites) pts.push_back({x, y});
        auto d = make_design(inst, std::move(pts), std::move(dc_supplier), std::move(customer_dc));
        validate_design(inst, d);
        return d;
      },
      py::arg("instance"), py::arg("dc_locations"), py::arg("dc_supplier"), py::arg("customer_dc"));

  m.def(
      "weiszfeld",
      [](const std::vector<std::tuple<double, double, double>>& points, double tolerance,
         int max_iterations) {
        std::vector<gfa::WeightedPoint> pts;
        for (const auto& [x, y, w] : points) pts.push_back({{x, y}, w});
        gfa::GfaConfig cfg;
        cfg.tolerance = tolerance;
        cfg.max_iterations = max_iterations;
        const auto r = gfa::weiszfeld_single(pts, cfg);
        py::dict d;
        d["location"] = py::make_tuple(r.location.x, r.location.y);
        d["objective"] = r.objective;
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        d["trace"] = r.objective_trace;
        return d;
      },
      py::arg("points"), py::arg("tolerance") = 1e-4, py::arg("max_iterations") = 1000,
      "Single-facility weighted median of (x, y, weight) points.");

  m.def(
      "run_gfa",
      [](const NetworkInstance& inst, std::uint64_t seed, int restarts) {
        gfa::GfaConfig cfg;
        cfg.rng_seed = seed;
        cfg.restarts = restarts;
        gfa::GfaResult r;
        {
          py::gil_scoped_release release;
          r = gfa::run_gfa(inst, cfg);
        }
        py::dict regions;
        for (const auto& s : r.regions) regions[py::str(s.region_id)] = s.objective;
        return py::make_tuple(r.design, regions);
      },
      py::arg("instance"), py::arg("seed") = 42, py::arg("restarts") = 8,
      "Places DCs and links the network; returns (design, {region: W}).");

  m.def(
      "estimate",
      [](const NetworkInstance& inst, const NetworkDesign& design, double epsilon,
         int replications, std::uint64_t seed, int jobs) {
        stochastic::EstimateOptions opt;
        opt.jobs = jobs;
        stochastic::EstimateResult r;
        {
          py::gil_scoped_release release;
          r = stochastic::estimate_objectives(inst, design, epsilon, replications, seed, opt);
        }
        return estimate_dict(r);
      },
      py::arg("instance"), py::arg("design"), py::arg("epsilon"), py::arg("replications") = 50,
      py::arg("seed") = 42, py::arg("jobs") = 1,
      "Monte Carlo estimate of Z1 (accessibility) and Z2 (cost) at one epsilon.");

  m.def("parse_grid",
        [](const std::string& text, const std::string& spacing) {
          return pareto::parse_grid(text, spacing_of(spacing));
        },
        py::arg("text"), py::arg("spacing") = "log");

  m.def(
      "extract_front",
      [](const std::vector<double>& z1, const std::vector<double>& z2,
         std::optional<std::vector<double>> epsilon) {
        if (z1.size() != z2.size() || (epsilon && epsilon->size() != z1.size())) {
          throw ConfigError("z1, z2 and epsilon must have equal lengths");
        }
        std::vector<pareto::ObjectivePoint> pts;
        for (std::size_t i = 0; i < z1.size(); ++i) {
          pts.push_back({z1[i], z2[i], epsilon ? (*epsilon)[i] : 0.0});
        }
        return pareto::extract_front(pts);
      },
      py::arg("z1"), py::arg("z2"), py::arg("epsilon") = py::none(),
      "Indices of non-dominated points (maximize z1, minimize z2) by increasing z2.");

  m.def(
      "validate",
      [](const NetworkInstance& inst, const NetworkDesign& design, double epsilon,
         int replications, int runs, std::uint64_t seed, const std::string& backlog,
         int orders_per_period, double lead_time, int jobs) {
        des::SimConfig cfg;
        cfg.backlog = backlog_of(backlog);
        cfg.orders_per_period = orders_per_period;
        cfg.lead_time = lead_time;
        des::ValidationSummary v;
        stochastic::EstimateResult est;
        {
          py::gil_scoped_release release;
          stochastic::EstimateOptions opt;
          opt.jobs = jobs;
          est = stochastic::estimate_objectives(inst, design, epsilon, replications, seed, opt);
          const auto plan = make_plan(inst, design, est, seed);
          v = des::validate_plan(inst, design, plan, cfg, runs, seed, jobs);
        }
        py::dict d;
        d["optimizer"] = estimate_dict(est);
        d["inventory_cost"] = statistic(v.inventory_cost);
        d["unfulfilled_cost"] = statistic(v.unfulfilled_cost);
        d["order_cost"] = statistic(v.order_cost);
        d["total_cost"] = statistic(v.total_cost);
        d["service"] = statistic(v.service);
        py::dict regions;
        for (std::size_t i = 0; i < inst.regions.size(); ++i) {
          regions[py::str(inst.regions[i].id)] = statistic(v.region_service[i]);
        }
        d["region_service"] = regions;
        return d;
      },
      py::arg("instance"), py::arg("design"), py::arg("epsilon"), py::arg("replications") = 50,
      py::arg("runs") = 30, py::arg("seed") = 42, py::arg("backlog") = "wait",
      py::arg("orders_per_period") = 1, py::arg("lead_time") = 0.0, py::arg("jobs") = 1,
      "Optimizes one epsilon, then replays the plan by simulation.");

  m.def(
      "run_pipeline",
      [](const std::filesystem::path& instance, const std::filesystem::path& out,
         std::uint64_t seed, int jobs, const std::string& epsilon_grid, int replications,
         int runs, const std::string& backlog) {
        pipeline::Options o;
        o.instance = instance;
        o.out = out;
        o.seed = seed;
        o.jobs = jobs;
        o.epsilon_grid = epsilon_grid;
        o.replications = replications;
        o.runs = runs;
        o.backlog = backlog_of(backlog);
        pipeline::Artifacts written;
        {
          py::gil_scoped_release release;
          written = pipeline::run_pipeline(o);
        }
        std::vector<std::string> names;
        for (const auto& a : written) names.push_back(a.generic_string());
        return names;
      },
      py::arg("instance"), py::arg("out"), py::arg("seed") = 42, py::arg("jobs") = 1,
      py::arg("epsilon_grid") = pipeline::kDefaultEpsilonGrid, py::arg("replications") = 50,
      py::arg("runs") = 30, py::arg("backlog") = "wait",
      "Runs gfa, optimize, pareto and validate; returns the files written under out.");

  m.def("affordability", [](double local_food_cost, double average_income) {
    Region r;
    r.local_food_cost = local_food_cost;
    r.average_income = average_income;
    return accessibility::affordability(r);
  }, py::arg("local_food_cost"), py::arg("average_income"));
}
