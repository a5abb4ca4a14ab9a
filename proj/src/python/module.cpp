#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dirkit/binsim.hpp"
#include "dirkit/lp.hpp"
#include "dirkit/network.hpp"
#include "dirkit/prob.hpp"
#include "dirkit/region.hpp"
#include "dirkit/scenario.hpp"

namespace py = pybind11;
using namespace dirkit;

namespace {

VarRole parse_role(const std::string& role) {
  if (role == "source") return VarRole::Source;
  if (role == "aux" || role == "auxiliary") return VarRole::Auxiliary;
  throw ValidationError("variable role must be 'source' or 'aux'");
}

SinkMask sinks_to_mask(const std::vector<int>& sinks) {
  SinkMask m = 0;
  for (int j : sinks) {
    if (j < 1 || j > 31) throw ValidationError("sink indices are 1-based");
    m |= SinkMask{1} << (j - 1);
  }
  return m;
}

RateVar var_by_name(const RateRegion& region, const std::string& name) {
  for (const RateVar& v : region.vars)
    if (v.name() == name) return v;
  throw ValidationError("region has no variable named '" + name + "'");
}

py::dict solution_to_dict(const LpSolution& sol) {
  py::dict out;
  switch (sol.status) {
    case LpStatus::Optimal: out["status"] = "optimal"; break;
    case LpStatus::Infeasible: out["status"] = "infeasible"; break;
    case LpStatus::Unbounded: out["status"] = "unbounded"; break;
  }
  out["value"] = sol.value;
  py::dict assignment;
  for (const auto& [v, x] : sol.assignment) assignment[py::str(v.name())] = x;
  out["assignment"] = assignment;
  return out;
}

LpSolution solve_named(const RateRegion& region, const py::dict& objective, bool oracle) {
  LinearProgram lp;
  lp.region = region;
  for (const auto& item : objective)
    lp.objective[var_by_name(region, py::cast<std::string>(item.first))] =
        py::cast<double>(item.second);
  return oracle ? vertex_oracle(lp) : minimize(lp);
}

py::dict report_to_dict(const BinSimReport& r) {
  py::dict out;
  py::list per_sink;
  for (const SinkError& e : r.per_sink) {
    py::dict d;
    d["errors"] = e.errors;
    d["rate"] = e.rate;
    d["ci"] = e.ci_halfwidth;
    per_sink.append(d);
  }
  out["per_sink"] = per_sink;
  out["average"] = r.average;
  out["average_ci"] = r.average_ci;
  out["trials"] = r.trials;
  out["seed"] = r.seed;
  return out;
}

py::dict cost_report_to_dict(const CostReport& r) {
  py::dict out;
  out["mode"] = cost_mode_name(r.mode);
  out["optimal_cost"] = r.optimal_cost;
  py::dict rates, weights, constants;
  for (const auto& [v, x] : r.rates) rates[py::str(v.name())] = x;
  for (const auto& [v, w] : r.objective) weights[py::str(v.name())] = w;
  for (const auto& [label, value] : r.constants) constants[py::str(label)] = value;
  out["rates"] = rates;
  out["objective"] = weights;
  out["constants"] = constants;
  out["text"] = r.render_text();
  return out;
}

}  // namespace

PYBIND11_MODULE(_dirkit, m) {
  m.doc() =
      "Minimum-cost transport of correlated sources over multi-sink networks:\n"
      "discrete entropy engine, exact Steiner costs, broadcast/DIR rate regions,\n"
      "a simplex solver, and a power-binning Monte Carlo simulator.";

  py::register_exception<ValidationError>(m, "ValidationError");
  py::register_exception<InfeasibleError>(m, "InfeasibleError");

  // probability engine
  py::class_<JointPmf>(m, "JointPmf")
      .def(py::init([](const std::vector<std::tuple<std::string, std::string, int,
                                                    std::vector<int>, int>>& vars,
                       const std::vector<double>& probs) {
             std::vector<Variable> vs;
             for (const auto& [name, role, source, sinks, alphabet] : vars)
               vs.push_back({name, parse_role(role), source, sinks_to_mask(sinks), alphabet});
             return JointPmf(std::move(vs), probs);
           }),
           py::arg("variables"), py::arg("probs"),
           "variables: list of (name, role, source, sinks, alphabet); probs row-major")
      .def_property_readonly("var_names",
                             [](const JointPmf& p) {
                               std::vector<std::string> names;
                               for (const Variable& v : p.variables()) names.push_back(v.name);
                               return names;
                             })
      .def_property_readonly("probs", [](const JointPmf& p) { return p.probs(); })
      .def("marginalize",
           [](const JointPmf& p, const std::vector<int>& keep) {
             return p.marginalize(VarSubset(keep));
           })
      .def("entropy",
           [](const JointPmf& p, const std::vector<int>& of) { return p.entropy(VarSubset(of)); })
      .def("cond_entropy",
           [](const JointPmf& p, const std::vector<int>& target, const std::vector<int>& given) {
             return p.cond_entropy(VarSubset(target), VarSubset(given));
           },
           py::arg("target"), py::arg("given") = std::vector<int>{})
      .def("mutual_info",
           [](const JointPmf& p, const std::vector<int>& a, const std::vector<int>& b,
              const std::vector<int>& given) {
             return p.mutual_info(VarSubset(a), VarSubset(b), VarSubset(given));
           },
           py::arg("a"), py::arg("b"), py::arg("given") = std::vector<int>{});

  m.def("hb", &hb, py::arg("p"), "binary entropy in bits");
  m.def("bsc_convolve", &bsc_convolve, py::arg("p"), py::arg("q"),
        "crossover of a cascade of two binary symmetric channels");
  m.def("solve_crossover", &solve_crossover, py::arg("p_base"), py::arg("target_entropy"));

  py::class_<DemandMap>(m, "DemandMap")
      .def_static("from_sigma", &DemandMap::from_sigma, py::arg("num_sources"), py::arg("sigma"),
                  "sigma: per sink, a bitmask of requested sources")
      .def_readonly("num_sources", &DemandMap::num_sources)
      .def_readonly("num_sinks", &DemandMap::num_sinks)
      .def_readonly("sigma", &DemandMap::sigma)
      .def_readonly("pi", &DemandMap::pi);

  m.def("validate_markov",
        [](const JointPmf& pmf, const DemandMap& demands) {
          MarkovCheck c = validate_markov(pmf, demands);
          py::dict out;
          out["ok"] = c.ok;
          out["worst_abs_err"] = c.worst_abs_err;
          out["summary"] = c.summary();
          return out;
        });

  // network
  py::class_<Network>(m, "Network")
      .def(py::init([](const std::vector<std::tuple<std::string, std::string, int>>& nodes,
                       const std::vector<std::tuple<std::string, std::string, double>>& edges) {
             std::vector<NetNode> ns;
             for (const auto& [id, kind, index] : nodes) {
               NodeKind k = NodeKind::Intermediate;
               if (kind == "source") k = NodeKind::Source;
               else if (kind == "sink") k = NodeKind::Sink;
               else if (!kind.empty())
                 throw ValidationError("node kind must be 'source', 'sink' or ''");
               ns.push_back({id, k, index});
             }
             std::vector<NetEdge> es;
             auto find = [&](const std::string& id) {
               for (std::size_t v = 0; v < ns.size(); ++v)
                 if (ns[v].id == id) return static_cast<int>(v);
               throw ValidationError("unknown node id '" + id + "'");
             };
             for (const auto& [u, v, w] : edges) es.push_back({find(u), find(v), w});
             return Network(std::move(ns), std::move(es));
           }),
           py::arg("nodes"), py::arg("edges"),
           "nodes: (id, 'source'|'sink'|'', index); edges: (u_id, v_id, weight)")
      .def_property_readonly("num_sources", &Network::num_sources)
      .def_property_readonly("num_sinks", &Network::num_sinks);

  m.def("steiner_weight",
        [](const Network& net, int root_source, const std::vector<int>& terminals) {
          return steiner_weight(net, root_source, sinks_to_mask(terminals));
        },
        py::arg("net"), py::arg("root_source"), py::arg("terminals"));
  m.def("effective_costs",
        [](const Network& net, const DemandMap& demands, bool no_helpers) {
          py::dict out;
          for (const auto& [packet, w] : effective_costs(net, demands, no_helpers).weight)
            out[py::str(packet.name())] = w;
          return out;
        },
        py::arg("net"), py::arg("demands"), py::arg("no_helpers") = false);

  // regions + lp
  py::class_<RateRegion>(m, "RateRegion")
      .def_property_readonly("var_names",
                             [](const RateRegion& r) {
                               std::vector<std::string> names;
                               for (const RateVar& v : r.vars) names.push_back(v.name());
                               return names;
                             })
      .def_property_readonly("constraints", [](const RateRegion& r) {
        py::list out;
        for (const LinearConstraint& c : r.constraints) {
          py::dict terms;
          for (const auto& [v, coeff] : c.terms) terms[py::str(v.name())] = coeff;
          out.append(py::make_tuple(terms, c.rhs, c.label));
        }
        return out;
      });

  m.def("enumerate_qstar",
        [](int num_sinks) {
          if (num_sinks < 1 || num_sinks > 31)
            throw ValidationError("enumerate_qstar: bad sink count");
          std::vector<std::vector<int>> out;
          for (const SubsetFamily& f :
               enumerate_qstar((SinkMask{1} << num_sinks) - 1))
            out.push_back(std::vector<int>(f.members.begin(), f.members.end()));
          return out;
        },
        py::arg("num_sinks"),
        "superset-closed families over the nonempty sink subsets, as mask lists");

  m.def("broadcast_region", &broadcast_region);
  m.def("power_binning_region", &power_binning_region);
  m.def("theorem1_region", &theorem1_region, py::arg("pmf"), py::arg("demands"),
        py::arg("no_helpers") = false);
  m.def("helper_region",
        [](double p1, double p2, double p02, double p012) {
          return helper_region(p1, p2, {p02, p012});
        },
        py::arg("p1"), py::arg("p2"), py::arg("p02"), py::arg("p012"));
  m.def("helper_example",
        [](double p1, double p2, double delta) {
          HelperExample ex = helper_example(p1, p2, delta);
          py::dict out;
          out["p01"] = ex.p01;
          out["p02"] = ex.p02;
          out["p012"] = ex.p012;
          out["fine_sink"] = ex.fine_sink;
          out["rate_common"] = ex.rate_common;
          out["rate_fine"] = ex.rate_fine;
          out["rate_sink1"] = ex.rate_sink1;
          out["rate_sink2"] = ex.rate_sink2;
          return out;
        },
        py::arg("p1"), py::arg("p2"), py::arg("delta"));
  m.def("helper_sweep",
        [](double p1, double p2, double delta, int grid_steps) {
          HelperSweepResult r = helper_sweep(p1, p2, delta, grid_steps);
          py::dict out;
          out["p02"] = r.aux.p02;
          out["p012"] = r.aux.p012;
          out["fine_sink"] = r.fine_sink;
          out["rate_common"] = r.rate_common;
          out["rate_fine"] = r.rate_fine;
          out["rate_sink1"] = r.rate_sink1;
          out["rate_sink2"] = r.rate_sink2;
          out["cost"] = r.cost;
          return out;
        },
        py::arg("p1"), py::arg("p2"), py::arg("delta"), py::arg("grid_steps") = 200);

  m.def("minimize",
        [](const RateRegion& region, const py::dict& objective) {
          return solution_to_dict(solve_named(region, objective, false));
        },
        py::arg("region"), py::arg("objective"),
        "objective: dict mapping variable names to nonnegative weights");
  m.def("vertex_oracle",
        [](const RateRegion& region, const py::dict& objective) {
          return solution_to_dict(solve_named(region, objective, true));
        },
        py::arg("region"), py::arg("objective"));

  // binning simulator
  py::class_<BinSimModel>(m, "BinSimModel");
  m.def("dsbs_star_model", &dsbs_star_model, py::arg("p1"), py::arg("p2"));
  m.def("dsbs_pair_model", &dsbs_pair_model, py::arg("p1"));
  m.def("run_power_binning",
        [](const BinSimModel& model, int n,
           const std::vector<std::tuple<int, std::vector<int>, double>>& rates, long trials,
           std::uint64_t seed) {
          BinSimConfig cfg(model);
          cfg.blocklength = n;
          cfg.trials = trials;
          cfg.seed = seed;
          for (const auto& [source, sinks, rate] : rates)
            cfg.rates.push_back({PacketId{source, sinks_to_mask(sinks)}, rate});
          return report_to_dict(run_power_binning(cfg));
        },
        py::arg("model"), py::arg("n"), py::arg("rates"), py::arg("trials"), py::arg("seed"),
        "rates: list of (source, sinks, bits_per_symbol)");
  m.def("threshold_sweep",
        [](const BinSimModel& model, int n, const std::vector<double>& offsets, long trials,
           std::uint64_t seed) {
          BinSimConfig cfg(model);
          cfg.blocklength = n;
          cfg.trials = trials;
          cfg.seed = seed;
          py::list out;
          for (const SweepRow& r : threshold_sweep(cfg, offsets)) {
            py::dict d;
            d["offset"] = r.offset;
            d["n"] = r.blocklength;
            d["error"] = r.error;
            d["ci"] = r.ci;
            out.append(d);
          }
          return out;
        },
        py::arg("model"), py::arg("n"), py::arg("offsets"), py::arg("trials"), py::arg("seed"));

  // scenarios
  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("num_sources", &Scenario::num_sources)
      .def_readonly("num_aux", &Scenario::num_aux)
      .def_property_readonly("pmf", [](const Scenario& s) { return s.pmf; })
      .def_property_readonly("demands", [](const Scenario& s) { return s.demands; })
      .def("to_json", [](const Scenario& s) { return scenario_to_json_text(s); });

  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("scenario_from_json", &scenario_from_json_text, py::arg("text"),
        py::arg("origin") = "<string>");
  m.def("cmd_cost",
        [](const Scenario& s, const std::string& mode, bool no_helpers,
           std::optional<double> delta) {
          return cost_report_to_dict(cmd_cost(s, parse_cost_mode(mode), no_helpers, delta));
        },
        py::arg("scenario"), py::arg("mode"), py::arg("no_helpers") = false,
        py::arg("delta") = std::nullopt);
  m.def("build_region",
        [](const Scenario& s, const std::string& mode, bool no_helpers,
           std::optional<double> delta) {
          return build_region(s, parse_cost_mode(mode), no_helpers, delta);
        },
        py::arg("scenario"), py::arg("mode"), py::arg("no_helpers") = false,
        py::arg("delta") = std::nullopt);
  m.def("region_to_csv", &region_to_csv);
  m.def("binsim_model_from_scenario", &binsim_model_from_scenario);
}
