#include "dirkit/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace dirkit {

namespace {

using nlohmann::json;

std::string fmt_sig(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key))
    throw ValidationError(path + ": missing required field '" + key + "'");
  return j.at(key);
}

}  // namespace

VarSubset Scenario::source_vars() const {
  std::vector<int> ix;
  for (int v = 0; v < pmf.var_count(); ++v)
    if (pmf.var(v).role == VarRole::Source) ix.push_back(v);
  return VarSubset(std::move(ix));
}

Scenario scenario_from_json_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(origin + ": " + e.what());
  }

  try {
    // Sources.
    const json& jsources = require(doc, "sources", origin);
    if (!jsources.is_array() || jsources.empty())
      throw ValidationError("sources: must be a nonempty array");
    if (jsources.size() > static_cast<std::size_t>(kMaxSources))
      throw ValidationError("sources: at most " + std::to_string(kMaxSources) +
                            " sources supported");
    std::vector<Variable> vars;
    for (std::size_t i = 0; i < jsources.size(); ++i) {
      const json& js = jsources[i];
      Variable v;
      v.name = require(js, "name", "sources[" + std::to_string(i) + "]").get<std::string>();
      v.role = VarRole::Source;
      v.source = static_cast<int>(i);
      v.alphabet = require(js, "alphabet", "sources[" + std::to_string(i) + "]").get<int>();
      if (v.alphabet < 1 || v.alphabet > kMaxAlphabet)
        throw ValidationError("sources[" + std::to_string(i) + "].alphabet: must be in [1," +
                              std::to_string(kMaxAlphabet) + "]");
      vars.push_back(std::move(v));
    }
    const int num_sources = static_cast<int>(vars.size());

    // Network.
    const json& jnet = require(doc, "network", origin);
    std::vector<NetNode> nodes;
    for (const json& jn : require(jnet, "nodes", "network")) {
      NetNode node;
      node.id = require(jn, "id", "network.nodes[]").get<std::string>();
      const bool is_source = jn.contains("source");
      const bool is_sink = jn.contains("sink");
      if (is_source && is_sink)
        throw ValidationError("network.nodes['" + node.id + "']: node cannot be both source and sink");
      if (is_source) {
        node.kind = NodeKind::Source;
        node.index = jn.at("source").get<int>();
      } else if (is_sink) {
        node.kind = NodeKind::Sink;
        node.index = jn.at("sink").get<int>();
      }
      nodes.push_back(std::move(node));
    }
    std::vector<NetEdge> edges;
    auto find_node = [&](const std::string& id, const std::string& path) {
      for (std::size_t v = 0; v < nodes.size(); ++v)
        if (nodes[v].id == id) return static_cast<int>(v);
      throw ValidationError(path + ": unknown node id '" + id + "'");
    };
    for (const json& je : require(jnet, "edges", "network")) {
      NetEdge e;
      e.u = find_node(require(je, "u", "network.edges[]").get<std::string>(), "network.edges[].u");
      e.v = find_node(require(je, "v", "network.edges[]").get<std::string>(), "network.edges[].v");
      e.weight = require(je, "weight", "network.edges[]").get<double>();
      if (!(e.weight >= 0.0)) throw ValidationError("network.edges[]: negative weight");
      edges.push_back(e);
    }
    Network network(std::move(nodes), std::move(edges));
    if (network.num_sources() != num_sources)
      throw ValidationError("network: source nodes do not match the declared sources (" +
                            std::to_string(network.num_sources()) + " vs " +
                            std::to_string(num_sources) + ")");
    if (network.num_sinks() < 1) throw ValidationError("network: no sink nodes");
    if (network.num_sinks() > kMaxSinks)
      throw ValidationError("network: at most " + std::to_string(kMaxSinks) + " sinks supported");
    const int num_sinks = network.num_sinks();

    // Demands, keyed by sink node id, listing source names.
    const json& jdem = require(doc, "demands", origin);
    std::vector<SourceMask> sigma(static_cast<std::size_t>(num_sinks), 0);
    for (const auto& [key, value] : jdem.items()) {
      int node_ix = network.find_node(key);
      if (node_ix < 0 || network.node(node_ix).kind != NodeKind::Sink)
        throw ValidationError("demands['" + key + "']: not a sink node id");
      int j = network.node(node_ix).index;
      if (!value.is_array() || value.empty())
        throw ValidationError("demands['" + key + "']: must be a nonempty array of source names");
      for (const json& jname : value) {
        const std::string name = jname.get<std::string>();
        int source = -1;
        for (int i = 0; i < num_sources; ++i)
          if (vars[static_cast<std::size_t>(i)].name == name) source = i;
        if (source < 0)
          throw ValidationError("demands['" + key + "']: sink requests unknown source '" + name +
                                "'");
        sigma[static_cast<std::size_t>(j - 1)] |= SourceMask{1} << source;
      }
    }
    for (int j = 1; j <= num_sinks; ++j)
      if (sigma[static_cast<std::size_t>(j - 1)] == 0)
        throw ValidationError("demands: sink " + std::to_string(j) + " has no demand entry");
    DemandMap demands = DemandMap::from_sigma(num_sources, std::move(sigma));

    // Auxiliaries (optional).
    int num_aux = 0;
    if (doc.contains("auxiliaries")) {
      const json& jaux = doc.at("auxiliaries");
      for (std::size_t t = 0; t < jaux.size(); ++t) {
        const json& ja = jaux[t];
        const std::string path = "auxiliaries[" + std::to_string(t) + "]";
        Variable v;
        v.name = require(ja, "name", path).get<std::string>();
        v.role = VarRole::Auxiliary;
        v.source = require(ja, "source", path).get<int>();
        if (v.source < 0 || v.source >= num_sources)
          throw ValidationError(path + ".source: out of range");
        v.alphabet = require(ja, "alphabet", path).get<int>();
        if (v.alphabet < 1 || v.alphabet > kMaxAlphabet)
          throw ValidationError(path + ".alphabet: must be in [1," +
                                std::to_string(kMaxAlphabet) + "]");
        v.sinks = 0;
        for (const json& js : require(ja, "sinks", path)) {
          int j = js.get<int>();
          if (j < 1 || j > num_sinks) throw ValidationError(path + ".sinks: sink index out of range");
          v.sinks |= SinkMask{1} << (j - 1);
        }
        if (v.sinks == 0) throw ValidationError(path + ".sinks: must be nonempty");
        vars.push_back(std::move(v));
        ++num_aux;
      }
    }

    // Probabilities.
    auto read_pmf = [&](const json& jp, const char* path) {
      if (!jp.is_array()) throw ValidationError(std::string(path) + ": must be an array");
      std::vector<double> p;
      p.reserve(jp.size());
      for (const json& x : jp) p.push_back(x.get<double>());
      return p;
    };
    std::vector<double> source_probs = read_pmf(require(doc, "pmf", origin), "pmf");

    JointPmf pmf = [&]() {
      // Validate the declared source pmf first so diagnostics point at the
      // right field.
      std::vector<Variable> source_vars(vars.begin(), vars.begin() + num_sources);
      JointPmf declared = [&]() {
        try {
          return JointPmf(source_vars, source_probs);
        } catch (const ValidationError& e) {
          throw ValidationError(std::string("pmf: ") + e.what());
        }
      }();
      if (num_aux == 0) return declared;

      std::vector<double> full = read_pmf(require(doc, "aux_pmf", origin), "aux_pmf");
      try {
        JointPmf joint(vars, full);
        std::vector<int> keep;
        for (int i = 0; i < num_sources; ++i) keep.push_back(i);
        std::vector<double> marg = joint.marginal_table(VarSubset(keep).mask());
        for (std::size_t t = 0; t < marg.size(); ++t)
          if (std::abs(marg[t] - declared.probs()[t]) > 1e-9)
            throw ValidationError("marginal over sources disagrees with pmf at entry " +
                                  std::to_string(t));
        return joint;
      } catch (const ValidationError& e) {
        throw ValidationError(std::string("aux_pmf: ") + e.what());
      }
    }();

    if (pmf.table_size() > kMaxTableSize)
      throw ValidationError("pmf: joint table exceeds the resource cap");

    Scenario s{doc.value("name", std::string{}), std::move(pmf), num_sources, num_aux,
               std::move(network), std::move(demands), std::nullopt};
    if (doc.contains("helper") && doc.at("helper").contains("delta"))
      s.helper_delta = doc.at("helper").at("delta").get<double>();
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(origin + ": " + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json_text(buf.str(), path);
}

std::string scenario_to_json_text(const Scenario& s) {
  json doc;
  if (!s.name.empty()) doc["name"] = s.name;

  json jsources = json::array();
  for (int i = 0; i < s.num_sources; ++i) {
    const Variable& v = s.pmf.var(i);
    jsources.push_back({{"name", v.name}, {"alphabet", v.alphabet}});
  }
  doc["sources"] = jsources;

  if (s.num_aux > 0) {
    json jaux = json::array();
    for (int v = s.num_sources; v < s.pmf.var_count(); ++v) {
      const Variable& var = s.pmf.var(v);
      json sinks = json::array();
      for (int j = 1; j <= s.demands.num_sinks; ++j)
        if (var.sinks & (SinkMask{1} << (j - 1))) sinks.push_back(j);
      jaux.push_back({{"name", var.name},
                      {"source", var.source},
                      {"sinks", sinks},
                      {"alphabet", var.alphabet}});
    }
    doc["auxiliaries"] = jaux;
    doc["aux_pmf"] = s.pmf.probs();
    std::vector<int> keep;
    for (int i = 0; i < s.num_sources; ++i) keep.push_back(i);
    doc["pmf"] = s.pmf.marginal_table(VarSubset(keep).mask());
  } else {
    doc["pmf"] = s.pmf.probs();
  }

  json jnodes = json::array();
  for (const NetNode& node : s.network.nodes()) {
    json jn = {{"id", node.id}};
    if (node.kind == NodeKind::Source) jn["source"] = node.index;
    if (node.kind == NodeKind::Sink) jn["sink"] = node.index;
    jnodes.push_back(jn);
  }
  json jedges = json::array();
  for (const NetEdge& e : s.network.edges())
    jedges.push_back({{"u", s.network.node(e.u).id},
                      {"v", s.network.node(e.v).id},
                      {"weight", e.weight}});
  doc["network"] = {{"nodes", jnodes}, {"edges", jedges}};

  json jdem = json::object();
  for (int j = 1; j <= s.demands.num_sinks; ++j) {
    json names = json::array();
    for (int i = 0; i < s.num_sources; ++i)
      if (s.demands.requested_by(j) & (SourceMask{1} << i)) names.push_back(s.pmf.var(i).name);
    jdem[s.network.node(s.network.sink_node(j)).id] = names;
  }
  doc["demands"] = jdem;

  if (s.helper_delta) doc["helper"] = {{"delta", *s.helper_delta}};
  return doc.dump(2) + "\n";
}

std::string cost_mode_name(CostMode m) {
  switch (m) {
    case CostMode::Broadcast: return "broadcast";
    case CostMode::DirPower: return "dir-power";
    case CostMode::DirTheorem1: return "dir-thm1";
    case CostMode::Helper: return "helper";
  }
  return "?";
}

CostMode parse_cost_mode(const std::string& name) {
  if (name == "broadcast") return CostMode::Broadcast;
  if (name == "dir-power") return CostMode::DirPower;
  if (name == "dir-thm1") return CostMode::DirTheorem1;
  if (name == "helper") return CostMode::Helper;
  throw ValidationError("unknown mode '" + name + "' (broadcast|dir-power|dir-thm1|helper)");
}

namespace {

struct HelperShape {
  double p1 = 0.0, p2 = 0.0, delta = 0.0;
};

// Helper mode requires the 2-sink 1-helper DSBS layout: source 0 requested
// nowhere, sinks 1 and 2 reconstruct sources 1 and 2.
HelperShape helper_shape(const Scenario& s, std::optional<double> delta) {
  if (s.num_sources != 3 || s.demands.num_sinks != 2 ||
      s.demands.requested_by(1) != 0b010u || s.demands.requested_by(2) != 0b100u)
    throw ValidationError(
        "helper mode requires 3 sources with demands S1={X1}, S2={X2} (source 0 is the helper)");
  for (int i = 0; i < 3; ++i)
    if (s.pmf.var(i).alphabet != 2)
      throw ValidationError("helper mode requires binary sources");

  std::vector<double> table = s.pmf.marginal_table(s.source_vars().mask());
  auto p = [&](int x0, int x1, int x2) {
    return table[static_cast<std::size_t>(x0 * 4 + x1 * 2 + x2)];
  };
  HelperShape shape;
  double p0 = p(1, 0, 0) + p(1, 0, 1) + p(1, 1, 0) + p(1, 1, 1);
  shape.p1 = p(0, 1, 0) + p(0, 1, 1) + p(1, 0, 0) + p(1, 0, 1);
  shape.p2 = p(0, 0, 1) + p(0, 1, 1) + p(1, 0, 0) + p(1, 1, 0);
  if (std::abs(p0 - 0.5) > 1e-9)
    throw ValidationError("helper mode requires a uniform helper source X0");
  auto flip = [](int a, int b, double q) { return a == b ? 1.0 - q : q; };
  for (int x0 = 0; x0 < 2; ++x0)
    for (int x1 = 0; x1 < 2; ++x1)
      for (int x2 = 0; x2 < 2; ++x2)
        if (std::abs(p(x0, x1, x2) - 0.5 * flip(x1, x0, shape.p1) * flip(x2, x0, shape.p2)) > 1e-9)
          throw ValidationError(
              "helper mode requires the DSBS shape X1 <- BSC(p1) <- X0 -> BSC(p2) -> X2");
  if (shape.p1 > 0.5 || shape.p2 > 0.5)
    throw ValidationError("helper mode requires crossovers at most 1/2");

  if (delta)
    shape.delta = *delta;
  else if (s.helper_delta)
    shape.delta = *s.helper_delta;
  else
    throw ValidationError("helper mode needs a rate excess: pass --delta or set helper.delta");
  if (shape.delta < 0.0) throw ValidationError("helper mode: delta must be nonnegative");
  return shape;
}

}  // namespace

RateRegion build_region(const Scenario& s, CostMode mode, bool no_helpers,
                        std::optional<double> delta) {
  switch (mode) {
    case CostMode::Broadcast:
      return broadcast_region(s.pmf, s.demands);
    case CostMode::DirPower:
      return power_binning_region(s.pmf, s.demands);
    case CostMode::DirTheorem1: {
      if (!s.has_auxiliaries())
        throw ValidationError("dir-thm1 needs auxiliaries in the scenario");
      return theorem1_region(s.pmf, s.demands, no_helpers);
    }
    case CostMode::Helper: {
      HelperShape shape = helper_shape(s, delta);
      HelperExample ex = helper_example(shape.p1, shape.p2, shape.delta);
      return helper_region_oriented(shape.p1, shape.p2, {ex.p02, ex.p012}, ex.fine_sink);
    }
  }
  throw ValidationError("unknown cost mode");
}

CostReport cmd_cost(const Scenario& s, CostMode mode, bool no_helpers,
                    std::optional<double> delta) {
  RateRegion region = build_region(s, mode, no_helpers, delta);

  std::map<RateVar, double> objective;
  if (mode == CostMode::Broadcast) {
    for (const RateVar& v : region.vars)
      objective[v] = steiner_weight(s.network, v.source, s.demands.requesting(v.source));
  } else {
    const bool restrict = mode == CostMode::DirPower || (mode == CostMode::DirTheorem1 && no_helpers);
    EffectiveCostTable table = effective_costs(s.network, s.demands, restrict);
    for (const RateVar& v : region.vars)
      if (v.kind == RateKind::Packet) objective[v] = table.at({v.source, v.sinks});
  }

  LinearProgram lp{region, objective};
  LpSolution sol = minimize(lp);
  if (sol.status == LpStatus::Infeasible)
    throw InfeasibleError("cost: the rate region is infeasible");
  if (sol.status != LpStatus::Optimal)
    throw std::runtime_error("cost: solver reported an unbounded program");

  CostReport report;
  report.mode = mode;
  report.optimal_cost = sol.value;
  for (const RateVar& v : region.vars) report.rates.push_back({v, sol.at(v)});
  for (const auto& [v, w] : objective) report.objective.push_back({v, w});
  for (const LinearConstraint& c : region.constraints) {
    bool seen = false;
    for (const auto& [label, value] : report.constants)
      if (label == c.label) seen = true;
    if (!seen) report.constants.push_back({c.label, c.rhs});
  }
  report.region = std::move(region);

  // The emitted cost must match the emitted rates exactly.
  double recomputed = 0.0;
  for (const auto& [v, w] : objective) recomputed += w * sol.at(v);
  if (std::abs(recomputed - report.optimal_cost) > 1e-8)
    throw std::runtime_error("cost: objective/assignment mismatch");
  return report;
}

std::string CostReport::render_text() const {
  std::ostringstream out;
  out << "mode: " << cost_mode_name(mode) << "\n";
  out << "optimal cost: " << fmt_sig(optimal_cost) << "\n\n";
  out << "rates:\n";
  std::map<RateVar, double> weight(objective.begin(), objective.end());
  for (const auto& [v, x] : rates) {
    out << "  " << v.name() << " = " << fmt_sig(x);
    auto it = weight.find(v);
    if (it != weight.end()) out << "  (cost weight " << fmt_sig(it->second) << ")";
    out << "\n";
  }
  out << "\nconstants:\n";
  for (const auto& [label, value] : constants)
    out << "  " << label << " = " << fmt_sig(value) << "\n";
  return out.str();
}

std::string region_to_csv(const RateRegion& region) {
  std::ostringstream out;
  out << "id";
  for (const RateVar& v : region.vars) out << "," << csv_quote(v.name());
  out << ",sense,rhs,rhs_desc\n";
  for (std::size_t c = 0; c < region.constraints.size(); ++c) {
    const LinearConstraint& con = region.constraints[c];
    std::vector<double> row(region.vars.size(), 0.0);
    for (const auto& [v, coeff] : con.terms)
      row[static_cast<std::size_t>(region.index_of(v))] += coeff;
    out << "c" << c;
    for (double x : row) out << "," << fmt_sig(x);
    out << ",>=," << fmt_sig(con.rhs) << "," << csv_quote(con.label) << "\n";
  }
  return out.str();
}

BinSimModel binsim_model_from_scenario(const Scenario& s) {
  JointPmf sources = s.pmf.marginalize(s.source_vars());
  return binsim_model(sources, s.demands);
}

std::string binsim_report_to_csv(const BinSimReport& report) {
  std::ostringstream out;
  out << "sink,errors,trials,error_rate,ci95_halfwidth\n";
  for (std::size_t j = 0; j < report.per_sink.size(); ++j) {
    const SinkError& e = report.per_sink[j];
    out << (j + 1) << "," << e.errors << "," << report.trials << "," << fmt_sig(e.rate) << ","
        << fmt_sig(e.ci_halfwidth) << "\n";
  }
  out << "average,," << report.trials << "," << fmt_sig(report.average) << ","
      << fmt_sig(report.average_ci) << "\n";
  return out.str();
}

std::string binsim_report_text(const BinSimReport& report) {
  std::ostringstream out;
  out << "trials: " << report.trials << "  seed: " << report.seed << "\n";
  for (std::size_t j = 0; j < report.per_sink.size(); ++j) {
    const SinkError& e = report.per_sink[j];
    out << "sink " << (j + 1) << ": block error " << fmt_sig(e.rate) << " +/- "
        << fmt_sig(e.ci_halfwidth) << " (" << e.errors << " errors)\n";
  }
  out << "averaged block error: " << fmt_sig(report.average) << " +/- "
      << fmt_sig(report.average_ci) << "\n";
  return out.str();
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "offset,n,error,ci95_halfwidth\n";
  for (const SweepRow& r : rows)
    out << fmt_sig(r.offset) << "," << r.blocklength << "," << fmt_sig(r.error) << ","
        << fmt_sig(r.ci) << "\n";
  return out.str();
}

std::string helper_sweep_to_csv(const HelperSweepResult& r) {
  std::ostringstream out;
  out << "p02,p012,fine_sink,rate_common,rate_fine,rate_sink1,rate_sink2,cost\n";
  out << fmt_sig(r.aux.p02) << "," << fmt_sig(r.aux.p012) << "," << r.fine_sink << ","
      << fmt_sig(r.rate_common) << "," << fmt_sig(r.rate_fine) << "," << fmt_sig(r.rate_sink1)
      << "," << fmt_sig(r.rate_sink2) << "," << fmt_sig(r.cost) << "\n";
  return out.str();
}

}  // namespace dirkit
