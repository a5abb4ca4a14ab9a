#include "dirkit/prob.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dirkit/demands.hpp"

namespace dirkit {

namespace {

// Compensated summation; pmf tables can be ~1e6 entries and the
// normalization check is at 1e-12.
double kahan_sum(const std::vector<double>& xs) {
  double sum = 0.0, c = 0.0;
  for (double x : xs) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

}  // namespace

std::string sink_set_name(SinkMask k) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (int j = 1; k != 0; ++j, k >>= 1) {
    if (k & 1u) {
      if (!first) out << ',';
      out << j;
      first = false;
    }
  }
  out << '}';
  return out.str();
}

void VarSubset::normalize() {
  std::sort(indices.begin(), indices.end());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0) throw ValidationError("VarSubset: negative index");
    if (i > 0 && indices[i] == indices[i - 1])
      throw ValidationError("VarSubset: duplicate index " + std::to_string(indices[i]));
  }
}

VarMask VarSubset::mask() const {
  VarMask m = 0;
  for (int v : indices) {
    if (v >= 64) throw ValidationError("VarSubset: index out of mask range");
    m |= VarMask{1} << v;
  }
  return m;
}

JointPmf::JointPmf(std::vector<Variable> vars, std::vector<double> probs)
    : vars_(std::move(vars)), probs_(std::move(probs)) {
  if (vars_.empty()) throw ValidationError("JointPmf: no variables");
  if (vars_.size() > 48) throw ValidationError("JointPmf: too many variables");

  std::set<std::string> names;
  std::set<std::pair<int, SinkMask>> aux_labels;
  std::size_t total = 1;
  for (const Variable& v : vars_) {
    if (v.alphabet < 1) throw ValidationError("JointPmf: variable '" + v.name + "' has empty alphabet");
    if (!names.insert(v.name).second)
      throw ValidationError("JointPmf: duplicate variable name '" + v.name + "'");
    if (v.role == VarRole::Auxiliary) {
      if (!aux_labels.insert({v.source, v.sinks}).second)
        throw ValidationError("JointPmf: duplicate auxiliary label on '" + v.name + "'");
    }
    if (total > std::size_t{1} << 40)
      throw ValidationError("JointPmf: table too large");
    total *= static_cast<std::size_t>(v.alphabet);
  }
  if (probs_.size() != total)
    throw ValidationError("JointPmf: got " + std::to_string(probs_.size()) +
                          " probabilities, expected " + std::to_string(total));
  for (double p : probs_)
    if (!(p >= 0.0)) throw ValidationError("JointPmf: negative probability entry");
  double sum = kahan_sum(probs_);
  if (std::abs(sum - 1.0) > 1e-12)
    throw ValidationError("JointPmf: probabilities sum to " + std::to_string(sum) +
                          ", expected 1 within 1e-12");

  strides_.assign(vars_.size(), 1);
  for (std::size_t v = vars_.size(); v-- > 1;)
    strides_[v - 1] = strides_[v] * static_cast<std::size_t>(vars_[v].alphabet);
}

std::optional<int> JointPmf::index_of(std::string_view name) const {
  for (std::size_t v = 0; v < vars_.size(); ++v)
    if (vars_[v].name == name) return static_cast<int>(v);
  return std::nullopt;
}

std::vector<double> JointPmf::marginal_table(VarMask m) const {
  std::vector<int> kept;
  for (int v = 0; v < var_count(); ++v)
    if (m & (VarMask{1} << v)) kept.push_back(v);

  std::size_t out_size = 1;
  std::vector<std::size_t> out_stride(kept.size(), 1);
  for (std::size_t t = kept.size(); t-- > 0;) {
    out_stride[t] = out_size;
    out_size *= static_cast<std::size_t>(vars_[static_cast<std::size_t>(kept[t])].alphabet);
  }

  std::vector<double> out(out_size, 0.0);
  for (std::size_t f = 0; f < probs_.size(); ++f) {
    double p = probs_[f];
    if (p == 0.0) continue;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < kept.size(); ++t)
      idx += static_cast<std::size_t>(symbol_at(f, kept[t])) * out_stride[t];
    out[idx] += p;
  }
  return out;
}

JointPmf JointPmf::marginalize(const VarSubset& keep) const {
  if (keep.empty()) throw ValidationError("marginalize: empty keep set");
  for (int v : keep.indices)
    if (v >= var_count()) throw ValidationError("marginalize: index out of range");
  std::vector<Variable> kept_vars;
  for (int v : keep.indices) kept_vars.push_back(vars_[static_cast<std::size_t>(v)]);
  std::vector<double> table = marginal_table(keep.mask());
  // Renormalize away accumulated rounding so the invariant holds exactly.
  double sum = kahan_sum(table);
  if (sum > 0.0)
    for (double& p : table) p /= sum;
  return JointPmf(std::move(kept_vars), std::move(table));
}

double JointPmf::entropy_mask(VarMask m) const {
  if (m == 0) return 0.0;
  std::vector<double> table = marginal_table(m);
  double h = 0.0, c = 0.0;
  for (double p : table) {
    double x = plogp(p) - c;
    double t = h + x;
    c = (t - h) - x;
    h = t;
  }
  return h < 0.0 ? 0.0 : h;
}

double JointPmf::cond_entropy(const VarSubset& target, const VarSubset& given) const {
  if (target.empty()) throw ValidationError("cond_entropy: empty target");
  VarMask t = target.mask(), g = given.mask();
  if (t & g) throw ValidationError("cond_entropy: target and given overlap");
  for (int v : target.indices)
    if (v >= var_count()) throw ValidationError("cond_entropy: index out of range");
  for (int v : given.indices)
    if (v >= var_count()) throw ValidationError("cond_entropy: index out of range");
  double h = entropy_mask(t | g) - entropy_mask(g);
  return h < 0.0 ? 0.0 : h;
}

double JointPmf::mutual_info(const VarSubset& a, const VarSubset& b,
                             const VarSubset& given) const {
  VarMask ma = a.mask(), mb = b.mask(), mg = given.mask();
  if ((ma & mb) || (ma & mg) || (mb & mg))
    throw ValidationError("mutual_info: subsets overlap");
  for (int v : a.indices)
    if (v >= var_count()) throw ValidationError("mutual_info: index out of range");
  for (int v : b.indices)
    if (v >= var_count()) throw ValidationError("mutual_info: index out of range");
  for (int v : given.indices)
    if (v >= var_count()) throw ValidationError("mutual_info: index out of range");
  double i = entropy_mask(ma | mg) + entropy_mask(mb | mg) - entropy_mask(mg) -
             entropy_mask(ma | mb | mg);
  return i < 0.0 ? 0.0 : i;
}

double EntropyCache::entropy(VarMask m) const {
  if (m == 0) return 0.0;
  auto it = memo_.find(m);
  if (it != memo_.end()) return it->second;
  double h = pmf_->entropy_mask(m);
  memo_.emplace(m, h);
  return h;
}

double EntropyCache::mutual(VarMask a, VarMask b, VarMask given) const {
  double i = entropy(a | given) + entropy(b | given) - entropy(given) - entropy(a | b | given);
  return i < 0.0 ? 0.0 : i;
}

double hb(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("hb: p outside [0,1]");
  return plogp(p) + plogp(1.0 - p);
}

double bsc_convolve(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
    throw ValidationError("bsc_convolve: probability outside [0,1]");
  return p * (1.0 - q) + q * (1.0 - p);
}

double solve_crossover(double p_base, double target_entropy) {
  if (!(p_base >= 0.0 && p_base <= 1.0))
    throw ValidationError("solve_crossover: p_base outside [0,1]");
  double lo_val = hb(p_base);
  if (target_entropy < lo_val - 1e-12 || target_entropy > 1.0 + 1e-12)
    throw ValidationError("solve_crossover: target entropy outside [hb(p_base), 1]");
  double target = std::min(std::max(target_entropy, lo_val), 1.0);

  // hb(bsc_convolve(p_base, x)) is nondecreasing on x in [0, 1/2].
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    if (hb(bsc_convolve(p_base, mid)) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// --- Markov factorization check -------------------------------------------

DemandMap DemandMap::from_sigma(int num_sources, std::vector<SourceMask> sigma_in) {
  if (num_sources <= 0) throw ValidationError("DemandMap: no sources");
  if (sigma_in.empty()) throw ValidationError("DemandMap: no sinks");
  DemandMap d;
  d.num_sources = num_sources;
  d.num_sinks = static_cast<int>(sigma_in.size());
  d.sigma = std::move(sigma_in);
  d.pi.assign(static_cast<std::size_t>(num_sources), 0);
  SourceMask all = num_sources >= 32 ? ~SourceMask{0} : ((SourceMask{1} << num_sources) - 1);
  for (int j = 1; j <= d.num_sinks; ++j) {
    SourceMask s = d.sigma[static_cast<std::size_t>(j - 1)];
    if (s == 0) throw ValidationError("DemandMap: sink " + std::to_string(j) + " requests nothing");
    if (s & ~all) throw ValidationError("DemandMap: sink " + std::to_string(j) + " requests unknown source");
    for (int i = 0; i < num_sources; ++i)
      if (s & (SourceMask{1} << i)) d.pi[static_cast<std::size_t>(i)] |= SinkMask{1} << (j - 1);
  }
  return d;
}

std::string PacketId::name() const {
  return "P[" + std::to_string(source) + "," + sink_set_name(sinks) + "]";
}

std::string MarkovCheck::summary() const {
  if (ok) return "ok";
  std::ostringstream out;
  out << "Markov factorization violated at sink " << worst_sink << ": entry (" << worst_entry
      << ") has P=" << lhs << " but factorized product " << rhs << " (|diff|=" << worst_abs_err
      << ")";
  return out.str();
}

MarkovCheck validate_markov(const JointPmf& pmf, const DemandMap& demands, double tol) {
  const int n_vars = pmf.var_count();
  std::vector<int> x_of_source(static_cast<std::size_t>(demands.num_sources), -1);
  for (int v = 0; v < n_vars; ++v) {
    const Variable& var = pmf.var(v);
    if (var.role == VarRole::Source) {
      if (var.source < 0 || var.source >= demands.num_sources)
        throw ValidationError("validate_markov: source variable '" + var.name +
                              "' outside the demand map");
      x_of_source[static_cast<std::size_t>(var.source)] = v;
    } else {
      if (var.source < 0 || var.source >= demands.num_sources)
        throw ValidationError("validate_markov: auxiliary '" + var.name +
                              "' has unlabeled origin source");
      if (var.sinks == 0 || (var.sinks & ~demands.all_sinks()))
        throw ValidationError("validate_markov: auxiliary '" + var.name +
                              "' has invalid sink subset");
    }
  }
  for (int i = 0; i < demands.num_sources; ++i)
    if (x_of_source[static_cast<std::size_t>(i)] < 0)
      throw ValidationError("validate_markov: pmf is missing source variable " +
                            std::to_string(i));

  VarMask x_all = 0;
  for (int v : x_of_source) x_all |= VarMask{1} << v;

  MarkovCheck check;
  for (int j = 1; j <= demands.num_sinks; ++j) {
    // U-groups reaching sink j, per origin source.
    std::vector<VarMask> u_of(static_cast<std::size_t>(demands.num_sources), 0);
    VarMask u_all = 0;
    for (int v = 0; v < n_vars; ++v) {
      const Variable& var = pmf.var(v);
      if (var.role == VarRole::Auxiliary && (var.sinks & (SinkMask{1} << (j - 1)))) {
        u_of[static_cast<std::size_t>(var.source)] |= VarMask{1} << v;
        u_all |= VarMask{1} << v;
      }
    }
    if (u_all == 0) continue;  // constants always factor

    VarMask joint_mask = x_all | u_all;
    std::vector<int> joint_vars;
    for (int v = 0; v < n_vars; ++v)
      if (joint_mask & (VarMask{1} << v)) joint_vars.push_back(v);

    std::vector<double> lhs_table = pmf.marginal_table(joint_mask);
    std::vector<double> x_table = pmf.marginal_table(x_all);

    // Per-source conditional tables P({U_i}_J(j) | X_i).
    struct CondGroup {
      int xi = 0;                       // pmf position of X_i
      std::vector<int> uvars;           // pmf positions of the group, ascending
      std::vector<double> joint, marg;  // P(X_i, group), P(X_i)
    };
    std::vector<CondGroup> groups;
    for (int i = 0; i < demands.num_sources; ++i) {
      if (u_of[static_cast<std::size_t>(i)] == 0) continue;
      CondGroup g;
      g.xi = x_of_source[static_cast<std::size_t>(i)];
      for (int v = 0; v < n_vars; ++v)
        if (u_of[static_cast<std::size_t>(i)] & (VarMask{1} << v)) g.uvars.push_back(v);
      g.joint = pmf.marginal_table(u_of[static_cast<std::size_t>(i)] | (VarMask{1} << g.xi));
      g.marg = pmf.marginal_table(VarMask{1} << g.xi);
      groups.push_back(std::move(g));
    }

    // Walk the (X-all, U-at-j) table entrywise.
    std::vector<int> sym(joint_vars.size(), 0);
    const std::size_t lhs_size = lhs_table.size();
    for (std::size_t flat = 0; flat < lhs_size; ++flat) {
      // Decode symbols of joint_vars (row-major, ascending positions).
      {
        std::size_t rem = flat;
        for (std::size_t t = joint_vars.size(); t-- > 0;) {
          int a = pmf.var(joint_vars[t]).alphabet;
          sym[t] = static_cast<int>(rem % static_cast<std::size_t>(a));
          rem /= static_cast<std::size_t>(a);
        }
      }
      auto symbol_of = [&](int v) {
        auto it = std::lower_bound(joint_vars.begin(), joint_vars.end(), v);
        return sym[static_cast<std::size_t>(it - joint_vars.begin())];
      };

      // P({X}) factor.
      std::size_t xi_idx = 0;
      for (int v = 0; v < n_vars; ++v)
        if (x_all & (VarMask{1} << v))
          xi_idx = xi_idx * static_cast<std::size_t>(pmf.var(v).alphabet) +
                   static_cast<std::size_t>(symbol_of(v));
      double rhs = x_table[xi_idx];

      for (const CondGroup& g : groups) {
        if (rhs == 0.0) break;
        // Index into P(X_i, group): variables ascending by pmf position.
        std::vector<int> grp = g.uvars;
        grp.push_back(g.xi);
        std::sort(grp.begin(), grp.end());
        std::size_t jidx = 0;
        for (int v : grp)
          jidx = jidx * static_cast<std::size_t>(pmf.var(v).alphabet) +
                 static_cast<std::size_t>(symbol_of(v));
        double pxi = g.marg[static_cast<std::size_t>(symbol_of(g.xi))];
        rhs *= pxi > 0.0 ? g.joint[jidx] / pxi : 0.0;
      }

      double lhs = lhs_table[flat];
      double err = std::abs(lhs - rhs);
      if (err > check.worst_abs_err) {
        check.worst_abs_err = err;
        check.worst_sink = j;
        check.lhs = lhs;
        check.rhs = rhs;
        std::ostringstream entry;
        for (std::size_t t = 0; t < joint_vars.size(); ++t) {
          if (t) entry << ", ";
          entry << pmf.var(joint_vars[t]).name << "=" << sym[t];
        }
        check.worst_entry = entry.str();
      }
    }
  }
  check.ok = check.worst_abs_err <= tol;
  if (check.ok) check.worst_sink = 0;
  return check;
}

}  // namespace dirkit
