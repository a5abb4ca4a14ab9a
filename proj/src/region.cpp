#include "dirkit/region.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

namespace dirkit {

namespace {

// Ascending enumeration of the nonempty submasks of `ambient`.
std::vector<SinkMask> nonempty_submasks(SinkMask ambient) {
  std::vector<SinkMask> out;
  for (SinkMask s = 1; s <= ambient; ++s)
    if ((s & ~ambient) == 0) out.push_back(s);
  return out;
}

// Entropic rhs values carry ~1e-12 cancellation noise; alpha and gamma are
// nonnegative by the chain rule.
double clamp_nonneg(double x) { return (x < 0.0 && x > -1e-9) ? 0.0 : x; }

std::string family_name(const std::vector<SinkMask>& members) {
  std::ostringstream out;
  out << '{';
  for (std::size_t t = 0; t < members.size(); ++t) {
    if (t) out << ',';
    out << sink_set_name(members[t]);
  }
  out << '}';
  return out.str();
}

}  // namespace

std::string RateVar::name() const {
  switch (kind) {
    case RateKind::Broadcast:
      return "R[" + std::to_string(source) + "]";
    case RateKind::Packet:
      return "R[" + std::to_string(source) + "," + sink_set_name(sinks) + "]";
    case RateKind::AuxPrime:
      return "Rp[" + std::to_string(source) + "," + sink_set_name(sinks) + "]";
    case RateKind::AuxDouble:
      return "Rpp[" + std::to_string(source) + "," + sink_set_name(sinks) + "]";
    case RateKind::AuxTilde:
      return "Rt[" + std::to_string(source) + "," + sink_set_name(sinks) + "]";
  }
  return "R[?]";
}

int RateRegion::index_of(const RateVar& v) const {
  auto it = std::lower_bound(vars.begin(), vars.end(), v);
  if (it == vars.end() || *it != v) return -1;
  return static_cast<int>(it - vars.begin());
}

void RateRegion::validate() const {
  if (!std::is_sorted(vars.begin(), vars.end()))
    throw ValidationError("RateRegion: catalog not sorted");
  if (std::adjacent_find(vars.begin(), vars.end()) != vars.end())
    throw ValidationError("RateRegion: duplicate variable in catalog");
  for (const LinearConstraint& c : constraints) {
    if (c.terms.empty())
      throw ValidationError("RateRegion: constraint without variables (" + c.label + ")");
    if (!std::isfinite(c.rhs))
      throw ValidationError("RateRegion: non-finite rhs (" + c.label + ")");
    for (const auto& [v, coeff] : c.terms) {
      if (index_of(v) < 0)
        throw ValidationError("RateRegion: constraint references uncataloged " + v.name());
      if (!std::isfinite(coeff) || coeff == 0.0)
        throw ValidationError("RateRegion: bad coefficient on " + v.name());
    }
  }
}

bool SubsetFamily::contains(SinkMask k) const {
  return std::binary_search(members.begin(), members.end(), k);
}

bool superset_closed(const SubsetFamily& family, SinkMask ambient) {
  for (SinkMask k : family.members) {
    if (k == 0 || (k & ~ambient)) return false;
    const SinkMask rest = ambient & ~k;
    for (SinkMask extra = rest; extra > 0; extra = (extra - 1) & rest)
      if (!family.contains(k | extra)) return false;
  }
  return true;
}

// All upward-closed subsets of `universe` (including the empty family),
// as ascending member lists. DFS over members in decreasing-popcount order:
// a set may join only when all of its strict supersets already have.
static std::vector<std::vector<SinkMask>> upsets_of(std::vector<SinkMask> universe) {
  std::sort(universe.begin(), universe.end(), [](SinkMask a, SinkMask b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa > pb : a < b;
  });
  const std::size_t n = universe.size();
  std::vector<std::vector<std::size_t>> strict_supersets(n);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t s = 0; s < t; ++s)
      if ((universe[t] & universe[s]) == universe[t] && universe[s] != universe[t])
        strict_supersets[t].push_back(s);

  std::vector<std::vector<SinkMask>> out;
  std::vector<bool> in(n, false);
  std::vector<SinkMask> current;
  auto rec = [&](auto&& self, std::size_t t) -> void {
    if (t == n) {
      std::vector<SinkMask> members = current;
      std::sort(members.begin(), members.end());
      out.push_back(std::move(members));
      return;
    }
    self(self, t + 1);  // exclude universe[t]
    bool ok = true;
    for (std::size_t s : strict_supersets[t])
      if (!in[s]) {
        ok = false;
        break;
      }
    if (ok) {
      in[t] = true;
      current.push_back(universe[t]);
      self(self, t + 1);
      current.pop_back();
      in[t] = false;
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

std::vector<SubsetFamily> enumerate_qstar(SinkMask ambient) {
  if (ambient == 0) throw ValidationError("enumerate_qstar: empty ambient sink set");
  std::vector<SubsetFamily> out;
  for (auto& members : upsets_of(nonempty_submasks(ambient))) {
    if (members.empty()) continue;
    out.push_back(SubsetFamily{std::move(members)});
  }
  return out;
}

// --- Region generation ------------------------------------------------------

namespace {

// Shared lookup of source/auxiliary variable positions in the pmf.
struct VarIndex {
  std::vector<int> x_of_source;               // pmf position of X_i
  std::map<std::pair<int, SinkMask>, int> u;  // (i, K) -> pmf position

  static VarIndex build(const JointPmf& pmf, const DemandMap& demands) {
    VarIndex ix;
    ix.x_of_source.assign(static_cast<std::size_t>(demands.num_sources), -1);
    for (int v = 0; v < pmf.var_count(); ++v) {
      const Variable& var = pmf.var(v);
      if (var.role == VarRole::Source) {
        if (var.source < 0 || var.source >= demands.num_sources)
          throw ValidationError("region: source variable '" + var.name +
                                "' outside the demand map");
        ix.x_of_source[static_cast<std::size_t>(var.source)] = v;
      } else {
        if (var.source < 0 || var.source >= demands.num_sources)
          throw ValidationError("region: auxiliary '" + var.name + "' has unlabeled origin");
        if (var.sinks == 0 || (var.sinks & ~demands.all_sinks()))
          throw ValidationError("region: auxiliary '" + var.name + "' has invalid (i,K) label");
        ix.u[{var.source, var.sinks}] = v;
      }
    }
    for (int i = 0; i < demands.num_sources; ++i)
      if (ix.x_of_source[static_cast<std::size_t>(i)] < 0)
        throw ValidationError("region: pmf is missing source variable " + std::to_string(i));
    return ix;
  }

  VarMask x_mask(SourceMask sources) const {
    VarMask m = 0;
    for (std::size_t i = 0; i < x_of_source.size(); ++i)
      if (sources & (SourceMask{1} << i)) m |= VarMask{1} << x_of_source[i];
    return m;
  }
  // Present auxiliaries of source i over a family of sink subsets.
  VarMask u_mask(int i, const std::vector<SinkMask>& family) const {
    VarMask m = 0;
    for (SinkMask k : family) {
      auto it = u.find({i, k});
      if (it != u.end()) m |= VarMask{1} << it->second;
    }
    return m;
  }
  VarMask u_single(int i, SinkMask k) const {
    auto it = u.find({i, k});
    return it == u.end() ? 0 : VarMask{1} << it->second;
  }
};

std::string var_list_name(const JointPmf& pmf, VarMask m) {
  std::ostringstream out;
  bool first = true;
  for (int v = 0; v < pmf.var_count(); ++v)
    if (m & (VarMask{1} << v)) {
      if (!first) out << ',';
      out << pmf.var(v).name;
      first = false;
    }
  return out.str();
}

std::string cond_entropy_label(const JointPmf& pmf, VarMask target, VarMask given) {
  std::string s = "H(" + var_list_name(pmf, target);
  if (given) s += "|" + var_list_name(pmf, given);
  return s + ")";
}

// Strict supersets of k within ambient.
std::vector<SinkMask> strict_supersets_of(SinkMask k, SinkMask ambient) {
  std::vector<SinkMask> out;
  const SinkMask rest = ambient & ~k;
  for (SinkMask extra = 1; extra <= rest; ++extra)
    if ((extra & ~rest) == 0) out.push_back(k | extra);
  return out;
}

}  // namespace

RateRegion broadcast_region(const JointPmf& pmf, const DemandMap& demands) {
  VarIndex ix = VarIndex::build(pmf, demands);
  RateRegion region;
  region.provenance = RegionKind::Broadcast;
  for (int i = 0; i < demands.num_sources; ++i)
    if (demands.requesting(i) != 0) region.vars.push_back(RateVar::broadcast(i));
  std::sort(region.vars.begin(), region.vars.end());

  EntropyCache cache(pmf);
  for (int j = 1; j <= demands.num_sinks; ++j) {
    const SourceMask sigma = demands.requested_by(j);
    for (SourceMask s = 1; s <= sigma; ++s) {
      if (s & ~sigma) continue;
      LinearConstraint c;
      for (int i = 0; i < demands.num_sources; ++i)
        if (s & (SourceMask{1} << i)) c.terms.push_back({RateVar::broadcast(i), 1.0});
      VarMask target = ix.x_mask(s), given = ix.x_mask(sigma & ~s);
      c.rhs = clamp_nonneg(cache.cond(target, given));
      c.label = cond_entropy_label(pmf, target, given);
      region.constraints.push_back(std::move(c));
    }
  }
  region.validate();
  return region;
}

RateRegion power_binning_region(const JointPmf& pmf, const DemandMap& demands) {
  VarIndex ix = VarIndex::build(pmf, demands);
  RateRegion region;
  region.provenance = RegionKind::PowerBinning;
  for (int i = 0; i < demands.num_sources; ++i)
    for (SinkMask k : nonempty_submasks(demands.requesting(i)))
      region.vars.push_back(RateVar::packet(i, k));
  std::sort(region.vars.begin(), region.vars.end());

  EntropyCache cache(pmf);
  for (int j = 1; j <= demands.num_sinks; ++j) {
    const SourceMask sigma = demands.requested_by(j);
    const SinkMask jbit = SinkMask{1} << (j - 1);
    for (SourceMask s = 1; s <= sigma; ++s) {
      if (s & ~sigma) continue;
      LinearConstraint c;
      for (int i = 0; i < demands.num_sources; ++i) {
        if (!(s & (SourceMask{1} << i))) continue;
        for (SinkMask k : nonempty_submasks(demands.requesting(i)))
          if (k & jbit) c.terms.push_back({RateVar::packet(i, k), 1.0});
      }
      VarMask target = ix.x_mask(s), given = ix.x_mask(sigma & ~s);
      c.rhs = clamp_nonneg(cache.cond(target, given));
      c.label = cond_entropy_label(pmf, target, given);
      region.constraints.push_back(std::move(c));
    }
  }
  region.validate();
  return region;
}

RateRegion theorem1_region(const JointPmf& pmf, const DemandMap& demands, bool no_helpers) {
  VarIndex ix = VarIndex::build(pmf, demands);

  MarkovCheck markov = validate_markov(pmf, demands);
  if (!markov.ok) throw ValidationError("theorem1_region: " + markov.summary());

  const SinkMask all = demands.all_sinks();
  if (no_helpers)
    for (const auto& [label, pos] : ix.u)
      if (label.second & ~demands.requesting(label.first))
        throw ValidationError("theorem1_region: auxiliary '" + pmf.var(pos).name +
                              "' targets sinks outside Pi_i in no-helpers mode");

  // Per-source packet index sets.
  std::vector<std::vector<SinkMask>> packet_sets(static_cast<std::size_t>(demands.num_sources));
  std::vector<std::vector<SinkMask>> tilde_sets(static_cast<std::size_t>(demands.num_sources));
  for (int i = 0; i < demands.num_sources; ++i) {
    packet_sets[static_cast<std::size_t>(i)] =
        nonempty_submasks(no_helpers ? demands.requesting(i) : all);
    tilde_sets[static_cast<std::size_t>(i)] = nonempty_submasks(demands.requesting(i));
  }

  RateRegion region;
  region.provenance = RegionKind::Theorem1;
  for (int i = 0; i < demands.num_sources; ++i) {
    for (SinkMask k : packet_sets[static_cast<std::size_t>(i)]) {
      region.vars.push_back(RateVar::packet(i, k));
      region.vars.push_back(RateVar::prime(i, k));
      region.vars.push_back(RateVar::dbl(i, k));
    }
    for (SinkMask k : tilde_sets[static_cast<std::size_t>(i)])
      region.vars.push_back(RateVar::tilde(i, k));
  }
  std::sort(region.vars.begin(), region.vars.end());

  EntropyCache cache(pmf);
  auto x_of = [&](int i) {
    return VarMask{1} << ix.x_of_source[static_cast<std::size_t>(i)];
  };
  // H(U_{i,K} | {U_i}_{I_{|K|+}(K)}) with constants dropped; 0 if U_{i,K}
  // itself is constant.
  auto codebook_term = [&](int i, SinkMask k) {
    VarMask uk = ix.u_single(i, k);
    if (uk == 0) return 0.0;
    return cache.cond(uk, ix.u_mask(i, strict_supersets_of(k, all)));
  };

  // Codebook-size constraints, one per closed family.
  for (int i = 0; i < demands.num_sources; ++i) {
    const SinkMask ambient = no_helpers ? demands.requesting(i) : all;
    if (ambient == 0) continue;
    for (const SubsetFamily& q : enumerate_qstar(ambient)) {
      LinearConstraint c;
      for (SinkMask k : q.members) c.terms.push_back({RateVar::prime(i, k), 1.0});
      double alpha = -cache.cond(ix.u_mask(i, q.members), x_of(i));
      for (SinkMask k : q.members) alpha += codebook_term(i, k);
      c.rhs = clamp_nonneg(alpha);
      c.label = "alpha(X" + std::to_string(i) + "," + family_name(q.members) + ")";
      region.constraints.push_back(std::move(c));
    }
  }

  // Codeword bin-rate constraints at each sink, over tuples of closed
  // families (empty allowed, all-full excluded).
  for (int k = 1; k <= demands.num_sinks; ++k) {
    const SinkMask kbit = SinkMask{1} << (k - 1);
    std::vector<std::vector<std::vector<SinkMask>>> families(
        static_cast<std::size_t>(demands.num_sources));
    std::vector<std::vector<SinkMask>> jk(static_cast<std::size_t>(demands.num_sources));
    for (int i = 0; i < demands.num_sources; ++i) {
      std::vector<SinkMask> universe;
      for (SinkMask m : packet_sets[static_cast<std::size_t>(i)])
        if (m & kbit) universe.push_back(m);
      jk[static_cast<std::size_t>(i)] = universe;
      families[static_cast<std::size_t>(i)] = upsets_of(universe);
    }

    std::vector<std::size_t> pick(static_cast<std::size_t>(demands.num_sources), 0);
    while (true) {
      bool all_full = true;
      for (int i = 0; i < demands.num_sources; ++i) {
        const auto& f = families[static_cast<std::size_t>(i)];
        if (f[pick[static_cast<std::size_t>(i)]].size() !=
            jk[static_cast<std::size_t>(i)].size()) {
          all_full = false;
          break;
        }
      }
      if (!all_full) {
        LinearConstraint c;
        VarMask u_complement = 0, u_kept = 0;
        double codebook_sum = 0.0;
        std::ostringstream label;
        label << "beta(S" << k;
        for (int i = 0; i < demands.num_sources; ++i) {
          const auto& q = families[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]];
          std::vector<SinkMask> complement;
          for (SinkMask m : jk[static_cast<std::size_t>(i)])
            if (!std::binary_search(q.begin(), q.end(), m)) complement.push_back(m);
          for (SinkMask m : complement) {
            c.terms.push_back({RateVar::dbl(i, m), 1.0});
            c.terms.push_back({RateVar::prime(i, m), -1.0});
            codebook_sum += codebook_term(i, m);
          }
          u_complement |= ix.u_mask(i, complement);
          u_kept |= ix.u_mask(i, q);
          label << ";Q" << i << "=" << family_name(q);
        }
        label << ")";
        c.rhs = cache.cond(u_complement, u_kept) - codebook_sum;
        c.label = label.str();
        region.constraints.push_back(std::move(c));
      }
      // Advance the mixed-radix tuple counter.
      int pos = 0;
      for (; pos < demands.num_sources; ++pos) {
        auto& p = pick[static_cast<std::size_t>(pos)];
        if (++p < families[static_cast<std::size_t>(pos)].size()) break;
        p = 0;
      }
      if (pos == demands.num_sources) break;
    }
  }

  // Source-sequence bin constraints.
  for (int k = 1; k <= demands.num_sinks; ++k) {
    const SinkMask kbit = SinkMask{1} << (k - 1);
    const SourceMask sigma = demands.requested_by(k);
    VarMask u_jk = 0;
    for (int i = 0; i < demands.num_sources; ++i)
      for (SinkMask m : nonempty_submasks(all))
        if (m & kbit) u_jk |= ix.u_single(i, m);
    for (SourceMask gamma = 1; gamma <= sigma; ++gamma) {
      if (gamma & ~sigma) continue;
      LinearConstraint c;
      for (int i = 0; i < demands.num_sources; ++i) {
        if (!(gamma & (SourceMask{1} << i))) continue;
        for (SinkMask m : tilde_sets[static_cast<std::size_t>(i)])
          if (m & kbit) c.terms.push_back({RateVar::tilde(i, m), 1.0});
      }
      VarMask target = ix.x_mask(gamma);
      VarMask given = ix.x_mask(sigma & ~gamma) | u_jk;
      c.rhs = clamp_nonneg(cache.cond(target, given));
      c.label = cond_entropy_label(pmf, target, given);
      region.constraints.push_back(std::move(c));
    }
  }

  // Linking: packet rates carry the codeword bin index, plus the source
  // bin index when the packet stays within Pi_i.
  for (int i = 0; i < demands.num_sources; ++i) {
    const SinkMask pi = demands.requesting(i);
    for (SinkMask m : packet_sets[static_cast<std::size_t>(i)]) {
      LinearConstraint c;
      c.terms.push_back({RateVar::packet(i, m), 1.0});
      c.terms.push_back({RateVar::dbl(i, m), -1.0});
      if ((m & ~pi) == 0) c.terms.push_back({RateVar::tilde(i, m), -1.0});
      c.rhs = 0.0;
      c.label = "link " + RateVar::packet(i, m).name();
      region.constraints.push_back(std::move(c));
    }
  }

  region.validate();
  return region;
}

// --- 2-sink 1-helper example -------------------------------------------------

JointPmf helper_joint_pmf(double p1, double p2, HelperAux aux, int fine_sink) {
  if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0))
    throw ValidationError("helper: source crossover outside [0,1]");
  if (!(aux.p02 >= 0.0 && aux.p02 <= 0.5) || !(aux.p012 >= 0.0 && aux.p012 <= 0.5))
    throw ValidationError("helper: auxiliary parameters outside [0,1/2]");
  if (fine_sink != 1 && fine_sink != 2)
    throw ValidationError("helper: fine sink must be 1 or 2");

  std::vector<Variable> vars = {
      {"X0", VarRole::Source, 0, 0, 2},
      {"X1", VarRole::Source, 1, 0, 2},
      {"X2", VarRole::Source, 2, 0, 2},
      {fine_sink == 2 ? "U2" : "U1", VarRole::Auxiliary, 0, SinkMask{1} << (fine_sink - 1), 2},
      {"U0", VarRole::Auxiliary, 0, 0b11, 2},
  };
  auto flip = [](int a, int b, double p) { return a == b ? 1.0 - p : p; };
  std::vector<double> probs(32);
  for (int x0 = 0; x0 < 2; ++x0)
    for (int x1 = 0; x1 < 2; ++x1)
      for (int x2 = 0; x2 < 2; ++x2)
        for (int uf = 0; uf < 2; ++uf)
          for (int u0 = 0; u0 < 2; ++u0)
            probs[static_cast<std::size_t>(x0 * 16 + x1 * 8 + x2 * 4 + uf * 2 + u0)] =
                0.5 * flip(x1, x0, p1) * flip(x2, x0, p2) * flip(uf, x0, aux.p02) *
                flip(u0, uf, aux.p012);
  return JointPmf(std::move(vars), std::move(probs));
}

RateRegion helper_region_oriented(double p1, double p2, HelperAux aux, int fine_sink) {
  JointPmf pmf = helper_joint_pmf(p1, p2, aux, fine_sink);
  const VarSubset x0{0}, x1{1}, x2{2}, uf{3}, u0{4};
  const int other = fine_sink == 2 ? 1 : 2;

  RateRegion region;
  region.provenance = RegionKind::Helper;
  region.vars = {RateVar::packet(0, 0b01), RateVar::packet(0, 0b10), RateVar::packet(0, 0b11),
                 RateVar::packet(1, 0b01), RateVar::packet(2, 0b10)};
  std::sort(region.vars.begin(), region.vars.end());

  auto push = [&](RateVar v, double rhs, std::string label) {
    region.constraints.push_back({{{v, 1.0}}, rhs, std::move(label)});
  };
  push(RateVar::packet(0, 0b11), pmf.mutual_info(x0, u0, {}), "I(X0;U0)");
  push(RateVar::packet(0, SinkMask{1} << (fine_sink - 1)), pmf.mutual_info(x0, uf, u0),
       "I(X0;U" + std::to_string(fine_sink) + "|U0)");
  push(RateVar::packet(0, SinkMask{1} << (other - 1)), 0.0,
       "I(X0;U" + std::to_string(other) + "|U0)");
  push(RateVar::packet(1, 0b01),
       pmf.cond_entropy(x1, fine_sink == 1 ? VarSubset{3, 4} : VarSubset{4}), "H(X1|U0,U1)");
  push(RateVar::packet(2, 0b10),
       pmf.cond_entropy(x2, fine_sink == 2 ? VarSubset{3, 4} : VarSubset{4}), "H(X2|U0,U2)");

  region.validate();
  return region;
}

RateRegion helper_region(double p1, double p2, HelperAux aux) {
  return helper_region_oriented(p1, p2, aux, 2);
}

HelperExample helper_example(double p1, double p2, double delta) {
  if (!(p1 >= 0.0 && p1 <= 0.5) || !(p2 >= 0.0 && p2 <= 0.5))
    throw ValidationError("helper_example: source crossovers must lie in [0,1/2]");
  if (!(delta >= 0.0)) throw ValidationError("helper_example: delta must be nonnegative");

  const double q1 = solve_crossover(p1, std::min(1.0, hb(p1) + delta));
  const double q2 = solve_crossover(p2, std::min(1.0, hb(p2) + delta));

  HelperExample ex;
  ex.fine_sink = q1 < q2 ? 1 : 2;
  ex.p02 = std::min(q1, q2);
  ex.p01 = std::max(q1, q2);
  ex.p012 = ex.p02 < 0.5 ? (ex.p01 - ex.p02) / (1.0 - 2.0 * ex.p02) : 0.0;
  ex.rate_common = 1.0 - hb(ex.p01);
  ex.rate_fine = hb(ex.p01) - hb(ex.p02);
  ex.rate_sink1 = hb(bsc_convolve(p1, q1));
  ex.rate_sink2 = hb(bsc_convolve(p2, q2));
  return ex;
}

HelperSweepResult helper_sweep(double p1, double p2, double delta, int grid_steps) {
  if (!(p1 > 0.0 && p1 < 0.5) || !(p2 > 0.0 && p2 < 0.5))
    throw ValidationError("helper_sweep: source crossovers must lie in (0,1/2)");
  if (!(delta >= 0.0)) throw ValidationError("helper_sweep: infeasible delta");
  if (grid_steps < 2) throw ValidationError("helper_sweep: grid_steps must be at least 2");

  const double cap1 = std::min(1.0, hb(p1) + delta);
  const double cap2 = std::min(1.0, hb(p2) + delta);

  HelperSweepResult best;
  bool have_best = false;

  for (int fine = 2; fine >= 1; --fine) {
    const double p_fine = fine == 2 ? p2 : p1;
    const double p_coarse = fine == 2 ? p1 : p2;
    const double cap_fine = fine == 2 ? cap2 : cap1;
    const double cap_coarse = fine == 2 ? cap1 : cap2;

    double lo02 = 0.0, hi02 = 0.5, lo012 = 0.0, hi012 = 0.5;
    double best_cost = 0.0, best02 = 0.0, best012 = 0.0;
    bool found = false;
    for (int round = 0; round < 3; ++round) {
      const double step02 = (hi02 - lo02) / (grid_steps - 1);
      const double step012 = (hi012 - lo012) / (grid_steps - 1);
      found = false;
      for (int a = 0; a < grid_steps; ++a) {
        const double p02 = lo02 + step02 * a;
        if (hb(bsc_convolve(p_fine, p02)) > cap_fine + 1e-12) continue;
        for (int b = 0; b < grid_steps; ++b) {
          const double p012 = lo012 + step012 * b;
          const double pc = bsc_convolve(p02, p012);
          if (hb(bsc_convolve(p_coarse, pc)) > cap_coarse + 1e-12) continue;
          const double cost = 3.0 * (1.0 - hb(pc)) + 2.0 * (hb(pc) - hb(p02));
          if (!found || cost < best_cost - 1e-15) {
            found = true;
            best_cost = cost;
            best02 = p02;
            best012 = p012;
          }
        }
      }
      if (!found) break;
      lo02 = std::max(0.0, best02 - step02);
      hi02 = std::min(0.5, best02 + step02);
      lo012 = std::max(0.0, best012 - step012);
      hi012 = std::min(0.5, best012 + step012);
    }
    if (!found) continue;

    if (!have_best || best_cost < best.cost - 1e-12) {
      have_best = true;
      const double pc = bsc_convolve(best02, best012);
      best.aux = {best02, best012};
      best.fine_sink = fine;
      best.rate_common = 1.0 - hb(pc);
      best.rate_fine = hb(pc) - hb(best02);
      best.cost = best_cost;
      const double fine_side = hb(bsc_convolve(p_fine, best02));
      const double coarse_side = hb(bsc_convolve(p_coarse, pc));
      best.rate_sink1 = fine == 1 ? fine_side : coarse_side;
      best.rate_sink2 = fine == 2 ? fine_side : coarse_side;
    }
  }
  if (!have_best) throw ValidationError("helper_sweep: no feasible grid point");
  return best;
}

}  // namespace dirkit
