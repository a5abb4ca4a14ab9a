#include "dirkit/binsim.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>

namespace dirkit {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t CounterRng::next() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

double CounterRng::next_unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t bin_index(std::uint64_t seed, const PacketId& packet, std::uint64_t sequence,
                        std::uint64_t num_bins) {
  if (num_bins == 0) throw ValidationError("bin_index: no bins");
  std::uint64_t salt =
      mix64((static_cast<std::uint64_t>(static_cast<std::uint32_t>(packet.source)) << 32) ^
            packet.sinks ^ 0x62696e73ULL);
  return mix64(mix64(seed ^ salt) ^ sequence) % num_bins;
}

BinSimModel dsbs_star_model(double p1, double p2) {
  if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0))
    throw ValidationError("dsbs_star_model: crossover outside [0,1]");
  std::vector<Variable> vars = {{"X0", VarRole::Source, 0, 0, 2},
                                {"X1", VarRole::Source, 1, 0, 2},
                                {"X2", VarRole::Source, 2, 0, 2}};
  auto flip = [](int a, int b, double p) { return a == b ? 1.0 - p : p; };
  std::vector<double> probs(8);
  for (int x0 = 0; x0 < 2; ++x0)
    for (int x1 = 0; x1 < 2; ++x1)
      for (int x2 = 0; x2 < 2; ++x2)
        probs[static_cast<std::size_t>(x0 * 4 + x1 * 2 + x2)] =
            0.5 * flip(x1, x0, p1) * flip(x2, x0, p2);
  BinSimModel model{JointPmf(std::move(vars), std::move(probs)), {VarSubset{1}, VarSubset{2}}};
  return model;
}

BinSimModel dsbs_pair_model(double p1) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw ValidationError("dsbs_pair_model: crossover outside [0,1]");
  std::vector<Variable> vars = {{"X0", VarRole::Source, 0, 0, 2},
                                {"X1", VarRole::Source, 1, 0, 2}};
  std::vector<double> probs = {0.5 * (1.0 - p1), 0.5 * p1, 0.5 * p1, 0.5 * (1.0 - p1)};
  return BinSimModel{JointPmf(std::move(vars), std::move(probs)), {VarSubset{1}}};
}

BinSimModel binsim_model(const JointPmf& sources, const DemandMap& demands) {
  if (sources.var_count() > 3)
    throw ValidationError("binsim: at most 3 sources supported");
  std::vector<int> pos_of_source(static_cast<std::size_t>(demands.num_sources), -1);
  for (int v = 0; v < sources.var_count(); ++v) {
    const Variable& var = sources.var(v);
    if (var.role != VarRole::Source)
      throw ValidationError("binsim: model pmf must contain source variables only");
    if (var.alphabet != 2) throw ValidationError("binsim: sources must be binary");
    if (var.source < 0 || var.source >= demands.num_sources)
      throw ValidationError("binsim: source index out of range");
    pos_of_source[static_cast<std::size_t>(var.source)] = v;
  }
  if (demands.num_sources != sources.var_count() || pos_of_source[0] < 0)
    throw ValidationError("binsim: demand map does not match the pmf");

  BinSimModel model{sources, {}};
  for (int j = 1; j <= demands.num_sinks; ++j) {
    SourceMask sigma = demands.requested_by(j);
    if (!(sigma & 1u))
      throw ValidationError("binsim: every sink must reconstruct source 0 (sink " +
                            std::to_string(j) + " does not)");
    std::vector<int> side;
    for (int i = 1; i < demands.num_sources; ++i)
      if (sigma & (SourceMask{1} << i)) side.push_back(pos_of_source[static_cast<std::size_t>(i)]);
    model.side_vars.push_back(VarSubset(std::move(side)));
  }
  return model;
}

namespace {

struct PacketPlan {
  PacketId id;
  std::uint64_t num_bins = 1;
};

std::uint64_t bins_for_rate(int n, double rate) {
  double raw = std::ceil(std::exp2(static_cast<double>(n) * rate));
  if (raw >= 0x1.0p62) return std::uint64_t{1} << 62;
  return raw < 1.0 ? 1 : static_cast<std::uint64_t>(raw);
}

}  // namespace

BinSimReport run_power_binning(const BinSimConfig& cfg) {
  const BinSimModel& model = cfg.model;
  const int n = cfg.blocklength;
  const int num_sinks = model.num_sinks();
  if (n < 1 || n > 20) throw ValidationError("binsim: blocklength must be in [1,20]");
  if (cfg.trials < 1) throw ValidationError("binsim: trials must be positive");
  if (num_sinks < 1) throw ValidationError("binsim: model has no sinks");

  int coded_pos = -1;
  for (int v = 0; v < model.joint.var_count(); ++v) {
    if (model.joint.var(v).alphabet != 2)
      throw ValidationError("binsim: all model variables must be binary");
    if (model.joint.var(v).role == VarRole::Source && model.joint.var(v).source == 0)
      coded_pos = v;
  }
  if (coded_pos < 0) throw ValidationError("binsim: model has no source 0");

  // Resolve the packet plan; rate 0 (a single bin) conveys nothing and is
  // dropped from the matching keys.
  std::vector<PacketPlan> packets;
  for (const auto& [id, rate] : cfg.rates) {
    if (id.source != 0) throw ValidationError("binsim: only source 0 is binned");
    if (id.sinks == 0 || (id.sinks & ~model.all_sinks()))
      throw ValidationError("binsim: packet " + id.name() + " targets unknown sinks");
    if (!(rate >= 0.0) || !std::isfinite(rate))
      throw ValidationError("binsim: negative rate on " + id.name());
    for (const PacketPlan& p : packets)
      if (p.id == id) throw ValidationError("binsim: duplicate rate for " + id.name());
    std::uint64_t bins = bins_for_rate(n, rate);
    if (bins > 1) packets.push_back({id, bins});
  }
  std::sort(packets.begin(), packets.end(),
            [](const PacketPlan& a, const PacketPlan& b) { return a.id < b.id; });

  const std::uint32_t num_seqs = std::uint32_t{1} << n;

  // Bin of every candidate sequence, per packet (fixed across trials).
  std::vector<std::vector<std::uint64_t>> bins(packets.size());
  for (std::size_t p = 0; p < packets.size(); ++p) {
    bins[p].resize(num_seqs);
    for (std::uint32_t s = 0; s < num_seqs; ++s)
      bins[p][s] = bin_index(cfg.seed, packets[p].id, s, packets[p].num_bins);
  }

  // Per sink: candidate sequences sorted by their received-index tuple.
  struct SinkPlan {
    std::vector<std::size_t> packet_ix;      // packets whose K contains this sink
    std::vector<std::uint32_t> order;        // sequences sorted by tuple, then value
    std::vector<int> side_positions;         // pmf positions of the side variables
    std::vector<std::array<double, 2>> logp; // [side symbol][coded symbol]
  };
  std::vector<SinkPlan> sinks(static_cast<std::size_t>(num_sinks));

  for (int j = 1; j <= num_sinks; ++j) {
    SinkPlan& plan = sinks[static_cast<std::size_t>(j - 1)];
    for (std::size_t p = 0; p < packets.size(); ++p)
      if (packets[p].id.sinks & (SinkMask{1} << (j - 1))) plan.packet_ix.push_back(p);

    plan.order.resize(num_seqs);
    for (std::uint32_t s = 0; s < num_seqs; ++s) plan.order[s] = s;
    std::sort(plan.order.begin(), plan.order.end(), [&](std::uint32_t a, std::uint32_t b) {
      for (std::size_t p : plan.packet_ix) {
        if (bins[p][a] != bins[p][b]) return bins[p][a] < bins[p][b];
      }
      return a < b;
    });

    plan.side_positions = model.side_vars[static_cast<std::size_t>(j - 1)].indices;
    // Joint likelihood table P(coded symbol, side tuple); side tuple packs
    // the side variables' bits in list order.
    std::vector<int> all_pos = plan.side_positions;
    all_pos.push_back(coded_pos);
    std::sort(all_pos.begin(), all_pos.end());
    VarMask mask = 0;
    for (int v : all_pos) mask |= VarMask{1} << v;
    std::vector<double> marg = model.joint.marginal_table(mask);
    const std::size_t n_side = plan.side_positions.size();
    plan.logp.assign(std::size_t{1} << n_side, {0.0, 0.0});
    for (std::size_t side_sym = 0; side_sym < (std::size_t{1} << n_side); ++side_sym) {
      for (int xsym = 0; xsym < 2; ++xsym) {
        std::size_t idx = 0;
        for (int v : all_pos) {
          int sym;
          if (v == coded_pos) {
            sym = xsym;
          } else {
            std::size_t t = static_cast<std::size_t>(
                std::find(plan.side_positions.begin(), plan.side_positions.end(), v) -
                plan.side_positions.begin());
            sym = static_cast<int>((side_sym >> t) & 1u);
          }
          idx = idx * 2 + static_cast<std::size_t>(sym);
        }
        double p = marg[idx];
        plan.logp[side_sym][static_cast<std::size_t>(xsym)] =
            p > 0.0 ? std::log2(p) : -1e30;
      }
    }
  }

  // Symbol decomposition of each joint-pmf cell, and the sampling CDF.
  const std::size_t cells = model.joint.table_size();
  std::vector<double> cdf(cells);
  {
    double acc = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      acc += model.joint.probs()[c];
      cdf[c] = acc;
    }
    cdf[cells - 1] = 1.0;
  }

  std::vector<long> sink_errors(static_cast<std::size_t>(num_sinks), 0);
  long sum_e = 0, sum_e2 = 0;

  std::vector<int> symbols(static_cast<std::size_t>(model.joint.var_count()));
  std::vector<std::vector<std::uint8_t>> side_sym(
      static_cast<std::size_t>(num_sinks), std::vector<std::uint8_t>(static_cast<std::size_t>(n)));
  std::vector<double> delta(static_cast<std::size_t>(n));

  for (long trial = 0; trial < cfg.trials; ++trial) {
    CounterRng rng(mix64(cfg.seed ^ mix64(0x747269616cULL ^ static_cast<std::uint64_t>(trial))));

    // Draw the block.
    std::uint32_t x0_seq = 0;
    for (int t = 0; t < n; ++t) {
      double u = rng.next_unit();
      std::size_t cell =
          static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      if (cell >= cells) cell = cells - 1;
      std::size_t rem = cell;
      for (int v = model.joint.var_count(); v-- > 0;) {
        symbols[static_cast<std::size_t>(v)] = static_cast<int>(rem % 2);
        rem /= 2;
      }
      if (symbols[static_cast<std::size_t>(coded_pos)])
        x0_seq |= std::uint32_t{1} << t;
      for (int j = 0; j < num_sinks; ++j) {
        const auto& side_pos = sinks[static_cast<std::size_t>(j)].side_positions;
        std::uint8_t sym = 0;
        for (std::size_t sv = 0; sv < side_pos.size(); ++sv)
          sym |= static_cast<std::uint8_t>(symbols[static_cast<std::size_t>(side_pos[sv])] << sv);
        side_sym[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] = sym;
      }
    }

    int trial_errors = 0;
    for (int j = 0; j < num_sinks; ++j) {
      const SinkPlan& plan = sinks[static_cast<std::size_t>(j)];

      // Candidates matching every received index.
      auto tuple_less_than_target = [&](std::uint32_t s) {
        for (std::size_t p : plan.packet_ix) {
          std::uint64_t bs = bins[p][s], bt = bins[p][x0_seq];
          if (bs != bt) return bs < bt;
        }
        return false;
      };
      auto tuple_equals_target = [&](std::uint32_t s) {
        for (std::size_t p : plan.packet_ix)
          if (bins[p][s] != bins[p][x0_seq]) return false;
        return true;
      };
      std::size_t lo = 0, hi = plan.order.size();
      while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (tuple_less_than_target(plan.order[mid]))
          lo = mid + 1;
        else
          hi = mid;
      }

      // Maximum likelihood within the matched set; first best wins, and the
      // candidates are visited in ascending sequence order.
      double base = 0.0;
      const auto& ss = side_sym[static_cast<std::size_t>(j)];
      for (int t = 0; t < n; ++t) {
        const auto& lp = plan.logp[ss[static_cast<std::size_t>(t)]];
        base += lp[0];
        delta[static_cast<std::size_t>(t)] = lp[1] - lp[0];
      }
      double best_ll = -std::numeric_limits<double>::infinity();
      std::uint32_t best_seq = 0;
      bool any = false;
      for (std::size_t at = lo; at < plan.order.size(); ++at) {
        std::uint32_t s = plan.order[at];
        if (!tuple_equals_target(s)) break;
        double ll = base;
        for (std::uint32_t bitset = s; bitset != 0; bitset &= bitset - 1)
          ll += delta[static_cast<std::size_t>(std::countr_zero(bitset))];
        if (!any || ll > best_ll) {
          any = true;
          best_ll = ll;
          best_seq = s;
        }
      }
      if (!any || best_seq != x0_seq) {
        ++sink_errors[static_cast<std::size_t>(j)];
        ++trial_errors;
      }
    }
    sum_e += trial_errors;
    sum_e2 += static_cast<long>(trial_errors) * trial_errors;
  }

  BinSimReport report;
  report.trials = cfg.trials;
  report.seed = cfg.seed;
  const double T = static_cast<double>(cfg.trials);
  for (int j = 0; j < num_sinks; ++j) {
    SinkError e;
    e.errors = sink_errors[static_cast<std::size_t>(j)];
    e.rate = static_cast<double>(e.errors) / T;
    e.ci_halfwidth = 1.96 * std::sqrt(std::max(0.0, e.rate * (1.0 - e.rate)) / T);
    report.per_sink.push_back(e);
  }
  const double mean_e = static_cast<double>(sum_e) / T;
  const double var_e =
      std::max(0.0, static_cast<double>(sum_e2) / T - mean_e * mean_e);
  report.average = mean_e / num_sinks;
  report.average_ci = 1.96 * std::sqrt(var_e / T) / num_sinks;
  return report;
}

std::vector<SweepRow> threshold_sweep(const BinSimConfig& base,
                                      const std::vector<double>& offsets) {
  const BinSimModel& model = base.model;
  int coded_pos = -1;
  for (int v = 0; v < model.joint.var_count(); ++v)
    if (model.joint.var(v).role == VarRole::Source && model.joint.var(v).source == 0)
      coded_pos = v;
  if (coded_pos < 0) throw ValidationError("threshold_sweep: model has no source 0");

  std::vector<double> h(static_cast<std::size_t>(model.num_sinks()));
  double hmin = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= model.num_sinks(); ++j) {
    h[static_cast<std::size_t>(j - 1)] = model.joint.cond_entropy(
        VarSubset{coded_pos}, model.side_vars[static_cast<std::size_t>(j - 1)]);
    hmin = std::min(hmin, h[static_cast<std::size_t>(j - 1)]);
  }

  std::vector<SweepRow> rows;
  for (double offset : offsets) {
    BinSimConfig cfg = base;
    cfg.rates.clear();
    cfg.rates.push_back({PacketId{0, model.all_sinks()}, std::max(0.0, hmin + offset)});
    for (int j = 1; j <= model.num_sinks(); ++j) {
      double excess = h[static_cast<std::size_t>(j - 1)] - hmin;
      if (excess > 0.0 && model.num_sinks() > 1)
        cfg.rates.push_back({PacketId{0, SinkMask{1} << (j - 1)}, excess});
    }
    BinSimReport report = run_power_binning(cfg);
    rows.push_back({offset, cfg.blocklength, report.average, report.average_ci});
  }
  return rows;
}

}  // namespace dirkit
