#include "dirkit/lp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dirkit {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-8;

struct DenseLp {
  int n = 0, m = 0;
  std::vector<std::vector<double>> a;  // m x n
  std::vector<double> b;               // m
  std::vector<double> c;               // n
};

DenseLp densify(const LinearProgram& lp) {
  DenseLp d;
  d.n = static_cast<int>(lp.region.vars.size());
  d.m = static_cast<int>(lp.region.constraints.size());
  d.a.assign(static_cast<std::size_t>(d.m), std::vector<double>(static_cast<std::size_t>(d.n), 0.0));
  d.b.assign(static_cast<std::size_t>(d.m), 0.0);
  d.c.assign(static_cast<std::size_t>(d.n), 0.0);
  for (int r = 0; r < d.m; ++r) {
    const LinearConstraint& con = lp.region.constraints[static_cast<std::size_t>(r)];
    d.b[static_cast<std::size_t>(r)] = con.rhs;
    for (const auto& [v, coeff] : con.terms)
      d.a[static_cast<std::size_t>(r)][static_cast<std::size_t>(lp.region.index_of(v))] += coeff;
  }
  for (const auto& [v, w] : lp.objective) {
    int ix = lp.region.index_of(v);
    if (ix < 0)
      throw ValidationError("LinearProgram: objective references uncataloged " + v.name());
    d.c[static_cast<std::size_t>(ix)] = w;
  }
  return d;
}

// Two-phase primal simplex on
//   min c.x  s.t.  A.x >= b, x >= 0
// rewritten with surplus variables as equalities. Bland's rule throughout.
class Simplex {
 public:
  explicit Simplex(const DenseLp& d) : n_(d.n), m_(d.m) {
    // Columns: [0,n) structural, [n, n+m) surplus, then artificials.
    rows_.assign(static_cast<std::size_t>(m_),
                 std::vector<double>(static_cast<std::size_t>(n_ + m_), 0.0));
    rhs_.assign(static_cast<std::size_t>(m_), 0.0);
    basis_.assign(static_cast<std::size_t>(m_), -1);
    for (int r = 0; r < m_; ++r) {
      double sign = d.b[static_cast<std::size_t>(r)] > 0.0 ? 1.0 : -1.0;
      for (int j = 0; j < n_; ++j)
        rows_[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] =
            sign * d.a[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
      rows_[static_cast<std::size_t>(r)][static_cast<std::size_t>(n_ + r)] = -sign;
      rhs_[static_cast<std::size_t>(r)] = sign * d.b[static_cast<std::size_t>(r)];
      if (sign < 0.0) basis_[static_cast<std::size_t>(r)] = n_ + r;  // surplus basic
    }
  }

  LpStatus solve(const std::vector<double>& cost, std::vector<double>& x_out) {
    // Phase 1: attach artificials to rows lacking a basic column.
    std::vector<int> art_rows;
    for (int r = 0; r < m_; ++r)
      if (basis_[static_cast<std::size_t>(r)] < 0) art_rows.push_back(r);
    const int n_art = static_cast<int>(art_rows.size());
    if (n_art > 0) {
      for (auto& row : rows_) row.resize(static_cast<std::size_t>(n_ + m_ + n_art), 0.0);
      for (int t = 0; t < n_art; ++t) {
        int r = art_rows[static_cast<std::size_t>(t)];
        rows_[static_cast<std::size_t>(r)][static_cast<std::size_t>(n_ + m_ + t)] = 1.0;
        basis_[static_cast<std::size_t>(r)] = n_ + m_ + t;
      }
      std::vector<double> phase1(static_cast<std::size_t>(n_ + m_ + n_art), 0.0);
      for (int t = 0; t < n_art; ++t) phase1[static_cast<std::size_t>(n_ + m_ + t)] = 1.0;
      if (!iterate(phase1)) return LpStatus::Unbounded;  // cannot happen: phase 1 bounded
      double infeas = 0.0;
      for (int r = 0; r < m_; ++r)
        if (basis_[static_cast<std::size_t>(r)] >= n_ + m_) infeas += rhs_[static_cast<std::size_t>(r)];
      if (infeas > kFeasTol) return LpStatus::Infeasible;
      purge_artificials();
    }

    std::vector<double> phase2(rows_.empty() ? static_cast<std::size_t>(n_ + m_)
                                             : rows_.front().size(),
                               0.0);
    for (int j = 0; j < n_; ++j) phase2[static_cast<std::size_t>(j)] = cost[static_cast<std::size_t>(j)];
    if (!iterate(phase2)) return LpStatus::Unbounded;

    x_out.assign(static_cast<std::size_t>(n_), 0.0);
    for (int r = 0; r < static_cast<int>(rows_.size()); ++r) {
      int bv = basis_[static_cast<std::size_t>(r)];
      if (bv >= 0 && bv < n_) x_out[static_cast<std::size_t>(bv)] = rhs_[static_cast<std::size_t>(r)];
    }
    for (double& v : x_out)
      if (v < 0.0 && v > -kFeasTol) v = 0.0;
    return LpStatus::Optimal;
  }

 private:
  // Runs Bland pivots for the given cost vector until optimal (true) or an
  // unbounded direction appears (false).
  bool iterate(const std::vector<double>& cost) {
    const int ncols = static_cast<int>(rows_.empty() ? cost.size() : rows_.front().size());
    // Reduced costs: z_j = c_j - sum_r c_{basis r} * T[r][j].
    std::vector<double> z(cost.begin(), cost.begin() + ncols);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      double cb = cost[static_cast<std::size_t>(basis_[r])];
      if (cb == 0.0) continue;
      for (int j = 0; j < ncols; ++j) z[static_cast<std::size_t>(j)] -= cb * rows_[r][static_cast<std::size_t>(j)];
    }
    for (long iter = 0; iter < 1000000; ++iter) {
      int entering = -1;
      for (int j = 0; j < ncols; ++j)
        if (z[static_cast<std::size_t>(j)] < -kPivotTol) {
          entering = j;
          break;
        }
      if (entering < 0) return true;

      int leaving = -1;
      double best_ratio = 0.0;
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        double p = rows_[r][static_cast<std::size_t>(entering)];
        if (p <= kPivotTol) continue;
        double ratio = rhs_[r] / p;
        if (leaving < 0 || ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 &&
             basis_[r] < basis_[static_cast<std::size_t>(leaving)])) {
          leaving = static_cast<int>(r);
          best_ratio = ratio;
        }
      }
      if (leaving < 0) return false;  // unbounded ray

      pivot(static_cast<std::size_t>(leaving), entering);
      const auto& prow = rows_[static_cast<std::size_t>(leaving)];
      double zs = z[static_cast<std::size_t>(entering)];
      for (int j = 0; j < ncols; ++j) z[static_cast<std::size_t>(j)] -= zs * prow[static_cast<std::size_t>(j)];
    }
    throw std::runtime_error("simplex: iteration limit exceeded");
  }

  void pivot(std::size_t r, int s) {
    auto& prow = rows_[r];
    const double inv = 1.0 / prow[static_cast<std::size_t>(s)];
    for (double& v : prow) v *= inv;
    rhs_[r] *= inv;
    prow[static_cast<std::size_t>(s)] = 1.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r) continue;
      double f = rows_[i][static_cast<std::size_t>(s)];
      if (f == 0.0) continue;
      auto& row = rows_[i];
      for (std::size_t j = 0; j < row.size(); ++j) row[j] -= f * prow[j];
      row[static_cast<std::size_t>(s)] = 0.0;
      rhs_[i] -= f * rhs_[r];
    }
    basis_[r] = s;
  }

  // After phase 1: pivot zero-level artificials onto real columns, dropping
  // redundant rows outright.
  void purge_artificials() {
    for (std::size_t r = 0; r < rows_.size();) {
      if (basis_[r] < n_ + m_) {
        ++r;
        continue;
      }
      int col = -1;
      for (int j = 0; j < n_ + m_; ++j)
        if (std::abs(rows_[r][static_cast<std::size_t>(j)]) > kPivotTol) {
          col = j;
          break;
        }
      if (col >= 0) {
        pivot(r, col);
        ++r;
      } else {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
        rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
      }
    }
    for (auto& row : rows_) row.resize(static_cast<std::size_t>(n_ + m_));
  }

  int n_, m_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> rhs_;
  std::vector<int> basis_;
};

void check_feasible(const LinearProgram& lp, const std::map<RateVar, double>& x,
                    const char* who) {
  for (const LinearConstraint& con : lp.region.constraints) {
    double lhs = 0.0;
    for (const auto& [v, coeff] : con.terms) {
      auto it = x.find(v);
      lhs += coeff * (it == x.end() ? 0.0 : it->second);
    }
    if (lhs < con.rhs - kFeasTol)
      throw std::runtime_error(std::string(who) + ": returned point violates '" + con.label +
                               "' by " + std::to_string(con.rhs - lhs));
  }
}

}  // namespace

void LinearProgram::validate() const {
  region.validate();
  for (const auto& [v, w] : objective) {
    if (region.index_of(v) < 0)
      throw ValidationError("LinearProgram: objective references uncataloged " + v.name());
    if (!(w >= 0.0) || !std::isfinite(w))
      throw ValidationError("LinearProgram: negative objective weight on " + v.name());
  }
}

double LpSolution::at(const RateVar& v) const {
  auto it = assignment.find(v);
  return it == assignment.end() ? 0.0 : it->second;
}

LpSolution minimize(const LinearProgram& lp) {
  lp.validate();
  DenseLp d = densify(lp);

  std::vector<double> x;
  Simplex simplex(d);
  LpSolution sol;
  sol.status = simplex.solve(d.c, x);
  if (sol.status != LpStatus::Optimal) return sol;

  double value = 0.0;
  for (int j = 0; j < d.n; ++j) {
    sol.assignment[lp.region.vars[static_cast<std::size_t>(j)]] = x[static_cast<std::size_t>(j)];
    value += d.c[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  }
  sol.value = value;
  check_feasible(lp, sol.assignment, "minimize");
  return sol;
}

LpSolution vertex_oracle(const LinearProgram& lp) {
  lp.validate();
  DenseLp d = densify(lp);
  if (d.n > 8 || d.m > 40) throw ValidationError("vertex_oracle: size cap exceeded");

  const int n = d.n;
  const int planes = d.m + n;  // constraint boundaries then coordinate planes
  auto plane_row = [&](int p, std::vector<double>& row, double& rhs) {
    if (p < d.m) {
      row = d.a[static_cast<std::size_t>(p)];
      rhs = d.b[static_cast<std::size_t>(p)];
    } else {
      row.assign(static_cast<std::size_t>(n), 0.0);
      row[static_cast<std::size_t>(p - d.m)] = 1.0;
      rhs = 0.0;
    }
  };

  LpSolution best;
  best.status = LpStatus::Infeasible;

  std::vector<int> combo(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) combo[static_cast<std::size_t>(i)] = i;
  std::vector<std::vector<double>> mat(static_cast<std::size_t>(n));
  std::vector<double> rhs(static_cast<std::size_t>(n)), x(static_cast<std::size_t>(n));

  auto consider = [&]() {
    for (int i = 0; i < n; ++i)
      plane_row(combo[static_cast<std::size_t>(i)], mat[static_cast<std::size_t>(i)],
                rhs[static_cast<std::size_t>(i)]);
    // Gaussian elimination with partial pivoting.
    std::vector<std::vector<double>> m = mat;
    std::vector<double> v = rhs;
    for (int col = 0; col < n; ++col) {
      int piv = col;
      for (int r = col + 1; r < n; ++r)
        if (std::abs(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
            std::abs(m[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]))
          piv = r;
      if (std::abs(m[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]) < kPivotTol)
        return;  // singular intersection
      std::swap(m[static_cast<std::size_t>(col)], m[static_cast<std::size_t>(piv)]);
      std::swap(v[static_cast<std::size_t>(col)], v[static_cast<std::size_t>(piv)]);
      for (int r = col + 1; r < n; ++r) {
        double f = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                   m[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        if (f == 0.0) continue;
        for (int cc = col; cc < n; ++cc)
          m[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
              f * m[static_cast<std::size_t>(col)][static_cast<std::size_t>(cc)];
        v[static_cast<std::size_t>(r)] -= f * v[static_cast<std::size_t>(col)];
      }
    }
    for (int r = n - 1; r >= 0; --r) {
      double acc = v[static_cast<std::size_t>(r)];
      for (int cc = r + 1; cc < n; ++cc)
        acc -= m[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] *
               x[static_cast<std::size_t>(cc)];
      x[static_cast<std::size_t>(r)] = acc / m[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
    }
    // Feasibility.
    for (int j = 0; j < n; ++j)
      if (x[static_cast<std::size_t>(j)] < -kFeasTol) return;
    for (int r = 0; r < d.m; ++r) {
      double lhs = 0.0;
      for (int j = 0; j < n; ++j)
        lhs += d.a[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] *
               x[static_cast<std::size_t>(j)];
      if (lhs < d.b[static_cast<std::size_t>(r)] - kFeasTol) return;
    }
    double value = 0.0;
    for (int j = 0; j < n; ++j)
      value += d.c[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    if (best.status != LpStatus::Optimal || value < best.value - 1e-12) {
      best.status = LpStatus::Optimal;
      best.value = value;
      best.assignment.clear();
      for (int j = 0; j < n; ++j) {
        double val = x[static_cast<std::size_t>(j)];
        best.assignment[lp.region.vars[static_cast<std::size_t>(j)]] = val < 0.0 ? 0.0 : val;
      }
    }
  };

  if (n == 0) {
    best.status = LpStatus::Optimal;
    best.value = 0.0;
    return best;
  }
  while (true) {
    consider();
    int pos = n - 1;
    while (pos >= 0 && combo[static_cast<std::size_t>(pos)] == planes - n + pos) --pos;
    if (pos < 0) break;
    ++combo[static_cast<std::size_t>(pos)];
    for (int t = pos + 1; t < n; ++t)
      combo[static_cast<std::size_t>(t)] = combo[static_cast<std::size_t>(t - 1)] + 1;
  }
  return best;
}

}  // namespace dirkit
