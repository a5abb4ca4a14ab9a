#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dirkit {

/// Thrown when an input violates a documented precondition or invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bit j-1 set <=> sink j is in the subset (sinks are 1-based, S1..SM).
using SinkMask = std::uint32_t;
/// Bit i set <=> source i is in the subset (sources are 0-based, X0..).
using SourceMask = std::uint32_t;
/// Bit v set <=> pmf variable at position v is in the subset.
using VarMask = std::uint64_t;

std::string sink_set_name(SinkMask k);  // "{1,2}"

enum class VarRole { Source, Auxiliary };

/// One coordinate of a joint pmf: a named discrete variable.
/// Sources carry their source index; auxiliaries carry the (origin source,
/// destination sink subset) label U_{i,K}.
struct Variable {
  std::string name;
  VarRole role = VarRole::Source;
  int source = 0;
  SinkMask sinks = 0;  // auxiliaries only
  int alphabet = 2;
};

/// Sorted, duplicate-free set of variable positions into a JointPmf.
struct VarSubset {
  std::vector<int> indices;

  VarSubset() = default;
  VarSubset(std::initializer_list<int> ix) : indices(ix) { normalize(); }
  explicit VarSubset(std::vector<int> ix) : indices(std::move(ix)) { normalize(); }

  bool empty() const { return indices.empty(); }
  std::size_t size() const { return indices.size(); }
  VarMask mask() const;

 private:
  void normalize();  // sorts, rejects duplicates/negatives
};

/// Exact joint distribution over named discrete variables.
/// probs is row-major over the declared variable order: the last variable
/// varies fastest.
class JointPmf {
 public:
  JointPmf(std::vector<Variable> vars, std::vector<double> probs);

  int var_count() const { return static_cast<int>(vars_.size()); }
  const Variable& var(int v) const { return vars_.at(static_cast<std::size_t>(v)); }
  const std::vector<Variable>& variables() const { return vars_; }
  std::optional<int> index_of(std::string_view name) const;

  std::size_t table_size() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t stride(int v) const { return strides_.at(static_cast<std::size_t>(v)); }
  int symbol_at(std::size_t flat, int v) const {
    return static_cast<int>(flat / strides_[static_cast<std::size_t>(v)]) %
           vars_[static_cast<std::size_t>(v)].alphabet;
  }

  JointPmf marginalize(const VarSubset& keep) const;

  /// H(of) in bits; H(empty) = 0.
  double entropy(const VarSubset& of) const { return entropy_mask(of.mask()); }
  /// H(target | given) in bits. target nonempty and disjoint from given.
  double cond_entropy(const VarSubset& target, const VarSubset& given) const;
  /// I(a; b | given) in bits, clamped to be nonnegative.
  double mutual_info(const VarSubset& a, const VarSubset& b, const VarSubset& given) const;

  /// Mask-level entropy used by region generation (no subset validation).
  double entropy_mask(VarMask m) const;

  /// Marginal table over the masked variables, row-major over their
  /// ascending positions.
  std::vector<double> marginal_table(VarMask m) const;

 private:
  std::vector<Variable> vars_;
  std::vector<double> probs_;
  std::vector<std::size_t> strides_;
};

/// Memoizes subset entropies of one pmf; cheap to copy around by reference
/// during region generation.
class EntropyCache {
 public:
  explicit EntropyCache(const JointPmf& pmf) : pmf_(&pmf) {}
  double entropy(VarMask m) const;
  double cond(VarMask target, VarMask given) const {
    return entropy(target | given) - entropy(given);
  }
  double mutual(VarMask a, VarMask b, VarMask given) const;
  const JointPmf& pmf() const { return *pmf_; }

 private:
  const JointPmf* pmf_;
  mutable std::unordered_map<VarMask, double> memo_;
};

/// Binary entropy function in bits.
double hb(double p);

/// Crossover probability of a cascade of two binary symmetric channels:
/// p(1-q) + q(1-p).
double bsc_convolve(double p, double q);

/// Finds x in [0, 1/2] with hb(bsc_convolve(p_base, x)) == target_entropy
/// to within 1e-10, by bisection. Requires hb(p_base) <= target <= 1.
double solve_crossover(double p_base, double target_entropy);

}  // namespace dirkit
