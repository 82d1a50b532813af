#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bfcs {

/// Number of conditional independence models over three variables.
inline constexpr int kNumModels = 11;

/// Conditional independence models over (X1, X2, X3).
///
/// The numbering is fixed and used as the index into every 11-vector in the
/// library (Bayes factors, priors, posteriors).
enum class CiModelId : int {
  kFull = 0,           // X1, X2, X3 mutually dependent
  kIndep12 = 1,        // X1 _||_ X2
  kIndep23 = 2,        // X2 _||_ X3
  kIndep31 = 3,        // X3 _||_ X1
  kIndep12Given3 = 4,  // X1 _||_ X2 | X3
  kIndep23Given1 = 5,  // X2 _||_ X3 | X1
  kIndep31Given2 = 6,  // X3 _||_ X1 | X2  (the chain X1 -> X2 -> X3 under BK)
  kIndep1From23 = 7,   // X1 _||_ (X2, X3)
  kIndep2From31 = 8,   // X2 _||_ (X3, X1)
  kIndep3From12 = 9,   // X3 _||_ (X1, X2)
  kEmpty = 10,         // X1 _||_ X2 _||_ X3
};

enum class CanonicalCase { kFull, kAcausal, kCausal, kIndependent, kEmpty };

constexpr int index(CiModelId id) { return static_cast<int>(id); }

inline CiModelId model_from_index(int i) {
  if (i < 0 || i >= kNumModels) {
    throw std::out_of_range("CI model index out of range: " + std::to_string(i));
  }
  return static_cast<CiModelId>(i);
}

CanonicalCase canonical_case(CiModelId id);
std::string_view canonical_case_name(CanonicalCase c);
/// Human readable statement, e.g. "X3 _||_ X1 | X2".
std::string_view description(CiModelId id);

// Variables are 0-based internally (X1 -> 0). Unordered pairs are indexed so
// that pair p joins variables p and (p + 1) % 3:
//   pair 0 = {X1, X2}, pair 1 = {X2, X3}, pair 2 = {X3, X1}.
constexpr int pair_index(int a, int b) {
  const int lo = a < b ? a : b;
  const int hi = a < b ? b : a;
  return (lo == 0 && hi == 2) ? 2 : lo;
}
constexpr std::array<int, 2> pair_nodes(int pair) { return {pair, (pair + 1) % 3}; }
constexpr int third_node(int a, int b) { return 3 - a - b; }

/// Off-diagonal zero pattern of a covariance matrix and its inverse.
///
/// Bit p of `marginal` is set when the covariance (equivalently correlation)
/// entry of pair p is zero; bit p of `conditional` when the precision
/// (partial correlation) entry of pair p is zero.
struct ZeroPattern {
  std::uint8_t marginal = 0;
  std::uint8_t conditional = 0;

  bool marginal_zero(int pair) const { return (marginal >> pair) & 1U; }
  bool conditional_zero(int pair) const { return (conditional >> pair) & 1U; }

  /// Packs into 6 bits: marginal in bits 0..2, conditional in bits 3..5.
  int code() const { return marginal | (conditional << 3); }
  static ZeroPattern from_code(int code) {
    return {static_cast<std::uint8_t>(code & 7), static_cast<std::uint8_t>((code >> 3) & 7)};
  }

  friend bool operator==(const ZeroPattern&, const ZeroPattern&) = default;
};

/// Zero pattern implied by a CI model.
ZeroPattern implied_pattern(CiModelId id);

/// Inverse of implied_pattern; nullopt for the 53 patterns no model implies.
std::optional<CiModelId> model_from_pattern(ZeroPattern pattern);

/// Checks a zero pattern against the four implications that hold for any
/// positive definite 3x3 covariance matrix and its inverse.
bool is_consistent(ZeroPattern pattern);

/// Relabels variables: new label of old variable v is perm[v].
ZeroPattern permute(ZeroPattern pattern, const std::array<int, 3>& perm);
CiModelId permute(CiModelId id, const std::array<int, 3>& perm);

}  // namespace bfcs
