#include "bfcs/ci_model.hpp"

namespace bfcs {

namespace {

constexpr std::uint8_t bit(int pair) { return static_cast<std::uint8_t>(1U << pair); }

constexpr std::array<ZeroPattern, kNumModels> kImpliedPatterns = {{
    {0, 0},
    {bit(0), 0},
    {bit(1), 0},
    {bit(2), 0},
    {0, bit(0)},
    {0, bit(1)},
    {0, bit(2)},
    {bit(0) | bit(2), bit(0) | bit(2)},
    {bit(0) | bit(1), bit(0) | bit(1)},
    {bit(1) | bit(2), bit(1) | bit(2)},
    {7, 7},
}};

constexpr std::array<std::string_view, kNumModels> kDescriptions = {
    "X1 -/- X2 -/- X3", "X1 _||_ X2",         "X2 _||_ X3",          "X3 _||_ X1",
    "X1 _||_ X2 | X3",  "X2 _||_ X3 | X1",    "X3 _||_ X1 | X2",     "X1 _||_ (X2, X3)",
    "X2 _||_ (X3, X1)", "X3 _||_ (X1, X2)",   "X1 _||_ X2 _||_ X3",
};

}  // namespace

CanonicalCase canonical_case(CiModelId id) {
  const int i = index(id);
  if (i == 0) return CanonicalCase::kFull;
  if (i <= 3) return CanonicalCase::kAcausal;
  if (i <= 6) return CanonicalCase::kCausal;
  if (i <= 9) return CanonicalCase::kIndependent;
  return CanonicalCase::kEmpty;
}

std::string_view canonical_case_name(CanonicalCase c) {
  switch (c) {
    case CanonicalCase::kFull: return "Full";
    case CanonicalCase::kAcausal: return "Acausal";
    case CanonicalCase::kCausal: return "Causal";
    case CanonicalCase::kIndependent: return "Independent";
    case CanonicalCase::kEmpty: return "Empty";
  }
  return "";
}

std::string_view description(CiModelId id) { return kDescriptions[index(id)]; }

ZeroPattern implied_pattern(CiModelId id) { return kImpliedPatterns[index(id)]; }

std::optional<CiModelId> model_from_pattern(ZeroPattern pattern) {
  for (int j = 0; j < kNumModels; ++j) {
    if (kImpliedPatterns[j] == pattern) return static_cast<CiModelId>(j);
  }
  return std::nullopt;
}

bool is_consistent(ZeroPattern z) {
  auto s = [&](int a, int b) { return z.marginal_zero(pair_index(a, b)); };
  auto p = [&](int a, int b) { return z.conditional_zero(pair_index(a, b)); };

  constexpr std::array<std::array<int, 3>, 6> kOrders = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (const auto& [i, j, k] : kOrders) {
    // precision zeros at ik and jk force covariance zeros there
    if (p(i, k) && p(j, k) && !(s(i, k) && s(j, k))) return false;
    // and vice versa
    if (s(i, k) && s(j, k) && !(p(i, k) && p(j, k))) return false;
    // a pair zero in both needs a further zero in each matrix
    if (s(i, j) && p(i, j) && !((p(i, k) || p(j, k)) && (s(i, k) || s(j, k)))) return false;
    // mixed zeros propagate to the other matrix
    if (s(i, k) && p(j, k) && !(p(i, k) && s(j, k))) return false;
  }
  return true;
}

ZeroPattern permute(ZeroPattern pattern, const std::array<int, 3>& perm) {
  ZeroPattern out;
  for (int pair = 0; pair < 3; ++pair) {
    const auto [a, b] = pair_nodes(pair);
    const int target = pair_index(perm[a], perm[b]);
    if (pattern.marginal_zero(pair)) out.marginal |= bit(target);
    if (pattern.conditional_zero(pair)) out.conditional |= bit(target);
  }
  return out;
}

CiModelId permute(CiModelId id, const std::array<int, 3>& perm) {
  // Every implied pattern maps onto another implied pattern.
  return *model_from_pattern(permute(implied_pattern(id), perm));
}

}  // namespace bfcs
