#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fptc {

/// FPTC failure vocabulary. The first six are concrete failure modes;
/// noFailure and wildcard are patterns.
enum class FailureType : std::uint8_t {
  kEarly,
  kLate,
  kValueCoarse,
  kValueSubtle,
  kOmission,
  kCommission,
  kNoFailure,
  kWildcard,
};

inline constexpr std::array<FailureType, 6> kConcreteFailures = {
    FailureType::kEarly,       FailureType::kLate,
    FailureType::kValueCoarse, FailureType::kValueSubtle,
    FailureType::kOmission,    FailureType::kCommission};

/// Failure types that have an injector and a detector.
inline constexpr std::array<FailureType, 4> kInjectableFailures = {
    FailureType::kEarly, FailureType::kLate, FailureType::kValueCoarse,
    FailureType::kValueSubtle};

/// Canonical spelling: early, late, valueCoarse, valueSubtle, omission,
/// commission, noFailure, "*".
std::string_view to_string(FailureType f) noexcept;

/// Case-insensitive keyword lookup; "*" is the wildcard.
std::optional<FailureType> parse_failure(std::string_view text) noexcept;

/// Like parse_failure but throws fptc::Error naming the bad keyword.
FailureType failure_from_string(std::string_view text);

/// Comma separated list, e.g. "early,late".
std::vector<FailureType> parse_failure_list(std::string_view text);

inline bool is_concrete(FailureType f) noexcept {
  return f != FailureType::kNoFailure && f != FailureType::kWildcard;
}

inline bool is_injectable(FailureType f) noexcept {
  return f == FailureType::kEarly || f == FailureType::kLate ||
         f == FailureType::kValueCoarse || f == FailureType::kValueSubtle;
}

/// Set of token values (concrete six plus noFailure) held at a port.
/// Never contains the wildcard.
class FailureSet {
 public:
  constexpr FailureSet() = default;
  FailureSet(std::initializer_list<FailureType> failures);

  static FailureSet no_failure() { return FailureSet{FailureType::kNoFailure}; }

  bool contains(FailureType f) const noexcept;
  /// Returns true when the set grew.
  bool insert(FailureType f);
  /// Returns true when the set grew.
  bool merge(FailureSet other) noexcept;
  void erase(FailureType f) noexcept;

  bool empty() const noexcept { return bits_ == 0; }
  std::size_t size() const noexcept;
  std::uint8_t bits() const noexcept { return bits_; }

  /// Members in enum order.
  std::vector<FailureType> members() const;

  /// "{early, late}"; noFailure included when present.
  std::string to_string() const;

  friend bool operator==(FailureSet, FailureSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

}  // namespace fptc
