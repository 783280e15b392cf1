#include "fptc/failure.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

#include "fptc/errors.hpp"

namespace fptc {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(FailureType f) noexcept {
  switch (f) {
    case FailureType::kEarly: return "early";
    case FailureType::kLate: return "late";
    case FailureType::kValueCoarse: return "valueCoarse";
    case FailureType::kValueSubtle: return "valueSubtle";
    case FailureType::kOmission: return "omission";
    case FailureType::kCommission: return "commission";
    case FailureType::kNoFailure: return "noFailure";
    case FailureType::kWildcard: return "*";
  }
  return "?";
}

std::optional<FailureType> parse_failure(std::string_view text) noexcept {
  const std::string key = lower(trim(text));
  if (key == "*" || key == "wildcard") return FailureType::kWildcard;
  if (key == "early") return FailureType::kEarly;
  if (key == "late") return FailureType::kLate;
  if (key == "valuecoarse") return FailureType::kValueCoarse;
  if (key == "valuesubtle") return FailureType::kValueSubtle;
  if (key == "omission") return FailureType::kOmission;
  if (key == "commission") return FailureType::kCommission;
  if (key == "nofailure") return FailureType::kNoFailure;
  return std::nullopt;
}

FailureType failure_from_string(std::string_view text) {
  if (auto f = parse_failure(text)) return *f;
  throw Error("unknown failure type '" + std::string(trim(text)) + "'");
}

std::vector<FailureType> parse_failure_list(std::string_view text) {
  std::vector<FailureType> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (!item.empty()) out.push_back(failure_from_string(item));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

FailureSet::FailureSet(std::initializer_list<FailureType> failures) {
  for (auto f : failures) insert(f);
}

bool FailureSet::contains(FailureType f) const noexcept {
  return (bits_ >> static_cast<unsigned>(f)) & 1U;
}

bool FailureSet::insert(FailureType f) {
  if (f == FailureType::kWildcard)
    throw Error("wildcard is a pattern, not a token");
  const auto before = bits_;
  bits_ |= static_cast<std::uint8_t>(1U << static_cast<unsigned>(f));
  return bits_ != before;
}

bool FailureSet::merge(FailureSet other) noexcept {
  const auto before = bits_;
  bits_ |= other.bits_;
  return bits_ != before;
}

void FailureSet::erase(FailureType f) noexcept {
  bits_ &= static_cast<std::uint8_t>(~(1U << static_cast<unsigned>(f)));
}

std::size_t FailureSet::size() const noexcept {
  return static_cast<std::size_t>(std::popcount(bits_));
}

std::vector<FailureType> FailureSet::members() const {
  std::vector<FailureType> out;
  for (unsigned i = 0; i < 7; ++i) {
    if ((bits_ >> i) & 1U) out.push_back(static_cast<FailureType>(i));
  }
  return out;
}

std::string FailureSet::to_string() const {
  std::string out = "{";
  bool first = true;
  for (auto f : members()) {
    if (!first) out += ", ";
    out += fptc::to_string(f);
    first = false;
  }
  return out + "}";
}

}  // namespace fptc
