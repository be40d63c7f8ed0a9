#include "cartan/symbol.hpp"

#include <array>
#include <cctype>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "cartan/error.hpp"

namespace cartan {

namespace {

constexpr std::array<std::string_view, kJetCount> kJetNames = {"x", "u", "p", "q", "r", "s", "t"};

// Constant names are the only open-ended symbol family. The table only grows,
// and lookups by id never race with insertion of a different id.
class ConstTable {
 public:
  std::uint16_t intern(std::string_view name) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint16_t>(names_.size());
    names_.emplace_back(name);
    ids_.emplace(std::string(name), id);
    return id;
  }

  std::string name(std::uint16_t id) const {
    std::shared_lock lock(mutex_);
    return names_.at(id);
  }

 private:
  mutable std::shared_mutex mutex_;
  std::deque<std::string> names_;
  std::unordered_map<std::string, std::uint16_t> ids_;
};

ConstTable& const_table() {
  static ConstTable table;
  return table;
}

bool parse_index(std::string_view digits, int& out) {
  if (digits.empty() || digits.size() > 2) return false;
  int v = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    v = v * 10 + (c - '0');
  }
  if (digits.size() == 2 && digits[0] == '0') return false;
  out = v;
  return true;
}

}  // namespace

std::string_view jet_name(Jet j) { return kJetNames[static_cast<int>(j)]; }

Symbol Symbol::jet(Jet j) { return Symbol(Kind::JetCoord, static_cast<std::uint16_t>(j), 0); }

Symbol Symbol::param(int index) {
  if (index < 1 || index > kParamCount)
    throw Error(ErrorCode::InvalidArgument, "group parameter index out of range: " + std::to_string(index));
  return Symbol(Kind::GroupParam, static_cast<std::uint16_t>(index), 0);
}

Symbol Symbol::coeff(int index, int order) {
  if (index < 0 || index >= kCoeffFnCount || order < 0)
    throw Error(ErrorCode::InvalidArgument, "coefficient function out of range: f" + std::to_string(index));
  return Symbol(Kind::CoeffFn, static_cast<std::uint16_t>(index), static_cast<std::uint16_t>(order));
}

bool Symbol::is_valid_constant_name(std::string_view name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) return false;
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return !builtin(name).has_value() && name != "D";
}

Symbol Symbol::constant(std::string_view name) {
  if (!is_valid_constant_name(name))
    throw Error(ErrorCode::InvalidArgument, "invalid constant name '" + std::string(name) + "'");
  return Symbol(Kind::Const, const_table().intern(name), 0);
}

Symbol Symbol::operator_d() { return Symbol(Kind::Const, const_table().intern("D"), 0); }

std::optional<Symbol> Symbol::builtin(std::string_view name) {
  for (int i = 0; i < kJetCount; ++i)
    if (name == kJetNames[i]) return jet(static_cast<Jet>(i));
  if (name.size() >= 2 && name[0] == 'a') {
    int idx = 0;
    if (parse_index(name.substr(1), idx) && idx >= 1 && idx <= kParamCount) return param(idx);
    return std::nullopt;
  }
  if (name.size() >= 2 && name[0] == 'f' && std::isdigit(static_cast<unsigned char>(name[1]))) {
    std::size_t primes = 0;
    while (primes < name.size() && name[name.size() - 1 - primes] == '\'') ++primes;
    int idx = 0;
    if (parse_index(name.substr(1, name.size() - 1 - primes), idx) && idx < kCoeffFnCount)
      return coeff(idx, static_cast<int>(primes));
  }
  return std::nullopt;
}

std::string Symbol::name() const {
  switch (kind_) {
    case Kind::JetCoord:
      return std::string(kJetNames[index_]);
    case Kind::GroupParam:
      return "a" + std::to_string(index_);
    case Kind::CoeffFn:
      return "f" + std::to_string(index_) + std::string(order_, '\'');
    case Kind::Const:
      return const_table().name(index_);
  }
  return {};
}

Symbol Symbol::bumped() const {
  if (kind_ != Kind::CoeffFn) throw Error(ErrorCode::InvalidArgument, "bumped() on non-coefficient symbol " + name());
  return Symbol(kind_, index_, static_cast<std::uint16_t>(order_ + 1));
}

std::strong_ordering operator<=>(const Symbol& a, const Symbol& b) {
  if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
  if (a.kind_ == Symbol::Kind::Const && a.index_ != b.index_) {
    const auto c = a.name().compare(b.name());
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (a.index_ != b.index_) return a.index_ <=> b.index_;
  return a.order_ <=> b.order_;
}

}  // namespace cartan
