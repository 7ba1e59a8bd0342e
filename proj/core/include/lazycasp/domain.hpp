// Copyright 2026 The lazycasp Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LAZYCASP_DOMAIN_HPP_
#define LAZYCASP_DOMAIN_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lazycasp {

using Int = std::int64_t;

// Values handled by the solver stay within +-kMaxValue so that sums of a
// bounded number of products can be checked without wrapping.
inline constexpr Int kMaxValue = Int(1) << 62;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an operation is invoked outside its documented preconditions.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

// Checked arithmetic. Throws OverflowError when the result leaves
// [-kMaxValue, kMaxValue].
Int checked_add(Int a, Int b);
Int checked_sub(Int a, Int b);
Int checked_mul(Int a, Int b);

Int floor_div(Int a, Int b);
Int ceil_div(Int a, Int b);

// Integer extended by the two infinities, used as the result of stepping
// past the end of a domain.
class ExtInt {
 public:
  enum class Kind : std::uint8_t { NegInf, Finite, PosInf };

  constexpr ExtInt(Int v) : kind_(Kind::Finite), value_(v) {}  // NOLINT
  static constexpr ExtInt neg_inf() { return ExtInt(Kind::NegInf); }
  static constexpr ExtInt pos_inf() { return ExtInt(Kind::PosInf); }

  constexpr bool finite() const { return kind_ == Kind::Finite; }
  constexpr bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  constexpr bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  constexpr Kind kind() const { return kind_; }
  Int value() const;

  friend constexpr bool operator==(const ExtInt& a, const ExtInt& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
  }
  friend bool operator<(const ExtInt& a, const ExtInt& b);

 private:
  constexpr explicit ExtInt(Kind k) : kind_(k), value_(0) {}
  Kind kind_;
  Int value_;
};

std::ostream& operator<<(std::ostream& out, const ExtInt& v);

struct Range {
  Int lo;
  Int hi;
  friend bool operator==(const Range&, const Range&) = default;
};

// A finite set of integers kept as sorted, disjoint, non-adjacent closed
// ranges. The empty set is a valid value.
class DomainSet {
 public:
  DomainSet() = default;
  DomainSet(Int lo, Int hi);
  // Ranges may be unsorted, overlapping or empty (lo > hi); they are merged.
  static DomainSet from_ranges(std::vector<Range> ranges);
  static DomainSet from_values(std::vector<Int> values);

  bool empty() const { return ranges_.empty(); }
  std::uint64_t size() const { return prefix_.empty() ? 0 : prefix_.back(); }
  Int lower() const;
  Int upper() const;
  bool contains(Int d) const;

  // Largest value < d, smallest value > d.
  std::optional<Int> prev(Int d) const;
  std::optional<Int> next(Int d) const;
  // Largest value <= d, smallest value >= d.
  std::optional<Int> floor(Int d) const;
  std::optional<Int> ceil(Int d) const;

  // Element with the given 0-based rank in ascending order.
  Int at(std::uint64_t rank) const;
  // Number of elements strictly below d.
  std::uint64_t rank(Int d) const;
  // Number of elements in [lo, hi].
  std::uint64_t count(Int lo, Int hi) const;

  DomainSet intersect(const DomainSet& other) const;
  DomainSet unite(const DomainSet& other) const;
  DomainSet shift(Int offset) const;
  // {factor * d | d in this}. Throws ContractViolation when |factor| > 1
  // and the result would need more than `max_ranges` ranges.
  DomainSet scale(Int factor, std::uint64_t max_ranges = 1u << 22) const;
  // Restricted to [lo, hi].
  DomainSet clamp(Int lo, Int hi) const;

  std::span<const Range> ranges() const { return ranges_; }
  std::string str() const;

  friend bool operator==(const DomainSet& a, const DomainSet& b) {
    return a.ranges_ == b.ranges_;
  }

 private:
  void rebuild_prefix();
  // Index of the range containing d, or of the first range above d.
  std::size_t locate(Int d) const;

  std::vector<Range> ranges_;
  // prefix_[i] = number of values in ranges_[0..i].
  std::vector<std::uint64_t> prefix_;
};

std::ostream& operator<<(std::ostream& out, const DomainSet& dom);

}  // namespace lazycasp

#endif  // LAZYCASP_DOMAIN_HPP_
