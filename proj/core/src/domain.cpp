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

#include "lazycasp/domain.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <sstream>

namespace lazycasp {

namespace {

Int check_range(__int128 v, const char* op) {
  if (v > kMaxValue || v < -kMaxValue) {
    throw OverflowError(std::string("integer overflow in ") + op);
  }
  return static_cast<Int>(v);
}

}  // namespace

Int checked_add(Int a, Int b) { return check_range(__int128(a) + b, "addition"); }
Int checked_sub(Int a, Int b) { return check_range(__int128(a) - b, "subtraction"); }
Int checked_mul(Int a, Int b) { return check_range(__int128(a) * b, "multiplication"); }

Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Int ceil_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

Int ExtInt::value() const {
  if (kind_ != Kind::Finite) throw ContractViolation("value of an infinite bound");
  return value_;
}

bool operator<(const ExtInt& a, const ExtInt& b) {
  if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
  return a.kind_ == ExtInt::Kind::Finite && a.value_ < b.value_;
}

std::ostream& operator<<(std::ostream& out, const ExtInt& v) {
  if (v.is_neg_inf()) return out << "-inf";
  if (v.is_pos_inf()) return out << "+inf";
  return out << v.value();
}

DomainSet::DomainSet(Int lo, Int hi) {
  if (lo <= hi) {
    ranges_.push_back({lo, hi});
    rebuild_prefix();
  }
}

DomainSet DomainSet::from_ranges(std::vector<Range> ranges) {
  std::erase_if(ranges, [](const Range& r) { return r.lo > r.hi; });
  std::sort(ranges.begin(), ranges.end(),
            [](const Range& a, const Range& b) { return a.lo < b.lo; });
  DomainSet out;
  for (const Range& r : ranges) {
    if (!out.ranges_.empty() && r.lo <= out.ranges_.back().hi + 1) {
      out.ranges_.back().hi = std::max(out.ranges_.back().hi, r.hi);
    } else {
      out.ranges_.push_back(r);
    }
  }
  out.rebuild_prefix();
  return out;
}

DomainSet DomainSet::from_values(std::vector<Int> values) {
  std::vector<Range> ranges;
  ranges.reserve(values.size());
  for (Int v : values) ranges.push_back({v, v});
  return from_ranges(std::move(ranges));
}

void DomainSet::rebuild_prefix() {
  prefix_.resize(ranges_.size());
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    total += static_cast<std::uint64_t>(ranges_[i].hi - ranges_[i].lo) + 1;
    prefix_[i] = total;
  }
}

Int DomainSet::lower() const {
  if (empty()) throw ContractViolation("lower bound of an empty domain");
  return ranges_.front().lo;
}

Int DomainSet::upper() const {
  if (empty()) throw ContractViolation("upper bound of an empty domain");
  return ranges_.back().hi;
}

std::size_t DomainSet::locate(Int d) const {
  auto it = std::lower_bound(ranges_.begin(), ranges_.end(), d,
                             [](const Range& r, Int v) { return r.hi < v; });
  return static_cast<std::size_t>(it - ranges_.begin());
}

bool DomainSet::contains(Int d) const {
  std::size_t i = locate(d);
  return i < ranges_.size() && ranges_[i].lo <= d;
}

std::optional<Int> DomainSet::floor(Int d) const {
  std::size_t i = locate(d);
  if (i < ranges_.size() && ranges_[i].lo <= d) return d;
  if (i == 0) return std::nullopt;
  return ranges_[i - 1].hi;
}

std::optional<Int> DomainSet::ceil(Int d) const {
  std::size_t i = locate(d);
  if (i == ranges_.size()) return std::nullopt;
  return std::max(d, ranges_[i].lo);
}

std::optional<Int> DomainSet::prev(Int d) const {
  if (d == std::numeric_limits<Int>::min()) return std::nullopt;
  return floor(d - 1);
}

std::optional<Int> DomainSet::next(Int d) const {
  if (d == std::numeric_limits<Int>::max()) return std::nullopt;
  return ceil(d + 1);
}

Int DomainSet::at(std::uint64_t rank) const {
  if (rank >= size()) throw ContractViolation("domain rank out of range");
  auto it = std::upper_bound(prefix_.begin(), prefix_.end(), rank);
  std::size_t i = static_cast<std::size_t>(it - prefix_.begin());
  std::uint64_t before = i == 0 ? 0 : prefix_[i - 1];
  return ranges_[i].lo + static_cast<Int>(rank - before);
}

std::uint64_t DomainSet::rank(Int d) const {
  std::size_t i = locate(d);
  std::uint64_t before = i == 0 ? 0 : prefix_[i - 1];
  if (i < ranges_.size() && ranges_[i].lo < d) {
    before += static_cast<std::uint64_t>(d - ranges_[i].lo);
  }
  return before;
}

std::uint64_t DomainSet::count(Int lo, Int hi) const {
  if (lo > hi) return 0;
  std::uint64_t below_hi = hi == std::numeric_limits<Int>::max() ? size() : rank(hi + 1);
  return below_hi - rank(lo);
}

DomainSet DomainSet::intersect(const DomainSet& other) const {
  DomainSet out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ranges_.size() && j < other.ranges_.size()) {
    Int lo = std::max(ranges_[i].lo, other.ranges_[j].lo);
    Int hi = std::min(ranges_[i].hi, other.ranges_[j].hi);
    if (lo <= hi) out.ranges_.push_back({lo, hi});
    if (ranges_[i].hi < other.ranges_[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  out.rebuild_prefix();
  return out;
}

DomainSet DomainSet::unite(const DomainSet& other) const {
  std::vector<Range> all(ranges_.begin(), ranges_.end());
  all.insert(all.end(), other.ranges_.begin(), other.ranges_.end());
  return from_ranges(std::move(all));
}

DomainSet DomainSet::shift(Int offset) const {
  DomainSet out = *this;
  for (Range& r : out.ranges_) {
    r.lo = checked_add(r.lo, offset);
    r.hi = checked_add(r.hi, offset);
  }
  return out;
}

DomainSet DomainSet::scale(Int factor, std::uint64_t max_ranges) const {
  if (factor == 0) {
    return empty() ? DomainSet() : DomainSet(0, 0);
  }
  if (factor == 1) return *this;
  if (factor == -1) {
    DomainSet out;
    for (auto it = ranges_.rbegin(); it != ranges_.rend(); ++it) {
      out.ranges_.push_back({-it->hi, -it->lo});
    }
    out.rebuild_prefix();
    return out;
  }
  if (size() > max_ranges) {
    throw ContractViolation("scaled domain too large to materialize");
  }
  std::vector<Int> values;
  values.reserve(size());
  for (const Range& r : ranges_) {
    for (Int d = r.lo;; ++d) {
      values.push_back(checked_mul(d, factor));
      if (d == r.hi) break;
    }
  }
  return from_values(std::move(values));
}

DomainSet DomainSet::clamp(Int lo, Int hi) const { return intersect(DomainSet(lo, hi)); }

std::string DomainSet::str() const {
  std::ostringstream out;
  out << *this;
  return out.str();
}

std::ostream& operator<<(std::ostream& out, const DomainSet& dom) {
  if (dom.empty()) return out << "{}";
  bool first = true;
  for (const Range& r : dom.ranges()) {
    if (!first) out << ",";
    first = false;
    out << r.lo;
    if (r.hi != r.lo) out << ".." << r.hi;
  }
  return out;
}

}  // namespace lazycasp
