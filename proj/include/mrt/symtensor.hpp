#pragma once

// Sparse storage and index algebra for symmetric, block-symmetric and raw
// tensors over an arbitrary scalar S. Indices are 1-based everywhere.
//
// Scalar requirements: copyable, a + b, a - b, -a, a * Rational, and an
// ADL-visible is_zero(const S&).

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mrt/rational.hpp"

namespace mrt {

class IndexTuple {
 public:
  IndexTuple() = default;
  IndexTuple(std::initializer_list<unsigned> il) : idx_(il) {}
  explicit IndexTuple(std::vector<unsigned> v) : idx_(std::move(v)) {}

  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  unsigned operator[](std::size_t i) const { return idx_[i]; }
  unsigned& operator[](std::size_t i) { return idx_[i]; }
  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }
  const std::vector<unsigned>& values() const { return idx_; }

  void push_back(unsigned i) { idx_.push_back(i); }

  bool in_range(unsigned n) const {
    return std::all_of(idx_.begin(), idx_.end(), [n](unsigned i) { return i >= 1 && i <= n; });
  }
  void check_range(unsigned n) const {
    if (!in_range(n)) throw argument_error("index tuple " + str() + " out of range [1," + std::to_string(n) + "]");
  }

  bool is_canonical() const { return std::is_sorted(idx_.begin(), idx_.end()); }
  IndexTuple canonical() const {
    IndexTuple t = *this;
    std::sort(t.idx_.begin(), t.idx_.end());
    return t;
  }

  IndexTuple concat(const IndexTuple& other) const {
    IndexTuple t = *this;
    t.idx_.insert(t.idx_.end(), other.idx_.begin(), other.idx_.end());
    return t;
  }
  IndexTuple with(unsigned i) const {
    IndexTuple t = *this;
    t.idx_.push_back(i);
    return t;
  }
  IndexTuple slice(std::size_t from, std::size_t count) const {
    return IndexTuple(std::vector<unsigned>(idx_.begin() + from, idx_.begin() + from + count));
  }

  /// "1,1,2"
  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < idx_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(idx_[i]);
    }
    return s;
  }

  auto operator<=>(const IndexTuple&) const = default;
  bool operator==(const IndexTuple&) const = default;

 private:
  std::vector<unsigned> idx_;
};

// ---------------------------------------------------------------------------
// Multiset combinatorics on canonical tuples.

/// Calls fn for every non-decreasing tuple of the given length over [1, n].
template <class Fn>
void for_each_canonical(unsigned n, unsigned length, Fn&& fn) {
  IndexTuple t(std::vector<unsigned>(length, 1));
  if (length == 0) {
    fn(t);
    return;
  }
  for (;;) {
    fn(static_cast<const IndexTuple&>(t));
    int pos = static_cast<int>(length) - 1;
    while (pos >= 0 && t[pos] == n) --pos;
    if (pos < 0) return;
    unsigned v = t[pos] + 1;
    for (std::size_t j = pos; j < length; ++j) t[j] = v;
  }
}

/// Calls fn for every tuple in [1, n]^length, lexicographically.
template <class Fn>
void for_each_tuple(unsigned n, unsigned length, Fn&& fn) {
  IndexTuple t(std::vector<unsigned>(length, 1));
  for (;;) {
    fn(static_cast<const IndexTuple&>(t));
    int pos = static_cast<int>(length) - 1;
    while (pos >= 0 && t[pos] == n) t[pos--] = 1;
    if (pos < 0) return;
    ++t[pos];
  }
}

/// Distinct orderings of the multiset held by t.
inline std::vector<IndexTuple> distinct_arrangements(const IndexTuple& t) {
  std::vector<unsigned> v = t.canonical().values();
  std::vector<IndexTuple> out;
  do {
    out.emplace_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

/// Number of distinct orderings: |t|! / prod(multiplicity!).
inline Rational multinomial(const IndexTuple& t) {
  IndexTuple c = t.canonical();
  Rational r = factorial(static_cast<unsigned>(c.size()));
  for (std::size_t i = 0; i < c.size();) {
    std::size_t j = i;
    while (j < c.size() && c[j] == c[i]) ++j;
    r /= factorial(static_cast<unsigned>(j - i));
    i = j;
  }
  return r;
}

/// For a uniformly random ordering of the multiset `whole`, the first `size`
/// slots hold a sub-multiset `sub` with a hypergeometric probability. Calls
/// fn(sub, rest, probability) once per distinct sub-multiset. This is the
/// weighted form of averaging over all |whole|! permutations.
template <class Fn>
void for_each_split(const IndexTuple& whole, std::size_t size, Fn&& fn) {
  IndexTuple c = whole.canonical();
  std::vector<std::pair<unsigned, unsigned>> groups;  // (value, multiplicity)
  for (unsigned v : c) {
    if (groups.empty() || groups.back().first != v) groups.emplace_back(v, 0);
    ++groups.back().second;
  }
  const Rational total = binomial(static_cast<unsigned>(c.size()), static_cast<unsigned>(size));
  std::vector<unsigned> take(groups.size(), 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t g, std::size_t left) {
    if (g == groups.size()) {
      if (left != 0) return;
      IndexTuple sub, rest;
      Rational w(1);
      for (std::size_t j = 0; j < groups.size(); ++j) {
        for (unsigned a = 0; a < take[j]; ++a) sub.push_back(groups[j].first);
        for (unsigned a = take[j]; a < groups[j].second; ++a) rest.push_back(groups[j].first);
        w *= binomial(groups[j].second, take[j]);
      }
      fn(static_cast<const IndexTuple&>(sub), static_cast<const IndexTuple&>(rest), static_cast<const Rational&>(w / total));
      return;
    }
    for (unsigned a = 0; a <= groups[g].second && a <= left; ++a) {
      take[g] = a;
      rec(g + 1, left - a);
    }
    take[g] = 0;
  };
  if (size <= c.size()) rec(0, size);
}

// ---------------------------------------------------------------------------

/// Fully symmetric tensor of a given rank; components keyed by canonical tuple.
template <class S>
class SymTensor {
 public:
  SymTensor(unsigned n, unsigned rank, S zero = S{}) : n_(n), rank_(rank), zero_(std::move(zero)) {
    if (n < 1) throw argument_error("dimension must be positive");
  }

  unsigned dim() const { return n_; }
  unsigned rank() const { return rank_; }
  const S& zero() const { return zero_; }

  /// Lookup by any permutation of a tuple; missing components are zero.
  const S& at(const IndexTuple& t) const {
    check(t);
    auto it = comps_.find(t.canonical());
    return it == comps_.end() ? zero_ : it->second;
  }
  void set(const IndexTuple& t, S value) {
    check(t);
    IndexTuple key = t.canonical();
    if (is_zero(value))
      comps_.erase(key);
    else
      comps_.insert_or_assign(std::move(key), std::move(value));
  }
  void add(const IndexTuple& t, const S& value) { set(t, at(t) + value); }

  /// Stored (nonzero) components by canonical key.
  const std::map<IndexTuple, S>& components() const { return comps_; }
  bool is_zero_tensor() const { return comps_.empty(); }

  template <class Fn>
  SymTensor map(Fn&& fn) const {
    SymTensor out(n_, rank_, zero_);
    for (const auto& [k, v] : comps_) out.set(k, fn(v));
    return out;
  }

  friend SymTensor operator+(const SymTensor& a, const SymTensor& b) {
    a.check_shape(b);
    SymTensor out = a;
    for (const auto& [k, v] : b.comps_) out.set(k, out.at(k) + v);
    return out;
  }
  friend SymTensor operator-(const SymTensor& a, const SymTensor& b) {
    a.check_shape(b);
    SymTensor out = a;
    for (const auto& [k, v] : b.comps_) out.set(k, out.at(k) - v);
    return out;
  }
  friend SymTensor operator*(const SymTensor& a, const Rational& s) {
    return a.map([&](const S& v) { return v * s; });
  }
  bool operator==(const SymTensor& o) const {
    return n_ == o.n_ && rank_ == o.rank_ && comps_ == o.comps_;
  }

 private:
  void check(const IndexTuple& t) const {
    if (t.size() != rank_)
      throw argument_error("tuple " + t.str() + " has length " + std::to_string(t.size()) + ", rank is " +
                           std::to_string(rank_));
    t.check_range(n_);
  }
  void check_shape(const SymTensor& o) const {
    if (n_ != o.n_ || rank_ != o.rank_) throw argument_error("symmetric tensor shape mismatch");
  }

  unsigned n_;
  unsigned rank_;
  S zero_;
  std::map<IndexTuple, S> comps_;
};

/// Two independently symmetric index groups; not symmetric across groups.
template <class S>
class BiSymTensor {
 public:
  using Key = std::pair<IndexTuple, IndexTuple>;

  BiSymTensor(unsigned n, unsigned rank1, unsigned rank2, S zero = S{})
      : n_(n), r1_(rank1), r2_(rank2), zero_(std::move(zero)) {}

  unsigned dim() const { return n_; }
  unsigned rank1() const { return r1_; }
  unsigned rank2() const { return r2_; }
  const S& zero() const { return zero_; }

  const S& at(const IndexTuple& a, const IndexTuple& b) const {
    check(a, b);
    auto it = comps_.find(Key{a.canonical(), b.canonical()});
    return it == comps_.end() ? zero_ : it->second;
  }
  void set(const IndexTuple& a, const IndexTuple& b, S value) {
    check(a, b);
    Key key{a.canonical(), b.canonical()};
    if (is_zero(value))
      comps_.erase(key);
    else
      comps_.insert_or_assign(std::move(key), std::move(value));
  }

  const std::map<Key, S>& components() const { return comps_; }
  bool is_zero_tensor() const { return comps_.empty(); }

  friend BiSymTensor operator-(const BiSymTensor& a, const BiSymTensor& b) {
    if (a.n_ != b.n_ || a.r1_ != b.r1_ || a.r2_ != b.r2_) throw argument_error("bi-symmetric shape mismatch");
    BiSymTensor out = a;
    for (const auto& [k, v] : b.comps_) out.set(k.first, k.second, out.at(k.first, k.second) - v);
    return out;
  }
  bool operator==(const BiSymTensor& o) const {
    return n_ == o.n_ && r1_ == o.r1_ && r2_ == o.r2_ && comps_ == o.comps_;
  }

 private:
  void check(const IndexTuple& a, const IndexTuple& b) const {
    if (a.size() != r1_ || b.size() != r2_) throw argument_error("bi-symmetric tuple lengths do not match ranks");
    a.check_range(n_);
    b.check_range(n_);
  }

  unsigned n_, r1_, r2_;
  S zero_;
  std::map<Key, S> comps_;
};

/// Tensor with no assumed symmetry, keyed by full index tuples.
template <class S>
class RawTensor {
 public:
  RawTensor(unsigned n, unsigned rank, S zero = S{}) : n_(n), rank_(rank), zero_(std::move(zero)) {}

  unsigned dim() const { return n_; }
  unsigned rank() const { return rank_; }
  const S& zero() const { return zero_; }

  const S& at(const IndexTuple& t) const {
    check(t);
    auto it = comps_.find(t);
    return it == comps_.end() ? zero_ : it->second;
  }
  void set(const IndexTuple& t, S value) {
    check(t);
    if (is_zero(value))
      comps_.erase(t);
    else
      comps_.insert_or_assign(t, std::move(value));
  }
  void add(const IndexTuple& t, const S& value) { set(t, at(t) + value); }

  const std::map<IndexTuple, S>& components() const { return comps_; }
  bool is_zero_tensor() const { return comps_.empty(); }

  friend RawTensor operator+(const RawTensor& a, const RawTensor& b) {
    a.check_shape(b);
    RawTensor out = a;
    for (const auto& [k, v] : b.comps_) out.add(k, v);
    return out;
  }
  friend RawTensor operator-(const RawTensor& a, const RawTensor& b) {
    a.check_shape(b);
    RawTensor out = a;
    for (const auto& [k, v] : b.comps_) out.set(k, out.at(k) - v);
    return out;
  }
  friend RawTensor operator*(const RawTensor& a, const Rational& s) {
    RawTensor out(a.n_, a.rank_, a.zero_);
    for (const auto& [k, v] : a.comps_) out.set(k, v * s);
    return out;
  }
  bool operator==(const RawTensor& o) const {
    return n_ == o.n_ && rank_ == o.rank_ && comps_ == o.comps_;
  }

 private:
  void check(const IndexTuple& t) const {
    if (t.size() != rank_) throw argument_error("raw tuple " + t.str() + " does not match rank");
    t.check_range(n_);
  }
  void check_shape(const RawTensor& o) const {
    if (n_ != o.n_ || rank_ != o.rank_) throw argument_error("raw tensor shape mismatch");
  }

  unsigned n_, rank_;
  S zero_;
  std::map<IndexTuple, S> comps_;
};

template <class S>
RawTensor<S> to_raw(const SymTensor<S>& t) {
  RawTensor<S> out(t.dim(), t.rank(), t.zero());
  for (const auto& [k, v] : t.components())
    for (const auto& arr : distinct_arrangements(k)) out.set(arr, v);
  return out;
}

// ---------------------------------------------------------------------------
// Operations.

namespace detail {
inline void check_positions(std::span<const unsigned> positions, unsigned rank) {
  std::set<unsigned> seen;
  for (unsigned p : positions) {
    if (p < 1 || p > rank) throw argument_error("position " + std::to_string(p) + " outside [1," + std::to_string(rank) + "]");
    if (!seen.insert(p).second) throw argument_error("repeated position " + std::to_string(p));
  }
}
}  // namespace detail

/// Average of t over all permutations of the listed (1-based) positions;
/// the other positions are left alone.
template <class S>
RawTensor<S> symmetrize(const RawTensor<S>& t, std::span<const unsigned> positions) {
  detail::check_positions(positions, t.rank());
  RawTensor<S> out(t.dim(), t.rank(), t.zero());
  for (const auto& [key, value] : t.components()) {
    IndexTuple group;
    for (unsigned p : positions) group.push_back(key[p - 1]);
    auto arrangements = distinct_arrangements(group);
    S share = value * Rational(1, static_cast<long>(arrangements.size()));
    for (const auto& arr : arrangements) {
      IndexTuple k = key;
      for (std::size_t j = 0; j < positions.size(); ++j) k[positions[j] - 1] = arr[j];
      out.add(k, share);
    }
  }
  return out;
}

template <class S>
RawTensor<S> symmetrize(const RawTensor<S>& t, std::initializer_list<unsigned> positions) {
  return symmetrize(t, std::span<const unsigned>(positions.begin(), positions.size()));
}

/// Symmetrization over every position.
template <class S>
RawTensor<S> symmetrize(const RawTensor<S>& t) {
  std::vector<unsigned> all(t.rank());
  std::iota(all.begin(), all.end(), 1u);
  return symmetrize(t, std::span<const unsigned>(all));
}

/// (t - t with positions a and b swapped) / 2.
template <class S>
RawTensor<S> alternate(const RawTensor<S>& t, unsigned a, unsigned b) {
  if (a == b) throw argument_error("alternation needs two distinct positions");
  unsigned pos[] = {a, b};
  detail::check_positions(pos, t.rank());
  RawTensor<S> out(t.dim(), t.rank(), t.zero());
  const Rational half(1, 2);
  for (const auto& [key, value] : t.components()) {
    S share = value * half;
    out.add(key, share);
    IndexTuple swapped = key;
    std::swap(swapped[a - 1], swapped[b - 1]);
    out.add(swapped, -share);
  }
  return out;
}

/// Fixes the leading indices: result_J = f_{fixed, J}.
template <class S>
SymTensor<S> restrict(const SymTensor<S>& f, const IndexTuple& fixed) {
  if (fixed.size() > f.rank())
    throw argument_error("cannot fix " + std::to_string(fixed.size()) + " indices of a rank-" + std::to_string(f.rank()) +
                         " tensor");
  fixed.check_range(f.dim());
  const unsigned r = f.rank() - static_cast<unsigned>(fixed.size());
  SymTensor<S> out(f.dim(), r, f.zero());
  for_each_canonical(f.dim(), r, [&](const IndexTuple& j) { out.set(j, f.at(fixed.concat(j))); });
  return out;
}

/// Contracts p slots with v: result_J = sum_A t_{A J} v^{a1}...v^{ap}.
template <class S, class V>
SymTensor<S> contract_with_power(const SymTensor<S>& t, std::span<const V> v, unsigned p) {
  if (v.size() != t.dim()) throw argument_error("contraction vector has the wrong dimension");
  if (p > t.rank()) throw argument_error("cannot contract more slots than the rank");
  const unsigned r = t.rank() - p;
  SymTensor<S> out(t.dim(), r, t.zero());
  for_each_canonical(t.dim(), r, [&](const IndexTuple& j) {
    S acc = t.zero();
    for_each_canonical(t.dim(), p, [&](const IndexTuple& a) {
      const S& comp = t.at(a.concat(j));
      if (is_zero(comp)) return;
      Rational w = multinomial(a);
      for (unsigned i : a) w *= Rational(v[i - 1]);
      acc = acc + comp * w;
    });
    out.set(j, std::move(acc));
  });
  return out;
}

}  // namespace mrt
