#pragma once

// Differential operators on symmetric tensor fields: inner differentiation d,
// the Saint Venant operator W, its generalization W^k of order m - k, the
// alternated derivative R, and the linear conversions between R and W.
//
// Everything here is exact rational arithmetic on PolyGauss components.

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <utility>

#include "mrt/polygauss.hpp"
#include "mrt/symtensor.hpp"

namespace mrt {

/// Deliberate single-coefficient corruption of an alternating sum, used to
/// show that the verification suites are not vacuous.
struct Mutation {
  enum class Kind { none, flip_sign, bump_binomial, bump_prefactor };
  Kind kind = Kind::none;
  unsigned term = 0;

  bool active() const { return kind != Kind::none; }
  /// Applies to the coefficient of summand `index` of a sum.
  Rational apply(unsigned index, Rational sign, Rational binom) const {
    if (index == term) {
      if (kind == Kind::flip_sign) sign = -sign;
      if (kind == Kind::bump_binomial) binom += 1;
    }
    return sign * binom;
  }
  Rational apply_prefactor(Rational c) const { return kind == Kind::bump_prefactor ? c * 2 : c; }
};

/// Derivative orders seen while evaluating an operator.
struct OperatorTrace {
  unsigned min_order = std::numeric_limits<unsigned>::max();
  unsigned max_order = 0;
  void record(unsigned order) {
    min_order = std::min(min_order, order);
    max_order = std::max(max_order, order);
  }
};

struct OperatorReport {
  Rational max_abs_coefficient{0};
  bool is_zero = true;
};

template <class Tensor>
OperatorReport report(const Tensor& t) {
  OperatorReport r;
  for (const auto& [k, v] : t.components()) {
    r.max_abs_coefficient = std::max(r.max_abs_coefficient, v.poly().max_abs_coefficient());
    r.is_zero = r.is_zero && v.poly().is_zero();
  }
  return r;
}

/// Memoized partial derivatives of the components of one field.
class DerivativeCache {
 public:
  explicit DerivativeCache(const SymField& f) : f_(f) {}

  /// d^|directions| f_component / dx^directions
  const PolyGauss& get(const IndexTuple& component, const IndexTuple& directions) {
    IndexTuple c = component.canonical();
    IndexTuple d = directions.canonical();
    auto key = std::make_pair(c, d);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    PolyGauss value = d.empty() ? f_.at(c) : derive(get(c, d.slice(0, d.size() - 1)), d[d.size() - 1]);
    return cache_.emplace(std::move(key), std::move(value)).first->second;
  }

 private:
  const SymField& f_;
  std::map<std::pair<IndexTuple, IndexTuple>, PolyGauss> cache_;
};

/// Componentwise partial derivative of a whole field.
inline SymField partial(const SymField& f, unsigned i) {
  return f.map([&](const PolyGauss& g) { return derive(g, i); });
}

/// (du)_{i_1..i_{m+1}} = sigma(i_1..i_{m+1}) du_{i_1..i_m}/dx^{i_{m+1}}.
inline SymField inner_derivative(const SymField& u) {
  const unsigned n = u.dim(), m = u.rank();
  SymField out = make_field(n, m + 1);
  for_each_canonical(n, m + 1, [&](const IndexTuple& key) {
    PolyGauss acc = PolyGauss::zero(n);
    for_each_split(key, 1, [&](const IndexTuple& dir, const IndexTuple& rest, const Rational& w) {
      acc = acc + derive(u.at(rest), dir[0]) * w;
    });
    out.set(key, std::move(acc));
  });
  return out;
}

inline SymField iterate_d(const SymField& v, unsigned times) {
  SymField out = v;
  for (unsigned i = 0; i < times; ++i) out = inner_derivative(out);
  return out;
}

/// (Wf)_{I J} = sigma(I) sigma(J) sum_l (-1)^l C(m,l)
///     d^m f_{i_1..i_{m-l} j_1..j_l} / dx^{j_{l+1}..j_m} dx^{i_{m-l+1}..i_m}.
/// Result has symmetric groups I (rank m) and J (rank m).
inline BiSymField saint_venant(const SymField& f) {
  const unsigned n = f.dim(), m = f.rank();
  if (m == 0) throw argument_error("the Saint Venant operator needs rank >= 1");
  DerivativeCache dcache(f);
  BiSymField out = make_bifield(n, m, m);
  for_each_canonical(n, m, [&](const IndexTuple& I) {
    for_each_canonical(n, m, [&](const IndexTuple& J) {
      PolyGauss acc = PolyGauss::zero(n);
      for (unsigned l = 0; l <= m; ++l) {
        const Rational coef = (l % 2 ? Rational(-1) : Rational(1)) * binomial(m, l);
        // i-group: m-l labels to the component, l to derivatives;
        // j-group: l labels to the component, m-l to derivatives.
        for_each_split(I, m - l, [&](const IndexTuple& i_comp, const IndexTuple& i_der, const Rational& wi) {
          for_each_split(J, l, [&](const IndexTuple& j_comp, const IndexTuple& j_der, const Rational& wj) {
            const PolyGauss& d = dcache.get(i_comp.concat(j_comp), j_der.concat(i_der));
            if (!is_zero(d)) acc = acc + d * (coef * wi * wj);
          });
        });
      }
      out.set(I, J, std::move(acc));
    });
  });
  return out;
}

/// Generalized Saint Venant operator of order m - k:
///   (W^k f)_{p_1..p_s q_1..q_s i_1..i_k} = sigma(p) sigma(q i) sum_l (-1)^l C(s,l)
///       d^s f^{i_1..i_k}_{p_1..p_{s-l} q_1..q_l} / dx^{p_{s-l+1}..p_s} dx^{q_{l+1}..q_s}
/// with s = m - k. Stored with groups (p) of rank s and (q i) of rank m.
/// For k = m it reduces to the identity.
inline BiSymField generalized_saint_venant(const SymField& f, unsigned k, const Mutation& mutation = {},
                                           OperatorTrace* trace = nullptr) {
  const unsigned n = f.dim(), m = f.rank();
  if (k > m) throw argument_error("order k = " + std::to_string(k) + " exceeds rank m = " + std::to_string(m));
  const unsigned s = m - k;
  DerivativeCache dcache(f);
  BiSymField out = make_bifield(n, s, m);
  for_each_canonical(n, s, [&](const IndexTuple& P) {
    for_each_canonical(n, m, [&](const IndexTuple& C) {
      PolyGauss acc = PolyGauss::zero(n);
      for (unsigned l = 0; l <= s; ++l) {
        const Rational coef = mutation.apply(l, l % 2 ? Rational(-1) : Rational(1), binomial(s, l));
        // p-group: s-l labels stay on the component, l are derivatives;
        // (q i)-group: s-l of the q labels are derivatives, the rest stay.
        for_each_split(P, s - l, [&](const IndexTuple& p_comp, const IndexTuple& p_der, const Rational& wp) {
          for_each_split(C, s - l, [&](const IndexTuple& c_der, const IndexTuple& c_comp, const Rational& wc) {
            IndexTuple dirs = p_der.concat(c_der);
            if (trace) trace->record(static_cast<unsigned>(dirs.size()));
            const PolyGauss& d = dcache.get(p_comp.concat(c_comp), dirs);
            if (!is_zero(d)) acc = acc + d * (coef * wp * wc);
          });
        });
      }
      out.set(P, C, std::move(acc));
    });
  });
  return out;
}

namespace detail {
// Positions (1-based) of the i- and j-slots of an interleaved i1 j1 i2 j2 ... tuple.
inline IndexTuple interleave(const IndexTuple& is, const IndexTuple& js) {
  IndexTuple t;
  for (std::size_t r = 0; r < is.size(); ++r) {
    t.push_back(is[r]);
    t.push_back(js[r]);
  }
  return t;
}

// Sum over the 2^m swap patterns of alpha(i_1 j_1)...alpha(i_m j_m), calling
// fn(swapped_is, swapped_js, sign); caller divides by 2^m.
template <class Fn>
void for_each_alternation(const IndexTuple& interleaved, Fn&& fn) {
  const std::size_t m = interleaved.size() / 2;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    IndexTuple is, js;
    int sign = 1;
    for (std::size_t r = 0; r < m; ++r) {
      unsigned a = interleaved[2 * r], b = interleaved[2 * r + 1];
      if (mask & (1u << r)) {
        std::swap(a, b);
        sign = -sign;
      }
      is.push_back(a);
      js.push_back(b);
    }
    fn(is, js, sign);
  }
}
}  // namespace detail

/// (Rf)_{i_1 j_1 .. i_m j_m} = alpha(i_1 j_1)..alpha(i_m j_m) d^m f_{i_1..i_m}/dx^{j_1..j_m},
/// stored as a raw rank-2m tensor with interleaved index order.
inline RawField operator_R(const SymField& f) {
  const unsigned n = f.dim(), m = f.rank();
  if (m == 0) throw argument_error("operator R needs rank >= 1");
  DerivativeCache dcache(f);
  RawField out = make_raw_field(n, 2 * m);
  const Rational scale(1, static_cast<long>(1u << m));
  for_each_tuple(n, 2 * m, [&](const IndexTuple& t) {
    for (std::size_t r = 0; r < m; ++r)
      if (t[2 * r] == t[2 * r + 1]) return;  // alternation of an equal pair vanishes
    PolyGauss acc = PolyGauss::zero(n);
    detail::for_each_alternation(t, [&](const IndexTuple& is, const IndexTuple& js, int sign) {
      acc = acc + dcache.get(is, js) * Rational(sign);
    });
    out.set(t, acc * scale);
  });
  return out;
}

/// W f = 2^m sigma(i) sigma(j) R f.
inline BiSymField w_from_r(const RawField& rf) {
  if (rf.rank() == 0 || rf.rank() % 2) throw argument_error("w_from_r expects an even positive rank");
  const unsigned n = rf.dim(), m = rf.rank() / 2;
  BiSymField out = make_bifield(n, m, m);
  const Rational pow2(static_cast<long>(1u << m));
  for_each_canonical(n, m, [&](const IndexTuple& I) {
    auto arr_i = distinct_arrangements(I);
    for_each_canonical(n, m, [&](const IndexTuple& J) {
      auto arr_j = distinct_arrangements(J);
      PolyGauss acc = PolyGauss::zero(n);
      for (const auto& a : arr_i)
        for (const auto& b : arr_j) acc = acc + rf.at(detail::interleave(a, b));
      out.set(I, J, acc * (pow2 / Rational(static_cast<long>(arr_i.size() * arr_j.size()))));
    });
  });
  return out;
}

/// R f = alpha(i_1 j_1)..alpha(i_m j_m) W f / (m + 1).
inline RawField r_from_w(const BiSymField& wf) {
  if (wf.rank1() != wf.rank2() || wf.rank1() == 0)
    throw argument_error("r_from_w expects two index groups of equal positive rank");
  const unsigned n = wf.dim(), m = wf.rank1();
  RawField out = make_raw_field(n, 2 * m);
  const Rational scale = Rational(1, static_cast<long>(1u << m)) / Rational(m + 1);
  for_each_tuple(n, 2 * m, [&](const IndexTuple& t) {
    PolyGauss acc = PolyGauss::zero(n);
    detail::for_each_alternation(t, [&](const IndexTuple& is, const IndexTuple& js, int sign) {
      acc = acc + wf.at(is, js) * Rational(sign);
    });
    out.set(t, acc * scale);
  });
  return out;
}

}  // namespace mrt
