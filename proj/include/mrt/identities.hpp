#pragma once

// Residual evaluators for the operator identities tying W^k, R, the
// moment transforms and the John operator together. Each returns the
// largest absolute residual over all index choices; on rational points the
// residual is computed exactly and `exact_zero` certifies a literal zero.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>

#include "mrt/diffops.hpp"
#include "mrt/moments.hpp"

namespace mrt {

struct Residual {
  double value = 0.0;
  bool exact_zero = true;

  template <class T>
  void absorb(const LineValue<T>& diff) {
    value = std::max(value, std::abs(diff.value()));
    exact_zero = exact_zero && diff.is_zero_value();
  }
  void absorb(const Residual& other) {
    value = std::max(value, other.value);
    exact_zero = exact_zero && other.exact_zero;
  }
};

/// Rational field rescaled so the result is relative to a magnitude.
template <class T>
Residual relative(const LineValue<T>& diff, double scale) {
  Residual r;
  r.value = std::abs(diff.value()) / std::max(scale, std::numeric_limits<double>::min());
  r.exact_zero = diff.is_zero_value();
  return r;
}

/// Scalar multiplying J^0 of the alternated-derivative component in the
/// iterated John identity: (-2)^s s!.
inline Rational john_power_factor(unsigned s) {
  return ((s % 2) ? Rational(-1) : Rational(1)) * pow(Rational(2), s) * factorial(s);
}

/// J^s_{p_1 q_1}...J_{p_s q_s} applied to e for every interleaved tuple
/// (p_1 q_1 .. p_s q_s) with all p_r != q_r. Tuples with some p_r = q_r are
/// omitted: the John operator vanishes there.
inline std::map<IndexTuple, MomentExpression> john_power_table(const MomentExpression& e, unsigned s) {
  const unsigned n = e.dim();
  std::map<IndexTuple, MomentExpression> level{{IndexTuple{}, e}};
  for (unsigned r = 0; r < s; ++r) {
    std::map<IndexTuple, MomentExpression> next;
    for (const auto& [key, expr] : level)
      for (unsigned p = 1; p <= n; ++p)
        for (unsigned q = 1; q <= n; ++q)
          if (p != q) next.emplace(key.with(p).with(q), john(expr, p, q));
    level = std::move(next);
  }
  return level;
}

/// J^{m-k}(J^0 f^{fixed})_{p q} against (-2)^{m-k} (m-k)! J^0((R f^{fixed})_{p q}).
template <class T>
Residual john_power_identity_check(std::shared_ptr<const SymField> f, unsigned k, const IndexTuple& fixed,
                                   const PhasePoint<T>& pt) {
  const unsigned m = f->rank(), n = f->dim();
  if (k >= m) throw argument_error("john_power_identity_check needs k < m");
  if (fixed.size() != k) throw argument_error("fixed tuple must have length k");
  const unsigned s = m - k;
  MomentEvaluator<T> ev(f, pt);
  const RawField rf = operator_R(restrict(*f, fixed));
  const auto table = john_power_table(MomentExpression::transform(f, 0, fixed), s);
  const T factor = from_rational<T>(john_power_factor(s));
  Residual res;
  for_each_tuple(n, 2 * s, [&](const IndexTuple& pq) {
    SymField comp = make_field(n, 0);
    comp.set({}, rf.at(pq));
    LineValue<T> rhs = ev.transform(comp, 0) * factor;
    auto it = table.find(pq);
    LineValue<T> lhs = it == table.end() ? LineValue<T>{} : ev(it->second);
    res.absorb(lhs - rhs);
  });
  return res;
}

/// xi^{p_1}..xi^{p_s} J^s(J^0 f^{fixed})_{p q} against
/// (-1)^s s! d^s/dx^{q_1..q_s} J^0 f^{fixed}, over all q tuples.
template <class T>
Residual collapsed_derivative_check(std::shared_ptr<const SymField> f, unsigned k, const IndexTuple& fixed,
                                    const PhasePoint<T>& pt) {
  const unsigned m = f->rank(), n = f->dim();
  if (k >= m) throw argument_error("collapsed_derivative_check needs k < m");
  if (fixed.size() != k) throw argument_error("fixed tuple must have length k");
  const unsigned s = m - k;
  MomentEvaluator<T> ev(f, pt);
  const MomentExpression base = MomentExpression::transform(f, 0, fixed);
  const auto table = john_power_table(base, s);
  const T factor = from_rational<T>(((s % 2) ? Rational(-1) : Rational(1)) * factorial(s));
  Residual res;
  for_each_tuple(n, s, [&](const IndexTuple& qs) {
    LineValue<T> lhs;
    for_each_tuple(n, s, [&](const IndexTuple& ps) {
      IndexTuple key;
      T w = from_rational<T>(Rational(1));
      for (unsigned r = 0; r < s; ++r) {
        key = key.with(ps[r]).with(qs[r]);
        w *= pt.xi[ps[r] - 1];
      }
      auto it = table.find(key);
      if (it != table.end() && !is_zero(w)) lhs = lhs + ev(it->second) * w;
    });
    MomentExpression d = base;
    for (unsigned q : qs) d = dx(d, q);
    res.absorb(lhs - ev(d) * factor);
  });
  return res;
}

/// sigma over all m positions of t against
/// (1/m) sigma(first m-1 positions)(k t + (m-k) t with slots m-k and m swapped),
/// for t symmetric in its first m-k and last k slots. Returns the difference.
template <class S>
RawTensor<S> symmetrization_relation_difference(const RawTensor<S>& t, unsigned k) {
  const unsigned m = t.rank();
  if (k > m) throw argument_error("block size k exceeds the rank");
  std::vector<unsigned> head(m - k), tail(k);
  std::iota(head.begin(), head.end(), 1u);
  std::iota(tail.begin(), tail.end(), m - k + 1);
  if (!(symmetrize(t, std::span<const unsigned>(head)) == t) || !(symmetrize(t, std::span<const unsigned>(tail)) == t))
    throw argument_error("tensor is not symmetric in its two index blocks");
  RawTensor<S> lhs = symmetrize(t);
  if (k == 0 || m == 0) return lhs - symmetrize(t);
  RawTensor<S> swapped(t.dim(), m, t.zero());
  if (k == m) {
    swapped = t;  // multiplied by m - k = 0 below
  } else {
    for (const auto& [key, v] : t.components()) {
      IndexTuple s = key;
      std::swap(s[m - k - 1], s[m - 1]);
      swapped.set(s, v);
    }
  }
  std::vector<unsigned> most(m - 1);
  std::iota(most.begin(), most.end(), 1u);
  RawTensor<S> inner = t * Rational(k) + swapped * Rational(m - k);
  RawTensor<S> rhs = symmetrize(inner, std::span<const unsigned>(most)) * Rational(1, m);
  return lhs - rhs;
}

inline Residual symmetrization_relation_check(const RawTensor<Rational>& t, unsigned k) {
  Residual r;
  for (const auto& [key, v] : symmetrization_relation_difference(t, k).components()) {
    r.value = std::max(r.value, std::abs(to_double(v)));
    r.exact_zero = false;
  }
  return r;
}

/// T(q, i) = d^{m-k}/dx^q J^0 f^{i} at a rational point, as a rank-m rational
/// tensor of reduced values (common Gaussian factor dropped). Symmetric in
/// the q block and in the i block.
inline RawTensor<Rational> derivative_transform_tensor(std::shared_ptr<const SymField> f, unsigned k,
                                                       const PhasePoint<Rational>& pt) {
  const unsigned m = f->rank(), n = f->dim();
  MomentEvaluator<Rational> ev(f, pt);
  RawTensor<Rational> t(n, m);
  for_each_tuple(n, m, [&](const IndexTuple& qi) {
    MomentExpression e = MomentExpression::transform(f, 0, qi.slice(m - k, k));
    for (unsigned r = 0; r < m - k; ++r) e = dx(e, qi[r]);
    t.set(qi, ev.reduced(e));
  });
  return t;
}

/// (W^k f)_{p, (q i)} against sigma(q i) (W f^{i})_{p q}; exact. k < m.
inline OperatorReport restriction_relation_residual(const SymField& f, unsigned k, const Mutation& mutation = {}) {
  const unsigned m = f.rank(), n = f.dim();
  if (k >= m) throw argument_error("restriction relation needs k < m");
  const unsigned s = m - k;
  const BiSymField wk = generalized_saint_venant(f, k, mutation);
  std::map<IndexTuple, BiSymField> w_restricted;
  for_each_canonical(n, k, [&](const IndexTuple& i) { w_restricted.emplace(i, saint_venant(restrict(f, i))); });
  BiSymField rhs = make_bifield(n, s, m);
  for_each_canonical(n, s, [&](const IndexTuple& P) {
    for_each_canonical(n, m, [&](const IndexTuple& C) {
      PolyGauss acc = PolyGauss::zero(n);
      for_each_split(C, s, [&](const IndexTuple& q, const IndexTuple& i, const Rational& w) {
        acc = acc + w_restricted.at(i).at(P, q) * w;
      });
      rhs.set(P, C, std::move(acc));
    });
  });
  return report(wk - rhs);
}

/// W^m f against f itself.
inline OperatorReport degenerate_order_residual(const SymField& f, const Mutation& mutation = {}) {
  const BiSymField wm = generalized_saint_venant(f, f.rank(), mutation);
  BiSymField as_bi = make_bifield(f.dim(), 0, f.rank());
  for (const auto& [key, v] : f.components()) as_bi.set({}, key, v);
  return report(wm - as_bi);
}

/// W f = 2^m sigma sigma R f and R f = alpha..alpha W f/(m+1), both exact.
struct RWResidual {
  OperatorReport w_from_r;
  OperatorReport r_from_w;
};
inline RWResidual rw_relation_residual(const SymField& f) {
  const BiSymField w = saint_venant(f);
  const RawField r = operator_R(f);
  return {report(w_from_r(r) - w), report(r_from_w(w) - r)};
}

/// sigma(q_1..q_{m-r} i_1..i_r) d^{m-r}/dx^q J^0 f^{i_1..i_r}, largest component.
/// Vanishes for f in the kernel of W^k whenever r <= k.
template <class T>
Residual symmetrized_derivative_residual(std::shared_ptr<const SymField> f, unsigned r, const PhasePoint<T>& pt) {
  const unsigned m = f->rank(), n = f->dim();
  if (r > m) throw argument_error("restriction order exceeds the rank");
  MomentEvaluator<T> ev(f, pt);
  Residual res;
  for_each_canonical(n, m, [&](const IndexTuple& C) {
    LineValue<T> acc;
    for_each_split(C, m - r, [&](const IndexTuple& q, const IndexTuple& i, const Rational& w) {
      MomentExpression e = MomentExpression::transform(f, 0, i);
      for (unsigned d : q) e = dx(e, d);
      acc = acc + ev(e) * from_rational<T>(w);
    });
    res.absorb(acc);
  });
  return res;
}

/// J^0 f^{i_1..i_r} against sum over i_{r+1}..i_k of xi^{i_{r+1}}..xi^{i_k} J^0 f^{i_1..i_k}.
template <class T>
Residual restriction_contraction_residual(std::shared_ptr<const SymField> f, unsigned r, unsigned k,
                                          const PhasePoint<T>& pt) {
  const unsigned m = f->rank(), n = f->dim();
  if (r > k || k > m) throw argument_error("restriction_contraction needs r <= k <= m");
  MomentEvaluator<T> ev(f, pt);
  Residual res;
  for_each_canonical(n, r, [&](const IndexTuple& fixed) {
    LineValue<T> lhs = ev(MomentExpression::transform(f, 0, fixed));
    LineValue<T> rhs;
    for_each_canonical(n, k - r, [&](const IndexTuple& extra) {
      T w = from_rational<T>(multinomial(extra));
      for (unsigned i : extra) w *= pt.xi[i - 1];
      if (!is_zero(w)) rhs = rhs + ev(MomentExpression::transform(f, 0, fixed.concat(extra))) * w;
    });
    res.absorb(lhs - rhs);
  });
  return res;
}

/// <xi, d_x> e evaluated at the evaluator's point.
template <class T>
LineValue<T> xi_dot_dx(MomentEvaluator<T>& ev, const MomentExpression& e) {
  LineValue<T> acc;
  for (unsigned i = 1; i <= e.dim(); ++i)
    if (!is_zero(ev.xi()[i - 1])) acc = acc + ev(dx(e, i)) * ev.xi()[i - 1];
  return acc;
}

/// <xi, d_xi> e evaluated at the evaluator's point.
template <class T>
LineValue<T> xi_dot_dxi(MomentEvaluator<T>& ev, const MomentExpression& e) {
  LineValue<T> acc;
  for (unsigned i = 1; i <= e.dim(); ++i)
    if (!is_zero(ev.xi()[i - 1])) acc = acc + ev(dxi(e, i)) * ev.xi()[i - 1];
  return acc;
}

/// <xi, d_x> J^q f + q J^{q-1} f.
template <class T>
Residual integration_by_parts_residual(std::shared_ptr<const SymField> f, unsigned q, const PhasePoint<T>& pt) {
  MomentEvaluator<T> ev(f, pt);
  LineValue<T> lhs = xi_dot_dx(ev, MomentExpression::transform(f, q));
  if (q > 0) lhs = lhs + ev(MomentExpression::transform(f, q - 1)) * from_rational<T>(Rational(q));
  Residual res;
  res.absorb(lhs);
  return res;
}

/// <xi, d_xi> J^q g - (r - q - 1) J^q g, for the r-rank restrictions g = f^{I}, |I| = m - r.
template <class T>
Residual euler_residual(std::shared_ptr<const SymField> f, unsigned q, unsigned restriction_length,
                        const PhasePoint<T>& pt) {
  const unsigned m = f->rank(), n = f->dim();
  if (restriction_length > m) throw argument_error("restriction longer than the rank");
  MomentEvaluator<T> ev(f, pt);
  const int degree = static_cast<int>(m - restriction_length) - static_cast<int>(q) - 1;
  Residual res;
  for_each_canonical(n, restriction_length, [&](const IndexTuple& fixed) {
    MomentExpression e = MomentExpression::transform(f, q, fixed);
    res.absorb(xi_dot_dxi(ev, e) - ev(e) * from_rational<T>(Rational(degree)));
  });
  return res;
}

/// Translation invariance <xi, d_x> J^0 f^{I} = 0 and homogeneity
/// <xi, d_xi> J^l(J^0 f^{I}) = (m-k-1-l) J^l(J^0 f^{I}), 0 <= l <= m-k-1,
/// over all canonical I of length k.
template <class T>
Residual translation_residual(std::shared_ptr<const SymField> f, unsigned k, const PhasePoint<T>& pt) {
  const unsigned n = f->dim();
  MomentEvaluator<T> ev(f, pt);
  Residual res;
  for_each_canonical(n, k, [&](const IndexTuple& fixed) {
    res.absorb(xi_dot_dx(ev, MomentExpression::transform(f, 0, fixed)));
  });
  return res;
}

template <class T>
Residual john_homogeneity_residual(std::shared_ptr<const SymField> f, unsigned k, const PhasePoint<T>& pt) {
  const unsigned m = f->rank(), n = f->dim();
  if (k >= m) throw argument_error("john_homogeneity needs k < m");
  MomentEvaluator<T> ev(f, pt);
  Residual res;
  for_each_canonical(n, k, [&](const IndexTuple& fixed) {
    const MomentExpression base = MomentExpression::transform(f, 0, fixed);
    for (unsigned l = 0; l + k + 1 <= m; ++l) {
      const T degree = from_rational<T>(Rational(static_cast<int>(m - k - 1 - l)));
      for (const auto& [key, e] : john_power_table(base, l)) res.absorb(xi_dot_dxi(ev, e) - ev(e) * degree);
    }
  });
  return res;
}

/// |J^q f - converted I-data| / max(|J^q f|, |I-data| scale).
/// J^q f with every term of the contraction taken in absolute value: the
/// size of the numbers that cancel when J^q f is small.
template <class T>
double transform_magnitude(const SymField& f, unsigned q, const PhasePoint<T>& pt) {
  LineIntegrator<T> integ(pt.x, pt.xi);
  const auto xi = integ.xi();
  double acc = 0;
  for (const auto& [key, comp] : f.components()) {
    double w = to_double(multinomial(key));
    for (unsigned i : key) w *= std::abs(to_double(xi[i - 1]));
    if (w != 0) acc += w * std::abs(integ.wrap(integ.reduced_moment(comp.poly(), q)).value());
  }
  return acc;
}

/// Error of the I -> J conversion relative to the magnitude of both sides.
template <class T>
Residual conversion_residual(const SymField& f, unsigned q, const PhasePoint<T>& pt) {
  const TSPoint<T> line = TSPoint<T>::project(pt);
  const auto stack = moment_stack(f, q, line);
  const LineValue<T> converted = convert_I_to_J<T>(stack, f.rank(), q, pt);
  const LineValue<T> direct = transform_J(f, q, pt);

  const double norm = std::sqrt(to_double(pt.xi_norm2())), dot = std::abs(to_double(pt.x_dot_xi()));
  double converted_scale = 0;
  for (unsigned l = 0; l <= q; ++l)
    converted_scale += to_double(binomial(q, l)) *
                       std::pow(norm, static_cast<int>(f.rank()) - 2 * static_cast<int>(q) - 1 + static_cast<int>(l)) *
                       std::pow(dot, static_cast<int>(q - l)) * transform_magnitude(f, l, line.point);
  return relative(direct - converted, std::max(transform_magnitude(f, q, pt), converted_scale));
}

/// recover_restricted against the transform of the restricted field.
template <class T>
Residual recovery_residual(std::shared_ptr<const SymField> f, const IndexTuple& fixed, const PhasePoint<T>& pt,
                           const Mutation& mutation = {}) {
  MomentEvaluator<T> ev(f, pt);
  Residual res;
  res.absorb(recover_restricted(f, fixed, pt, mutation) - ev(MomentExpression::transform(f, 0, fixed)));
  return res;
}

/// One John step on J^0 g, g = f^{fixed} of rank s >= 1:
///   J_{pq}(J^0 g) = s J^0(h),  h_{j..} = d_p g_{j.. q} - d_q g_{j.. p},
/// with the right side built from restricted fields, not from the rewrite rules.
template <class T>
Residual john_single_step_residual(std::shared_ptr<const SymField> f, const IndexTuple& fixed,
                                   const PhasePoint<T>& pt) {
  const unsigned n = f->dim();
  if (fixed.size() >= f->rank()) throw argument_error("john_single_step needs a restriction shorter than the rank");
  const unsigned s = f->rank() - static_cast<unsigned>(fixed.size());
  const SymField g = restrict(*f, fixed);
  MomentEvaluator<T> ev(f, pt);
  const MomentExpression base = MomentExpression::transform(f, 0, fixed);
  Residual res;
  for (unsigned p = 1; p <= n; ++p)
    for (unsigned q = 1; q <= n; ++q) {
      if (p == q) continue;
      const SymField h = partial(restrict(g, IndexTuple{q}), p) - partial(restrict(g, IndexTuple{p}), q);
      res.absorb(ev(john(base, p, q)) - ev.transform(h, 0) * from_rational<T>(Rational(s)));
    }
  return res;
}

/// Decay of transform data along the oriented lines (R u, omega), |u| = 1,
/// u perpendicular to omega: the largest R^p |D| over p <= max_power at
/// radius R, for D in {J^q f, d/dx^i J^q f, d/dxi^i J^q f}.
inline Residual decay_diagnostic(std::shared_ptr<const SymField> f, unsigned q, const TSPoint<double>& line,
                                 double radius, unsigned max_power) {
  const unsigned n = f->dim();
  std::vector<double> u = line.point.x;
  double norm = 0;
  for (double v : u) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0) throw argument_error("decay diagnostic needs a line off the origin");
  for (auto& v : u) v *= radius / norm;
  PhasePoint<double> far(u, line.point.xi);
  MomentEvaluator<double> ev(f, far);
  const MomentExpression base = MomentExpression::transform(f, q);
  Residual res;
  res.exact_zero = false;
  for (unsigned i = 0; i <= n; ++i) {
    const double value = std::abs(ev(i == 0 ? base : dx(base, i)).value());
    const double value_xi = i == 0 ? 0.0 : std::abs(ev(dxi(base, i)).value());
    for (unsigned p = 0; p <= max_power; ++p)
      res.value = std::max(res.value, std::pow(radius, p) * std::max(value, value_xi));
  }
  return res;
}

}  // namespace mrt
