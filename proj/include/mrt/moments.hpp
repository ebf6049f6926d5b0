#pragma once

// Momentum ray transforms
//
//   J^q f(x, xi) = int t^q f_{i_1..i_m}(x + t xi) xi^{i_1}..xi^{i_m} dt,
//
// their restriction I^q to oriented lines (|xi| = 1, <x, xi> = 0), and a
// closed algebra of formal expressions built from J^q under d/dx, d/dxi and
// the John operator.
//
// All transforms of a field are evaluated at one point through a shared
// LineIntegrator, so on rational points every value carries the same
// Gaussian factor and sums are exact.

#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mrt/diffops.hpp"
#include "mrt/polygauss.hpp"
#include "mrt/random.hpp"
#include "mrt/symtensor.hpp"

namespace mrt {

template <class T>
struct PhasePoint {
  std::vector<T> x;
  std::vector<T> xi;

  PhasePoint() = default;
  PhasePoint(std::vector<T> x_, std::vector<T> xi_) : x(std::move(x_)), xi(std::move(xi_)) {
    if (x.size() != xi.size()) throw argument_error("phase point x and xi differ in dimension");
    if (std::all_of(xi.begin(), xi.end(), [](const T& v) { return is_zero(v); }))
      throw argument_error("phase point direction xi must be nonzero");
  }
  unsigned dim() const { return static_cast<unsigned>(x.size()); }
  T xi_norm2() const {
    T s = from_rational<T>(Rational(0));
    for (const auto& v : xi) s += v * v;
    return s;
  }
  T x_dot_xi() const {
    T s = from_rational<T>(Rational(0));
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * xi[i];
    return s;
  }
};

/// sqrt in T; exact for rationals, which must then be perfect squares.
template <class T>
T square_root(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    auto r = exact_sqrt(v);
    if (!r) throw argument_error("|xi| is irrational; use the floating-point path");
    return *r;
  } else {
    return std::sqrt(v);
  }
}

/// A point of the manifold of oriented lines: |xi| = 1, <x, xi> = 0.
template <class T>
struct TSPoint {
  PhasePoint<T> point;
  /// ||xi| - 1| + |<x, xi>| after construction; zero on the exact path.
  double residual = 0.0;

  /// Requires the constraints to hold exactly (tolerance 1e-12 for doubles).
  static TSPoint make(std::vector<T> x, std::vector<T> xi) {
    TSPoint p{PhasePoint<T>(std::move(x), std::move(xi)), 0.0};
    const T n2 = p.point.xi_norm2();
    const T dot = p.point.x_dot_xi();
    if constexpr (std::is_same_v<T, Rational>) {
      if (n2 != 1 || dot != 0) throw argument_error("not a point of the oriented-line manifold");
    } else {
      p.residual = std::abs(std::sqrt(n2) - 1.0) + std::abs(dot);
      if (p.residual > 1e-12) throw argument_error("not a point of the oriented-line manifold");
    }
    return p;
  }

  /// Orthogonalizes x against xi and normalizes xi.
  static TSPoint project(const PhasePoint<T>& pt) {
    const T n2 = pt.xi_norm2();
    const T norm = square_root(n2);
    const T beta = pt.x_dot_xi() / n2;
    std::vector<T> x(pt.x), xi(pt.xi);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] -= beta * pt.xi[i];
      xi[i] /= norm;
    }
    TSPoint p{PhasePoint<T>(std::move(x), std::move(xi)), 0.0};
    if constexpr (!std::is_same_v<T, Rational>)
      p.residual = std::abs(std::sqrt(p.point.xi_norm2()) - 1.0) + std::abs(p.point.x_dot_xi());
    return p;
  }
};

// ---------------------------------------------------------------------------

/// Reduced J^q value of a whole field on the integrator's line:
/// sum over canonical J of multiplicity(J) xi^J int t^q f_J(x + t xi) dt.
template <class T>
T contracted_moment(LineIntegrator<T>& integ, const SymField& f, unsigned q) {
  if (f.dim() != integ.dim()) throw argument_error("field dimension does not match the point");
  T acc = from_rational<T>(Rational(0));
  const auto xi = integ.xi();
  for (const auto& [key, comp] : f.components()) {
    T w = from_rational<T>(multinomial(key));
    for (unsigned i : key) w *= xi[i - 1];
    if (is_zero(w)) continue;
    acc += w * integ.reduced_moment(comp.poly(), q);
  }
  return acc;
}

template <class T>
LineValue<T> transform_J(const SymField& f, unsigned q, const PhasePoint<T>& pt) {
  LineIntegrator<T> integ(pt.x, pt.xi);
  auto v = integ.wrap(contracted_moment(integ, f, q));
  if constexpr (std::is_same_v<T, Rational>) return v.normalized();
  return v;
}

template <class T>
LineValue<T> transform_I(const SymField& f, unsigned q, const TSPoint<T>& pt) {
  return transform_J(f, q, pt.point);
}

/// (I^0 f, ..., I^k f) at one oriented line.
template <class T>
std::vector<LineValue<T>> moment_stack(const SymField& f, unsigned k, const TSPoint<T>& pt) {
  LineIntegrator<T> integ(pt.point.x, pt.point.xi);
  std::vector<LineValue<T>> out;
  for (unsigned q = 0; q <= k; ++q) out.push_back(integ.wrap(contracted_moment(integ, f, q)));
  return out;
}

/// J^q f(x, xi) from I^0..I^q at the projected line (x - <x,xi> xi/|xi|^2, xi/|xi|):
///   |xi|^(m-2q-1) sum_l (-1)^(q-l) C(q,l) |xi|^l <xi,x>^(q-l) I^l.
template <class T>
LineValue<T> convert_I_to_J(std::span<const LineValue<T>> i_values, unsigned m, unsigned q, const PhasePoint<T>& pt) {
  if (i_values.size() < q + 1) throw argument_error("convert_I_to_J needs I^0..I^q");
  const T norm = square_root(pt.xi_norm2());
  const T dot = pt.x_dot_xi();
  auto power = [](const T& base, int e) {
    T r = from_rational<T>(Rational(1));
    for (int i = 0; i < std::abs(e); ++i) r *= base;
    return e < 0 ? T(from_rational<T>(Rational(1)) / r) : r;
  };
  LineValue<T> acc;
  for (unsigned l = 0; l <= q; ++l) {
    T c = from_rational<T>(((q - l) % 2 ? Rational(-1) : Rational(1)) * binomial(q, l));
    c *= power(norm, static_cast<int>(m) - 2 * static_cast<int>(q) - 1 + static_cast<int>(l));
    c *= power(dot, static_cast<int>(q - l));
    acc = acc + i_values[l] * c;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Formal moment expressions.

/// J^q of d^derivatives f^{restriction}, relative to a base field f.
struct MomentAtom {
  unsigned q = 0;
  IndexTuple restriction;  // canonical
  IndexTuple derivatives;  // canonical multiset of x-directions
  auto operator<=>(const MomentAtom&) const = default;
  bool operator==(const MomentAtom&) const = default;
};

/// Rational-linear combination of atoms over one shared base field.
class MomentExpression {
 public:
  MomentExpression() = default;

  /// J^q f^{restriction}
  static MomentExpression transform(std::shared_ptr<const SymField> base, unsigned q, const IndexTuple& restriction = {}) {
    if (!base) throw argument_error("moment expression needs a base field");
    if (restriction.size() > base->rank()) throw argument_error("restriction longer than the field rank");
    restriction.check_range(base->dim());
    MomentExpression e;
    e.base_ = std::move(base);
    e.add(MomentAtom{q, restriction.canonical(), {}}, Rational(1));
    return e;
  }

  const std::shared_ptr<const SymField>& base() const { return base_; }
  const std::map<MomentAtom, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  unsigned dim() const { return base_ ? base_->dim() : 0; }

  unsigned atom_rank(const MomentAtom& a) const {
    return base_->rank() - static_cast<unsigned>(a.restriction.size());
  }

  void add(const MomentAtom& atom, const Rational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(atom, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  friend MomentExpression operator+(const MomentExpression& a, const MomentExpression& b) {
    MomentExpression out = a;
    out.merge(b, Rational(1));
    return out;
  }
  friend MomentExpression operator-(const MomentExpression& a, const MomentExpression& b) {
    MomentExpression out = a;
    out.merge(b, Rational(-1));
    return out;
  }
  friend MomentExpression operator*(const MomentExpression& a, const Rational& s) {
    MomentExpression out;
    out.base_ = a.base_;
    for (const auto& [atom, c] : a.terms_) out.add(atom, c * s);
    return out;
  }

  void merge(const MomentExpression& other, const Rational& scale) {
    if (!base_) base_ = other.base_;
    if (other.base_ && other.base_ != base_) throw argument_error("moment expressions over different base fields");
    for (const auto& [atom, c] : other.terms_) add(atom, c * scale);
  }

  MomentExpression empty_like() const {
    MomentExpression out;
    out.base_ = base_;
    return out;
  }

 private:
  std::shared_ptr<const SymField> base_;
  std::map<MomentAtom, Rational> terms_;
};

namespace detail {
inline void check_direction(const MomentExpression& e, unsigned i) {
  if (!e.base()) throw argument_error("derivative of an expression without a base field");
  if (i < 1 || i > e.dim()) throw argument_error("derivative direction " + std::to_string(i) + " out of range");
}
}  // namespace detail

/// d/dx^i J^q(g) = J^q(d_i g).
inline MomentExpression dx(const MomentExpression& e, unsigned i) {
  detail::check_direction(e, i);
  MomentExpression out = e.empty_like();
  for (const auto& [atom, c] : e.terms()) {
    MomentAtom a = atom;
    a.derivatives = a.derivatives.with(i).canonical();
    out.add(a, c);
  }
  return out;
}

/// d/dxi^i J^q(g) = J^{q+1}(d_i g) + r J^q(g^{i}), r = rank of g.
inline MomentExpression dxi(const MomentExpression& e, unsigned i) {
  detail::check_direction(e, i);
  MomentExpression out = e.empty_like();
  for (const auto& [atom, c] : e.terms()) {
    MomentAtom shifted = atom;
    shifted.q += 1;
    shifted.derivatives = shifted.derivatives.with(i).canonical();
    out.add(shifted, c);
    const unsigned r = e.atom_rank(atom);
    if (r > 0) {
      MomentAtom restricted = atom;
      restricted.restriction = restricted.restriction.with(i).canonical();
      out.add(restricted, c * r);
    }
  }
  return out;
}

/// John operator d^2/dx^p dxi^q - d^2/dx^q dxi^p.
inline MomentExpression john(const MomentExpression& e, unsigned p, unsigned q) {
  if (p == q) throw argument_error("John operator needs two distinct indices");
  return dx(dxi(e, q), p) - dx(dxi(e, p), q);
}

/// Evaluates expressions over one base field at one point, memoizing the
/// materialized atom fields and their transforms.
template <class T>
class MomentEvaluator {
 public:
  MomentEvaluator(std::shared_ptr<const SymField> base, const PhasePoint<T>& pt)
      : base_(std::move(base)), integ_(pt.x, pt.xi), xi_(pt.xi) {
    if (base_->dim() != pt.dim()) throw argument_error("field dimension does not match the point");
  }

  const std::vector<T>& xi() const { return xi_; }
  LineIntegrator<T>& integrator() { return integ_; }

  LineValue<T> operator()(const MomentExpression& e) {
    if (e.base() && e.base() != base_) throw argument_error("expression base differs from evaluator base");
    return integ_.wrap(reduced(e));
  }

  T reduced(const MomentExpression& e) {
    T acc = from_rational<T>(Rational(0));
    for (const auto& [atom, c] : e.terms()) acc += from_rational<T>(c) * reduced(atom);
    return acc;
  }

  T reduced(const MomentAtom& a) {
    if (auto it = atoms_.find(a); it != atoms_.end()) return it->second;
    T v = contracted_moment(integ_, atom_field(a.restriction, a.derivatives), a.q);
    atoms_.emplace(a, v);
    return v;
  }

  /// Transform of an unrelated field at the same point (same Gaussian factor).
  LineValue<T> transform(const SymField& g, unsigned q) { return integ_.wrap(contracted_moment(integ_, g, q)); }

  /// d^derivatives f^{restriction}
  const SymField& atom_field(const IndexTuple& restriction, const IndexTuple& derivatives) {
    auto key = std::make_pair(restriction, derivatives);
    if (auto it = fields_.find(key); it != fields_.end()) return it->second;
    SymField g = derivatives.empty()
                     ? restrict(*base_, restriction)
                     : partial(atom_field(restriction, derivatives.slice(0, derivatives.size() - 1)),
                               derivatives[derivatives.size() - 1]);
    return fields_.emplace(std::move(key), std::move(g)).first->second;
  }

 private:
  std::shared_ptr<const SymField> base_;
  LineIntegrator<T> integ_;
  std::vector<T> xi_;
  std::map<std::pair<IndexTuple, IndexTuple>, SymField> fields_;
  std::map<MomentAtom, T> atoms_;
};

template <class T>
LineValue<T> evaluate(const MomentExpression& e, const PhasePoint<T>& pt) {
  MomentEvaluator<T> ev(e.base(), pt);
  return ev(e);
}

/// Right-hand side of the restricted-transform recovery identity:
///   J^0 f^{i_1..i_r} = (m-r)!/m! sigma(i_1..i_r)
///       sum_p (-1)^p C(r,p) d^r J^p f / dx^{i_1..i_p} dxi^{i_{p+1}..i_r}.
/// The unmerged terms of the recovery formula: d_x^p d_xi^(r-p) J^p f for
/// every arrangement of the fixed indices, with their coefficients.
inline std::vector<std::pair<MomentExpression, Rational>> recovery_terms(std::shared_ptr<const SymField> f,
                                                                         const IndexTuple& fixed,
                                                                         const Mutation& mutation = {}) {
  const unsigned m = f->rank();
  const unsigned r = static_cast<unsigned>(fixed.size());
  if (r > m) throw argument_error("cannot recover a restriction longer than the rank");
  fixed.check_range(f->dim());
  const auto arrangements = distinct_arrangements(fixed);
  const Rational prefactor =
      mutation.apply_prefactor(factorial(m - r) / factorial(m)) / Rational(static_cast<long>(arrangements.size()));
  std::vector<std::pair<MomentExpression, Rational>> out;
  for (const auto& order : arrangements)
    for (unsigned p = 0; p <= r; ++p) {
      MomentExpression term = MomentExpression::transform(f, p);
      for (unsigned j = 0; j < p; ++j) term = dx(term, order[j]);
      for (unsigned j = p; j < r; ++j) term = dxi(term, order[j]);
      out.emplace_back(std::move(term), prefactor * mutation.apply(p, p % 2 ? Rational(-1) : Rational(1), binomial(r, p)));
    }
  return out;
}

/// The recovery formula as one merged expression. The rewrite rules reduce
/// it to the single restricted atom when the formula is right.
inline MomentExpression recover_restricted_expression(std::shared_ptr<const SymField> f, const IndexTuple& fixed,
                                                      const Mutation& mutation = {}) {
  MomentExpression out = MomentExpression::transform(f, 0).empty_like();
  for (const auto& [term, c] : recovery_terms(std::move(f), fixed, mutation)) out.merge(term, c);
  return out;
}

/// Evaluates each term separately and sums the values, so cancellation
/// between terms happens in the arithmetic of T rather than symbolically.
template <class T>
LineValue<T> recover_restricted(std::shared_ptr<const SymField> f, const IndexTuple& fixed, const PhasePoint<T>& pt,
                                const Mutation& mutation = {}) {
  MomentEvaluator<T> ev(f, pt);
  LineValue<T> acc;
  for (const auto& [term, c] : recovery_terms(f, fixed, mutation)) acc = acc + ev(term) * from_rational<T>(c);
  return acc;
}

// ---------------------------------------------------------------------------
// Sample points.

/// Rational phase point: |xi| in [1/2, 2], |x| > 0 and the angle between the
/// lines spanned by x and xi at least 15 degrees.
inline PhasePoint<Rational> random_phase_point(Rng& rng, unsigned n) {
  const double max_cos = std::cos(15.0 * std::numbers::pi / 180.0);
  for (;;) {
    std::vector<Rational> x(n), xi(n);
    for (auto& v : x) v = rng.uniform_rational(-1, 1, 4);
    for (auto& v : xi) v = rng.uniform_rational(-2, 2, 4);
    Rational nx(0), nxi(0), dot(0);
    for (unsigned i = 0; i < n; ++i) {
      nx += x[i] * x[i];
      nxi += xi[i] * xi[i];
      dot += x[i] * xi[i];
    }
    if (nxi < Rational(1, 4) || nxi > 4 || nx.is_zero()) continue;
    const double c = std::abs(to_double(dot)) / std::sqrt(to_double(nx) * to_double(nxi));
    if (c > max_cos) continue;
    return PhasePoint<Rational>(std::move(x), std::move(xi));
  }
}

/// Exact rational oriented line: xi from inverse stereographic projection,
/// x orthogonalized against it.
inline TSPoint<Rational> random_ts_point(Rng& rng, unsigned n) {
  for (;;) {
    std::vector<Rational> u(n - 1);
    Rational u2(0);
    for (auto& v : u) {
      v = rng.uniform_rational(-2, 2, 3);
      u2 += v * v;
    }
    const Rational denom = u2 + 1;
    std::vector<Rational> xi(n);
    const unsigned rot = static_cast<unsigned>(rng.uniform_int(0, n - 1));
    for (unsigned i = 0; i + 1 < n; ++i) xi[(i + rot) % n] = 2 * u[i] / denom;
    xi[(n - 1 + rot) % n] = (u2 - 1) / denom;
    std::vector<Rational> y(n);
    Rational dot(0);
    for (unsigned i = 0; i < n; ++i) {
      y[i] = rng.uniform_rational(-1, 1, 4);
      dot += y[i] * xi[i];
    }
    for (unsigned i = 0; i < n; ++i) y[i] -= dot * xi[i];
    if (std::all_of(xi.begin(), xi.end(), [](const Rational& v) { return v.is_zero(); })) continue;
    return TSPoint<Rational>::make(std::move(y), std::move(xi));
  }
}

inline PhasePoint<double> random_phase_point_real(Rng& rng, unsigned n) {
  for (;;) {
    std::vector<double> x(n), xi(n);
    for (auto& v : x) v = rng.uniform_real(-1, 1);
    for (auto& v : xi) v = rng.uniform_real(-2, 2);
    double nxi = 0;
    for (double v : xi) nxi += v * v;
    if (nxi < 0.25 || nxi > 4) continue;
    return PhasePoint<double>(std::move(x), std::move(xi));
  }
}

inline TSPoint<double> random_ts_point_real(Rng& rng, unsigned n) {
  return TSPoint<double>::project(random_phase_point_real(rng, n));
}

inline PhasePoint<double> to_real(const PhasePoint<Rational>& p) {
  std::vector<double> x, xi;
  for (const auto& v : p.x) x.push_back(to_double(v));
  for (const auto& v : p.xi) xi.push_back(to_double(v));
  return PhasePoint<double>(std::move(x), std::move(xi));
}

}  // namespace mrt
