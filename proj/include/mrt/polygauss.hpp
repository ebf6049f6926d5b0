#pragma once

// Scalar fields p(x) exp(-|x|^2) with exact rational polynomial p, their
// derivatives, and exact line moments
//
//   int t^q p(x + t xi) exp(-|x + t xi|^2) dt.
//
// Along a line, |x + t xi|^2 = a t^2 + 2 b t + c with a = |xi|^2,
// b = <x, xi>, c = |x|^2. Completing the square gives every such integral as
//
//   reduced * sqrt(pi) * exp(-(c - b^2/a)) / sqrt(a),
//
// where `reduced` lies in the same field as the inputs. LineValue carries
// that triple, so two values at the same line compare exactly.

#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mrt/polynomial.hpp"
#include "mrt/random.hpp"
#include "mrt/symtensor.hpp"

namespace mrt {

class PolyGauss {
 public:
  PolyGauss() : poly_(1) {}
  explicit PolyGauss(Polynomial p) : poly_(std::move(p)) {}

  static PolyGauss zero(unsigned n) { return PolyGauss(Polynomial(n)); }
  /// exp(-|x|^2)
  static PolyGauss gaussian(unsigned n) { return PolyGauss(Polynomial::constant(n, Rational(1))); }

  const Polynomial& poly() const { return poly_; }
  unsigned dim() const { return poly_.dim(); }

  friend PolyGauss operator+(const PolyGauss& a, const PolyGauss& b) { return PolyGauss(a.poly_ + b.poly_); }
  friend PolyGauss operator-(const PolyGauss& a, const PolyGauss& b) { return PolyGauss(a.poly_ - b.poly_); }
  friend PolyGauss operator-(const PolyGauss& a) { return PolyGauss(-a.poly_); }
  friend PolyGauss operator*(const PolyGauss& a, const Rational& s) { return PolyGauss(a.poly_ * s); }
  // A product of two such fields carries exp(-2|x|^2) and leaves the class.
  friend PolyGauss operator*(const PolyGauss&, const PolyGauss&) = delete;
  bool operator==(const PolyGauss& o) const { return poly_ == o.poly_; }

  PolyGauss multiply_by_monomial(const Exponent& m) const { return PolyGauss(poly_.multiply_by_monomial(m)); }

 private:
  Polynomial poly_;
};

inline bool is_zero(const PolyGauss& g) { return g.poly().is_zero(); }

using SymField = SymTensor<PolyGauss>;
using BiSymField = BiSymTensor<PolyGauss>;
using RawField = RawTensor<PolyGauss>;

inline SymField make_field(unsigned n, unsigned rank) { return SymField(n, rank, PolyGauss::zero(n)); }
inline RawField make_raw_field(unsigned n, unsigned rank) { return RawField(n, rank, PolyGauss::zero(n)); }
inline BiSymField make_bifield(unsigned n, unsigned r1, unsigned r2) {
  return BiSymField(n, r1, r2, PolyGauss::zero(n));
}

/// d/dx^i of p exp(-|x|^2) = (dp/dx^i - 2 x^i p) exp(-|x|^2).
inline PolyGauss derive(const PolyGauss& g, unsigned i) {
  const unsigned n = g.dim();
  if (i < 1 || i > n) throw argument_error("derivative index " + std::to_string(i) + " outside [1," + std::to_string(n) + "]");
  Exponent xi(n, 0);
  xi[i - 1] = 1;
  return PolyGauss(g.poly().derivative(i) - g.poly().multiply_by_monomial(xi) * Rational(2));
}

inline PolyGauss derive(const PolyGauss& g, const IndexTuple& directions) {
  PolyGauss out = g;
  for (unsigned i : directions) out = derive(out, i);
  return out;
}

/// Floating-point value p(x) exp(-|x|^2).
inline double evaluate(const PolyGauss& g, std::span<const double> x) {
  double r2 = 0;
  for (double v : x) r2 += v * v;
  return g.poly().evaluate<double>(x) * std::exp(-r2);
}

/// Exact value at a rational point, split as poly_value * exp(exponent).
struct ExactPointValue {
  Rational poly_value;
  Rational exponent;
  double value() const { return to_double(poly_value) * std::exp(to_double(exponent)); }
};

inline ExactPointValue evaluate_exact(const PolyGauss& g, std::span<const Rational> x) {
  Rational r2(0);
  for (const auto& v : x) r2 += v * v;
  return {g.poly().evaluate<Rational>(x), -r2};
}

/// l1(p) (1 + |x|)^deg exp(-|x|^2): bounds |g(x)| from above.
inline double decay_envelope(const PolyGauss& g, std::span<const double> x) {
  double r2 = 0;
  for (double v : x) r2 += v * v;
  const int deg = std::max(g.poly().degree(), 0);
  return to_double(g.poly().l1_norm()) * std::pow(1.0 + std::sqrt(r2), deg) * std::exp(-r2);
}

// ---------------------------------------------------------------------------

/// reduced * sqrt(pi) * exp(exponent) / sqrt(radicand).
template <class T>
struct LineValue {
  T reduced = from_rational<T>(Rational(0));
  T radicand = from_rational<T>(Rational(1));
  T exponent = from_rational<T>(Rational(0));

  double value() const {
    if (is_zero(reduced)) return 0.0;
    return to_double(reduced) * std::sqrt(std::numbers::pi) * std::exp(to_double(exponent)) /
           std::sqrt(to_double(radicand));
  }
  bool is_zero_value() const { return is_zero(reduced); }

  /// Folds a perfect-square radicand into the coefficient (exact path only).
  LineValue normalized() const {
    LineValue out = *this;
    if constexpr (std::is_same_v<T, Rational>) {
      if (out.radicand != 1) {
        if (auto root = exact_sqrt(out.radicand)) {
          out.reduced /= *root;
          out.radicand = 1;
        }
      }
    }
    return out;
  }

  /// Rewrites `other` over this value's factor.
  T align(const LineValue& other) const {
    if (is_zero(other.reduced)) return other.reduced;
    if constexpr (std::is_same_v<T, Rational>) {
      if (exponent != other.exponent)
        throw argument_error("exact line values with different Gaussian factors cannot be combined");
      if (radicand == other.radicand) return other.reduced;
      auto ratio = exact_sqrt(radicand / other.radicand);
      if (!ratio) throw argument_error("exact line values with different Gaussian factors cannot be combined");
      return other.reduced * *ratio;
    } else {
      return other.reduced * std::sqrt(radicand / other.radicand) * std::exp(other.exponent - exponent);
    }
  }

  friend LineValue operator+(const LineValue& a, const LineValue& b) {
    if (is_zero(a.reduced)) return b;
    LineValue out = a;
    out.reduced += a.align(b);
    return out;
  }
  friend LineValue operator-(const LineValue& a) {
    LineValue out = a;
    out.reduced = -out.reduced;
    return out;
  }
  friend LineValue operator-(const LineValue& a, const LineValue& b) { return a + (-b); }
  friend LineValue operator*(const LineValue& a, const T& s) {
    LineValue out = a;
    out.reduced *= s;
    return out;
  }
};

using ExactReal = LineValue<Rational>;

/// int t^k exp(-t^2) dt = q sqrt(pi) with q = (k-1)!!/2^(k/2) for even k, else 0.
inline ExactReal gaussian_moment(unsigned k) {
  ExactReal out;
  if (k % 2) return out;
  Rational q(1);
  for (unsigned j = 1; j < k; j += 2) q *= Rational(j, 2);
  out.reduced = q;
  return out;
}

/// Exact line moments of polynomial x Gaussian integrands along one line.
/// Caches per-monomial work, so reuse one integrator for many integrands on
/// the same line.
template <class T>
class LineIntegrator {
 public:
  LineIntegrator(std::span<const T> x, std::span<const T> xi) : x_(x.begin(), x.end()), xi_(xi.begin(), xi.end()) {
    if (x_.size() != xi_.size()) throw argument_error("x and xi have different dimensions");
    T zero = from_rational<T>(Rational(0));
    a_ = zero;
    b_ = zero;
    T c = zero;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      a_ += xi_[i] * xi_[i];
      b_ += x_[i] * xi_[i];
      c += x_[i] * x_[i];
    }
    if (is_zero(a_)) throw argument_error("direction xi must be nonzero");
    beta_ = b_ / a_;
    exponent_ = -(c - b_ * beta_);
  }

  unsigned dim() const { return static_cast<unsigned>(x_.size()); }
  std::span<const T> x() const { return x_; }
  std::span<const T> xi() const { return xi_; }
  const T& radicand() const { return a_; }
  const T& exponent() const { return exponent_; }

  /// Coefficient of sqrt(pi) exp(exponent)/sqrt(radicand) in the moment.
  T reduced_moment(const Polynomial& p, unsigned q) {
    if (p.dim() != dim()) throw argument_error("polynomial dimension does not match the line");
    T acc = from_rational<T>(Rational(0));
    for (const auto& [e, c] : p.terms()) acc += from_rational<T>(c) * monomial_moment(e, q);
    return acc;
  }

  LineValue<T> moment(const Polynomial& p, unsigned q) { return wrap(reduced_moment(p, q)); }

  LineValue<T> wrap(T reduced) const {
    LineValue<T> v{std::move(reduced), a_, exponent_};
    return v;
  }

 private:
  // int t^k exp(-(a t^2 + 2 b t + c)) dt divided by the common factor.
  const T& t_moment(unsigned k) {
    while (tmom_.size() <= k) {
      const unsigned kk = static_cast<unsigned>(tmom_.size());
      T acc = from_rational<T>(Rational(0));
      T neg_beta = -beta_;
      for (unsigned j = 0; j <= kk; j += 2) {
        // C(k, j) (-beta)^(k-j) (j-1)!! / (2a)^(j/2)
        T term = from_rational<T>(binomial(kk, j));
        for (unsigned r = 0; r < kk - j; ++r) term *= neg_beta;
        for (unsigned r = 1; r < j; r += 2) term *= from_rational<T>(Rational(r)) / (from_rational<T>(Rational(2)) * a_);
        acc += term;
      }
      tmom_.push_back(std::move(acc));
    }
    return tmom_[k];
  }

  const std::vector<T>& t_poly(const Exponent& e) {
    auto it = tpoly_.find(e);
    if (it != tpoly_.end()) return it->second;
    std::vector<T> coeffs{from_rational<T>(Rational(1))};
    for (std::size_t i = 0; i < e.size(); ++i)
      for (unsigned r = 0; r < e[i]; ++r) {
        std::vector<T> next(coeffs.size() + 1, from_rational<T>(Rational(0)));
        for (std::size_t d = 0; d < coeffs.size(); ++d) {
          next[d] += coeffs[d] * x_[i];
          next[d + 1] += coeffs[d] * xi_[i];
        }
        coeffs = std::move(next);
      }
    return tpoly_.emplace(e, std::move(coeffs)).first->second;
  }

  const T& monomial_moment(const Exponent& e, unsigned q) {
    auto key = std::make_pair(e, q);
    auto it = mono_.find(key);
    if (it != mono_.end()) return it->second;
    const auto& coeffs = t_poly(e);
    T acc = from_rational<T>(Rational(0));
    for (std::size_t d = 0; d < coeffs.size(); ++d)
      if (!is_zero(coeffs[d])) acc += coeffs[d] * t_moment(static_cast<unsigned>(d) + q);
    return mono_.emplace(std::move(key), std::move(acc)).first->second;
  }

  std::vector<T> x_, xi_;
  T a_, b_, beta_, exponent_;
  std::vector<T> tmom_;
  std::map<Exponent, std::vector<T>> tpoly_;
  std::map<std::pair<Exponent, unsigned>, T> mono_;
};

/// int t^q g(x + t xi) dt.
template <class T>
LineValue<T> line_moment(const PolyGauss& g, unsigned q, std::span<const T> x, std::span<const T> xi) {
  LineIntegrator<T> integ(x, xi);
  if (g.dim() != integ.dim()) throw argument_error("field dimension does not match the line");
  auto v = integ.moment(g.poly(), q);
  if constexpr (std::is_same_v<T, Rational>) return v.normalized();
  return v;
}

/// Every canonical component gets an independent polynomial with small
/// rational coefficients in [-4, 4] (denominators up to 3) on all monomials
/// of total degree <= degree.
inline SymField random_field(unsigned n, unsigned m, unsigned degree, std::uint64_t seed) {
  Rng rng(seed);
  SymField f = make_field(n, m);
  std::uint64_t stream = 0;
  for_each_canonical(n, m, [&](const IndexTuple& key) {
    Rng local = rng.split(stream++);
    Polynomial p(n);
    // all exponents with total degree <= degree, in lexicographic order
    Exponent e(n, 0);
    std::function<void(unsigned, unsigned)> rec = [&](unsigned var, unsigned left) {
      if (var == n) {
        p.add_term(e, local.uniform_rational(-4, 4, 3));
        return;
      }
      for (unsigned d = 0; d <= left; ++d) {
        e[var] = d;
        rec(var + 1, left - d);
      }
      e[var] = 0;
    };
    rec(0, degree);
    f.set(key, PolyGauss(std::move(p)));
  });
  return f;
}

}  // namespace mrt
