#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mrt/rational.hpp"

namespace mrt {

/// Exponent multi-index, one entry per variable.
using Exponent = std::vector<unsigned>;

inline unsigned total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0u); }

/// Sparse multivariate polynomial in n variables with exact rational
/// coefficients. Zero coefficients are never stored.
class Polynomial {
 public:
  explicit Polynomial(unsigned n = 1) : n_(n) {}

  static Polynomial constant(unsigned n, const Rational& c) {
    Polynomial p(n);
    p.add_term(Exponent(n, 0), c);
    return p;
  }
  /// x_i (1-based)
  static Polynomial variable(unsigned n, unsigned i) {
    Polynomial p(n);
    Exponent e(n, 0);
    check_var(n, i);
    e[i - 1] = 1;
    p.add_term(e, Rational(1));
    return p;
  }

  unsigned dim() const { return n_; }
  const std::map<Exponent, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(total_degree(e)));
    return d;
  }

  Rational coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void add_term(const Exponent& e, const Rational& c) {
    if (e.size() != n_) throw argument_error("exponent length does not match dimension");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Rational max_abs_coefficient() const {
    Rational m(0);
    for (const auto& [e, c] : terms_) m = std::max(m, abs(c));
    return m;
  }
  Rational l1_norm() const {
    Rational s(0);
    for (const auto& [e, c] : terms_) s += abs(c);
    return s;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    check_same(a, b);
    Polynomial out = a;
    for (const auto& [e, c] : b.terms_) out.add_term(e, c);
    return out;
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    check_same(a, b);
    Polynomial out = a;
    for (const auto& [e, c] : b.terms_) out.add_term(e, -c);
    return out;
  }
  friend Polynomial operator-(const Polynomial& a) {
    Polynomial out = a;
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
  }
  friend Polynomial operator*(const Polynomial& a, const Rational& s) {
    if (s.is_zero()) return Polynomial(a.n_);
    Polynomial out = a;
    for (auto& [e, c] : out.terms_) c *= s;
    return out;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    check_same(a, b);
    Polynomial out(a.n_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponent e(a.n_);
        for (unsigned i = 0; i < a.n_; ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    return out;
  }
  bool operator==(const Polynomial& o) const { return n_ == o.n_ && terms_ == o.terms_; }

  Polynomial multiply_by_monomial(const Exponent& m) const {
    if (m.size() != n_) throw argument_error("monomial length does not match dimension");
    Polynomial out(n_);
    for (const auto& [e, c] : terms_) {
      Exponent s = e;
      for (unsigned i = 0; i < n_; ++i) s[i] += m[i];
      out.terms_.emplace(std::move(s), c);
    }
    return out;
  }

  /// d/dx_i, 1-based.
  Polynomial derivative(unsigned i) const {
    check_var(n_, i);
    Polynomial out(n_);
    for (const auto& [e, c] : terms_) {
      if (e[i - 1] == 0) continue;
      Exponent d = e;
      --d[i - 1];
      out.add_term(d, c * e[i - 1]);
    }
    return out;
  }

  /// Evaluates at x over any field T constructible from a Rational.
  template <class T>
  T evaluate(std::span<const T> x) const {
    if (x.size() != n_) throw argument_error("evaluation point has the wrong dimension");
    T acc = from_rational<T>(Rational(0));
    for (const auto& [e, c] : terms_) {
      T term = from_rational<T>(c);
      for (unsigned i = 0; i < n_; ++i)
        for (unsigned k = 0; k < e[i]; ++k) term *= x[i];
      acc += term;
    }
    return acc;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [e, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + format_rational(c) + ")";
      for (unsigned i = 0; i < n_; ++i)
        if (e[i]) s += "*x" + std::to_string(i + 1) + (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
    }
    return s;
  }

 private:
  static void check_var(unsigned n, unsigned i) {
    if (i < 1 || i > n) throw argument_error("variable index " + std::to_string(i) + " outside [1," + std::to_string(n) + "]");
  }
  static void check_same(const Polynomial& a, const Polynomial& b) {
    if (a.n_ != b.n_) throw argument_error("polynomials of different dimension");
  }

  unsigned n_;
  std::map<Exponent, Rational> terms_;
};

}  // namespace mrt
