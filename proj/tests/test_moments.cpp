#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "mrt/moments.hpp"
#include "oracles.hpp"

using namespace mrt;

namespace {

std::shared_ptr<const SymField> share(SymField f) { return std::make_shared<const SymField>(std::move(f)); }

/// J^q f by Gauss-Hermite quadrature of every component (all index orders,
/// no multiplicities): an independent path for the contraction.
oracle::QuadratureResult quadrature_transform(const SymField& f, unsigned q, const std::vector<double>& x,
                                              const std::vector<double>& xi) {
  oracle::QuadratureResult acc{0, 0};
  for_each_tuple(f.dim(), f.rank(), [&](const IndexTuple& t) {
    long double w = 1;
    for (unsigned i : t) w *= xi[i - 1];
    const auto r = oracle::gauss_hermite_line_moment(f.at(t), q, x, xi);
    acc.value += w * r.value;
    acc.magnitude += std::fabs(w) * r.magnitude;
  });
  return acc;
}

SymField scalar(const PolyGauss& g) {
  SymField f = make_field(g.dim(), 0);
  f.set({}, g);
  return f;
}

}  // namespace

TEST_CASE("phase and line points validate their constraints") {
  CHECK_THROWS_AS(PhasePoint<double>({1.0, 0.0}, {0.0, 0.0}), argument_error);
  CHECK_THROWS_AS(PhasePoint<double>({1.0}, {0.0, 1.0}), argument_error);
  CHECK_THROWS_AS(TSPoint<Rational>::make({Rational(1), Rational(0)}, {Rational(1), Rational(1)}), argument_error);
  CHECK_THROWS_AS(TSPoint<Rational>::make({Rational(1), Rational(1)}, {Rational(1), Rational(0)}), argument_error);
  CHECK_THROWS_AS(TSPoint<double>::make({1.0, 1.0}, {1.0, 0.0}), argument_error);
  CHECK_NOTHROW(TSPoint<Rational>::make({Rational(4, 5), Rational(-3, 5)}, {Rational(3, 5), Rational(4, 5)}));

  const auto projected = TSPoint<double>::project(PhasePoint<double>({1.0, 2.0}, {3.0, 4.0}));
  CHECK(projected.residual < 1e-15);
  CHECK(std::abs(projected.point.x_dot_xi()) < 1e-15);
}

TEST_CASE("rational sample points satisfy their constraints exactly") {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto ts = random_ts_point(rng, 3);
    CHECK(ts.point.xi_norm2() == 1);
    CHECK(ts.point.x_dot_xi() == 0);
    const auto pp = random_phase_point(rng, 2);
    CHECK(pp.xi_norm2() >= Rational(1, 4));
    CHECK(pp.xi_norm2() <= 4);
  }
}

TEST_CASE("ray transform examples") {
  const SymField gauss = scalar(PolyGauss::gaussian(2));
  const auto pt = TSPoint<Rational>::make({Rational(3, 5), Rational(-4, 5)}, {Rational(4, 5), Rational(3, 5)});
  const auto v0 = transform_I(gauss, 0, pt);
  CHECK(v0.reduced == 1);
  CHECK(v0.exponent == -1);
  CHECK(transform_I(gauss, 1, pt).is_zero_value());

  SymField grad = make_field(2, 1);
  for (unsigned i = 1; i <= 2; ++i) grad.set({i}, derive(PolyGauss::gaussian(2), i));
  Rng rng(8);
  for (int i = 0; i < 10; ++i) CHECK(transform_I(grad, 0, random_ts_point(rng, 2)).is_zero_value());

  CHECK_THROWS_AS(transform_I(random_field(3, 1, 1, 1), 0, pt), argument_error);
}

TEST_CASE("transforms agree with quadrature of every component") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const unsigned n = 2 + trial % 2, m = trial % 4;
    const SymField f = random_field(n, m, 2, 500 + trial);
    const auto pt = random_phase_point_real(rng, n);
    for (unsigned q = 0; q <= 3; ++q) {
      const auto ref = quadrature_transform(f, q, pt.x, pt.xi);
      const double got = transform_J(f, q, pt).value();
      CHECK(std::abs(got - static_cast<double>(ref.value)) <= 1e-12 * static_cast<double>(ref.magnitude));
    }
  }
}

TEST_CASE("extended transform is homogeneous in xi and translation invariant") {
  Rng rng(4);
  const SymField f = random_field(3, 2, 2, 41);
  for (int i = 0; i < 5; ++i) {
    const auto pt = random_phase_point(rng, 3);
    for (const Rational lambda : {Rational(2), Rational(1, 3)}) {
      std::vector<Rational> scaled = pt.xi;
      for (auto& v : scaled) v *= lambda;
      for (unsigned q = 0; q <= 3; ++q) {
        const int e = 2 - static_cast<int>(q) - 1;
        const Rational factor = e >= 0 ? pow(lambda, e) : 1 / pow(lambda, -e);
        CHECK((transform_J(f, q, PhasePoint<Rational>(pt.x, scaled)) - transform_J(f, q, pt) * factor).is_zero_value());
      }
    }
    std::vector<Rational> shifted = pt.x;
    for (std::size_t j = 0; j < 3; ++j) shifted[j] -= Rational(5, 4) * pt.xi[j];
    CHECK((transform_J(f, 0, PhasePoint<Rational>(shifted, pt.xi)) - transform_J(f, 0, pt)).is_zero_value());
  }
  const auto ts = random_ts_point(rng, 3);
  CHECK((transform_J(f, 2, ts.point) - transform_I(f, 2, ts)).is_zero_value());
}

TEST_CASE("moment stack") {
  Rng rng(12);
  const SymField f = random_field(2, 2, 2, 3);
  const auto pt = random_ts_point(rng, 2);
  const auto one = moment_stack(f, 0, pt);
  REQUIRE(one.size() == 1);
  CHECK((one[0] - transform_I(f, 0, pt)).is_zero_value());
  const SymField g = random_field(2, 2, 2, 4);
  const auto sf = moment_stack(f, 3, pt), sg = moment_stack(g, 3, pt), sfg = moment_stack(f + g * Rational(2), 3, pt);
  for (unsigned q = 0; q <= 3; ++q) CHECK((sfg[q] - sf[q] - sg[q] * Rational(2)).is_zero_value());

  const SymField pot = iterate_d(random_field(2, 0, 2, 5), 2);
  for (const auto& v : moment_stack(pot, 1, pt)) CHECK(v.is_zero_value());
}

TEST_CASE("conversion from line data to the extended transform") {
  Rng rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    const unsigned n = 2 + trial % 2, m = trial % 4;
    const SymField f = random_field(n, m, 2, 900 + trial);
    const auto pt = random_phase_point_real(rng, n);
    const auto line = TSPoint<double>::project(pt);
    const auto stack = moment_stack(f, 3, line);
    for (unsigned q = 0; q <= 3; ++q) {
      const double direct = transform_J(f, q, pt).value();
      const double conv = convert_I_to_J<double>(stack, m, q, pt).value();
      CHECK(std::abs(direct - conv) <= 1e-10 * std::max(1.0, std::abs(direct)));
    }
  }
  // on the line manifold only the last term survives
  const SymField f = random_field(2, 1, 2, 6);
  const auto ts = random_ts_point(rng, 2);
  const auto stack = moment_stack(f, 2, ts);
  CHECK((convert_I_to_J<Rational>(stack, 1, 2, ts.point) - stack[2]).is_zero_value());
  CHECK_THROWS_AS(convert_I_to_J<Rational>(std::span(stack).first(1), 1, 2, ts.point), argument_error);
}

TEST_CASE("derivative rewrite rules") {
  auto f = share(random_field(2, 1, 2, 61));
  const auto e = MomentExpression::transform(f, 2);
  const auto ex = dx(e, 1);
  REQUIRE(ex.terms().size() == 1);
  CHECK(ex.terms().begin()->first.derivatives == IndexTuple{1});
  const auto exi = dxi(e, 2);
  REQUIRE(exi.terms().size() == 2);
  CHECK(exi.terms().count(MomentAtom{3, {}, {2}}) == 1);
  CHECK(exi.terms().at(MomentAtom{2, {2}, {}}) == 1);
  CHECK_THROWS_AS(dx(e, 3), argument_error);
  CHECK_THROWS_AS(dxi(e, 0), argument_error);
  CHECK_THROWS_AS(MomentExpression::transform(f, 0, {1, 1}), argument_error);

  // dx and dxi commute on expressions
  CHECK((dx(dxi(e, 1), 2) - dxi(dx(e, 2), 1)).is_zero());
}

TEST_CASE("xi derivatives agree with finite differences of the transform") {
  // Sanity check of the rewrite rule on a smooth function; loose tolerance.
  auto f = share(random_field(2, 2, 2, 71));
  const PhasePoint<double> pt({0.3, -0.2}, {0.9, 0.5});
  const double h = 1e-5;
  for (unsigned i = 1; i <= 2; ++i)
    for (unsigned q = 0; q <= 2; ++q) {
      auto plus = pt, minus = pt;
      plus.xi[i - 1] += h;
      minus.xi[i - 1] -= h;
      const double fd = (transform_J(*f, q, plus).value() - transform_J(*f, q, minus).value()) / (2 * h);
      const double rule = evaluate(dxi(MomentExpression::transform(f, q), i), pt).value();
      CHECK(std::abs(fd - rule) < 1e-6 * std::max(1.0, std::abs(rule)));
      plus = pt;
      minus = pt;
      plus.x[i - 1] += h;
      minus.x[i - 1] -= h;
      const double fdx = (transform_J(*f, q, plus).value() - transform_J(*f, q, minus).value()) / (2 * h);
      CHECK(std::abs(fdx - evaluate(dx(MomentExpression::transform(f, q), i), pt).value()) < 1e-6 * std::max(1.0, std::abs(fdx)));
    }
}

TEST_CASE("John operator") {
  auto f = share(random_field(3, 2, 2, 83));
  const auto e = MomentExpression::transform(f, 0);
  CHECK_THROWS_AS(john(e, 2, 2), argument_error);
  for (unsigned p = 1; p <= 3; ++p)
    for (unsigned q = 1; q <= 3; ++q)
      if (p != q) CHECK((john(e, p, q) + john(e, q, p)).is_zero());

  // annihilates transforms of scalar fields
  auto s = share(random_field(3, 0, 3, 84));
  Rng rng(1);
  const auto pt = random_phase_point(rng, 3);
  const auto js = john(MomentExpression::transform(s, 0), 1, 2);
  CHECK(js.is_zero());
  CHECK(evaluate(js + MomentExpression::transform(s, 0) * Rational(0), pt).is_zero_value());
}

TEST_CASE("evaluation is linear and a zero expression evaluates to exactly zero") {
  auto f = share(random_field(2, 2, 2, 91));
  Rng rng(2);
  const auto pt = random_phase_point(rng, 2);
  const auto a = dxi(MomentExpression::transform(f, 1), 1), b = dx(MomentExpression::transform(f, 0, {2}), 2);
  const auto lhs = evaluate(a * Rational(3) - b, pt);
  const auto rhs = evaluate(a, pt) * Rational(3) - evaluate(b, pt);
  CHECK((lhs - rhs).is_zero_value());
  CHECK(evaluate(a - a, pt).is_zero_value());
}

TEST_CASE("restricted transform recovery for a vector field") {
  // J^0 f^{i} = d/dxi^i J^0 f - d/dx^i J^1 f
  auto f = share(random_field(3, 1, 2, 101));
  Rng rng(5);
  for (int s = 0; s < 5; ++s) {
    const auto pt = random_phase_point(rng, 3);
    for (unsigned i = 1; i <= 3; ++i) {
      const auto rhs = dxi(MomentExpression::transform(f, 0), i) - dx(MomentExpression::transform(f, 1), i);
      const auto direct = transform_J(restrict(*f, {i}), 0, pt);
      CHECK((evaluate(rhs, pt) - direct).is_zero_value());
      CHECK((recover_restricted(f, {i}, pt) - direct).is_zero_value());
    }
  }
}

TEST_CASE("restricted transform recovery in general") {
  Rng rng(6);
  for (unsigned n = 2; n <= 3; ++n)
    for (unsigned m = 0; m <= 3; ++m) {
      auto f = share(random_field(n, m, 2, 10 * n + m));
      const auto pt = random_phase_point(rng, n);
      for (unsigned r = 0; r <= m; ++r)
        for_each_canonical(n, r, [&](const IndexTuple& fixed) {
          CHECK((recover_restricted(f, fixed, pt) - transform_J(restrict(*f, fixed), 0, pt)).is_zero_value());
          const auto merged = recover_restricted_expression(f, fixed);
          REQUIRE(merged.terms().size() == 1);
          CHECK(merged.terms().begin()->first == MomentAtom{0, fixed, {}});
          CHECK(merged.terms().begin()->second == 1);
        });
      CHECK_THROWS_AS(recover_restricted_expression(f, IndexTuple(std::vector<unsigned>(m + 1, 1))), argument_error);
    }
  auto f = share(random_field(2, 2, 2, 1));
  const auto pt = random_phase_point(rng, 2);
  CHECK((recover_restricted(f, {}, pt) - transform_J(*f, 0, pt)).is_zero_value());

  // term by term in floating point the cancellation is numerical
  auto g = share(random_field(3, 3, 2, 2));
  const auto ptd = to_real(random_phase_point(rng, 3));
  const double direct = transform_J(restrict(*g, {1, 2, 3}), 0, ptd).value();
  const double recovered = recover_restricted(g, {1, 2, 3}, ptd).value();
  CHECK(std::abs(recovered - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
  CHECK(recovery_terms(g, {1, 2, 3}).size() == 24);
}
