#include <catch_amalgamated.hpp>

#include "mrt/identities.hpp"
#include "oracles.hpp"

using namespace mrt;

namespace {

std::shared_ptr<const SymField> share(SymField f) { return std::make_shared<const SymField>(std::move(f)); }

}  // namespace

TEST_CASE("iterated John operator recovers R with the factor (-2)^s s!") {
  CHECK(john_power_factor(0) == 1);
  CHECK(john_power_factor(1) == -2);
  CHECK(john_power_factor(2) == 8);
  CHECK(john_power_factor(3) == -48);

  Rng rng(1);
  struct Case { unsigned n, m, k; };
  for (const Case c : {Case{2, 2, 0}, Case{2, 2, 1}, Case{3, 2, 0}, Case{2, 3, 1}}) {
    auto f = share(random_field(c.n, c.m, 2, 7 * c.m + c.k));
    const auto pt = random_phase_point(rng, c.n);
    for_each_canonical(c.n, c.k, [&](const IndexTuple& fixed) {
      const Residual r = john_power_identity_check(f, c.k, fixed, pt);
      CHECK(r.exact_zero);
    });
  }
  auto f = share(random_field(2, 2, 1, 3));
  CHECK_THROWS_AS(john_power_identity_check(f, 2, {1, 1}, random_phase_point(rng, 2)), argument_error);
  CHECK_THROWS_AS(john_power_identity_check(f, 1, {}, random_phase_point(rng, 2)), argument_error);
  CHECK(john_power_identity_check(share(make_field(2, 2)), 0, {}, random_phase_point(rng, 2)).exact_zero);
}

TEST_CASE("the unsigned factor 2^s s! fails whenever s is odd") {
  // One John step on a vector field whose R f does not vanish.
  auto f = share(random_field(2, 1, 2, 5));
  Rng rng(2);
  const auto pt = random_phase_point(rng, 2);
  MomentEvaluator<Rational> ev(f, pt);
  const RawField rf = operator_R(*f);
  SymField comp = make_field(2, 0);
  comp.set({}, rf.at({1, 2}));
  const auto lhs = ev(john(MomentExpression::transform(f, 0), 1, 2));
  const auto rhs = ev.transform(comp, 0);
  REQUIRE_FALSE(rhs.is_zero_value());
  CHECK((lhs - rhs * Rational(-2)).is_zero_value());
  CHECK_FALSE((lhs - rhs * Rational(2)).is_zero_value());
}

TEST_CASE("single John step against quadrature of the differentiated field") {
  auto f = share(random_field(3, 2, 2, 19));
  Rng rng(3);
  for (int s = 0; s < 3; ++s) {
    const auto pt = random_phase_point(rng, 3);
    CHECK(john_single_step_residual(f, {}, pt).exact_zero);
    CHECK(john_single_step_residual(f, {2}, pt).exact_zero);

    // value of J_{12} J^0 f by quadrature: 2 J^0 of d_1 f_{.2} - d_2 f_{.1}
    const auto ptd = to_real(pt);
    long double ref = 0, mag = 0;
    for (unsigned j = 1; j <= 3; ++j) {
      const PolyGauss h = derive(f->at({j, 2}), 1) - derive(f->at({j, 1}), 2);
      const auto q = oracle::gauss_hermite_line_moment(h, 0, ptd.x, ptd.xi);
      ref += 2 * ptd.xi[j - 1] * q.value;
      mag += 2 * std::fabs(ptd.xi[j - 1]) * q.magnitude;
    }
    const double got = evaluate(john(MomentExpression::transform(f, 0), 1, 2), pt).value();
    CHECK(std::abs(got - static_cast<double>(ref)) <= 1e-12 * static_cast<double>(mag));
  }
}

TEST_CASE("collapsed derivative identity holds for arbitrary fields") {
  Rng rng(4);
  struct Case { unsigned n, m, k; };
  for (const Case c : {Case{2, 2, 0}, Case{2, 2, 1}, Case{3, 2, 1}, Case{2, 3, 0}}) {
    auto f = share(random_field(c.n, c.m, 2, 11 * c.m + c.k));
    const auto pt = random_phase_point(rng, c.n);
    for_each_canonical(c.n, c.k, [&](const IndexTuple& fixed) {
      CHECK(collapsed_derivative_check(f, c.k, fixed, pt).exact_zero);
      CHECK(collapsed_derivative_check(f, c.k, fixed, to_real(pt)).value < 1e-10);
    });
  }
}

TEST_CASE("symmetrization relation") {
  // fully symmetric: both sides equal t
  SymTensor<Rational> sym(2, 3);
  Rng rng(5);
  for_each_canonical(2, 3, [&](const IndexTuple& k) { sym.set(k, rng.uniform_rational(-3, 3, 3)); });
  const auto t = to_raw(sym);
  for (unsigned k = 0; k <= 3; ++k) CHECK(symmetrization_relation_difference(t, k).is_zero_tensor());

  // random block-symmetric tensors, checked against brute-force symmetrization
  for (unsigned n = 2; n <= 3; ++n)
    for (unsigned m = 2; m <= 4; ++m)
      for (unsigned k = 1; k < m; ++k) {
        RawTensor<Rational> raw(n, m);
        for_each_tuple(n, m, [&](const IndexTuple& key) { raw.set(key, rng.uniform_rational(-3, 3, 4)); });
        std::vector<unsigned> head(m - k), tail(k), all(m);
        std::iota(head.begin(), head.end(), 1u);
        std::iota(tail.begin(), tail.end(), m - k + 1);
        std::iota(all.begin(), all.end(), 1u);
        const auto block = oracle::brute_symmetrize(oracle::brute_symmetrize(raw, head), tail);
        CHECK(symmetrization_relation_difference(block, k).is_zero_tensor());
        CHECK(symmetrization_relation_check(block, k).exact_zero);
        if (m - k > 1 || k > 1) CHECK_THROWS_AS(symmetrization_relation_check(raw, k), argument_error);
      }

  // the derivative tensor of a transform has the block structure
  auto f = share(random_field(3, 3, 1, 6));
  const auto pt = random_phase_point(rng, 3);
  for (unsigned k = 0; k <= 3; ++k) CHECK(symmetrization_relation_check(derivative_transform_tensor(f, k, pt), k).exact_zero);
}

TEST_CASE("W^k is the symmetrized Saint Venant operator of the restrictions") {
  for (unsigned n = 2; n <= 3; ++n)
    for (unsigned m = 1; m <= 3; ++m) {
      if (n == 3 && m == 3) continue;
      const SymField f = random_field(n, m, 2, 3 * n + m);
      for (unsigned k = 0; k < m; ++k) CHECK(restriction_relation_residual(f, k).is_zero);
      CHECK(degenerate_order_residual(f).is_zero);
    }
  CHECK_THROWS_AS(restriction_relation_residual(random_field(2, 2, 1, 1), 2), argument_error);
}

TEST_CASE("R and W relation residuals") {
  const auto rw = rw_relation_residual(random_field(3, 2, 2, 8));
  CHECK(rw.w_from_r.is_zero);
  CHECK(rw.r_from_w.is_zero);
}

TEST_CASE("main lemma and lower order vanishing for potentials") {
  Rng rng(9);
  for (unsigned n = 2; n <= 3; ++n)
    for (unsigned m = 1; m <= 3; ++m)
      for (unsigned k = 0; k < m; ++k) {
        auto f = share(iterate_d(random_field(n, m - k - 1, 1, 100 * n + 10 * m + k), k + 1));
        const auto pt = random_phase_point(rng, n);
        for (unsigned r = 0; r <= k; ++r) CHECK(symmetrized_derivative_residual(f, r, pt).exact_zero);
      }
  // not for fields outside the kernel
  auto g = share(random_field(2, 2, 2, 4));
  CHECK_FALSE(symmetrized_derivative_residual(g, 0, random_phase_point(rng, 2)).exact_zero);
  CHECK_THROWS_AS(symmetrized_derivative_residual(g, 3, random_phase_point(rng, 2)), argument_error);
}

TEST_CASE("restriction and contraction") {
  Rng rng(10);
  auto f = share(random_field(3, 3, 2, 12));
  const auto pt = random_phase_point(rng, 3);
  for (unsigned k = 0; k <= 3; ++k)
    for (unsigned r = 0; r <= k; ++r) CHECK(restriction_contraction_residual(f, r, k, pt).exact_zero);
  CHECK_THROWS_AS(restriction_contraction_residual(f, 2, 1, pt), argument_error);
}

TEST_CASE("integration by parts, translation and homogeneity") {
  Rng rng(11);
  for (unsigned m = 0; m <= 3; ++m) {
    auto f = share(random_field(2 + m % 2, m, 2, 40 + m));
    const auto pt = random_phase_point(rng, f->dim());
    for (unsigned q = 0; q <= 3; ++q) {
      CHECK(integration_by_parts_residual(f, q, pt).exact_zero);
      CHECK(integration_by_parts_residual(f, q, to_real(pt)).value < 1e-10);
      for (unsigned len = 0; len <= m; ++len) CHECK(euler_residual(f, q, len, pt).exact_zero);
    }
    for (unsigned k = 0; k <= m; ++k) CHECK(translation_residual(f, k, pt).exact_zero);
    for (unsigned k = 0; k < m; ++k) CHECK(john_homogeneity_residual(f, k, pt).exact_zero);
  }
  // a wrong degree is caught
  auto f = share(random_field(2, 2, 2, 1));
  const auto pt = random_phase_point(rng, 2);
  MomentEvaluator<Rational> ev(f, pt);
  const auto e = MomentExpression::transform(f, 0);
  CHECK((xi_dot_dxi(ev, e) - ev(e)).is_zero_value());  // degree m - q - 1 = 1
  CHECK_FALSE((xi_dot_dxi(ev, e) - ev(e) * Rational(2)).is_zero_value());
}

TEST_CASE("conversion and recovery residuals") {
  Rng rng(12);
  auto f = share(random_field(3, 2, 2, 77));
  const auto pt = random_phase_point(rng, 3);
  for (unsigned q = 0; q <= 3; ++q) CHECK(conversion_residual(*f, q, to_real(pt)).value < 1e-12);
  CHECK(recovery_residual(f, {1, 3}, pt).exact_zero);
  CHECK_FALSE(recovery_residual(f, {1, 3}, pt, {Mutation::Kind::flip_sign, 1}).exact_zero);
  CHECK_FALSE(recovery_residual(f, {1, 3}, pt, {Mutation::Kind::bump_prefactor, 0}).exact_zero);
}

TEST_CASE("decay diagnostic") {
  auto f = share(random_field(2, 1, 3, 5));
  Rng rng(13);
  const auto line = random_ts_point_real(rng, 2);
  const double near = decay_diagnostic(f, 1, line, 1.0, 4).value;
  const double mid = decay_diagnostic(f, 1, line, 4.0, 4).value;
  const double far = decay_diagnostic(f, 1, line, 8.0, 4).value;
  CHECK(mid < near);
  CHECK(far < mid);
  CHECK(far < 1e-15);
}
