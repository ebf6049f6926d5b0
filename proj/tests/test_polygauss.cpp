#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "mrt/polygauss.hpp"
#include "oracles.hpp"

using namespace mrt;

namespace {

Polynomial x_(unsigned n, unsigned i) { return Polynomial::variable(n, i); }

std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  for (const auto& r : v) out.push_back(to_double(r));
  return out;
}

}  // namespace

TEST_CASE("derivatives of polynomial times Gaussian") {
  const PolyGauss g = PolyGauss::gaussian(2);
  CHECK(derive(g, 1).poly() == x_(2, 1) * Rational(-2));
  const PolyGauss h(x_(2, 1));
  CHECK(derive(h, 1).poly() == Polynomial::constant(2, Rational(1)) - x_(2, 1) * x_(2, 1) * Rational(2));
  CHECK_THROWS_AS(derive(h, 3), argument_error);
  CHECK_THROWS_AS(derive(h, 0), argument_error);
}

TEST_CASE("mixed partials commute and derive is linear with a Leibniz rule") {
  const SymField f = random_field(3, 0, 3, 17);
  const PolyGauss& g = f.at({});
  CHECK(derive(derive(g, 1), 2) == derive(derive(g, 2), 1));
  CHECK(derive(derive(g, 3), 1) == derive(derive(g, 1), 3));
  const PolyGauss g2 = random_field(3, 0, 2, 18).at({});
  CHECK(derive(g + g2 * Rational(3), 2) == derive(g, 2) + derive(g2, 2) * Rational(3));
  // d(x_1 g) = delta_{i1} g + x_1 dg
  const Exponent e1{1, 0, 0};
  for (unsigned i = 1; i <= 3; ++i) {
    PolyGauss expected = derive(g, i).multiply_by_monomial(e1);
    if (i == 1) expected = expected + g;
    CHECK(derive(g.multiply_by_monomial(e1), i) == expected);
  }
}

TEST_CASE("ring operations") {
  const PolyGauss g = random_field(2, 0, 2, 3).at({});
  CHECK(is_zero(g + g * Rational(-1)));
  CHECK(PolyGauss::gaussian(2).multiply_by_monomial({0, 1}).poly() == x_(2, 2));
  CHECK_THROWS_AS(PolyGauss::gaussian(2) + PolyGauss::gaussian(3), argument_error);
}

// Two Gaussians multiply to exp(-2|x|^2), which is outside the class; the
// product is rejected at compile time.
template <class A, class B>
concept multipliable = requires(const A& a, const B& b) { a * b; };
static_assert(!multipliable<PolyGauss, PolyGauss>);
static_assert(multipliable<PolyGauss, Rational>);

TEST_CASE("gaussian moments") {
  CHECK(gaussian_moment(0).reduced == 1);
  CHECK(gaussian_moment(1).reduced == 0);
  CHECK(gaussian_moment(4).reduced == Rational(3, 4));
  for (unsigned k = 0; k < 12; ++k)
    CHECK(gaussian_moment(k + 2).reduced == gaussian_moment(k).reduced * Rational(k + 1, 2));
  CHECK(gaussian_moment(2).value() == Catch::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-15));
}

TEST_CASE("line moments of the bare Gaussian") {
  const PolyGauss g = PolyGauss::gaussian(2);
  const std::vector<Rational> x{Rational(3, 5), Rational(-4, 5)}, xi{Rational(4, 5), Rational(3, 5)};
  const ExactReal v0 = line_moment<Rational>(g, 0, x, xi);
  CHECK(v0.reduced == 1);
  CHECK(v0.exponent == -1);  // exp(-|x|^2), |x| = 1
  CHECK(v0.value() == Catch::Approx(std::sqrt(std::numbers::pi) * std::exp(-1.0)).epsilon(1e-15));
  CHECK(line_moment<Rational>(g, 1, x, xi).is_zero_value());

  // xi -> lambda xi scales by 1/lambda
  const std::vector<Rational> xi3{Rational(12, 5), Rational(9, 5)};
  const ExactReal v3 = line_moment<Rational>(g, 0, x, xi3);
  CHECK((v0 * Rational(1, 3) - v3).is_zero_value());

  const std::vector<Rational> zero{Rational(0), Rational(0)};
  CHECK_THROWS_AS(line_moment<Rational>(g, 0, x, zero), argument_error);
}

TEST_CASE("line moments obey the shift law exactly") {
  const SymField f = random_field(3, 0, 3, 5);
  const PolyGauss& g = f.at({});
  const std::vector<Rational> x{Rational(1, 3), Rational(-1, 2), Rational(1, 4)};
  const std::vector<Rational> xi{Rational(2, 3), Rational(1), Rational(-1, 5)};
  const Rational s(3, 7);
  std::vector<Rational> xs = x;
  for (std::size_t i = 0; i < 3; ++i) xs[i] += s * xi[i];
  for (unsigned q = 0; q <= 4; ++q) {
    ExactReal expected;
    for (unsigned j = 0; j <= q; ++j)
      expected = expected + line_moment<Rational>(g, j, x, xi) * (binomial(q, j) * pow(-s, q - j));
    CHECK((line_moment<Rational>(g, q, xs, xi) - expected).is_zero_value());
  }
}

TEST_CASE("exact and floating line moments agree with Gauss-Hermite quadrature") {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const unsigned n = 2 + trial % 2;
    const PolyGauss g = random_field(n, 0, 1 + trial % 4, 1000 + trial).at({});
    std::vector<Rational> x(n), xi(n);
    for (auto& v : x) v = rng.uniform_rational(-1, 1, 5);
    do
      for (auto& v : xi) v = rng.uniform_rational(-2, 2, 5);
    while (std::all_of(xi.begin(), xi.end(), [](const Rational& r) { return r.is_zero(); }));
    const unsigned q = trial % 4;
    const auto xd = to_doubles(x), xid = to_doubles(xi);
    const auto gh = oracle::gauss_hermite_line_moment(g, q, xd, xid);
    const double exact = line_moment<Rational>(g, q, x, xi).value();
    const double real = line_moment<double>(g, q, std::span<const double>(xd), std::span<const double>(xid)).value();
    const double scale = static_cast<double>(gh.magnitude);
    CHECK(std::abs(exact - static_cast<double>(gh.value)) <= 1e-12 * scale);
    CHECK(std::abs(real - static_cast<double>(gh.value)) <= 1e-12 * scale);
  }
}

TEST_CASE("quadrature oracle integrates Hermite-weighted polynomials exactly") {
  const oracle::GaussHermite rule(6);
  long double m0 = 0, m2 = 0, m10 = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    m0 += rule.weights[i];
    m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
    m10 += rule.weights[i] * std::pow(rule.nodes[i], 10);
  }
  const long double sp = std::sqrt(std::numbers::pi_v<long double>);
  CHECK(std::abs(static_cast<double>(m0 / sp - 1)) < 1e-15);
  CHECK(std::abs(static_cast<double>(m2 / sp - 0.5L)) < 1e-15);
  CHECK(std::abs(static_cast<double>(m10 / sp - 945.0L / 32)) < 1e-13);
}

TEST_CASE("random fields are deterministic in the seed") {
  CHECK(random_field(2, 2, 2, 5) == random_field(2, 2, 2, 5));
  int differing = 0;
  for (std::uint64_t s = 0; s < 100; ++s)
    if (!(random_field(2, 1, 1, s) == random_field(2, 1, 1, s + 1000))) ++differing;
  CHECK(differing == 100);
  const SymField c = random_field(3, 0, 0, 8);
  CHECK(c.at({}).poly().degree() <= 0);
}

TEST_CASE("pointwise evaluation") {
  CHECK(evaluate(PolyGauss::gaussian(2), std::vector<double>{0.0, 0.0}) == 1.0);
  const PolyGauss sq(x_(2, 1) * x_(2, 1));
  CHECK(evaluate(sq, std::vector<double>{1.0, 0.0}) == Catch::Approx(std::exp(-1.0)).epsilon(1e-15));
  const std::vector<Rational> xr{Rational(1), Rational(0)};
  const auto ex = evaluate_exact(sq, xr);
  CHECK(ex.poly_value == 1);
  CHECK(ex.exponent == -1);

  const PolyGauss g = random_field(2, 0, 3, 12).at({});
  for (double r = 0; r <= 30; r += 1.5) {
    const std::vector<double> p{r * 0.6, -r * 0.8};
    CHECK(std::abs(evaluate(g, p)) <= decay_envelope(g, p) * (1 + 1e-12));
  }
}
