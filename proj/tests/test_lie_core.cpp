#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "prodint/context.hpp"
#include "prodint/curve.hpp"
#include "prodint/errors.hpp"
#include "prodint/lie_ops.hpp"
#include "prodint/quadrature.hpp"
#include "prodint/seminorm.hpp"
#include "test_support.hpp"

using namespace prodint;
using namespace prodint::testing;

TEST_CASE("bracket: Heisenberg structure constants") {
  const LieContext ctx = heisenberg3();
  const Mat e12 = unit(3, 0, 1), e23 = unit(3, 1, 2), e13 = unit(3, 0, 2);
  // direct 3x3 commutator arithmetic as the oracle
  const Mat oracle = e12 * e23 - e23 * e12;
  CHECK(max_norm(oracle - e13) == 0.0);
  const Mat b = bracket(ctx, ctx.algebra(e12), ctx.algebra(e23)).matrix;
  CHECK(max_norm(b - e13) == 0.0);
}

TEST_CASE("bracket: antisymmetry and non-member rejection") {
  const LieContext ctx = heisenberg3();
  Rng rng(101);
  const Mat x = random_algebra(rng, ctx);
  CHECK(max_norm(bracket(ctx, ctx.algebra(x), ctx.algebra(x)).matrix) == 0.0);
  CHECK_THROWS_AS(bracket(ctx, AlgebraElement{unit(3, 1, 0)}, ctx.algebra(x)), DomainError);
}

TEST_CASE("bracket: so3 cross-product table") {
  const LieContext ctx = so3();
  // [skew(e_z), skew(e_x)] = skew(e_z x e_x) = skew(e_y)
  const Mat got = bracket(ctx, ctx.algebra(skew(0, 0, 1)), ctx.algebra(skew(1, 0, 0))).matrix;
  CHECK(max_norm(got - skew(0, 1, 0)) <= 1e-15);
}

TEST_CASE("ad_chain: single step, nilpotent vanishing, explicit gl2 case") {
  const LieContext h = heisenberg3();
  Rng rng(102);
  const Mat x = random_algebra(rng, h), y = random_algebra(rng, h);
  CHECK(max_norm(ad_chain(h, {h.algebra(x)}, h.algebra(y)).matrix -
                 bracket(h, h.algebra(x), h.algebra(y)).matrix) == 0.0);
  CHECK(max_norm(ad_chain(h, {h.algebra(x), h.algebra(y)}, h.algebra(x)).matrix) == 0.0);

  const LieContext g2 = gl(2);
  const Mat e11 = unit(2, 0, 0), e12 = unit(2, 0, 1), e21 = unit(2, 1, 0);
  // brute-force composition of commutators
  const Mat inner = e12 * e21 - e21 * e12;
  const Mat oracle = e11 * inner - inner * e11;
  const Mat got = ad_chain(g2, {g2.algebra(e11), g2.algebra(e12)}, g2.algebra(e21)).matrix;
  CHECK(max_norm(got - oracle) == 0.0);
  CHECK_THROWS_AS(ad_chain(g2, {}, g2.algebra(e11)), ArgumentError);
}

TEST_CASE("adjoint: identity, rotation of axis, diagonal conjugation") {
  const LieContext r3 = so3();
  Rng rng(103);
  const Mat y = random_algebra(rng, r3);
  CHECK(max_norm(adjoint(r3, r3.group(Mat::Identity(3, 3)), r3.algebra(y)).matrix - y) == 0.0);

  // rotation by pi/2 about z carries skew(e_x) to skew(e_y)
  const Mat rot = rodrigues(0, 0, 1, M_PI / 2);
  const Mat got = adjoint(r3, r3.group(rot), r3.algebra(skew(1, 0, 0))).matrix;
  CHECK(op_norm(got - skew(0, 1, 0)) <= 1e-12);

  const LieContext g2 = gl(2);
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 2.0; d(1, 1) = 1.0;
  const Mat e12 = unit(2, 0, 1);
  const Mat conj = d * e12 * invert(d);  // direct conjugation oracle
  CHECK(max_norm(conj - 2.0 * e12) <= 1e-15);
  CHECK(max_norm(adjoint(g2, g2.group(d), g2.algebra(e12)).matrix - 2.0 * e12) <= 1e-15);

  CHECK_THROWS_AS(adjoint(g2, GroupElement{Mat::Zero(2, 2)}, g2.algebra(e12)), InversionError);
}

TEST_CASE("adjoint: homomorphism property") {
  Rng rng(104);
  for (const LieContext& ctx : {so3(), gl(3)}) {
    for (int k = 0; k < 25; ++k) {
      const Mat g = detail::exp_raw(random_algebra(rng, ctx, 0.8));
      const Mat h = detail::exp_raw(random_algebra(rng, ctx, 0.8));
      const Mat y = random_algebra(rng, ctx);
      const Mat lhs = adjoint(ctx, ctx.group(Mat(g * h)), ctx.algebra(y)).matrix;
      const Mat rhs =
          adjoint(ctx, ctx.group(g), adjoint(ctx, ctx.group(h), ctx.algebra(y))).matrix;
      CHECK(op_norm(lhs - rhs) <= 1e-10);
    }
  }
}

TEST_CASE("exponential: zero, terminating series, Rodrigues") {
  const LieContext h = heisenberg3();
  CHECK(max_norm(exponential(h, h.algebra(h.zero())).matrix - Mat::Identity(3, 3)) == 0.0);

  Rng rng(105);
  for (int k = 0; k < 10; ++k) {
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2), c = rng.uniform(-2, 2);
    const Mat x = a * unit(3, 0, 1) + b * unit(3, 1, 2) + c * unit(3, 0, 2);
    // the series stops at degree 2: 1 + X + X^2/2 exactly
    const Mat oracle = Mat::Identity(3, 3) + x + 0.5 * (x * x);
    CHECK(max_norm(exponential(h, h.algebra(x)).matrix - oracle) == 0.0);
  }

  const LieContext r3 = so3();
  for (double theta : {0.3, 1.0, 2.5}) {
    const Mat got = exponential(r3, r3.algebra(theta * skew(0, 0, 1))).matrix;
    CHECK(op_norm(got - rodrigues(0, 0, 1, theta)) <= 1e-12);
  }
}

TEST_CASE("riemann_integral: closed forms") {
  const Mat x = skew(0.3, -1.0, 0.7);
  const Curve constant = Curve::constant(x, 0.0, 1.0);
  CHECK(max_norm(riemann_integral(constant) - x) <= 1e-14);

  const Curve linear = Curve::polynomial({Mat::Zero(3, 3), x}, 0.0, 1.0);
  CHECK(max_norm(riemann_integral(linear) - 0.5 * x) <= 1e-13);

  const Curve sine = Curve::sinusoid(x, M_PI, 0.0, 0.0, 1.0);
  CHECK(op_norm(riemann_integral(sine) - (2.0 / M_PI) * x) <= 1e-10);
}

TEST_CASE("riemann_integral: fundamental theorem and seminorm bound") {
  Rng rng(106);
  const LieContext ctx = gl(2);
  for (int k = 0; k < 5; ++k) {
    Curve gamma = random_smooth_curve(rng, ctx, 0.0, 1.0, 1.5);
    Curve dgamma(0.0, 1.0, kSmoothOrder,
                 [gamma](double t, int m) { return gamma.eval(t, m + 1); });
    for (double t : {0.25, 0.7, 1.0}) {
      const Mat lhs = riemann_integral(dgamma, 0.0, t);
      CHECK(max_norm(lhs - (gamma(t) - gamma(0.0))) <= 1e-11);
      const double q_lhs = op_norm(gamma(t) - gamma(0.0));
      const double q_rhs =
          integrate_scalar([&](double s) { return op_norm(gamma.eval(s, 1)); }, 0.0, t);
      CHECK(q_lhs <= q_rhs + 1e-11);
    }
  }
}

TEST_CASE("riemann_integral: substitution rule") {
  Rng rng(107);
  const LieContext ctx = gl(2);
  const Curve gamma = random_smooth_curve(rng, ctx, 0.0, 1.0, 1.0);
  const ScalarCurve rho = ScalarCurve::monomial(2, 0.0, 1.0);  // rho(t) = t^2, rho(1) = 1
  Curve pulled(0.0, 1.0, 0, [gamma, rho](double t, int) -> Mat {
    return rho.eval(t, 1) * gamma(rho(t));
  });
  CHECK(max_norm(riemann_integral(pulled) - riemann_integral(gamma, 0.0, 1.0)) <= 1e-11);
}

TEST_CASE("riemann_integral: refinement cap failure carries the estimate") {
  Curve wild(0.0, 1.0, 0, [](double t, int) {
    return Mat::Constant(1, 1, std::sin(1.0 / (t + 1e-9)));
  });
  QuadratureOptions opts;
  opts.max_panels = 64;
  CHECK_THROWS_AS(riemann_integral(wild, opts), QuadratureError);
  try {
    riemann_integral(wild, opts);
  } catch (const QuadratureError& e) {
    CHECK(e.achieved_delta > 0.0);
    CHECK(e.last_estimate.size() == 1);
  }
}

TEST_CASE("chart maps: identity point, mutual inverse, certified bound") {
  const LieContext ctx = gl(2);
  Rng rng(108);
  const Mat x0 = Mat::Zero(2, 2);
  const Mat v = rng.matrix(2, 2);
  CHECK(max_norm(chart_omega(ctx, x0, v) - v) == 0.0);
  CHECK(max_norm(chart_omega_inv(ctx, x0, v) - v) == 0.0);

  for (int k = 0; k < 20; ++k) {
    Mat x = rng.matrix(2, 2);
    x *= 0.5 / std::max(1.0, op_norm(x));
    const Mat recovered = chart_omega_inv(ctx, x, chart_omega(ctx, x, v));
    CHECK(op_norm(recovered - v) <= 1e-12 * std::max(1.0, op_norm(v)));
    // (q o omega_inv)(x, X) <= m(X) with q = op and m = 2 op on the ball 2||x|| <= 1
    CHECK(op_norm(chart_omega_inv(ctx, x, v)) <= 2.0 * op_norm(v) + 1e-12);
  }
}

TEST_CASE("chart maps: explicit 2x2 inversion and the domain guard") {
  // radius 1.5 admits the chart point diag(1, 0)
  LieContext wide("gl2-wide", 2, gl(2).basis(), MembershipTag::Invertible, 1.5);
  Mat x = Mat::Zero(2, 2);
  x(0, 0) = 1.0;
  const Mat e12 = unit(2, 0, 1);
  Mat inv_oracle = Mat::Zero(2, 2);  // (1 + diag(1,0))^{-1} = diag(1/2, 1)
  inv_oracle(0, 0) = 0.5;
  inv_oracle(1, 1) = 1.0;
  CHECK(max_norm(chart_omega(wide, x, e12) - e12 * inv_oracle) <= 1e-15);

  const LieContext narrow = gl(2);  // default radius 0.9
  CHECK_THROWS_AS(chart_omega(narrow, x, e12), DomainError);
}

TEST_CASE("seminorm_eval: values and lookup errors") {
  const SeminormFamily fam = SeminormFamily::standard(3);
  CHECK(seminorm_eval(fam, "op", Mat::Zero(3, 3)) == 0.0);
  CHECK(seminorm_eval(fam, "op", Mat::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-13));
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 3.0; d(1, 1) = -4.0;
  // singular values of diag(3, -4) are {3, 4}
  const SeminormFamily fam2 = SeminormFamily::standard(2);
  CHECK(seminorm_eval(fam2, "op", d) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK_THROWS_AS(seminorm_eval(fam, "nope", d), ArgumentError);
}

TEST_CASE("Jacobi identity across contexts") {
  Rng rng(109);
  for (const LieContext& ctx : {heisenberg3(), so3(), gl(3)}) {
    for (int k = 0; k < 1000; ++k) {
      const Mat x = random_algebra(rng, ctx), y = random_algebra(rng, ctx),
                z = random_algebra(rng, ctx);
      const Mat sum = commutator(x, commutator(y, z)) + commutator(y, commutator(z, x)) +
                      commutator(z, commutator(x, y));
      REQUIRE(max_norm(sum) <= 1e-11);
    }
  }
}

TEST_CASE("bracket submultiplicativity witness for gl(n)") {
  Rng rng(110);
  const LieContext ctx = gl(3);
  for (int k = 0; k < 500; ++k) {
    const Mat x = rng.matrix(3, 3), y = rng.matrix(3, 3);
    REQUIRE(op_norm(commutator(x, y)) <= 2.0 * op_norm(x) * op_norm(y) + 1e-12);
  }
}

TEST_CASE("derivative of the adjoint action at the identity") {
  Rng rng(111);
  const LieContext ctx = gl(3);
  const Mat x = random_algebra(rng, ctx), y = random_algebra(rng, ctx);
  const Mat target = commutator(x, y);
  auto fd = [&](double h) {
    const Mat gp = detail::exp_raw(h * x), gm = detail::exp_raw(-h * x);
    return Mat(((gp * y * invert(gp)) - (gm * y * invert(gm))) / (2.0 * h));
  };
  const double e3 = op_norm(fd(1e-3) - target);
  const double e4 = op_norm(fd(1e-4) - target);
  CHECK(e3 <= 1e-5);
  // central differences are second order: shrinking h by 10 gains ~100x
  CHECK(e4 <= e3 / 50.0);
}

TEST_CASE("context construction: closure and nilpotency guards") {
  // {E12, E21} does not close: [E12, E21] = E11 - E22
  CHECK_THROWS_AS(LieContext("bad", 2, {unit(2, 0, 1), unit(2, 1, 0)}, MembershipTag::Invertible),
                  DomainError);
  // Heisenberg is not class 1
  CHECK_THROWS_AS(LieContext("bad-nil", 3, heisenberg3().basis(), MembershipTag::Unitriangular,
                             0.9, 1),
                  DomainError);
  // declared class 2 is verified exactly
  CHECK_NOTHROW(heisenberg3());
}

TEST_CASE("basis projection: rejection tolerance") {
  const LieContext h = heisenberg3();
  CHECK_THROWS_AS(h.algebra(unit(3, 0, 0)), DomainError);
  CHECK_THROWS_AS(h.algebra(Mat(unit(3, 0, 1) + 1e-9 * unit(3, 0, 0))), DomainError);
  CHECK_NOTHROW(h.algebra(Mat(unit(3, 0, 1) + 1e-15 * unit(3, 0, 0))));
}

TEST_CASE("context files: decimal round-trip") {
  namespace fs = std::filesystem;
  LieContext ctx("roundtrip", 2,
                 {0.123456789012345678 * unit(2, 0, 0) + (1.0 / 3.0) * unit(2, 1, 1),
                  std::sqrt(2.0) * unit(2, 0, 1)},
                 MembershipTag::Invertible, 0.7654321);
  const fs::path path = fs::temp_directory_path() / "prodint_ctx_roundtrip.json";
  save_context_file(ctx, path.string());
  const LieContext loaded = load_context_file(path.string());
  CHECK(loaded.name() == ctx.name());
  CHECK(loaded.dim() == ctx.dim());
  CHECK(loaded.chart_radius() == ctx.chart_radius());  // bit-exact through decimal
  for (size_t i = 0; i < ctx.basis().size(); ++i) {
    CHECK(max_norm(loaded.basis()[i] - ctx.basis()[i]) == 0.0);
  }
  CHECK(loaded.membership() == ctx.membership());
  fs::remove(path);

  CHECK_THROWS_AS(load_context_file("/nonexistent/nowhere.json"), ArgumentError);
  CHECK_THROWS_AS(context_from_json("{\"name\": \"x\"}"), ArgumentError);
  CHECK_THROWS_AS(context_from_json("not json"), ArgumentError);
}

TEST_CASE("curve basics: breakpoints, restriction, piecewise routing") {
  const Mat a = unit(2, 0, 0), b = unit(2, 1, 1);
  const Curve left = Curve::constant(a, 0.0, 0.5);
  const Curve right = Curve::constant(b, 0.5, 1.0);
  const Curve glued = Curve::piecewise({left, right});
  CHECK(glued.breakpoints().size() == 1);
  CHECK(max_norm(glued(0.25) - a) == 0.0);
  CHECK(max_norm(glued(0.5) - b) == 0.0);  // right piece at the knot
  CHECK(max_norm(glued(1.0) - b) == 0.0);
  CHECK_THROWS_AS(glued.eval(1.5, 0), ArgumentError);
  CHECK_THROWS_AS(Curve::piecewise({left, right}, true), ArgumentError);  // jump at the knot

  const Curve res = glued.restricted(0.25, 0.75);
  CHECK(res.breakpoints().size() == 1);
  CHECK(max_norm(res(0.3) - a) == 0.0);
}

TEST_CASE("seminorm family: validation rejects non-norms") {
  SeminormFamily fam;
  fam.add({"op", [](const Mat& m) { return op_norm(m); }, 1.0});
  fam.add({"squared", [](const Mat& m) { return op_norm(m) * op_norm(m); }, 1.0});
  CHECK_THROWS_AS(fam.validate(2), DomainError);  // not homogeneous
}
