#include <doctest.h>

#include <cmath>

#include "curvecast/curve_models.hpp"
#include "curvecast/rng.hpp"

using namespace curvecast;
using curves::CurveParams;
using curves::Family;

namespace {

std::vector<std::pair<int, double>> sample_law(const CurveParams& p, int n) {
  std::vector<std::pair<int, double>> pts;
  for (int t = 1; t <= n; ++t) pts.emplace_back(t, curves::eval_law(p, t));
  return pts;
}

double residual_rms(const CurveParams& p,
                    const std::vector<std::pair<int, double>>& pts) {
  double ss = 0;
  for (auto [t, y] : pts) {
    double r = curves::eval_law(p, t) - y;
    ss += r * r;
  }
  return std::sqrt(ss / double(pts.size()));
}

}  // namespace

TEST_CASE("law basis and evaluation") {
  auto b = curves::law_basis(4.0);
  CHECK(b[0] == doctest::Approx(std::log(4.0)));
  CHECK(b[1] == doctest::Approx(2.0));
  CHECK(b[2] == 1.0);
  CHECK(b[3] == doctest::Approx(0.25));

  CurveParams p{0.1, -0.01, 0.5, -0.2};
  CHECK(curves::eval_law(p, 1) == doctest::Approx(0.5 - 0.01 - 0.2));
  CHECK_THROWS_AS(curves::eval_law(p, 0), Error);
}

TEST_CASE("fit_law recovers planted parameters exactly on noiseless data") {
  CurveParams truth{0.03, -0.002, 0.4, -0.15};
  auto fit = curves::fit_law(sample_law(truth, 30));
  CHECK(fit.params.A == doctest::Approx(truth.A).epsilon(1e-10));
  CHECK(fit.params.B == doctest::Approx(truth.B).epsilon(1e-10));
  CHECK(fit.params.C == doctest::Approx(truth.C).epsilon(1e-10));
  CHECK(fit.params.D == doctest::Approx(truth.D).epsilon(1e-10));
  CHECK(fit.residual_rmse < 1e-10);
  CHECK_FALSE(fit.rank_deficient);
}

TEST_CASE("fit_law is deterministic and least-squares optimal") {
  rng::Stream rs(3, "lawfit");
  std::vector<std::pair<int, double>> pts;
  for (int t = 1; t <= 20; ++t)
    pts.emplace_back(t, 0.5 + 0.05 * std::log(t) + 0.01 * rs.normal());

  auto a = curves::fit_law(pts);
  auto b = curves::fit_law(pts);
  CHECK(a.params.A == b.params.A);
  CHECK(a.params.D == b.params.D);

  // No perturbation of the optimum may reduce the residual.
  double base = residual_rms(a.params, pts);
  for (int trial = 0; trial < 100; ++trial) {
    CurveParams q = a.params;
    q.A += 1e-3 * rs.normal();
    q.B += 1e-3 * rs.normal();
    q.C += 1e-3 * rs.normal();
    q.D += 1e-3 * rs.normal();
    CHECK(residual_rms(q, pts) >= base - 1e-12);
  }
}

TEST_CASE("fit_law input validation and rank deficiency") {
  CurveParams p{0.1, 0.0, 0.5, 0.0};
  CHECK_THROWS_AS(static_cast<void>(curves::fit_law(sample_law(p, 3))), Error);
  CHECK_THROWS_AS(static_cast<void>(curves::fit_law({{0, 0.1}, {1, 0.2}, {2, 0.3}, {3, 0.4}})),
                  Error);
  // Four points but only two distinct epochs: rank-deficient design, solved
  // minimum-norm; the two observed epochs are still interpolated.
  std::vector<std::pair<int, double>> dup = {{1, 0.2}, {1, 0.2}, {2, 0.3}, {2, 0.3}};
  auto fit = curves::fit_law(dup);
  CHECK(fit.rank_deficient);
  CHECK(fit.residual_rmse < 1e-8);
}

TEST_CASE("baselines recover their own noiseless curves") {
  auto check_family = [](Family f, auto gen) {
    std::vector<std::pair<int, double>> pts;
    for (int t = 1; t <= 25; ++t) pts.emplace_back(t, gen(t));
    auto fit = curves::fit_baseline(f, pts, 0);
    auto curve = curves::extrapolate(fit.params, 200);
    double mae = 0;
    for (int t = 1; t <= 200; ++t) mae += std::fabs(curve[std::size_t(t) - 1] - gen(t));
    mae /= 200;
    CHECK(mae < 1e-3);
  };
  check_family(Family::M1, [](int t) { return 0.8 * std::pow(double(t), -0.3); });
  check_family(Family::M2,
               [](int t) { return 0.5 * std::pow(double(t), -0.4) + 0.2; });
  check_family(Family::M3, [](int t) {
    return 0.6 * std::pow(double(t) + 2.0, -0.5) + 0.15;
  });
}

TEST_CASE("baseline residuals nest M3 <= M2 <= M1") {
  rng::Stream rs(9, "nesting");
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<std::pair<int, double>> pts;
    double a = rs.uniform(0.3, 0.9), b = rs.uniform(0.2, 0.6),
           c = rs.uniform(0.05, 0.3);
    for (int t = 1; t <= 30; ++t)
      pts.emplace_back(t, a * std::pow(double(t), -b) + c +
                              0.01 * rs.normal());
    auto m1 = curves::fit_baseline(Family::M1, pts, 1);
    auto m2 = curves::fit_baseline(Family::M2, pts, 1);
    auto m3 = curves::fit_baseline(Family::M3, pts, 1);
    CHECK(m2.residual_rmse <= m1.residual_rmse + 1e-6);
    CHECK(m3.residual_rmse <= m2.residual_rmse + 1e-6);
  }
}

TEST_CASE("baseline fits are deterministic per (points, seed)") {
  std::vector<std::pair<int, double>> pts;
  for (int t = 1; t <= 15; ++t)
    pts.emplace_back(t, 0.7 * std::pow(double(t), -0.25) + 0.1);
  for (Family f : {Family::M1, Family::M2, Family::M3, Family::M4}) {
    auto x = curves::fit_baseline(f, pts, 42);
    auto y = curves::fit_baseline(f, pts, 42);
    CHECK(x.params.a == y.params.a);
    CHECK(x.params.b == y.params.b);
    CHECK(x.params.c == y.params.c);
    CHECK(x.params.d == y.params.d);
    CHECK(x.residual_rmse == y.residual_rmse);
  }
}

TEST_CASE("M4 extrapolation stays within its asymptotes") {
  std::vector<std::pair<int, double>> pts;
  for (int t = 1; t <= 30; ++t)
    pts.emplace_back(t, 0.9 - 0.5 * std::pow(double(t), -0.5));
  auto fit = curves::fit_baseline(Family::M4, pts, 0);
  bool clamped = false;
  auto curve = curves::extrapolate(fit.params, 200, &clamped);
  REQUIRE(curve.size() == 200);
  for (double v : curve) {
    CHECK(v >= fit.params.eps_inf - 1e-9);
    CHECK(v <= fit.params.eps0 + 1e-9);
  }
  // On-support reconstruction should be reasonable.
  double mae = 0;
  for (int t = 1; t <= 30; ++t)
    mae += std::fabs(curve[std::size_t(t) - 1] - pts[std::size_t(t) - 1].second);
  CHECK(mae / 30 < 0.1);
}

TEST_CASE("family names round-trip") {
  for (const char* n : {"m1", "m2", "m3", "m4"})
    CHECK(curves::to_string(curves::family_from_string(n)) == n);
  CHECK_THROWS_AS(curves::family_from_string("m5"), Error);
}

TEST_CASE("split_curve and indexed_points") {
  ValidationCurve c{"d", Task::binclass, Metric::accuracy,
                    {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}};
  auto s = curves::split_curve(c, 5);
  CHECK(s.support == std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5});
  CHECK(s.query == std::vector<double>{0.6, 0.7});
  auto pts = curves::indexed_points(s.support);
  CHECK(pts.front() == std::pair<int, double>{1, 0.1});
  CHECK(pts.back() == std::pair<int, double>{5, 0.5});
}

TEST_CASE("extrapolate evaluates the law on t = 1..horizon") {
  CurveParams p{0.0, 0.0, 0.3, 0.1};
  auto v = curves::extrapolate(p, 4);
  REQUIRE(v.size() == 4);
  CHECK(v[0] == doctest::Approx(0.4));
  CHECK(v[3] == doctest::Approx(0.325));
}
