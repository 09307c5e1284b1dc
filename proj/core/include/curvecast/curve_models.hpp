#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "curvecast/types.hpp"

namespace curvecast::curves {

/// Parameters of the curve family a(t) = A*ln(t) + B*sqrt(t) + C + D/t.
struct CurveParams {
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
};

enum class Family { M1, M2, M3, M4 };
Family family_from_string(const std::string& s);
std::string to_string(Family f);

/// Baseline scaling-law parameters. Only the coefficients relevant to the
/// family are meaningful:
///   M1: y = a*t^b             (a, b)
///   M2: y = a*t^b + c         (a, b, c)
///   M3: y = a*(t+d)^b + c     (a, b, c, d), d >= -1+eps
///   M4: (y-eps_inf) = b*t^c*(eps0-y)^a, implicit (a, b, c, eps0, eps_inf)
struct BaselineParams {
  Family family = Family::M1;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double eps0 = 1.0, eps_inf = 0.0;
  bool converged = true;
};

struct CurveSplit {
  std::vector<double> support;  // first k values
  std::vector<double> query;    // remaining values
};

/// Basis functions of the law at epoch t: {ln t, sqrt t, 1, 1/t}.
std::array<double, 4> law_basis(double t);

/// Evaluate the law at integer epoch t >= 1.
double eval_law(const CurveParams& theta, int t);

struct LawFit {
  CurveParams params;
  double residual_rmse = 0.0;
  bool rank_deficient = false;
};

/// Exact linear least squares in the law's basis via Householder QR with
/// column scaling. Requires >= 4 points with >= 4 distinct t. A
/// rank-deficient design falls back to the minimum-norm solution.
LawFit fit_law(const std::vector<std::pair<int, double>>& points);

struct BaselineFit {
  BaselineParams params;
  double residual_rmse = 0.0;
};

/// Nonlinear least squares via Levenberg-Marquardt with 8 seeded restarts.
/// M2 warm-starts from the M1 fit and M3 from the M2 fit, so residuals nest
/// (M3 <= M2 <= M1 up to optimizer tolerance). Deterministic per (points,
/// seed). M4 is fitted on the implicit residual with y clamped into
/// (eps_inf, eps0).
BaselineFit fit_baseline(Family family,
                         const std::vector<std::pair<int, double>>& points,
                         std::uint64_t seed);

/// Values at t = 1..horizon.
std::vector<double> extrapolate(const CurveParams& params, int horizon);

/// Values at t = 1..horizon. M4 values are obtained by bisection on the
/// implicit equation within (eps_inf, eps0) to 1e-10; when there is no sign
/// change the value is clamped to the nearest bound and, if `clamped` is
/// non-null, flagged.
std::vector<double> extrapolate(const BaselineParams& params, int horizon,
                                bool* clamped = nullptr);

CurveSplit split_curve(const ValidationCurve& curve, std::size_t k);

/// Convenience: (t, value) pairs with t = 1..n over a value series.
std::vector<std::pair<int, double>> indexed_points(const std::vector<double>& values);

}  // namespace curvecast::curves
