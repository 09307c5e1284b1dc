#include "curvecast/curve_models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "curvecast/rng.hpp"

namespace curvecast::curves {

namespace {

constexpr int kLmMaxIter = 200;
constexpr double kLmLambda0 = 1e-3;
constexpr double kLmGradTol = 1e-10;
constexpr int kRestarts = 8;

double safe_pow(double base, double exp) {
  if (base <= 0.0) base = 1e-12;
  double v = std::pow(base, exp);
  if (!std::isfinite(v)) v = v > 0 ? 1e300 : -1e300;
  return v;
}

// ---------------------------------------------------------------------------
// Dense helpers (column-major storage for the QR path).

/// Householder QR solve of the n x m least-squares problem (m <= 4 here).
/// Returns false when the triangular factor is numerically rank deficient.
bool qr_solve(std::vector<std::vector<double>> cols, std::vector<double> rhs,
              std::vector<double>& out) {
  const std::size_t m = cols.size();
  const std::size_t n = rhs.size();
  std::vector<std::vector<double>> vs;  // Householder vectors
  for (std::size_t j = 0; j < m; ++j) {
    // Build the reflector for column j below row j.
    std::vector<double> v(n - j);
    double norm = 0.0;
    for (std::size_t i = j; i < n; ++i) {
      v[i - j] = cols[j][i];
      norm += cols[j][i] * cols[j][i];
    }
    norm = std::sqrt(norm);
    double alpha = v[0] >= 0 ? -norm : norm;
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double x : v) vnorm2 += x * x;
    if (vnorm2 > 0.0) {
      for (std::size_t k = j; k < m; ++k) {
        double dot = 0.0;
        for (std::size_t i = j; i < n; ++i) dot += v[i - j] * cols[k][i];
        double f = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < n; ++i) cols[k][i] -= f * v[i - j];
      }
      double dot = 0.0;
      for (std::size_t i = j; i < n; ++i) dot += v[i - j] * rhs[i];
      double f = 2.0 * dot / vnorm2;
      for (std::size_t i = j; i < n; ++i) rhs[i] -= f * v[i - j];
    }
    vs.push_back(std::move(v));
  }
  // Back substitution on R (upper-left m x m of cols).
  double rmax = 0.0;
  for (std::size_t j = 0; j < m; ++j) rmax = std::max(rmax, std::fabs(cols[j][j]));
  out.assign(m, 0.0);
  if (rmax == 0.0) return false;
  for (std::size_t j = 0; j < m; ++j)
    if (std::fabs(cols[j][j]) < 1e-10 * rmax) return false;
  for (std::size_t j = m; j-- > 0;) {
    double s = rhs[j];
    for (std::size_t k = j + 1; k < m; ++k) s -= cols[k][j] * out[k];
    out[j] = s / cols[j][j];
  }
  return true;
}

/// Jacobi eigendecomposition of a symmetric m x m matrix (m <= 5).
void jacobi_eigen(std::vector<std::vector<double>> a,
                  std::vector<double>& evals,
                  std::vector<std::vector<double>>& evecs) {
  const std::size_t m = a.size();
  evecs.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) evecs[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double cth = 1.0 / std::sqrt(t * t + 1.0);
        double sth = t * cth;
        for (std::size_t i = 0; i < m; ++i) {
          double aip = a[i][p], aiq = a[i][q];
          a[i][p] = cth * aip - sth * aiq;
          a[i][q] = sth * aip + cth * aiq;
        }
        for (std::size_t i = 0; i < m; ++i) {
          double api = a[p][i], aqi = a[q][i];
          a[p][i] = cth * api - sth * aqi;
          a[q][i] = sth * api + cth * aqi;
          double vip = evecs[i][p], viq = evecs[i][q];
          evecs[i][p] = cth * vip - sth * viq;
          evecs[i][q] = sth * vip + cth * viq;
        }
      }
    }
  }
  evals.resize(m);
  for (std::size_t i = 0; i < m; ++i) evals[i] = a[i][i];
}

/// Minimum-norm least-squares solution via the pseudo-inverse of A^T A.
std::vector<double> min_norm_solve(const std::vector<std::vector<double>>& cols,
                                   const std::vector<double>& rhs) {
  const std::size_t m = cols.size();
  std::vector<std::vector<double>> ata(m, std::vector<double>(m, 0.0));
  std::vector<double> atb(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t r = 0; r < rhs.size(); ++r)
        ata[i][j] += cols[i][r] * cols[j][r];
    for (std::size_t r = 0; r < rhs.size(); ++r) atb[i] += cols[i][r] * rhs[r];
  }
  std::vector<double> evals;
  std::vector<std::vector<double>> evecs;
  jacobi_eigen(ata, evals, evecs);
  double emax = 0.0;
  for (double e : evals) emax = std::max(emax, std::fabs(e));
  std::vector<double> out(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    if (std::fabs(evals[k]) < 1e-12 * emax || evals[k] <= 0.0) continue;
    double proj = 0.0;
    for (std::size_t i = 0; i < m; ++i) proj += evecs[i][k] * atb[i];
    proj /= evals[k];
    for (std::size_t i = 0; i < m; ++i) out[i] += evecs[i][k] * proj;
  }
  return out;
}

/// Solve the (J^T J + lambda diag) step equation by Gaussian elimination
/// with partial pivoting.
bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b,
                 std::vector<double>& x) {
  const std::size_t m = b.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-300) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < m; ++r) {
      double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < m; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.assign(m, 0.0);
  for (std::size_t r = m; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < m; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return true;
}

// ---------------------------------------------------------------------------
// Levenberg-Marquardt with forward-difference Jacobian.

using ResidualFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;
using ProjectFn = std::function<void(std::vector<double>&)>;

struct LmResult {
  std::vector<double> params;
  double cost = std::numeric_limits<double>::infinity();  // 0.5 * sum r^2
  bool converged = false;
};

LmResult lm_minimize(const ResidualFn& residual, const ProjectFn& project,
                     std::vector<double> p, std::size_t n_res) {
  const std::size_t m = p.size();
  project(p);
  std::vector<double> r(n_res), r_try(n_res);
  residual(p, r);
  double cost = 0.0;
  for (double v : r) cost += v * v;
  cost *= 0.5;

  double lambda = kLmLambda0;
  LmResult best{p, cost, false};
  std::vector<std::vector<double>> jac(m, std::vector<double>(n_res));

  for (int iter = 0; iter < kLmMaxIter; ++iter) {
    // Forward-difference Jacobian.
    for (std::size_t j = 0; j < m; ++j) {
      double h = 1e-7 * std::max(1.0, std::fabs(p[j]));
      auto pj = p;
      pj[j] += h;
      residual(pj, r_try);
      for (std::size_t i = 0; i < n_res; ++i) jac[j][i] = (r_try[i] - r[i]) / h;
    }
    std::vector<std::vector<double>> jtj(m, std::vector<double>(m, 0.0));
    std::vector<double> jtr(m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a; b < m; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n_res; ++i) s += jac[a][i] * jac[b][i];
        jtj[a][b] = jtj[b][a] = s;
      }
      for (std::size_t i = 0; i < n_res; ++i) jtr[a] += jac[a][i] * r[i];
    }
    double grad_norm = 0.0;
    for (double g : jtr) grad_norm = std::max(grad_norm, std::fabs(g));
    if (grad_norm < kLmGradTol) {
      best = {p, cost, true};
      return best;
    }
    auto damped = jtj;
    for (std::size_t a = 0; a < m; ++a)
      damped[a][a] += lambda * std::max(jtj[a][a], 1e-12);
    std::vector<double> step;
    bool ok = solve_dense(damped, jtr, step);
    std::vector<double> p_new = p;
    if (ok) {
      for (std::size_t a = 0; a < m; ++a) p_new[a] -= step[a];
      project(p_new);
      residual(p_new, r_try);
      double cost_new = 0.0;
      for (double v : r_try) cost_new += v * v;
      cost_new *= 0.5;
      if (std::isfinite(cost_new) && cost_new < cost) {
        p = p_new;
        r = r_try;
        cost = cost_new;
        lambda = std::max(lambda / 10.0, 1e-12);
        continue;
      }
    }
    lambda *= 10.0;
    if (lambda > 1e12) {
      // Step size exhausted; treat the point as a (possibly rough) optimum.
      best = {p, cost, true};
      return best;
    }
  }
  best = {p, cost, false};
  return best;
}

}  // namespace

Family family_from_string(const std::string& s) {
  if (s == "m1" || s == "M1") return Family::M1;
  if (s == "m2" || s == "M2") return Family::M2;
  if (s == "m3" || s == "M3") return Family::M3;
  if (s == "m4" || s == "M4") return Family::M4;
  throw Error("unknown family: " + s);
}

std::string to_string(Family f) {
  switch (f) {
    case Family::M1: return "m1";
    case Family::M2: return "m2";
    case Family::M3: return "m3";
    case Family::M4: return "m4";
  }
  return "?";
}

std::array<double, 4> law_basis(double t) {
  return {std::log(t), std::sqrt(t), 1.0, 1.0 / t};
}

double eval_law(const CurveParams& theta, int t) {
  if (t < 1) throw Error("epoch index must be >= 1 (law singular at 0)");
  auto b = law_basis(static_cast<double>(t));
  return theta.A * b[0] + theta.B * b[1] + theta.C + theta.D * b[3];
}

std::vector<std::pair<int, double>> indexed_points(const std::vector<double>& values) {
  std::vector<std::pair<int, double>> pts;
  pts.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    pts.emplace_back(static_cast<int>(i) + 1, values[i]);
  return pts;
}

LawFit fit_law(const std::vector<std::pair<int, double>>& points) {
  if (points.size() < 4)
    throw Error("fit_law needs at least 4 points, got " +
                std::to_string(points.size()));
  for (const auto& [t, y] : points)
    if (t < 1) throw Error("fit_law: epoch index must be >= 1");

  const std::size_t n = points.size();
  std::vector<std::vector<double>> cols(4, std::vector<double>(n));
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto b = law_basis(static_cast<double>(points[i].first));
    for (int j = 0; j < 4; ++j) cols[j][i] = b[j];
    rhs[i] = points[i].second;
  }
  // Column scaling to unit norm.
  std::array<double, 4> scale{};
  for (int j = 0; j < 4; ++j) {
    double norm = 0.0;
    for (double v : cols[j]) norm += v * v;
    norm = std::sqrt(norm);
    scale[j] = norm > 0.0 ? norm : 1.0;
    for (double& v : cols[j]) v /= scale[j];
  }

  std::vector<double> sol;
  LawFit fit;
  if (!qr_solve(cols, rhs, sol)) {
    fit.rank_deficient = true;
    sol = min_norm_solve(cols, rhs);
  }
  fit.params = {sol[0] / scale[0], sol[1] / scale[1], sol[2] / scale[2],
                sol[3] / scale[3]};
  double ss = 0.0;
  for (const auto& [t, y] : points) {
    double r = eval_law(fit.params, t) - y;
    ss += r * r;
  }
  fit.residual_rmse = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

namespace {

std::size_t param_count(Family f) {
  switch (f) {
    case Family::M1: return 2;
    case Family::M2: return 3;
    case Family::M3: return 4;
    case Family::M4: return 5;
  }
  return 0;
}

double eval_baseline_explicit(Family f, const std::vector<double>& p, double t) {
  switch (f) {
    case Family::M1: return p[0] * safe_pow(t, p[1]);
    case Family::M2: return p[0] * safe_pow(t, p[1]) + p[2];
    case Family::M3: return p[0] * safe_pow(t + p[3], p[1]) + p[2];
    case Family::M4: break;
  }
  return 0.0;
}

ResidualFn make_residual(Family f, const std::vector<std::pair<int, double>>& pts) {
  return [f, &pts](const std::vector<double>& p, std::vector<double>& r) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double t = static_cast<double>(pts[i].first);
      double y = pts[i].second;
      if (f == Family::M4) {
        double eps0 = p[3], eps_inf = p[4];
        double span = eps0 - eps_inf;
        double yc = std::clamp(y, eps_inf + 1e-6 * span, eps0 - 1e-6 * span);
        r[i] = (yc - eps_inf) - p[1] * safe_pow(t, p[2]) * safe_pow(eps0 - yc, p[0]);
      } else {
        r[i] = eval_baseline_explicit(f, p, t) - y;
      }
    }
  };
}

ProjectFn make_project(Family f) {
  return [f](std::vector<double>& p) {
    switch (f) {
      case Family::M1:
      case Family::M2:
        p[1] = std::clamp(p[1], -20.0, 20.0);
        break;
      case Family::M3:
        p[1] = std::clamp(p[1], -20.0, 20.0);
        p[3] = std::clamp(p[3], -1.0 + 1e-6, 1e6);
        break;
      case Family::M4:
        p[0] = std::clamp(p[0], 1e-3, 10.0);   // exponent on (eps0 - y)
        p[2] = std::clamp(p[2], -10.0, 10.0);  // exponent on t
        if (p[3] < p[4] + 1e-6) p[3] = p[4] + 1e-6;
        break;
    }
  };
}

std::vector<double> initial_guess(Family f,
                                  const std::vector<std::pair<int, double>>& pts,
                                  rng::Stream& rs) {
  double ymin = pts[0].second, ymax = pts[0].second;
  for (const auto& [t, y] : pts) {
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  double yspan = std::max(ymax - ymin, 1e-3);
  double y_first = pts.front().second;
  double y_last = pts.back().second;
  switch (f) {
    case Family::M1:
      return {y_first * std::exp(rs.uniform(-1.0, 1.0)) +
                  rs.uniform(-0.1, 0.1),
              rs.uniform(-1.0, 1.0)};
    case Family::M2:
      return {(y_first - y_last) * std::exp(rs.uniform(-1.0, 1.0)),
              rs.uniform(-2.0, 0.5), y_last + yspan * rs.uniform(-0.5, 0.5)};
    case Family::M3:
      return {(y_first - y_last) * std::exp(rs.uniform(-1.0, 1.0)),
              rs.uniform(-2.0, 0.5), y_last + yspan * rs.uniform(-0.5, 0.5),
              rs.uniform(-0.9, 5.0)};
    case Family::M4:
      return {rs.uniform(0.5, 2.0), rs.uniform(0.01, 2.0),
              rs.uniform(-2.0, 2.0), ymax + yspan * rs.uniform(0.05, 1.0),
              ymin - yspan * rs.uniform(0.05, 1.0)};
  }
  return {};
}

}  // namespace

BaselineFit fit_baseline(Family family,
                         const std::vector<std::pair<int, double>>& points,
                         std::uint64_t seed) {
  const std::size_t np = param_count(family);
  if (points.size() < np)
    throw Error("fit_baseline(" + to_string(family) + ") needs at least " +
                std::to_string(np) + " points");
  for (const auto& [t, y] : points)
    if (t < 1) throw Error("fit_baseline: epoch index must be >= 1");

  auto residual = make_residual(family, points);
  auto project = make_project(family);

  LmResult best;
  auto try_start = [&](std::vector<double> p0) {
    auto res = lm_minimize(residual, project, std::move(p0), points.size());
    if (res.cost < best.cost) best = res;
  };

  // Warm starts chain the nested families so residuals nest.
  if (family == Family::M1) {
    bool all_pos = std::all_of(points.begin(), points.end(),
                               [](const auto& p) { return p.second > 0.0; });
    if (all_pos) {
      // Log-linear initializer: ln y = ln a + b ln t.
      std::size_t n = points.size();
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (const auto& [t, y] : points) {
        double lx = std::log(static_cast<double>(t)), ly = std::log(y);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
      }
      double denom = n * sxx - sx * sx;
      double b = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
      double la = (sy - b * sx) / static_cast<double>(n);
      try_start({std::exp(la), b});
    }
  } else if (family == Family::M2) {
    auto m1 = fit_baseline(Family::M1, points, seed);
    try_start({m1.params.a, m1.params.b, 0.0});
  } else if (family == Family::M3) {
    auto m2 = fit_baseline(Family::M2, points, seed);
    try_start({m2.params.a, m2.params.b, m2.params.c, 0.0});
  }

  for (int r = 0; r < kRestarts; ++r) {
    rng::Stream rs(seed, "fit_baseline/" + to_string(family) + "/restart/" +
                             std::to_string(r));
    try_start(initial_guess(family, points, rs));
  }

  BaselineFit fit;
  fit.params.family = family;
  const auto& p = best.params;
  switch (family) {
    case Family::M1: fit.params.a = p[0]; fit.params.b = p[1]; break;
    case Family::M2:
      fit.params.a = p[0]; fit.params.b = p[1]; fit.params.c = p[2];
      break;
    case Family::M3:
      fit.params.a = p[0]; fit.params.b = p[1]; fit.params.c = p[2];
      fit.params.d = p[3];
      break;
    case Family::M4:
      fit.params.a = p[0]; fit.params.b = p[1]; fit.params.c = p[2];
      fit.params.eps0 = p[3]; fit.params.eps_inf = p[4];
      break;
  }
  fit.params.converged = best.converged;
  fit.residual_rmse = std::sqrt(2.0 * best.cost / static_cast<double>(points.size()));
  return fit;
}

std::vector<double> extrapolate(const CurveParams& params, int horizon) {
  if (horizon < 1) throw Error("horizon must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t)
    out[static_cast<std::size_t>(t) - 1] = eval_law(params, t);
  return out;
}

std::vector<double> extrapolate(const BaselineParams& params, int horizon,
                                bool* clamped) {
  if (horizon < 1) throw Error("horizon must be >= 1");
  if (clamped) *clamped = false;
  std::vector<double> out(static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t) {
    double td = static_cast<double>(t);
    double v = 0.0;
    switch (params.family) {
      case Family::M1: v = params.a * safe_pow(td, params.b); break;
      case Family::M2: v = params.a * safe_pow(td, params.b) + params.c; break;
      case Family::M3:
        v = params.a * safe_pow(td + params.d, params.b) + params.c;
        break;
      case Family::M4: {
        // Bisection on g(y) = (y - eps_inf) - b*t^c*(eps0 - y)^a.
        double lo = params.eps_inf, hi = params.eps0;
        double span = hi - lo;
        auto g = [&](double y) {
          return (y - params.eps_inf) -
                 params.b * safe_pow(td, params.c) *
                     safe_pow(params.eps0 - y, params.a);
        };
        double glo = g(lo + 1e-12 * span), ghi = g(hi - 1e-12 * span);
        if (glo * ghi > 0.0) {
          v = std::fabs(glo) <= std::fabs(ghi) ? lo : hi;
          if (clamped) *clamped = true;
        } else {
          double a = lo + 1e-12 * span, b = hi - 1e-12 * span;
          double ga = glo;
          while (b - a > 1e-10) {
            double mid = 0.5 * (a + b);
            double gm = g(mid);
            if (ga * gm <= 0.0)
              b = mid;
            else {
              a = mid;
              ga = gm;
            }
          }
          v = 0.5 * (a + b);
        }
        break;
      }
    }
    out[static_cast<std::size_t>(t) - 1] = v;
  }
  return out;
}

CurveSplit split_curve(const ValidationCurve& curve, std::size_t k) {
  if (k < 1) throw Error("split_curve: k must be >= 1");
  if (curve.epochs() <= k)
    throw Error("split_curve: curve " + curve.dataset_id + " has T=" +
                std::to_string(curve.epochs()) + " <= k=" + std::to_string(k));
  CurveSplit s;
  s.support.assign(curve.values.begin(), curve.values.begin() + static_cast<long>(k));
  s.query.assign(curve.values.begin() + static_cast<long>(k), curve.values.end());
  return s;
}

}  // namespace curvecast::curves
