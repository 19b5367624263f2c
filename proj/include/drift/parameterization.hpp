// Parameterization method for the one-dimensional invariant manifolds of the
// saddle at the origin.
//
// The unstable chart P solves F(P(mu*s)) = P(s) with mu = 1/lambda_u, i.e.
// P(lambda_u*t) = F(P(t)).  The stable chart is the unstable chart of F^{-1}.
// Coefficients come from matching like powers; an a-posteriori theorem then
// bounds the truncation error ||P - P^N|| <= r on the unit disk.  All complex
// estimates reduce to real inequalities on absolute values, so only real
// intervals are used.

#pragma once

#include <cfloat>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "drift/interval.hpp"
#include "drift/maps.hpp"

namespace drift {

class ChartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TaylorConstants {
  double R = 1.0;
  double r_star = 0.5;
  Interval C1{0.0};
  Interval C2{0.0};
  Interval C3{0.0};
};

struct ParamChart {
  ManifoldKind kind = ManifoldKind::unstable;
  double alpha = 4.0;
  int N = 0;
  // p_n = (a_n, b_n), n = 0..N
  std::vector<Vec2<Interval>> coeffs;
  // Taylor coefficients of sin and cos of the composed coordinate: a(s) for
  // the unstable chart, a(s) - b(s) for the stable one.
  std::vector<Interval> sin_coeffs;
  std::vector<Interval> cos_coeffs;
  Interval lambda{1.0};
  Interval mu{1.0};
  Vec2<Interval> eigvec;
  double scale = 1.0;
  double nu = 0.6931471805599453;
  double eps_N = 0.0;
  double r_valid = 0.0;
  double deriv_tail = 0.0;
  bool validated = false;
  TaylorConstants constants;
};

namespace detail {

// Coordinate the nonlinearity is composed with: x for F, x - y for F^{-1}.
inline Interval composed_coord(const Vec2<Interval>& p, ManifoldKind kind) {
  return kind == ManifoldKind::unstable ? p.x : p.x - p.y;
}

// T_n = (1/n) sum_{k=0}^{n-2} (k+1) u_{n-k-1} d_{k+1} for a series u.
inline Interval convolution_term(const std::vector<Interval>& u, const std::vector<Interval>& d,
                                 int n) {
  Interval acc(0.0);
  for (int k = 0; k <= n - 2; ++k)
    acc += Interval(static_cast<double>(k + 1)) * u[n - k - 1] * d[k + 1];
  return acc / Interval(static_cast<double>(n));
}

// Order-n coefficient p_n given the lower-order data; throws with n when the
// homological matrix is not verifiably invertible.
inline Vec2<Interval> homological_solve(ManifoldKind kind, double alpha, const Interval& lambda_n,
                                        const Interval& c0, const Interval& t, int n) {
  const Interval a(alpha);
  Interval m11, m12, m21, m22, r1, r2;
  if (kind == ManifoldKind::unstable) {
    m11 = Interval(1.0) + a * c0 - lambda_n;
    m12 = Interval(1.0);
    m21 = a * c0;
    m22 = Interval(1.0) - lambda_n;
    r1 = -(a * t);
    r2 = r1;
  } else {
    m11 = Interval(1.0) - lambda_n;
    m12 = Interval(-1.0);
    m21 = -(a * c0);
    m22 = Interval(1.0) + a * c0 - lambda_n;
    r1 = Interval(0.0);
    r2 = a * t;
  }
  const Interval d = m11 * m22 - m12 * m21;
  if (d.contains_zero())
    throw ChartError("homological equation not verifiably invertible at order " +
                     std::to_string(n));
  return {(r1 * m22 - m12 * r2) / d, (m11 * r2 - m21 * r1) / d};
}

}  // namespace detail

// Eigenvector for lambda_u, the expanding eigenvalue of both DF(0) and
// DF^{-1}(0), normalized to first component 1.
inline Vec2<Interval> chart_eigenvector(ManifoldKind kind, double alpha, const Interval& lambda) {
  if (kind == ManifoldKind::unstable) return {Interval(1.0), lambda - Interval(1.0) - Interval(alpha)};
  return {Interval(1.0), Interval(1.0) - lambda};
}

inline double coeff_norm_mag(const Vec2<Interval>& p) { return std::max(p.x.mag(), p.y.mag()); }

// Order-N Taylor coefficients with p_1 = scale * xi.
inline ParamChart compute_coefficients(double alpha, ManifoldKind kind, int N, double scale) {
  if (N < 1) throw std::invalid_argument("compute_coefficients: N must be positive");
  if (!(scale > 0.0)) throw std::invalid_argument("compute_coefficients: scale must be positive");
  ParamChart ch;
  ch.kind = kind;
  ch.alpha = alpha;
  ch.N = N;
  ch.scale = scale;
  ch.lambda = saddle_eigenvalues(alpha).unstable;
  ch.mu = Interval(1.0) / ch.lambda;
  ch.eigvec = chart_eigenvector(kind, alpha, ch.lambda);

  ch.coeffs.assign(N + 1, Vec2<Interval>{});
  ch.sin_coeffs.assign(N + 1, Interval(0.0));
  ch.cos_coeffs.assign(N + 1, Interval(0.0));
  std::vector<Interval> d(N + 1, Interval(0.0));

  // The fixed point is the origin: a_0 = b_0 = 0, s_0 = 0, c_0 = 1.
  ch.cos_coeffs[0] = Interval(1.0);
  const Interval s0 = ch.sin_coeffs[0];
  const Interval c0 = ch.cos_coeffs[0];
  const Interval sc(scale);
  ch.coeffs[1] = {sc * ch.eigvec.x, sc * ch.eigvec.y};
  d[1] = detail::composed_coord(ch.coeffs[1], kind);
  ch.sin_coeffs[1] = c0 * d[1];
  ch.cos_coeffs[1] = -(s0 * d[1]);

  Interval lambda_n = ch.lambda;
  for (int n = 2; n <= N; ++n) {
    lambda_n = lambda_n * ch.lambda;
    const Interval t = detail::convolution_term(ch.cos_coeffs, d, n);
    const Interval u = detail::convolution_term(ch.sin_coeffs, d, n);
    ch.coeffs[n] = detail::homological_solve(kind, alpha, lambda_n, c0, t, n);
    d[n] = detail::composed_coord(ch.coeffs[n], kind);
    ch.sin_coeffs[n] = c0 * d[n] + t;
    ch.cos_coeffs[n] = -(s0 * d[n]) - u;
  }
  return ch;
}

// Scale so that the highest nonzero coefficient p_n (n <= N) is about
// `target`; p_n scales like scale^n.  The charts are odd, so p_N itself
// vanishes for even N.
inline double auto_scale(double alpha, ManifoldKind kind, int N, double target = 1e-16) {
  const ParamChart unit = compute_coefficients(alpha, kind, N, 1.0);
  for (int n = N; n >= 1; --n) {
    const double pn = coeff_norm_mag(unit.coeffs[n]);
    if (pn > 0.0) return std::pow(target / pn, 1.0 / n);
  }
  return 1.0;
}

// ---------------------------------------------------------------------------
// Taylor constants of the second-order remainder of F (forward) or F^{-1}.

inline TaylorConstants taylor_constants(double alpha, ManifoldKind kind, double R, double r_star) {
  if (!(0.0 < r_star && r_star < R)) throw std::invalid_argument("taylor_constants: need 0 < r* < R");
  TaylorConstants tc;
  tc.R = R;
  tc.r_star = r_star;
  const Interval a = abs(Interval(alpha));
  const Interval one(1.0), two(2.0);
  if (kind == ManifoldKind::unstable) {
    const Interval eR = exp(Interval(R));
    tc.C1 = a * eR * (exp(Interval(r_star)) + one) / two;
    tc.C2 = two * tc.C1;
    tc.C3 = two + a * eR;
  } else {
    // |z1 - z2| <= 2R on the ball of radius R.
    const Interval m = two * Interval(R);
    const Interval em = exp(m);
    const Interval e2r = exp(two * Interval(r_star)) + one;
    tc.C3 = max(two, one + two * a * em);
    tc.C2 = max(a * exp(two * m) * e2r, two * a * em * (one + Interval(r_star)) * e2r);
    tc.C1 = tc.C2 / two;
  }
  return tc;
}

// ---------------------------------------------------------------------------
// Truncation error of sin(g) for a polynomial g(s) = sum_{n<=N} beta_n s^n.

struct SinTailBound {
  Interval e{0.0};
  Interval k_hat{0.0};
  // Upper bound for sup_{|s|<=1} |sum_{n>N} [sin g]_n s^n|.
  double bound = 0.0;
};

// Sin/cos Taylor coefficients of sin(g), cos(g) to the given order.
inline void sin_cos_series(const std::vector<Interval>& beta, int order, std::vector<Interval>& s,
                           std::vector<Interval>& c) {
  std::vector<Interval> b(order + 1, Interval(0.0));
  for (std::size_t i = 0; i < beta.size() && static_cast<int>(i) <= order; ++i) b[i] = beta[i];
  s.assign(order + 1, Interval(0.0));
  c.assign(order + 1, Interval(0.0));
  s[0] = sin(b[0]);
  c[0] = cos(b[0]);
  for (int n = 1; n <= order; ++n) {
    Interval ss(0.0), cc(0.0);
    for (int k = 0; k <= n - 1; ++k) {
      const Interval w = Interval(static_cast<double>(k + 1)) * b[k + 1];
      ss += w * c[n - k - 1];
      cc += w * s[n - k - 1];
    }
    s[n] = ss / Interval(static_cast<double>(n));
    c[n] = -cc / Interval(static_cast<double>(n));
  }
}

inline SinTailBound sin_tail_bound(const std::vector<Interval>& beta) {
  const int N = static_cast<int>(beta.size()) - 1;
  if (N < 1) return {};
  std::vector<Interval> s, c;
  sin_cos_series(beta, 2 * N, s, c);
  Interval ts(0.0), tc(0.0);
  for (int n = N + 1; n <= 2 * N; ++n) {
    ts += abs(s[n]);
    tc += abs(c[n]);
  }
  SinTailBound out;
  out.e = max(ts, tc);
  for (int n = 0; n <= N - 1; ++n)
    out.k_hat += Interval(static_cast<double>(n + 1)) * abs(beta[n + 1]);
  const Interval q = out.k_hat / Interval(static_cast<double>(N + 2));
  if (!(q.hi() < 1.0))
    throw ChartError("defect lemma inapplicable, reduce scale or raise N");
  out.bound = (out.e / (Interval(1.0) - q)).hi();
  return out;
}

// Upper bound eps_N on the conjugacy defect on the unit disk.
inline double defect_bound(const ParamChart& ch) {
  std::vector<Interval> beta(ch.N + 1, Interval(0.0));
  const Interval m = abs(ch.mu);
  Interval mn(1.0);
  for (int n = 1; n <= ch.N; ++n) {
    mn = mn * m;
    beta[n] = detail::composed_coord(ch.coeffs[n], ch.kind) * mn;
  }
  const SinTailBound t = sin_tail_bound(beta);
  return (abs(Interval(ch.alpha)) * Interval(t.bound)).hi();
}

// ---------------------------------------------------------------------------
// A-posteriori validation

inline Interval coeff_norm(const Vec2<Interval>& p) { return max(abs(p.x), abs(p.y)); }

// sum_{n=1}^N |mu|^n ||p_n||
inline Interval pn_sum(const ParamChart& ch) {
  const Interval m = abs(ch.mu);
  Interval mn(1.0), acc(0.0);
  for (int n = 1; n <= ch.N; ++n) {
    mn = mn * m;
    acc += mn * coeff_norm(ch.coeffs[n]);
  }
  return acc;
}

// Near-smallest r > 0 with a r^2 - b r + eps < 0 certified in interval arithmetic.
inline double radii_root(const Interval& a, const Interval& b, double eps) {
  auto negative = [&](double r) {
    const Interval x(r);
    return (a * sqr(x) - b * x + Interval(eps)).hi() < 0.0;
  };
  if (eps == 0.0) {
    if (negative(DBL_MIN)) return DBL_MIN;
    throw ChartError("radii polynomial has no admissible root");
  }
  const double bb = b.mid(), aa = a.mid();
  const double disc = bb * bb - 4.0 * aa * eps;
  double r = disc > 0.0 ? 2.0 * eps / (bb + std::sqrt(disc)) : eps / bb;
  for (int i = 0; i < 200 && !negative(r); ++i) r = detail::next_up(r * (1.0 + 0x1p-30));
  if (!negative(r)) throw ChartError("radii polynomial has no admissible root");
  // Walk back down while strictness still holds.
  for (int i = 0; i < 64; ++i) {
    const double smaller = detail::next_down(r);
    if (!negative(smaller)) break;
    r = smaller;
  }
  return r;
}

struct ValidationOptions {
  double nu = 0.6931471805599453;  // ln 2
  // Zero selects R = max(0.5, 2 * sum |mu|^n ||p_n||) and r* = min(1, R/2).
  double R = 0.0;
  double r_star = 0.0;
};

inline ParamChart validate_chart(ParamChart ch, const TaylorConstants& tc, double nu) {
  ch.constants = tc;
  ch.nu = nu;
  ch.validated = false;
  const Interval S = pn_sum(ch);
  if (!(S.hi() < tc.R)) throw ChartError("PN_bound failed: sum |mu|^n ||p_n|| >= R");
  ch.eps_N = defect_bound(ch);

  const Interval k = pow(abs(ch.mu), static_cast<unsigned>(ch.N + 1));
  const Interval b = Interval(1.0) - tc.C3 * k;
  const Interval a = tc.C2 * sqr(k);
  // The theorem's hypothesis 4 C2 |mu|^{2(N+1)} < (1 - C3 |mu|^{N+1})^2, and
  // real roots of the radii polynomial for the actual defect.
  if (!(b.lo() > 0.0) || !((Interval(4.0) * a - sqr(b)).hi() < 0.0) ||
      !((Interval(4.0) * a * Interval(ch.eps_N) - sqr(b)).hi() < 0.0))
    throw ChartError("discriminant failed: 1 - C3|mu|^{N+1} too small for the defect");
  const double r = radii_root(a, b, ch.eps_N);
  if (!(r <= tc.r_star)) throw ChartError("r <= r* failed");
  ch.r_valid = r;
  ch.deriv_tail = (Interval(2.0) * pi_interval() / Interval(nu) * Interval(r)).hi();
  ch.validated = true;
  return ch;
}

inline ParamChart validate_chart(const ParamChart& ch, const ValidationOptions& opts = {}) {
  double R = opts.R, rs = opts.r_star;
  if (R <= 0.0) R = std::max(0.5, 2.0 * pn_sum(ch).hi());
  if (rs <= 0.0) rs = std::min(1.0, 0.5 * R);
  return validate_chart(ch, taylor_constants(ch.alpha, ch.kind, R, rs), opts.nu);
}

// ---------------------------------------------------------------------------
// Evaluation

inline Interval cauchy_radius(const ParamChart& ch) {
  return exp(Interval(-ch.nu));
}

inline Vec2<Interval> eval_polynomial(const ParamChart& ch, const Interval& s) {
  Interval a(0.0), b(0.0);
  for (int n = ch.N; n >= 0; --n) {
    a = a * s + ch.coeffs[n].x;
    b = b * s + ch.coeffs[n].y;
  }
  return {a, b};
}

inline Vec2<Interval> eval_polynomial_deriv(const ParamChart& ch, const Interval& s) {
  Interval a(0.0), b(0.0);
  for (int n = ch.N; n >= 1; --n) {
    const Interval k(static_cast<double>(n));
    a = a * s + k * ch.coeffs[n].x;
    b = b * s + k * ch.coeffs[n].y;
  }
  return {a, b};
}

inline PhaseBox2 eval_chart(const ParamChart& ch, const Interval& s) {
  if (!ch.validated) throw ChartError("eval_chart: chart not validated");
  if (s.lo() < -1.0 || s.hi() > 1.0) throw std::domain_error("eval_chart: sigma outside [-1, 1]");
  const Vec2<Interval> p = eval_polynomial(ch, s);
  return {inflate(p.x, ch.r_valid), inflate(p.y, ch.r_valid)};
}

inline PhaseBox2 eval_chart_deriv(const ParamChart& ch, const Interval& s) {
  if (!ch.validated) throw ChartError("eval_chart_deriv: chart not validated");
  const double lim = cauchy_radius(ch).lo();
  if (s.lo() < -lim || s.hi() > lim)
    throw std::domain_error("eval_chart_deriv: sigma outside the Cauchy sub-disk");
  const Vec2<Interval> p = eval_polynomial_deriv(ch, s);
  return {inflate(p.x, ch.deriv_tail), inflate(p.y, ch.deriv_tail)};
}

struct ParamOptions {
  int N = 40;
  // Zero selects the automatic scale.
  double scale = 0.0;
  double target_pn = 1e-16;
  ValidationOptions validation;
};

inline ParamChart make_param_chart(double alpha, ManifoldKind kind, const ParamOptions& opts = {}) {
  const double s = opts.scale > 0.0 ? opts.scale : auto_scale(alpha, kind, opts.N, opts.target_pn);
  try {
    return validate_chart(compute_coefficients(alpha, kind, opts.N, s), opts.validation);
  } catch (const std::overflow_error&) {
    throw ChartError("Taylor coefficients overflow, reduce scale");
  }
}

}  // namespace drift
