// Independent oracles shared by the unit tests and the acceptance binary.

#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "drift/interval.hpp"
#include "drift/maps.hpp"

namespace drift::oracles {

using mp = boost::multiprecision::cpp_bin_float_50;

// Taylor coefficients of sin(g) up to `order` by the recurrence
// n s_n = sum k g_k c_{n-k}, n c_n = -sum k g_k s_{n-k} (g_0 = 0).
inline void sin_cos(const std::vector<mp>& g, int order, std::vector<mp>& s, std::vector<mp>& c) {
  s.assign(order + 1, mp(0));
  c.assign(order + 1, mp(0));
  c[0] = 1;
  for (int n = 1; n <= order; ++n) {
    mp ss = 0, cc = 0;
    for (int k = 1; k <= n && k < static_cast<int>(g.size()); ++k) {
      ss += k * g[k] * c[n - k];
      cc += k * g[k] * s[n - k];
    }
    s[n] = ss / n;
    c[n] = -cc / n;
  }
}

struct HighPrecisionChart {
  std::vector<mp> x, y;
  mp lambda;
};

// Independent order-by-order solve of P(lambda t) = F(P(t)) (unstable) or
// P(lambda t) = F^{-1}(P(t)) (stable) in 50-digit arithmetic:
// (lambda^n - A) p_n = (nonlinear terms of order n from p_1..p_{n-1}).
inline HighPrecisionChart high_precision_chart(double alpha, ManifoldKind kind, int N, double scale) {
  const mp a = alpha;
  HighPrecisionChart h;
  h.lambda = (2 + a + sqrt(a * a + 4 * a)) / 2;
  h.x.assign(N + 1, mp(0));
  h.y.assign(N + 1, mp(0));
  h.x[1] = scale;
  h.y[1] = kind == ManifoldKind::unstable ? mp(scale) * (h.lambda - 1 - a) : mp(scale) * (1 - h.lambda);
  mp ln = h.lambda;
  for (int n = 2; n <= N; ++n) {
    ln *= h.lambda;
    std::vector<mp> g(n + 1, mp(0));
    for (int k = 1; k < n; ++k) g[k] = kind == ManifoldKind::unstable ? h.x[k] : h.x[k] - h.y[k];
    std::vector<mp> s, c;
    sin_cos(g, n, s, c);
    mp a11, a12, a21, a22, r1, r2;
    if (kind == ManifoldKind::unstable) {
      // F(x, y) = (x + y + a sin x, y + a sin x), linear part [[1+a, 1], [a, 1]]
      a11 = ln - (1 + a), a12 = -1, a21 = -a, a22 = ln - 1;
      r1 = a * s[n];
      r2 = a * s[n];
    } else {
      // F^{-1}(x, y) = (x - y, y - a sin(x - y)), linear part [[1, -1], [-a, 1+a]]
      a11 = ln - 1, a12 = 1, a21 = a, a22 = ln - (1 + a);
      r1 = 0;
      r2 = -a * s[n];
    }
    const mp d = a11 * a22 - a12 * a21;
    h.x[n] = (r1 * a22 - a12 * r2) / d;
    h.y[n] = (a11 * r2 - a21 * r1) / d;
  }
  return h;
}

inline mp horner(const std::vector<mp>& c, const mp& s) {
  mp v = 0;
  for (int n = static_cast<int>(c.size()) - 1; n >= 0; --n) v = v * s + c[n];
  return v;
}

inline bool encloses(const Interval& x, const mp& v) {
  return mp(x.lo()) <= v && v <= mp(x.hi());
}

// Largest |F(P(mu s)) - P(s)| (stable: F^{-1}) over `samples` + 1 points of [-1, 1].
inline mp conjugacy_residual(const HighPrecisionChart& h, double alpha, ManifoldKind kind,
                             int samples) {
  const mp a = alpha, mu = 1 / h.lambda;
  mp worst = 0;
  for (int i = 0; i <= samples; ++i) {
    const mp s = mp(-1) + mp(2) * i / samples;
    const mp px = horner(h.x, mu * s), py = horner(h.y, mu * s);
    mp fx, fy;
    if (kind == ManifoldKind::unstable) {
      fx = px + py + a * sin(px);
      fy = py + a * sin(px);
    } else {
      fx = px - py;
      fy = py - a * sin(px - py);
    }
    const mp ex = abs(fx - horner(h.x, s)), ey = abs(fy - horner(h.y, s));
    if (ex > worst) worst = ex;
    if (ey > worst) worst = ey;
  }
  return worst;
}

// max over 2000 points of the unit circle of |sum_{n=N+1}^{4N} [sin g]_n z^n|.
inline long double brute_force_sin_tail(const std::vector<mp>& g, int N) {
  std::vector<mp> s, c;
  sin_cos(g, 4 * N, s, c);
  std::vector<long double> tail(4 * N + 1, 0.0L);
  for (int n = N + 1; n <= 4 * N; ++n) tail[n] = s[n].convert_to<long double>();
  long double worst = 0.0L;
  for (int k = 0; k < 2000; ++k) {
    const long double th = 2.0L * 3.14159265358979323846L * k / 2000;
    long double re = 0.0L, im = 0.0L;
    for (int n = N + 1; n <= 4 * N; ++n) {
      re += tail[n] * cosl(n * th);
      im += tail[n] * sinl(n * th);
    }
    worst = std::max(worst, sqrtl(re * re + im * im));
  }
  return worst;
}

struct RandomPolynomial {
  int N = 0;
  std::vector<Interval> beta;
  std::vector<mp> g;
};

// Random g = sum_{n=1}^N beta_n s^n, N in [4, 24], geometric decay in (0.3, 0.7).
inline RandomPolynomial random_polynomial(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> order(4, 24);
  RandomPolynomial p;
  p.N = order(rng);
  const double decay = 0.3 + 0.4 * std::fabs(u(rng));
  p.beta.assign(p.N + 1, Interval(0.0));
  p.g.assign(p.N + 1, mp(0));
  for (int n = 1; n <= p.N; ++n) {
    const double b = u(rng) * std::pow(decay, n - 1) * (n == 1 ? 1.5 : 1.0);
    p.beta[n] = Interval(b);
    p.g[n] = b;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Interval containment sampling

inline constexpr int kCases = 10000;

// Random interval with endpoints spread over several binades, including
// degenerate and sign-straddling ones.
inline Interval random_interval(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> e(-8, 8);
  const double a = u(rng) * std::ldexp(scale, e(rng));
  const double w = std::fabs(u(rng)) * std::ldexp(scale, e(rng) - 4);
  switch (rng() % 4) {
    case 0: return Interval(a);
    default: return Interval(a, a + w);
  }
}

inline double sample(std::mt19937_64& rng, const Interval& x) {
  switch (rng() % 4) {
    case 0: return x.lo();
    case 1: return x.hi();
    default: {
      std::uniform_real_distribution<double> t(0.0, 1.0);
      return std::clamp(x.lo() + t(rng) * (x.hi() - x.lo()), x.lo(), x.hi());
    }
  }
}

// Long double evaluation of doubles rounds monotonically, so a representable
// bound of the exact value also bounds the extended-precision result.
inline bool encloses(const Interval& r, long double v) {
  return static_cast<long double>(r.lo()) <= v && v <= static_cast<long double>(r.hi());
}

using BinaryOp = std::function<Interval(const Interval&, const Interval&)>;
using BinaryRef = std::function<long double(long double, long double)>;

inline int binary_violations(const BinaryOp& op, const BinaryRef& ref, bool nonzero_rhs, unsigned seed) {
  std::mt19937_64 rng(seed);
  int bad = 0;
  for (int i = 0; i < kCases; ++i) {
    const Interval x = random_interval(rng, 1.0);
    Interval y = random_interval(rng, 1.0);
    if (nonzero_rhs && y.contains_zero()) y = y.lo() >= 0.0 ? y + Interval(0.5) : Interval(0.5, 2.0);
    const Interval r = op(x, y);
    const long double v = ref(sample(rng, x), sample(rng, y));
    if (!encloses(r, v)) ++bad;
  }
  return bad;
}

using UnaryOp = std::function<Interval(const Interval&)>;
using UnaryRef = std::function<long double(long double)>;

inline int unary_violations(const UnaryOp& op, const UnaryRef& ref, double scale, bool positive,
                            unsigned seed) {
  std::mt19937_64 rng(seed);
  int bad = 0;
  for (int i = 0; i < kCases; ++i) {
    Interval x = random_interval(rng, scale);
    if (positive) x = abs(x) + Interval(1e-300);
    const Interval r = op(x);
    const long double v = ref(sample(rng, x));
    if (!encloses(r, v)) ++bad;
  }
  return bad;
}

}  // namespace drift::oracles
