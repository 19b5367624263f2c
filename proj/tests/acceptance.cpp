// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "drift/drift.hpp"
#include "oracles.hpp"

using namespace drift;
using namespace drift::oracles;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ChartPair alpha4_charts(ChartBackend b) {
  RunConfig c;
  return b == ChartBackend::cone ? build_cone_charts(c, table1_guess()) : build_param_charts(c, table1_guess());
}

Outcome cone_homoclinic() {
  const HomoclinicGuess g = table1_guess();
  const ChartPair ch = alpha4_charts(ChartBackend::cone);
  const HomoclinicEnclosure h = verify_homoclinic(ch.unstable, ch.stable, 4.0, g);
  double dev = 0.0;
  for (int i = 0; i <= g.M; ++i) {
    dev = std::max(dev, std::fabs(h.boxes[i].x.mid() - g.points[i].x));
    dev = std::max(dev, std::fabs(h.boxes[i].y.mid() - g.points[i].y));
  }
  return {dev <= 1e-10 && h.radius <= 1.5e-7 && h.transversal,
          fmt("max midpoint deviation %.3g", dev) + fmt(", radius %.3g", h.radius)};
}

Outcome param_homoclinic() {
  const ChartPair ch = alpha4_charts(ChartBackend::parameterization);
  const HomoclinicEnclosure h = verify_homoclinic(ch.unstable, ch.stable, 4.0, table1_guess());
  return {h.radius <= 1e-13 && h.transversal, fmt("radius %.3g", h.radius)};
}

Outcome full_strips(DiffusionCertificate& cert) {
  RunConfig c;
  c.guess = "table1";
  c.strips.workers = 4;
  const auto t0 = std::chrono::steady_clock::now();
  cert = certify_diffusion(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const Interval pi = pi_interval();
  const Interval want_lo = Interval(1.0) / Interval(5.0);
  const Interval want_hi = pi - Interval(1.0) / Interval(10.0);
  const Interval want2_lo = pi + Interval(1.0) / Interval(10.0);
  const Interval want2_hi = Interval(2.0) * pi - Interval(1.0) / Interval(5.0);
  const auto& br = cert.backends.front().branches;
  bool ok = br.size() == 2;
  std::size_t rects = 0;
  if (ok) {
    ok = br[0].span.lo() <= want_lo.lo() && br[0].span.hi() >= want_hi.hi() &&
         br[1].span.lo() <= want2_lo.lo() && br[1].span.hi() >= want2_hi.hi();
    for (const auto& b : br) {
      ok = ok && strip_covers(b.plus, b.span) && strip_covers(b.minus, b.span) &&
           !b.plus_to_minus.rows.empty() && !b.minus_to_plus.rows.empty();
      rects += b.plus.rects.size() + b.minus.rects.size();
    }
  }
  const ReplayReport r = replay(cert);
  ok = ok && r.ok() && secs <= 600.0;
  std::ostringstream d;
  d << rects << " rects over both spans, transfers both ways, replay " << (r.ok() ? "ok" : "failed")
    << " (" << r.checks << " checks), " << fmt("%.1f s", secs) << " with 4 workers";
  return {ok, d.str()};
}

Outcome pi_gap() {
  const char* spans[] = {"3.1..3.2", "pi-1/20..pi+1/20", "3.0..3.3", "1..4", "pi-1e-6..pi+1e-6"};
  int failed = 0, total = 0;
  std::string bad;
  for (const char* s : spans) {
    RunConfig c;
    c.guess = "table1";
    c.spans = {parse_span(s)};
    ++total;
    try {
      certify_diffusion(c);
      bad += std::string(" ") + s + " certified;";
    } catch (const StageError& e) {
      if (e.stage == "strips") ++failed;
      else bad += std::string(" ") + s + " failed at " + e.stage + ";";
    }
  }
  return {failed == total, std::to_string(failed) + "/" + std::to_string(total) +
                               " spans containing pi rejected at the strips stage" + bad};
}

Outcome weak_kick() {
  RunConfig c;
  c.alpha = 0.15;
  c.guess = "auto";
  std::string cone_msg = "cone certified";
  bool cone_failed = false;
  try {
    build_cone_charts(c, make_guess(c));
  } catch (const ChartError& e) {
    cone_failed = true;
    cone_msg = "cone fails: " + std::string(e.what());
  }
  bool param_ok = false;
  std::string param_msg;
  try {
    // Chart construction throws unless both charts pass the radii-polynomial test.
    const ChartPair ch = build_param_charts(c, make_guess(c));
    param_ok = true;
    param_msg = "param charts validated" + fmt(" (domains %.3g", ch.unstable.domain.hi()) +
                fmt(", %.3g)", ch.stable.domain.hi());
  } catch (const std::exception& e) {
    param_msg = "param fails: " + std::string(e.what());
  }
  return {cone_failed && param_ok, cone_msg + "; " + param_msg};
}

Outcome lambda_enclosure() {
  const Interval lam = saddle_eigenvalues(4.0).stable;
  const bool ok = encloses(lam, 3 - 2 * sqrt(mp(2))) && lam.rad() <= 1e-14;
  return {ok, "lambda in " + to_display(lam, 17) + fmt(", radius %.3g", lam.rad())};
}

Outcome properties(const DiffusionCertificate& cert) {
  std::ostringstream d;
  bool ok = true;

  int violations = 0;
  violations += binary_violations(std::plus<Interval>(), std::plus<long double>(), false, 1);
  violations += binary_violations(std::minus<Interval>(), std::minus<long double>(), false, 2);
  violations += binary_violations(std::multiplies<Interval>(), std::multiplies<long double>(), false, 3);
  violations += binary_violations(std::divides<Interval>(), std::divides<long double>(), true, 4);
  violations += unary_violations([](const Interval& x) { return sqrt(x); },
                                 [](long double v) { return sqrtl(v); }, 1.0, true, 5);
  violations += unary_violations([](const Interval& x) { return exp(x); },
                                 [](long double v) { return expl(v); }, 0.05, false, 6);
  violations += unary_violations([](const Interval& x) { return log(x); },
                                 [](long double v) { return logl(v); }, 1.0, true, 7);
  violations += unary_violations([](const Interval& x) { return sin(x); },
                                 [](long double v) { return sinl(v); }, 0.02, false, 8);
  violations += unary_violations([](const Interval& x) { return cos(x); },
                                 [](long double v) { return cosl(v); }, 0.02, false, 9);
  ok = ok && violations == 0;
  d << "containment " << violations << " violations in " << 9 * kCases << " samples";

  double worst_ratio = 0.0;
  for (ManifoldKind kind : {ManifoldKind::unstable, ManifoldKind::stable}) {
    const ParamChart ch = make_param_chart(4.0, kind);
    const mp res = conjugacy_residual(high_precision_chart(4.0, kind, ch.N, ch.scale), 4.0, kind, 1000);
    ok = ok && res <= mp(ch.eps_N);
    worst_ratio = std::max(worst_ratio, static_cast<double>(res / mp(ch.eps_N)));
  }
  d << fmt("; residual/eps_N <= %.3g", worst_ratio);

  std::mt19937_64 rng(2024);
  int dominated = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const RandomPolynomial p = random_polynomial(rng);
    if (brute_force_sin_tail(p.g, p.N) <= static_cast<long double>(sin_tail_bound(p.beta).bound))
      ++dominated;
  }
  ok = ok && dominated == 20;
  d << "; defect bound dominates " << dominated << "/20";

  const json j1 = certificate_to_json(cert);
  const DiffusionCertificate back = certificate_from_json(j1);
  const bool idem = certificate_to_json(back) == j1 && replay(back).ok() && replay(back).ok();
  ok = ok && idem;
  d << "; replay idempotent " << (idem ? "yes" : "no");

  const Interval one(1.0);
  const Interval q = (one + cert.lambda) / (one - cert.lambda);
  const bool root2 = encloses(q, sqrt(mp(2)));
  ok = ok && root2;
  d << "; (1+lambda)/(1-lambda) " << (root2 ? "contains" : "misses") << " sqrt 2";
  return {ok, d.str()};
}

// Sum at rectangle midpoints with the published orbit, against 3 sqrt(2) C.
Outcome midpoint_sums(const DiffusionCertificate& cert) {
  const HomoclinicGuess g = table1_guess();
  const BackendCertificate& b = cert.backends.front();
  const Interval bound = Interval(3.0) * sqrt(Interval(2.0)) * Interval(b.homoclinic.tail_C);
  int checked = 0, above = 0;
  double margin = INFINITY;
  for (const auto& br : b.branches)
    for (const auto& r : br.plus.rects) {
      const Interval theta(r.theta.mid()), action(r.action.mid());
      Interval sum(0.0);
      for (int j = 0; j < g.M; ++j)
        sum += sin(Interval(g.points[j].x)) * cos(theta + Interval(static_cast<double>(j)) * action);
      ++checked;
      if (sum.lo() > bound.hi()) ++above;
      margin = std::min(margin, sum.lo() - bound.hi());
    }
  return {checked > 0 && above == checked, std::to_string(above) + "/" + std::to_string(checked) +
                                               " S+ midpoints above 3 sqrt(2) C = " +
                                               to_display(bound, 8) + fmt(", min margin %.3g", margin)};
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  DiffusionCertificate cert;
  const Outcome results[] = {
      guarded(cone_homoclinic),
      guarded(param_homoclinic),
      guarded([&] { return full_strips(cert); }),
      guarded(pi_gap),
      guarded(weak_kick),
      guarded(lambda_enclosure),
      guarded([&] { return cert.backends.empty() ? Outcome{false, "no certificate"} : properties(cert); }),
      guarded([&] { return cert.backends.empty() ? Outcome{false, "no certificate"} : midpoint_sums(cert); }),
  };
  int failures = 0;
  for (int i = 0; i < 8; ++i) {
    std::printf("criterion %d: %s  %s\n", i + 1, results[i].pass ? "PASS" : "FAIL", results[i].detail.c_str());
    if (!results[i].pass) ++failures;
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
