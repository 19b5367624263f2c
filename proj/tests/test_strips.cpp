#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "drift/pipeline.hpp"

using namespace drift;

namespace {

struct Fixture {
  HomoclinicEnclosure h;
  Interval threshold{0.0};
};

const Fixture& fixture() {
  static const Fixture f = [] {
    RunConfig c;
    const HomoclinicGuess g = table1_guess();
    const ChartPair ch = build_cone_charts(c, g);
    Fixture out;
    out.h = verify_homoclinic(ch.unstable, ch.stable, 4.0, g);
    out.threshold = strip_threshold(out.h.tail_lambda, out.h.tail_C);
    return out;
  }();
  return f;
}

}  // namespace

TEST_CASE("threshold equals 3 sqrt2 C at alpha = 4 up to the cone rate inflation", "[strips]") {
  const Interval lam = Interval(3.0) - Interval(2.0) * sqrt(Interval(2.0));
  const Interval t = strip_threshold(lam, 1.0);
  CHECK(t.contains(3.0 * std::sqrt(2.0)));
  CHECK(t.width() < 1e-13);
  CHECK_THROWS(strip_threshold(Interval(1.0), 1.0));
}

TEST_CASE("orbit sum encloses pointwise evaluation", "[strips][property]") {
  const Fixture& f = fixture();
  const OrbitSines o = orbit_sines(f.h);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  for (int i = 0; i < 10000; ++i) {
    const double th = u(rng), I = u(rng);
    const Interval box_t(th, th + 1e-3), box_i(I, I + 1e-3);
    const Interval s = orbit_sum(o, box_t, box_i);
    const double pt = th + 5e-4, pi = I + 5e-4;
    double v = 0.0;
    for (int j = 0; j < f.h.M; ++j) v += std::sin(f.h.boxes[j].x.mid()) * std::cos(pt + j * pi);
    REQUIRE(inflate(s, 1e-12).contains(v));
  }
}

TEST_CASE("orbit sum vanishes identically at I = pi", "[strips]") {
  const Fixture& f = fixture();
  for (double th = 0.0; th < 2.0 * M_PI; th += 0.1)
    CHECK(orbit_sum(f.h, Interval(th), pi_interval()).contains_zero());
}

TEST_CASE("any action span containing pi leaves a gap", "[strips]") {
  const Fixture& f = fixture();
  StripOptions o;
  for (const char* span : {"3.1..3.2", "pi-1/20..pi+1/20", "3.0..3.3"}) {
    const Interval s = parse_span(span);
    for (StripSign sign : {StripSign::plus, StripSign::minus}) {
      const StripAssembly a = assemble_strip(f.h, sign, s, f.threshold, o);
      REQUIRE_FALSE(a.ok());
      bool gap_at_pi = false;
      for (const auto& g : a.gaps) gap_at_pi = gap_at_pi || g.contains(pi_interval());
      CHECK(gap_at_pi);
      CHECK(a.gap_reasons.front().find("sum inequality") != std::string::npos);
    }
  }
}

TEST_CASE("a small strip certifies and rechecks", "[strips]") {
  const Fixture& f = fixture();
  StripOptions o;
  const Interval span(1.0, 1.1);
  const OrbitSines os = orbit_sines(f.h);
  const StripAssembly p = assemble_strip(f.h, StripSign::plus, span, f.threshold, o);
  const StripAssembly m = assemble_strip(f.h, StripSign::minus, span, f.threshold, o);
  REQUIRE(p.ok());
  REQUIRE(m.ok());
  CHECK(strip_covers(p.strip, span));
  for (const auto& r : p.strip.rects) {
    CHECK(recheck_rect(os, r, StripSign::plus, f.threshold, 10));
    CHECK(r.margin_sum > f.threshold.hi());
    const Interval mid_sum = orbit_sum(os, Interval(r.theta.mid()), Interval(r.action.mid()));
    CHECK(mid_sum.lo() > f.threshold.hi());
  }
  for (const auto& r : m.strip.rects) CHECK(recheck_rect(os, r, StripSign::minus, f.threshold, 10));
  const TransferTable pm = check_transfer(p.strip, m.strip, o);
  const TransferTable mp = check_transfer(m.strip, p.strip, o);
  CHECK(recheck_transfer(pm, p.strip, m.strip));
  CHECK(recheck_transfer(mp, m.strip, p.strip));

  SECTION("a decremented witness is caught") {
    StripRect r = p.strip.rects.front();
    r.witnesses.front() -= 1;
    std::string why;
    CHECK_FALSE(recheck_rect(os, r, StripSign::plus, f.threshold, 10, &why));
    CHECK(why.find("witness") != std::string::npos);
  }
  SECTION("a rectangle checked against the wrong sign fails") {
    CHECK_FALSE(recheck_rect(os, p.strip.rects.front(), StripSign::minus, f.threshold, 10));
  }
  SECTION("a truncated tree is caught") {
    StripRect r = p.strip.rects.front();
    r.tree.pop_back();
    CHECK_FALSE(recheck_rect(os, r, StripSign::plus, f.threshold, 10));
  }
  SECTION("a transfer into the wrong rectangle is caught") {
    TransferTable bad = pm;
    bad.rows.front().leaves.front().n += 1;
    CHECK_FALSE(recheck_transfer(bad, p.strip, m.strip));
  }
  SECTION("dropping a rectangle breaks coverage") {
    Strip s = p.strip;
    s.rects.erase(s.rects.begin() + static_cast<long>(s.rects.size() / 2));
    CHECK_FALSE(strip_covers(s, span));
  }
}

TEST_CASE("parallel assembly matches the sequential result", "[strips]") {
  const Fixture& f = fixture();
  StripOptions o;
  const Interval span(4.0, 4.1);
  const StripAssembly a = assemble_strip(f.h, StripSign::plus, span, f.threshold, o);
  o.workers = 3;
  const StripAssembly b = assemble_strip(f.h, StripSign::plus, span, f.threshold, o);
  REQUIRE(a.strip.rects.size() == b.strip.rects.size());
  for (std::size_t k = 0; k < a.strip.rects.size(); ++k) {
    CHECK(a.strip.rects[k].tree == b.strip.rects[k].tree);
    CHECK(a.strip.rects[k].witnesses == b.strip.rects[k].witnesses);
  }
}

TEST_CASE("bisection trees partition the rectangle", "[strips]") {
  const Box2 rect{Interval(0.0, 1.0), Interval(2.0, 3.0)};
  // Two grid cells, each split once: theta in the first, action in the second.
  const auto leaves = tree_leaves(rect, 2, 1, "TLLALL");
  double area = 0.0;
  for (const auto& b : leaves) area += b.theta.width() * b.action.width();
  CHECK(area == Catch::Approx(1.0));
  CHECK(leaves.size() == 4);
  CHECK_THROWS(tree_leaves(rect, 1, 1, "T"));
  CHECK_THROWS(tree_leaves(rect, 1, 1, "LL"));
  CHECK_THROWS(tree_leaves(rect, 1, 1, "X"));
}

TEST_CASE("action slabs cover the span with overlaps", "[strips]") {
  StripOptions o;
  const Interval span(0.2, 1.0);
  const auto slabs = action_slabs(span, o);
  CHECK(slabs.front().lo() == span.lo());
  CHECK(slabs.back().hi() == span.hi());
  for (std::size_t k = 1; k < slabs.size(); ++k) CHECK(slabs[k].lo() < slabs[k - 1].hi());
}

TEST_CASE("rotation witnesses land strictly inside the arc", "[strips][property]") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  for (int i = 0; i < 2000; ++i) {
    const double s1 = u(rng);
    const Interval arc(s1, s1 + 1.0);
    const double th = u(rng), I = 0.2 + 5.0 * u(rng) / (2.0 * M_PI);
    const Interval bt(th, th + 1e-4), bi(I, I + 1e-5);
    const int m = rotation_witness(bt, bi, arc, 1, 500);
    if (m == 0) continue;
    double x = std::fmod(th + 5e-5 + m * (I + 5e-6) - s1, 2.0 * M_PI);
    if (x < 0) x += 2.0 * M_PI;
    REQUIRE(x < 1.0);
  }
}
