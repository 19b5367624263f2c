// Strips on the cylinder {x = y = 0} x T^2 where the orbit sum
//
//   C_M(theta, I) = sum_{j<M} sin(x_j) cos(theta + j I)
//
// along the homoclinic orbit exceeds 3 (1 + lambda) / (1 - lambda) C (S+),
// or lies below its negative (S-).  Each rectangle is partitioned into
// sub-boxes by a bisection tree; every leaf carries a return witness m >= M
// with theta + m I inside the rectangle's theta-arc mod 2 pi.  Transfer
// tables record, per leaf of a source rectangle, an n with theta + n I inside
// a rectangle of the opposite strip covering the same actions.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "drift/homoclinic.hpp"
#include "drift/interval.hpp"

namespace drift {

class StripError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StripSign { plus, minus };

inline const char* to_string(StripSign s) { return s == StripSign::plus ? "plus" : "minus"; }

// ---------------------------------------------------------------------------
// Worker pool

// Runs fn(i) for i in [0, n) on up to `workers` threads.  Results must be
// written to per-index slots, which keeps the merge deterministic.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t w = std::min<std::size_t>(std::max(1, workers), std::max<std::size_t>(1, n));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < w; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Orbit sum and threshold

// sin(x_j) for j < M, computed once per homoclinic enclosure.
struct OrbitSines {
  std::vector<Interval> s;
  // Sensitivities of the sum to theta and to I, for choosing split directions.
  double theta_weight = 0.0;
  double action_weight = 0.0;
};

inline OrbitSines orbit_sines(const HomoclinicEnclosure& h) {
  OrbitSines o;
  for (int j = 0; j < h.M; ++j) {
    o.s.push_back(sin(h.boxes[j].x));
    o.theta_weight += o.s.back().mag();
    o.action_weight += j * o.s.back().mag();
  }
  return o;
}

inline Interval orbit_sum(const OrbitSines& o, const Interval& theta, const Interval& action) {
  Interval acc(0.0);
  for (std::size_t j = 0; j < o.s.size(); ++j)
    acc += o.s[j] * cos(theta + Interval(static_cast<double>(j)) * action);
  return acc;
}

inline Interval orbit_sum(const HomoclinicEnclosure& h, const Interval& theta,
                          const Interval& action) {
  return orbit_sum(orbit_sines(h), theta, action);
}

// 3 (1 + lambda) / (1 - lambda) C
inline Interval strip_threshold(const Interval& lambda, double C) {
  if (!(lambda.hi() < 1.0) || !(lambda.lo() >= 0.0))
    throw std::invalid_argument("strip_threshold: lambda must lie in [0, 1)");
  const Interval one(1.0);
  return Interval(3.0) * (one + lambda) / (one - lambda) * Interval(C);
}

inline bool sum_condition(const Interval& sum, StripSign sign, const Interval& threshold) {
  return sign == StripSign::plus ? sum.lo() > threshold.hi() : sum.hi() < -threshold.hi();
}

// The sum cannot satisfy the condition anywhere in the box.
inline bool sum_hopeless(const Interval& sum, StripSign sign, const Interval& threshold) {
  return sign == StripSign::plus ? sum.hi() <= threshold.lo() : sum.lo() >= -threshold.lo();
}

// ---------------------------------------------------------------------------
// Arcs on the circle

// x lies strictly inside the lifted arc (lo, hi) after subtracting some
// multiple of the certified 2 pi.
inline bool arc_contains_strict(const Interval& arc, const Interval& x) {
  const Interval period = two_pi_interval();
  const double k0 = std::floor((x.lo() - arc.lo()) / (2.0 * M_PI));
  for (double k = k0 - 1.0; k <= k0 + 1.0; k += 1.0) {
    const Interval y = x - Interval(k) * period;
    if (y.lo() > arc.lo() && y.hi() < arc.hi()) return true;
  }
  return false;
}

// Smallest m in [m_min, m_max] with theta + m I strictly inside the arc, or 0.
inline int rotation_witness(const Interval& theta, const Interval& action, const Interval& arc,
                            int m_min, int m_max) {
  for (int m = m_min; m <= m_max; ++m)
    if (arc_contains_strict(arc, theta + Interval(static_cast<double>(m)) * action)) return m;
  return 0;
}

// ---------------------------------------------------------------------------
// Bisection trees over a rectangle
//
// A rectangle is first cut into a grid_theta x grid_action grid; each cell is
// then described in preorder by 'L' (leaf), 'T' (split theta at the
// midpoint) or 'A' (split the action at the midpoint).  Replaying the string
// regenerates the exact same sub-boxes.

struct Box2 {
  Interval theta;
  Interval action;
};

inline double grid_point(double lo, double hi, int i, int n) {
  if (i == 0) return lo;
  if (i == n) return hi;
  return lo + (hi - lo) * (static_cast<double>(i) / n);
}

inline std::vector<Box2> grid_cells(const Box2& b, int gt, int ga) {
  std::vector<Box2> out;
  for (int j = 0; j < ga; ++j)
    for (int i = 0; i < gt; ++i)
      out.push_back({Interval(grid_point(b.theta.lo(), b.theta.hi(), i, gt),
                              grid_point(b.theta.lo(), b.theta.hi(), i + 1, gt)),
                     Interval(grid_point(b.action.lo(), b.action.hi(), j, ga),
                              grid_point(b.action.lo(), b.action.hi(), j + 1, ga))});
  return out;
}

inline std::pair<Box2, Box2> split_box(const Box2& b, char dir) {
  if (dir == 'T') {
    const double m = b.theta.mid();
    return {{Interval(b.theta.lo(), m), b.action}, {Interval(m, b.theta.hi()), b.action}};
  }
  const double m = b.action.mid();
  return {{b.theta, Interval(b.action.lo(), m)}, {b.theta, Interval(m, b.action.hi())}};
}

// Leaves of a partition, in the order the tree lists them.
inline std::vector<Box2> tree_leaves(const Box2& rect, int gt, int ga, const std::string& tree) {
  std::vector<Box2> leaves;
  std::size_t pos = 0;
  std::function<void(const Box2&)> walk = [&](const Box2& b) {
    if (pos >= tree.size()) throw std::invalid_argument("bisection tree is truncated");
    const char c = tree[pos++];
    if (c == 'L') {
      leaves.push_back(b);
      return;
    }
    if (c != 'T' && c != 'A') throw std::invalid_argument("bisection tree has an unknown symbol");
    const auto [l, r] = split_box(b, c);
    walk(l);
    walk(r);
  };
  for (const Box2& cell : grid_cells(rect, gt, ga)) walk(cell);
  if (pos != tree.size()) throw std::invalid_argument("bisection tree has trailing symbols");
  return leaves;
}

// Outcome of a leaf test: a witness (> 0) or a requested split direction.
struct LeafTest {
  int witness = 0;
  int aux = 0;
  char split = 'A';
  bool hopeless = false;
};

struct TreeBuild {
  std::string tree;
  std::vector<LeafTest> leaves;
  std::vector<Box2> leaf_boxes;
  std::optional<Box2> failed;
  std::string reason;
};

inline TreeBuild build_tree(const Box2& rect, int gt, int ga, int depth_max,
                            const std::function<LeafTest(const Box2&, std::string&)>& test) {
  TreeBuild out;
  std::function<bool(const Box2&, int)> rec = [&](const Box2& b, int depth) {
    std::string why;
    const LeafTest t = test(b, why);
    if (t.witness > 0) {
      out.tree += 'L';
      out.leaves.push_back(t);
      out.leaf_boxes.push_back(b);
      return true;
    }
    if (t.hopeless || depth >= depth_max) {
      out.failed = b;
      out.reason = t.hopeless ? why : why + " (depth budget exhausted)";
      return false;
    }
    out.tree += t.split;
    const auto [l, r] = split_box(b, t.split);
    return rec(l, depth + 1) && rec(r, depth + 1);
  };
  for (const Box2& cell : grid_cells(rect, gt, ga))
    if (!rec(cell, 0)) break;
  return out;
}

// ---------------------------------------------------------------------------
// Rectangles and strips

struct StripRect {
  // Lifted theta-arc [s1, s2], s1 in [0, 2 pi), s2 - s1 < 2 pi.
  Interval theta;
  Interval action;
  int grid_theta = 1;
  int grid_action = 1;
  std::string tree;
  // Return witness m per leaf, in tree order.
  std::vector<int> witnesses;
  // Minimum over leaves of inf C_M (S+) or of -sup C_M (S-).
  double margin_sum = 0.0;
};

struct Strip {
  StripSign sign = StripSign::plus;
  Interval action_span{0.0};
  std::vector<StripRect> rects;
};

struct StripOptions {
  int M = 10;
  int m_max = 200;
  int n_max = 2000;
  int depth_max = 12;
  double slab_width = 0.02;
  // Adjacent slabs overlap by this fraction of the slab width on each side.
  double slab_overlap = 0.1;
  int scan_cells = 256;
  int scan_depth = 6;
  int workers = 1;
};

namespace detail {

inline char sum_split(const OrbitSines& o, const Box2& b) {
  return b.theta.width() * o.theta_weight >= b.action.width() * o.action_weight ? 'T' : 'A';
}

inline double signed_margin(const Interval& sum, StripSign sign) {
  return sign == StripSign::plus ? sum.lo() : -sum.hi();
}

}  // namespace detail

struct RectCheck {
  std::optional<StripRect> rect;
  std::string failure;
  std::optional<Box2> failed_box;
};

// Certifies the sum inequality and a return witness on every leaf of an
// adaptive partition of theta x action.
inline RectCheck check_rect(const OrbitSines& o, const Interval& theta, const Interval& action,
                            StripSign sign, const Interval& threshold, const StripOptions& opts,
                            int grid_theta = 1, int grid_action = 1) {
  RectCheck out;
  const double arc_len = theta.width();
  if (!(arc_len < 2.0 * M_PI)) {
    out.failure = "theta-arc must be shorter than 2 pi";
    return out;
  }
  double margin = std::numeric_limits<double>::infinity();
  auto test = [&](const Box2& b, std::string& why) {
    LeafTest t;
    const Interval s = orbit_sum(o, b.theta, b.action);
    if (!sum_condition(s, sign, threshold)) {
      t.hopeless = sum_hopeless(s, sign, threshold);
      t.split = detail::sum_split(o, b);
      why = "sum inequality fails";
      return t;
    }
    t.witness = rotation_witness(b.theta, b.action, theta, opts.M, opts.m_max);
    if (t.witness == 0) {
      t.split = b.theta.width() > 0.25 * arc_len ? 'T' : 'A';
      why = "no return witness m <= m_max";
      return t;
    }
    margin = std::min(margin, detail::signed_margin(s, sign));
    return t;
  };
  const TreeBuild tb = build_tree({theta, action}, grid_theta, grid_action, opts.depth_max, test);
  if (tb.failed) {
    out.failure = tb.reason;
    out.failed_box = tb.failed;
    return out;
  }
  StripRect r;
  r.theta = theta;
  r.action = action;
  r.grid_theta = grid_theta;
  r.grid_action = grid_action;
  r.tree = tb.tree;
  for (const auto& l : tb.leaves) r.witnesses.push_back(l.witness);
  r.margin_sum = margin;
  out.rect = r;
  return out;
}

// Action slabs [e_k - d, e_{k+1} + d] clipped to the span; consecutive slabs overlap.
inline std::vector<Interval> action_slabs(const Interval& span, const StripOptions& opts) {
  const double a = span.lo(), b = span.hi();
  const int K = std::max(1, static_cast<int>(std::ceil((b - a) / opts.slab_width)));
  const double d = opts.slab_overlap * (b - a) / K;
  std::vector<Interval> out;
  for (int k = 0; k < K; ++k) {
    const double lo = k == 0 ? a : std::max(a, grid_point(a, b, k, K) - d);
    const double hi = k + 1 == K ? b : std::min(b, grid_point(a, b, k + 1, K) + d);
    out.emplace_back(lo, hi);
  }
  return out;
}

namespace detail {

// Sum-only certification of a scan cell by bisection.
inline bool scan_cell_good(const OrbitSines& o, const Box2& b, StripSign sign,
                           const Interval& threshold, int depth) {
  const Interval s = orbit_sum(o, b.theta, b.action);
  if (sum_condition(s, sign, threshold)) return true;
  if (depth == 0 || sum_hopeless(s, sign, threshold)) return false;
  const auto [l, r] = split_box(b, sum_split(o, b));
  return scan_cell_good(o, l, sign, threshold, depth - 1) &&
         scan_cell_good(o, r, sign, threshold, depth - 1);
}

struct SlabResult {
  std::optional<StripRect> rect;
  std::string failure;
};

inline SlabResult place_slab(const OrbitSines& o, const Interval& slab, StripSign sign,
                             const Interval& threshold, const StripOptions& opts) {
  const int n = opts.scan_cells;
  const double step = 2.0 * M_PI / n;
  std::vector<char> good(n);
  for (int i = 0; i < n; ++i)
    good[i] = scan_cell_good(o, {Interval(i * step, (i + 1) * step), slab}, sign, threshold,
                             opts.scan_depth);
  // Longest cyclic run of good cells, kept shorter than the full circle.
  int best_len = 0, best_start = 0;
  for (int i = 0; i < n; ++i) {
    if (!good[i] || good[(i + n - 1) % n]) continue;
    int len = 0;
    while (len < n && good[(i + len) % n]) ++len;
    if (len > best_len) {
      best_len = len;
      best_start = i;
    }
  }
  if (best_len == 0 && good[0]) {
    best_len = n - 1;
    best_start = 0;
  }
  if (best_len == 0) return {std::nullopt, "no theta-arc satisfies the sum inequality"};
  const double s1 = best_start * step;
  const Interval theta(s1, s1 + best_len * step);
  RectCheck rc = check_rect(o, theta, slab, sign, threshold, opts, best_len, 1);
  if (!rc.rect) return {std::nullopt, rc.failure};
  return {rc.rect, ""};
}

}  // namespace detail

struct StripAssembly {
  Strip strip;
  // Action sub-intervals no certified rectangle covers, with reasons.
  std::vector<Interval> gaps;
  std::vector<std::string> gap_reasons;
  bool ok() const { return gaps.empty(); }
};

inline StripAssembly assemble_strip(const HomoclinicEnclosure& h, StripSign sign,
                                    const Interval& span, const Interval& threshold,
                                    const StripOptions& opts) {
  if (!(span.lo() > 0.0) || !(span.hi() < two_pi_interval().lo()))
    throw std::invalid_argument("action span must lie in (0, 2 pi)");
  const OrbitSines o = orbit_sines(h);
  const std::vector<Interval> slabs = action_slabs(span, opts);
  std::vector<detail::SlabResult> results(slabs.size());
  parallel_for(slabs.size(), opts.workers, [&](std::size_t k) {
    results[k] = detail::place_slab(o, slabs[k], sign, threshold, opts);
  });
  StripAssembly out;
  out.strip.sign = sign;
  out.strip.action_span = span;
  for (std::size_t k = 0; k < slabs.size(); ++k) {
    if (results[k].rect) {
      out.strip.rects.push_back(*results[k].rect);
    } else if (!out.gaps.empty() && out.gaps.back().hi() >= slabs[k].lo()) {
      out.gaps.back() = hull(out.gaps.back(), slabs[k]);
    } else {
      out.gaps.push_back(slabs[k]);
      out.gap_reasons.push_back(results[k].failure);
    }
  }
  return out;
}

// The rectangles' action intervals chain-overlap and cover the span.
inline bool strip_covers(const Strip& s, const Interval& span) {
  if (s.rects.empty()) return false;
  double reach = span.lo();
  if (s.rects.front().action.lo() > reach) return false;
  for (const auto& r : s.rects) {
    if (r.action.lo() > reach) return false;
    reach = std::max(reach, r.action.hi());
  }
  return reach >= span.hi();
}

// ---------------------------------------------------------------------------
// Transfer between strips

struct TransferLeaf {
  int n = 0;
  int dst = 0;
};

struct TransferRow {
  int src = 0;
  std::string tree;
  std::vector<TransferLeaf> leaves;
};

struct TransferTable {
  StripSign from = StripSign::plus;
  std::vector<TransferRow> rows;
};

inline std::optional<TransferLeaf> transfer_witness(const Box2& b, const Strip& dst, int n_max) {
  std::vector<int> candidates;
  for (std::size_t k = 0; k < dst.rects.size(); ++k)
    if (dst.rects[k].action.contains(b.action)) candidates.push_back(static_cast<int>(k));
  for (int n = 1; n <= n_max; ++n) {
    const Interval x = b.theta + Interval(static_cast<double>(n)) * b.action;
    for (int k : candidates)
      if (arc_contains_strict(dst.rects[k].theta, x)) return TransferLeaf{n, k};
  }
  return std::nullopt;
}

inline TransferTable check_transfer(const Strip& src, const Strip& dst, const StripOptions& opts) {
  TransferTable table;
  table.from = src.sign;
  table.rows.resize(src.rects.size());
  std::vector<std::string> errors(src.rects.size());
  parallel_for(src.rects.size(), opts.workers, [&](std::size_t k) {
    const StripRect& r = src.rects[k];
    auto test = [&](const Box2& b, std::string& why) {
      LeafTest t;
      if (const auto w = transfer_witness(b, dst, opts.n_max)) {
        t.witness = w->n;
        t.aux = w->dst;
      } else {
        t.split = b.theta.width() > 0.5 ? 'T' : 'A';
        why = "no transfer witness n <= n_max";
      }
      return t;
    };
    const TreeBuild tb = build_tree({r.theta, r.action}, 1, 1, opts.depth_max, test);
    if (tb.failed) {
      errors[k] = tb.reason + " for theta " + to_display(tb.failed->theta, 6) + ", I " +
                  to_display(tb.failed->action, 6);
      return;
    }
    TransferRow row;
    row.src = static_cast<int>(k);
    row.tree = tb.tree;
    for (const auto& l : tb.leaves) row.leaves.push_back({l.witness, l.aux});
    table.rows[k] = row;
  });
  for (const auto& e : errors)
    if (!e.empty()) throw StripError(std::string("transfer from S") +
                                     (src.sign == StripSign::plus ? "+" : "-") + " failed: " + e);
  return table;
}

// ---------------------------------------------------------------------------
// Re-verification from stored data

inline bool recheck_rect(const OrbitSines& o, const StripRect& r, StripSign sign,
                         const Interval& threshold, int M, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (!(r.theta.width() < 2.0 * M_PI)) return fail("theta-arc not shorter than 2 pi");
  std::vector<Box2> leaves;
  try {
    leaves = tree_leaves({r.theta, r.action}, r.grid_theta, r.grid_action, r.tree);
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  if (leaves.size() != r.witnesses.size()) return fail("witness count differs from leaf count");
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const Box2& b = leaves[i];
    if (!sum_condition(orbit_sum(o, b.theta, b.action), sign, threshold))
      return fail("sum inequality fails on leaf " + std::to_string(i));
    const int m = r.witnesses[i];
    if (m < M ||
        !arc_contains_strict(r.theta, b.theta + Interval(static_cast<double>(m)) * b.action))
      return fail("return witness m = " + std::to_string(m) + " invalid on leaf " +
                  std::to_string(i));
  }
  return true;
}

inline bool recheck_transfer(const TransferTable& t, const Strip& src, const Strip& dst,
                             std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (t.rows.size() != src.rects.size()) return fail("transfer table does not cover every rectangle");
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const TransferRow& row = t.rows[k];
    const StripRect& r = src.rects[k];
    if (row.src != static_cast<int>(k)) return fail("transfer rows out of order");
    std::vector<Box2> leaves;
    try {
      leaves = tree_leaves({r.theta, r.action}, 1, 1, row.tree);
    } catch (const std::exception& e) {
      return fail(e.what());
    }
    if (leaves.size() != row.leaves.size()) return fail("transfer witness count mismatch");
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const TransferLeaf& l = row.leaves[i];
      if (l.n < 1 || l.dst < 0 || l.dst >= static_cast<int>(dst.rects.size()))
        return fail("transfer witness out of range");
      const StripRect& d = dst.rects[l.dst];
      if (!d.action.contains(leaves[i].action))
        return fail("transfer target does not cover the leaf actions");
      if (!arc_contains_strict(d.theta,
                               leaves[i].theta + Interval(static_cast<double>(l.n)) * leaves[i].action))
        return fail("transfer witness n = " + std::to_string(l.n) + " invalid in row " +
                    std::to_string(k));
    }
  }
  return true;
}

}  // namespace drift
