// End-to-end certification: charts -> homoclinic orbit -> strips -> transfer,
// driven by a flat key = value run configuration.

#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "drift/certificate.hpp"
#include "drift/chart.hpp"
#include "drift/cones.hpp"
#include "drift/homoclinic.hpp"
#include "drift/parameterization.hpp"
#include "drift/strips.hpp"

namespace drift {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A failed certification stage; `stage` is one of charts, homoclinic,
// strips, transfer.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, ChartBackend backend, const std::string& msg)
      : std::runtime_error(stage + " [" + to_string(backend) + "]: " + msg),
        stage(std::move(stage)),
        backend(backend) {}
  std::string stage;
  ChartBackend backend;
};

inline Interval parse_span(const std::string& s);

// I in [1/5, pi - 1/10] and [pi + 1/10, 2 pi - 1/5].
inline std::vector<Interval> default_spans() {
  return {parse_span("1/5..pi-1/10"), parse_span("pi+1/10..2pi-1/5")};
}

struct RunConfig {
  double alpha = 4.0;
  std::vector<ChartBackend> backends = {ChartBackend::cone};
  int M = 10;
  // Parameterization order and scale (0 = automatic).
  int N = 40;
  double scale = 0.0;
  // Action spans as rigorous enclosures of their endpoints' expressions.
  std::vector<Interval> spans = default_spans();
  StripOptions strips;
  // "table1" uses the published orbit (alpha = 4, M = 10 only), "auto" the finder.
  std::string guess = "auto";
  // Chart domains are this multiple of the homoclinic endpoints' parameters.
  double reach_margin = 1.1;
  double inflation = 1e-5;
  std::string out = ".";
};

namespace detail {

// Expression grammar for span endpoints:
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := number | 'pi' | '(' expr ')' | '-' factor | number 'pi'
// Decimal literals are enclosed by their neighbouring floats.
class ExprParser {
 public:
  explicit ExprParser(std::string s) : s_(std::move(s)) {}

  Interval parse() {
    const Interval v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& m) const {
    throw ConfigError("bad expression '" + s_ + "': " + m);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  Interval expr() {
    Interval v = term();
    for (;;) {
      if (eat('+')) v = v + term();
      else if (eat('-')) v = v - term();
      else return v;
    }
  }
  Interval term() {
    Interval v = factor();
    for (;;) {
      if (eat('*')) {
        v = v * factor();
      } else if (eat('/')) {
        const Interval d = factor();
        if (d.contains_zero()) fail("division by zero");
        v = v / d;
      } else {
        return v;
      }
    }
  }
  bool eat_pi() {
    skip();
    if (s_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return true;
    }
    return false;
  }
  Interval factor() {
    if (eat('-')) return -factor();
    if (eat('(')) {
      const Interval v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (eat_pi()) return pi_interval();
    skip();
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    const std::string lit(begin, static_cast<const char*>(end));
    pos_ += static_cast<std::size_t>(end - begin);
    const bool exact = lit.find_first_of(".eExXpP") == std::string::npos && std::fabs(v) < 0x1p53;
    Interval x = exact ? Interval(v) : Interval(next_down(v), next_up(v));
    if (eat_pi()) x = x * pi_interval();
    return x;
  }

  std::string s_;
  std::size_t pos_ = 0;
};

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  }
}

inline double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
}

}  // namespace detail

inline Interval parse_expression(const std::string& s) { return detail::ExprParser(s).parse(); }

// "lo..hi" -> [inf lo, sup hi], an outer enclosure of the exact span.
inline Interval parse_span(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) throw ConfigError("span '" + s + "' must read lo..hi");
  const Interval a = parse_expression(s.substr(0, dots));
  const Interval b = parse_expression(s.substr(dots + 2));
  if (!(a.hi() < b.lo())) throw ConfigError("span '" + s + "' is empty");
  return {a.lo(), b.hi()};
}

inline std::vector<ChartBackend> parse_backends(const std::string& v) {
  if (v == "cone") return {ChartBackend::cone};
  if (v == "param") return {ChartBackend::parameterization};
  if (v == "both") return {ChartBackend::cone, ChartBackend::parameterization};
  throw ConfigError("backend must be cone, param or both, got '" + v + "'");
}

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& v) {
  using detail::parse_int;
  using detail::parse_real;
  if (key == "alpha") c.alpha = parse_real(key, v);
  else if (key == "backend") c.backends = parse_backends(v);
  else if (key == "M") c.M = parse_int(key, v);
  else if (key == "N") c.N = parse_int(key, v);
  else if (key == "scale") c.scale = v == "auto" ? 0.0 : parse_real(key, v);
  else if (key == "spans") {
    c.spans.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) c.spans.push_back(parse_span(detail::trim(item)));
  }
  else if (key == "m_max") c.strips.m_max = parse_int(key, v);
  else if (key == "n_max") c.strips.n_max = parse_int(key, v);
  else if (key == "depth_max") c.strips.depth_max = parse_int(key, v);
  else if (key == "slab_width") c.strips.slab_width = parse_real(key, v);
  else if (key == "workers") c.strips.workers = parse_int(key, v);
  else if (key == "guess") {
    if (v != "auto" && v != "table1") throw ConfigError("guess must be auto or table1");
    c.guess = v;
  }
  else if (key == "reach_margin") c.reach_margin = parse_real(key, v);
  else if (key == "inflation") c.inflation = parse_real(key, v);
  else if (key == "out") c.out = v;
  else throw ConfigError("unknown key '" + key + "'");
}

inline void validate_config(const RunConfig& c) {
  if (!(c.alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (c.M < 2 || c.M % 2 != 0) throw ConfigError("M must be even and at least 2");
  if (c.N < 2) throw ConfigError("N must be at least 2");
  if (c.spans.empty()) throw ConfigError("no action spans given");
  for (const auto& s : c.spans)
    if (!(s.lo() > 0.0) || !(s.hi() < two_pi_interval().lo()))
      throw ConfigError("action spans must lie inside (0, 2 pi)");
  if (c.strips.m_max < 1 || c.strips.n_max < 1 || c.strips.depth_max < 0)
    throw ConfigError("budgets m_max, n_max must be positive and depth_max non-negative");
  if (!(c.strips.slab_width > 0.0)) throw ConfigError("slab_width must be positive");
  if (c.strips.workers < 1) throw ConfigError("workers must be positive");
  if (!(c.reach_margin > 1.0)) throw ConfigError("reach_margin must exceed 1");
  if (c.guess == "table1" && (c.alpha != 4.0 || c.M != 10))
    throw ConfigError("the table1 guess exists only for alpha = 4, M = 10");
}

// Lines "key = value"; '#' starts a comment.  DRIFT_WORKERS overrides workers.
inline RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  if (const char* w = std::getenv("DRIFT_WORKERS"); w && *w)
    c.strips.workers = detail::parse_int("DRIFT_WORKERS", w);
  c.strips.M = c.M;
  validate_config(c);
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// Stages

inline HomoclinicGuess make_guess(const RunConfig& c) {
  if (c.guess == "table1") return table1_guess();
  auto g = find_homoclinic_guess(c.alpha, c.M);
  if (!g) throw HomoclinicError("no approximate homoclinic orbit of length M found");
  return *g;
}

// Parameters of the guess endpoints in each chart's own coordinate.
inline std::pair<double, double> endpoint_parameters(const ManifoldChart& pu, const ManifoldChart& ps,
                                                     const HomoclinicGuess& g) {
  const PhasePoint2 end{g.points[g.M].x - 2.0 * M_PI * g.target_shift, g.points[g.M].y};
  return {chart_preimage(pu, g.points[0]), chart_preimage(ps, end)};
}

struct ChartPair {
  ManifoldChart unstable;
  ManifoldChart stable;
};

// Cone charts whose radius reaches the guess endpoints; the slope is the
// smallest admissible at that radius.
inline ChartPair build_cone_charts(const RunConfig& c, const HomoclinicGuess& g) {
  const JordanFrame f = make_jordan_frame(c.alpha);
  ChartPair out;
  ManifoldChart probe;
  probe.data = ConeChartData{0.0, 0.0, f};
  probe.kind = ManifoldKind::unstable;
  ManifoldChart probe_s = probe;
  probe_s.kind = ManifoldKind::stable;
  const auto [tu, ts] = endpoint_parameters(probe, probe_s, g);
  for (auto [kind, t] : {std::pair{ManifoldKind::unstable, tu}, std::pair{ManifoldKind::stable, ts}}) {
    const double r = c.reach_margin * std::fabs(t);
    const auto s = tune_cone_slope(f, kind, r);
    if (!s)
      throw ChartError(std::string("cone conditions fail for the ") + to_string(kind) +
                       " chart at the radius needed to reach the homoclinic endpoint (r = " +
                       std::to_string(r) + ")");
    (kind == ManifoldKind::unstable ? out.unstable : out.stable) = cone_chart(*s, f, kind);
  }
  return out;
}

inline ChartPair build_param_charts(const RunConfig& c, const HomoclinicGuess& g) {
  ParamOptions po;
  po.N = c.N;
  po.scale = c.scale;
  const ParamChart pu = make_param_chart(c.alpha, ManifoldKind::unstable, po);
  const ParamChart ps = make_param_chart(c.alpha, ManifoldKind::stable, po);
  // Wrap with the widest admissible domain just to locate the endpoints.
  const double wide = cauchy_radius(pu).lo();
  const auto [su, ss] = endpoint_parameters(param_manifold_chart(pu, wide), param_manifold_chart(ps, wide), g);
  ChartPair out;
  for (auto [pc, s] : {std::pair{&pu, su}, std::pair{&ps, ss}}) {
    const double dom = c.reach_margin * std::fabs(s);
    if (!(dom <= wide))
      throw ChartError(std::string("homoclinic endpoint lies beyond the ") + to_string(pc->kind) +
                       " parameterization's Cauchy disk (|sigma| = " + std::to_string(std::fabs(s)) +
                       ")");
    (pc->kind == ManifoldKind::unstable ? out.unstable : out.stable) = param_manifold_chart(*pc, dom);
  }
  return out;
}

inline BackendCertificate certify_backend(const RunConfig& c, ChartBackend backend,
                                          const HomoclinicGuess& g) {
  BackendCertificate b;
  b.backend = backend;
  try {
    const ChartPair ch = backend == ChartBackend::cone ? build_cone_charts(c, g) : build_param_charts(c, g);
    b.unstable = ch.unstable;
    b.stable = ch.stable;
  } catch (const std::exception& e) {
    throw StageError("charts", backend, e.what());
  }
  try {
    HomoclinicOptions ho;
    ho.inflation = c.inflation;
    b.homoclinic = verify_homoclinic(b.unstable, b.stable, c.alpha, g, ho);
  } catch (const std::exception& e) {
    throw StageError("homoclinic", backend, e.what());
  }
  b.threshold = strip_threshold(b.homoclinic.tail_lambda, b.homoclinic.tail_C);
  for (const auto& span : c.spans) {
    CertifiedBranch br;
    br.span = span;
    for (StripSign sign : {StripSign::plus, StripSign::minus}) {
      const StripAssembly a = assemble_strip(b.homoclinic, sign, span, b.threshold, c.strips);
      if (!a.ok())
        throw StageError("strips", backend,
                         std::string("S") + (sign == StripSign::plus ? "+" : "-") +
                             " does not cover I in " + to_display(a.gaps.front(), 6) + ": " +
                             a.gap_reasons.front());
      (sign == StripSign::plus ? br.plus : br.minus) = a.strip;
    }
    try {
      br.plus_to_minus = check_transfer(br.plus, br.minus, c.strips);
      br.minus_to_plus = check_transfer(br.minus, br.plus, c.strips);
    } catch (const std::exception& e) {
      throw StageError("transfer", backend, e.what());
    }
    b.branches.push_back(std::move(br));
  }
  return b;
}

// Runs every configured backend; any stage failure aborts with StageError.
inline DiffusionCertificate certify_diffusion(const RunConfig& c) {
  validate_config(c);
  DiffusionCertificate cert;
  cert.alpha = c.alpha;
  cert.M = c.M;
  const SaddleEigenvalues ev = saddle_eigenvalues(c.alpha);
  cert.lambda = ev.stable;
  cert.lambda_unstable = ev.unstable;
  cert.budgets = c.strips;
  cert.budgets.M = c.M;
  HomoclinicGuess g;
  try {
    g = make_guess(c);
    if (g.M != c.M) throw HomoclinicError("guess length differs from M");
  } catch (const std::exception& e) {
    throw StageError("homoclinic", c.backends.front(), e.what());
  }
  RunConfig rc = c;
  rc.strips.M = c.M;
  for (ChartBackend b : c.backends) cert.backends.push_back(certify_backend(rc, b, g));
  cert.certified_action_intervals = c.spans;
  return cert;
}

}  // namespace drift
