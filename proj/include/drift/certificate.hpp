// The diffusion certificate: everything needed to re-check the hypotheses of
// the drift theorem at epsilon = 0, serialized as JSON with every real number
// stored as an exact hexadecimal float.
//
// replay() is the independent checker.  It trusts nothing but the stored
// enclosures and the map's closed form: eigenvalue brackets, chart
// validation inequalities, the homoclinic Newton step, every strip leaf and
// every transfer witness are recomputed.

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "drift/chart.hpp"
#include "drift/cones.hpp"
#include "drift/homoclinic.hpp"
#include "drift/parameterization.hpp"
#include "drift/strips.hpp"

namespace drift {

using json = nlohmann::json;

struct CertifiedBranch {
  Interval span{0.0};
  Strip plus;
  Strip minus;
  TransferTable plus_to_minus;
  TransferTable minus_to_plus;
};

struct BackendCertificate {
  ChartBackend backend = ChartBackend::cone;
  ManifoldChart unstable;
  ManifoldChart stable;
  HomoclinicEnclosure homoclinic;
  Interval threshold{0.0};
  std::vector<CertifiedBranch> branches;
};

struct DiffusionCertificate {
  double alpha = 4.0;
  int M = 10;
  // Enclosures of the saddle eigenvalues lambda < 1 < 1/lambda.
  Interval lambda{0.0};
  Interval lambda_unstable{0.0};
  // Lipschitz constant of the perturbation term, absorbed into the threshold.
  double L_g = 2.0;
  StripOptions budgets;
  std::vector<BackendCertificate> backends;
  std::vector<Interval> certified_action_intervals;
  std::string conclusion =
      "hypotheses certified for the unperturbed map (epsilon = 0); drift across each certified "
      "action interval holds for all sufficiently small epsilon > 0";
};

class CertificateFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Encoding helpers

inline json to_json_value(const Interval& x) { return json::array({to_hex(x.lo()), to_hex(x.hi())}); }
inline json to_json_value(double x) { return to_hex(x); }
inline json to_json_value(const PhaseBox2& b) {
  return json::array({to_json_value(b.x), to_json_value(b.y)});
}
inline json to_json_value(const IVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_json_value(x));
  return a;
}

inline double read_double(const json& j) {
  if (!j.is_string()) throw CertificateFormatError("expected a hexadecimal float string");
  try {
    return parse_hex(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw CertificateFormatError(e.what());
  }
}

inline Interval read_interval(const json& j) {
  if (!j.is_array() || j.size() != 2) throw CertificateFormatError("expected an interval pair");
  const double lo = read_double(j[0]), hi = read_double(j[1]);
  if (!(lo <= hi)) throw CertificateFormatError("interval with lo > hi");
  return {lo, hi};
}

inline PhaseBox2 read_box(const json& j) {
  if (!j.is_array() || j.size() != 2) throw CertificateFormatError("expected a box pair");
  return {read_interval(j[0]), read_interval(j[1])};
}

inline IVector read_ivector(const json& j) {
  if (!j.is_array()) throw CertificateFormatError("expected an interval vector");
  IVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = read_interval(j[i]);
  return v;
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw CertificateFormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw CertificateFormatError(std::string("bad field '") + key + "': " + e.what());
  }
}

inline const json& node(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw CertificateFormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

// ---------------------------------------------------------------------------
// Charts

inline json chart_to_json(const ManifoldChart& ch) {
  json j;
  j["kind"] = to_string(ch.kind);
  j["backend"] = to_string(ch.backend);
  j["domain"] = to_json_value(ch.domain);
  j["C"] = to_json_value(ch.C);
  j["lambda"] = to_json_value(ch.lambda);
  if (const auto* c = std::get_if<ConeChartData>(&ch.data)) {
    j["L"] = to_json_value(c->L);
    j["r"] = to_json_value(c->r);
  } else {
    const ParamChart& p = std::get<ParamChart>(ch.data);
    j["N"] = p.N;
    j["scale"] = to_json_value(p.scale);
    j["nu"] = to_json_value(p.nu);
    j["eigenvalue"] = to_json_value(p.lambda);
    j["mu"] = to_json_value(p.mu);
    j["eigvec"] = to_json_value(p.eigvec);
    json pa = json::array(), ps = json::array(), pc = json::array();
    for (int n = 0; n <= p.N; ++n) {
      pa.push_back(to_json_value(p.coeffs[n]));
      ps.push_back(to_json_value(p.sin_coeffs[n]));
      pc.push_back(to_json_value(p.cos_coeffs[n]));
    }
    j["coeffs"] = pa;
    j["sin_coeffs"] = ps;
    j["cos_coeffs"] = pc;
    j["eps_N"] = to_json_value(p.eps_N);
    j["r_valid"] = to_json_value(p.r_valid);
    j["deriv_tail"] = to_json_value(p.deriv_tail);
    j["R"] = to_json_value(p.constants.R);
    j["r_star"] = to_json_value(p.constants.r_star);
    j["C1"] = to_json_value(p.constants.C1);
    j["C2"] = to_json_value(p.constants.C2);
    j["C3"] = to_json_value(p.constants.C3);
  }
  return j;
}

inline ManifoldKind read_kind(const json& j) {
  const auto s = field<std::string>(j, "kind");
  if (s == "unstable") return ManifoldKind::unstable;
  if (s == "stable") return ManifoldKind::stable;
  throw CertificateFormatError("unknown manifold kind '" + s + "'");
}

inline ChartBackend read_backend(const std::string& s) {
  if (s == "cone") return ChartBackend::cone;
  if (s == "param") return ChartBackend::parameterization;
  throw CertificateFormatError("unknown chart backend '" + s + "'");
}

inline ManifoldChart chart_from_json(const json& j, double alpha) {
  ManifoldChart ch;
  ch.kind = read_kind(j);
  ch.backend = read_backend(field<std::string>(j, "backend"));
  ch.domain = read_interval(node(j, "domain"));
  ch.C = read_double(node(j, "C"));
  ch.lambda = read_interval(node(j, "lambda"));
  if (ch.backend == ChartBackend::cone) {
    ch.data = ConeChartData{read_double(node(j, "L")), read_double(node(j, "r")),
                            make_jordan_frame(alpha)};
    return ch;
  }
  ParamChart p;
  p.kind = ch.kind;
  p.alpha = alpha;
  p.N = field<int>(j, "N");
  if (p.N < 1) throw CertificateFormatError("chart order must be positive");
  p.scale = read_double(node(j, "scale"));
  p.nu = read_double(node(j, "nu"));
  p.lambda = read_interval(node(j, "eigenvalue"));
  p.mu = read_interval(node(j, "mu"));
  p.eigvec = read_box(node(j, "eigvec"));
  const json& a = node(j, "coeffs");
  const json& s = node(j, "sin_coeffs");
  const json& c = node(j, "cos_coeffs");
  if (!a.is_array() || !s.is_array() || !c.is_array() || a.size() != static_cast<std::size_t>(p.N + 1) ||
      s.size() != a.size() || c.size() != a.size())
    throw CertificateFormatError("coefficient arrays must hold N + 1 entries");
  for (int n = 0; n <= p.N; ++n) {
    p.coeffs.push_back(read_box(a[n]));
    p.sin_coeffs.push_back(read_interval(s[n]));
    p.cos_coeffs.push_back(read_interval(c[n]));
  }
  p.eps_N = read_double(node(j, "eps_N"));
  p.r_valid = read_double(node(j, "r_valid"));
  p.deriv_tail = read_double(node(j, "deriv_tail"));
  p.constants.R = read_double(node(j, "R"));
  p.constants.r_star = read_double(node(j, "r_star"));
  p.constants.C1 = read_interval(node(j, "C1"));
  p.constants.C2 = read_interval(node(j, "C2"));
  p.constants.C3 = read_interval(node(j, "C3"));
  p.validated = true;
  ch.data = p;
  return ch;
}

// ---------------------------------------------------------------------------
// Homoclinic orbit

inline json homoclinic_to_json(const HomoclinicEnclosure& h) {
  json j;
  j["M"] = h.M;
  j["target_shift"] = h.target_shift;
  json boxes = json::array();
  for (const auto& b : h.boxes) boxes.push_back(to_json_value(b));
  j["boxes"] = boxes;
  j["x_param"] = to_json_value(h.x_param);
  j["y_param"] = to_json_value(h.y_param);
  j["radius"] = to_json_value(h.radius);
  j["transversal"] = h.transversal;
  j["tail_C"] = to_json_value(h.tail_C);
  j["tail_lambda"] = to_json_value(h.tail_lambda);
  j["proof_box"] = to_json_value(h.verdict.proof_box);
  json center = json::array();
  for (double x : h.verdict.proof_center) center.push_back(to_hex(x));
  j["proof_center"] = center;
  j["newton_image"] = to_json_value(h.verdict.newton_image);
  return j;
}

inline HomoclinicEnclosure homoclinic_from_json(const json& j) {
  HomoclinicEnclosure h;
  h.M = field<int>(j, "M");
  if (h.M < 1) throw CertificateFormatError("homoclinic length must be positive");
  h.target_shift = field<int>(j, "target_shift");
  const json& boxes = node(j, "boxes");
  if (!boxes.is_array() || boxes.size() != static_cast<std::size_t>(h.M + 1))
    throw CertificateFormatError("homoclinic must hold M + 1 boxes");
  for (const auto& b : boxes) h.boxes.push_back(read_box(b));
  h.x_param = read_interval(node(j, "x_param"));
  h.y_param = read_interval(node(j, "y_param"));
  h.radius = read_double(node(j, "radius"));
  h.transversal = field<bool>(j, "transversal");
  h.tail_C = read_double(node(j, "tail_C"));
  h.tail_lambda = read_interval(node(j, "tail_lambda"));
  h.verdict.status = NewtonStatus::unique_root;
  h.verdict.proof_box = read_ivector(node(j, "proof_box"));
  for (const auto& c : node(j, "proof_center")) h.verdict.proof_center.push_back(read_double(c));
  h.verdict.newton_image = read_ivector(node(j, "newton_image"));
  h.verdict.refined_box = h.verdict.newton_image;
  if (h.verdict.proof_center.size() != h.verdict.proof_box.size() ||
      h.verdict.newton_image.size() != h.verdict.proof_box.size())
    throw CertificateFormatError("homoclinic proof data have inconsistent sizes");
  return h;
}

// ---------------------------------------------------------------------------
// Strips and transfers

inline json strip_to_json(const Strip& s) {
  json j;
  j["sign"] = to_string(s.sign);
  j["action_span"] = to_json_value(s.action_span);
  json rects = json::array();
  for (const auto& r : s.rects) {
    json jr;
    jr["theta"] = to_json_value(r.theta);
    jr["action"] = to_json_value(r.action);
    jr["grid"] = json::array({r.grid_theta, r.grid_action});
    jr["tree"] = r.tree;
    jr["witnesses"] = r.witnesses;
    jr["margin_sum"] = to_json_value(r.margin_sum);
    rects.push_back(jr);
  }
  j["rects"] = rects;
  return j;
}

inline StripSign read_sign(const std::string& s) {
  if (s == "plus") return StripSign::plus;
  if (s == "minus") return StripSign::minus;
  throw CertificateFormatError("unknown strip sign '" + s + "'");
}

inline Strip strip_from_json(const json& j) {
  Strip s;
  s.sign = read_sign(field<std::string>(j, "sign"));
  s.action_span = read_interval(node(j, "action_span"));
  for (const auto& jr : node(j, "rects")) {
    StripRect r;
    r.theta = read_interval(node(jr, "theta"));
    r.action = read_interval(node(jr, "action"));
    const json& g = node(jr, "grid");
    if (!g.is_array() || g.size() != 2) throw CertificateFormatError("grid must hold two counts");
    r.grid_theta = g[0].get<int>();
    r.grid_action = g[1].get<int>();
    if (r.grid_theta < 1 || r.grid_action < 1 || r.grid_theta > 100000 || r.grid_action > 100000)
      throw CertificateFormatError("grid counts out of range");
    r.tree = field<std::string>(jr, "tree");
    r.witnesses = field<std::vector<int>>(jr, "witnesses");
    r.margin_sum = read_double(node(jr, "margin_sum"));
    s.rects.push_back(r);
  }
  return s;
}

inline json transfer_to_json(const TransferTable& t) {
  json j;
  j["from"] = to_string(t.from);
  json rows = json::array();
  for (const auto& r : t.rows) {
    json n = json::array(), d = json::array();
    for (const auto& l : r.leaves) {
      n.push_back(l.n);
      d.push_back(l.dst);
    }
    rows.push_back({{"src", r.src}, {"tree", r.tree}, {"n", n}, {"dst", d}});
  }
  j["rows"] = rows;
  return j;
}

inline TransferTable transfer_from_json(const json& j) {
  TransferTable t;
  t.from = read_sign(field<std::string>(j, "from"));
  for (const auto& jr : node(j, "rows")) {
    TransferRow r;
    r.src = field<int>(jr, "src");
    r.tree = field<std::string>(jr, "tree");
    const auto n = field<std::vector<int>>(jr, "n");
    const auto d = field<std::vector<int>>(jr, "dst");
    if (n.size() != d.size()) throw CertificateFormatError("transfer witness arrays differ in length");
    for (std::size_t i = 0; i < n.size(); ++i) r.leaves.push_back({n[i], d[i]});
    t.rows.push_back(r);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Whole certificate

inline json certificate_to_json(const DiffusionCertificate& c) {
  json j;
  j["format"] = "drift-certificate-1";
  j["alpha"] = to_json_value(c.alpha);
  j["M"] = c.M;
  j["lambda"] = to_json_value(c.lambda);
  j["lambda_unstable"] = to_json_value(c.lambda_unstable);
  j["L_g"] = to_json_value(c.L_g);
  j["budgets"] = {{"m_max", c.budgets.m_max},
                  {"n_max", c.budgets.n_max},
                  {"depth_max", c.budgets.depth_max},
                  {"slab_width", to_hex(c.budgets.slab_width)}};
  json backends = json::array();
  for (const auto& b : c.backends) {
    json jb;
    jb["backend"] = to_string(b.backend);
    jb["unstable_chart"] = chart_to_json(b.unstable);
    jb["stable_chart"] = chart_to_json(b.stable);
    jb["homoclinic"] = homoclinic_to_json(b.homoclinic);
    jb["threshold"] = to_json_value(b.threshold);
    json branches = json::array();
    for (const auto& br : b.branches)
      branches.push_back({{"span", to_json_value(br.span)},
                          {"S_plus", strip_to_json(br.plus)},
                          {"S_minus", strip_to_json(br.minus)},
                          {"transfer_plus_to_minus", transfer_to_json(br.plus_to_minus)},
                          {"transfer_minus_to_plus", transfer_to_json(br.minus_to_plus)}});
    jb["branches"] = branches;
    backends.push_back(jb);
  }
  j["backends"] = backends;
  json ci = json::array();
  for (const auto& x : c.certified_action_intervals) ci.push_back(to_json_value(x));
  j["certified_action_intervals"] = ci;
  j["conclusion"] = c.conclusion;
  return j;
}

inline DiffusionCertificate certificate_from_json(const json& j) {
  if (field<std::string>(j, "format") != "drift-certificate-1")
    throw CertificateFormatError("unknown certificate format");
  DiffusionCertificate c;
  c.alpha = read_double(node(j, "alpha"));
  c.M = field<int>(j, "M");
  c.lambda = read_interval(node(j, "lambda"));
  c.lambda_unstable = read_interval(node(j, "lambda_unstable"));
  c.L_g = read_double(node(j, "L_g"));
  const json& bud = node(j, "budgets");
  c.budgets.m_max = field<int>(bud, "m_max");
  c.budgets.n_max = field<int>(bud, "n_max");
  c.budgets.depth_max = field<int>(bud, "depth_max");
  c.budgets.slab_width = read_double(node(bud, "slab_width"));
  c.budgets.M = c.M;
  for (const auto& jb : node(j, "backends")) {
    BackendCertificate b;
    b.backend = read_backend(field<std::string>(jb, "backend"));
    b.unstable = chart_from_json(node(jb, "unstable_chart"), c.alpha);
    b.stable = chart_from_json(node(jb, "stable_chart"), c.alpha);
    b.homoclinic = homoclinic_from_json(node(jb, "homoclinic"));
    b.threshold = read_interval(node(jb, "threshold"));
    for (const auto& jbr : node(jb, "branches")) {
      CertifiedBranch br;
      br.span = read_interval(node(jbr, "span"));
      br.plus = strip_from_json(node(jbr, "S_plus"));
      br.minus = strip_from_json(node(jbr, "S_minus"));
      br.plus_to_minus = transfer_from_json(node(jbr, "transfer_plus_to_minus"));
      br.minus_to_plus = transfer_from_json(node(jbr, "transfer_minus_to_plus"));
      b.branches.push_back(br);
    }
    c.backends.push_back(b);
  }
  for (const auto& x : node(j, "certified_action_intervals"))
    c.certified_action_intervals.push_back(read_interval(x));
  c.conclusion = field<std::string>(j, "conclusion");
  return c;
}

inline void write_certificate(const DiffusionCertificate& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write certificate '" + path + "'");
  out << certificate_to_json(c).dump(1) << '\n';
}

inline DiffusionCertificate read_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read certificate '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw CertificateFormatError(std::string("certificate is not valid JSON: ") + e.what());
  }
  return certificate_from_json(j);
}

// ---------------------------------------------------------------------------
// Replay

namespace detail {

// The stored enclosure contains a freshly verified root of
// lambda^2 - (2 + a) lambda + 1 (one-dimensional interval Newton).
inline bool brackets_eigenvalue(const Interval& lam, double alpha) {
  if (!(alpha > 0.0)) return false;
  const SaddleEigenvalues ev = saddle_eigenvalues(alpha);
  return lam.contains(ev.stable) || lam.contains(ev.unstable);
}

inline void check_cone_chart(const ManifoldChart& ch, std::vector<std::string>& fails,
                             const std::string& tag) {
  const ConeChartData& c = std::get<ConeChartData>(ch.data);
  if (!(c.L > 0.0) || !(c.r > 0.0)) {
    fails.push_back(tag + ": cone L and r must be positive");
    return;
  }
  const ConeSetup s = make_cone_setup(c.L, c.r, ch.lambda);
  const IMat2 d = cone_derivative(s, c.frame, ch.kind);
  if (!check_cone_condition(d, s)) fails.push_back(tag + ": cone condition");
  if (!check_expansion(d, s)) fails.push_back(tag + ": expansion a11 - L|a12| > 1/lambda");
  if (!(ch.lambda.hi() < 1.0) || !(ch.lambda.lo() > 0.0)) fails.push_back(tag + ": cone rate in (0, 1)");
  if (!(ch.domain.lo() >= -c.r && ch.domain.hi() <= c.r)) fails.push_back(tag + ": domain within [-r, r]");
  if (!(cone_tail_constant(s, c.frame).hi() <= ch.C)) fails.push_back(tag + ": C >= ||P|| sqrt(1+L^2) r");
}

inline void check_param_chart(const ManifoldChart& ch, double alpha, std::vector<std::string>& fails,
                              const std::string& tag) {
  const ParamChart& p = std::get<ParamChart>(ch.data);
  if (!brackets_eigenvalue(p.lambda, alpha) || !(p.lambda.lo() > 1.0))
    fails.push_back(tag + ": eigenvalue bracket");
  if (!p.mu.contains(Interval(1.0) / p.lambda)) fails.push_back(tag + ": mu encloses 1/lambda");
  const Vec2<Interval> xi = chart_eigenvector(p.kind, alpha, p.lambda);
  if (!p.eigvec.x.contains(xi.x) || !p.eigvec.y.contains(xi.y)) fails.push_back(tag + ": eigenvector");
  // Coefficients: p_0 = 0, p_1 = scale xi, and every higher order solves its
  // homological equation given the stored lower orders.
  const Interval sc(p.scale);
  bool coeff_ok = p.coeffs[0].x == Interval(0.0) && p.coeffs[0].y == Interval(0.0) &&
                  p.sin_coeffs[0] == Interval(0.0) && p.cos_coeffs[0] == Interval(1.0) &&
                  p.coeffs[1].x.contains(sc * xi.x) && p.coeffs[1].y.contains(sc * xi.y);
  std::vector<Interval> d(p.N + 1, Interval(0.0));
  for (int n = 1; n <= p.N && coeff_ok; ++n) d[n] = composed_coord(p.coeffs[n], p.kind);
  if (coeff_ok) {
    coeff_ok = p.sin_coeffs[1].contains(d[1]) && p.cos_coeffs[1].contains(Interval(0.0) * d[1]);
  }
  Interval lambda_n = p.lambda;
  for (int n = 2; n <= p.N && coeff_ok; ++n) {
    lambda_n = lambda_n * p.lambda;
    const Interval t = convolution_term(p.cos_coeffs, d, n);
    const Interval u = convolution_term(p.sin_coeffs, d, n);
    try {
      const Vec2<Interval> q = homological_solve(p.kind, alpha, lambda_n, Interval(1.0), t, n);
      coeff_ok = p.coeffs[n].x.contains(q.x) && p.coeffs[n].y.contains(q.y) &&
                 p.sin_coeffs[n].contains(d[n] + t) && p.cos_coeffs[n].contains(-u);
    } catch (const ChartError&) {
      coeff_ok = false;
    }
  }
  if (!coeff_ok) fails.push_back(tag + ": Taylor coefficients");
  try {
    if (!(defect_bound(p) <= p.eps_N)) fails.push_back(tag + ": defect bound eps_N");
  } catch (const ChartError& e) {
    fails.push_back(tag + ": " + e.what());
  }
  const TaylorConstants tc = taylor_constants(alpha, p.kind, p.constants.R, p.constants.r_star);
  if (!(tc.C2.hi() <= p.constants.C2.hi() && tc.C3.hi() <= p.constants.C3.hi()))
    fails.push_back(tag + ": Taylor constants");
  if (!(pn_sum(p).hi() < p.constants.R)) fails.push_back(tag + ": PN_bound");
  const Interval k = pow(abs(p.mu), static_cast<unsigned>(p.N + 1));
  const Interval b = Interval(1.0) - p.constants.C3 * k;
  const Interval a = p.constants.C2 * sqr(k);
  if (!(b.lo() > 0.0) || !((Interval(4.0) * a - sqr(b)).hi() < 0.0))
    fails.push_back(tag + ": discriminant");
  const Interval r(p.r_valid);
  if (!(p.r_valid > 0.0) || !((a * sqr(r) - b * r + Interval(p.eps_N)).hi() < 0.0))
    fails.push_back(tag + ": radii polynomial negative at r");
  if (!(p.r_valid <= p.constants.r_star)) fails.push_back(tag + ": r <= r*");
  if (!((Interval(2.0) * pi_interval() / Interval(p.nu) * r).hi() <= p.deriv_tail) || !(p.nu > 0.0))
    fails.push_back(tag + ": Cauchy derivative bound");
  if (!(ch.domain.mag() <= cauchy_radius(p).lo())) fails.push_back(tag + ": domain within Cauchy disk");
  if (!(ch.lambda.contains(abs(p.mu)))) fails.push_back(tag + ": chart rate |mu|");
  if (!((Interval(ch.domain.mag()) * euclid(eval_chart_deriv(p, ch.domain))).hi() <= ch.C))
    fails.push_back(tag + ": tail constant C");
}

}  // namespace detail

struct ReplayReport {
  std::vector<std::string> failures;
  std::size_t checks = 0;
  bool ok() const { return failures.empty(); }
};

inline ReplayReport replay(const DiffusionCertificate& c) {
  ReplayReport rep;
  auto& fails = rep.failures;
  auto check = [&](bool cond, const std::string& what) {
    ++rep.checks;
    if (!cond) fails.push_back(what);
  };
  check(detail::brackets_eigenvalue(c.lambda, c.alpha) && c.lambda.lo() > 0.0 && c.lambda.hi() < 1.0,
        "stable eigenvalue bracket");
  check(detail::brackets_eigenvalue(c.lambda_unstable, c.alpha) && c.lambda_unstable.lo() > 1.0,
        "unstable eigenvalue bracket");
  check(c.L_g == 2.0, "L_g = 2");
  check(!c.backends.empty(), "at least one backend");
  for (const auto& b : c.backends) {
    const std::string tag = to_string(b.backend);
    const std::size_t before = fails.size();
    for (const ManifoldChart* ch : {&b.unstable, &b.stable}) {
      const std::string ctag = tag + " " + to_string(ch->kind) + " chart";
      ++rep.checks;
      if (ch->backend != b.backend) {
        fails.push_back(ctag + ": backend mismatch");
        continue;
      }
      try {
        if (b.backend == ChartBackend::cone)
          detail::check_cone_chart(*ch, fails, ctag);
        else
          detail::check_param_chart(*ch, c.alpha, fails, ctag);
      } catch (const std::exception& e) {
        fails.push_back(ctag + ": " + e.what());
      }
    }
    check(b.unstable.kind == ManifoldKind::unstable && b.stable.kind == ManifoldKind::stable,
          tag + ": chart kinds");
    if (fails.size() != before) continue;

    const HomoclinicEnclosure& h = b.homoclinic;
    std::string why;
    bool hom_ok = false;
    try {
      hom_ok = h.M == c.M && replay_homoclinic(b.unstable, b.stable, c.alpha, h, &why);
    } catch (const std::exception& e) {
      why = e.what();
    }
    check(hom_ok, tag + " homoclinic: " + (why.empty() ? "length differs from M" : why));
    check(h.tail_C >= std::max(b.unstable.C, b.stable.C) &&
              h.tail_lambda.hi() >= std::max(b.unstable.lambda.hi(), b.stable.lambda.hi()) &&
              h.tail_lambda.hi() < 1.0,
          tag + " homoclinic: tail constants");
    const Interval thr = strip_threshold(h.tail_lambda, h.tail_C);
    check(b.threshold.contains(thr) && b.threshold.lo() > 0.0, tag + ": threshold 3(1+lambda)/(1-lambda)C");
    if (!hom_ok) continue;

    const OrbitSines o = orbit_sines(h);
    for (const auto& br : b.branches) {
      const std::string btag = tag + " branch " + to_display(br.span, 6);
      check(br.span.lo() > 0.0 && br.span.hi() < two_pi_interval().lo(), btag + ": span inside (0, 2 pi)");
      check(br.plus.sign == StripSign::plus && br.minus.sign == StripSign::minus, btag + ": strip signs");
      for (const Strip* s : {&br.plus, &br.minus}) {
        const std::string stag = btag + (s->sign == StripSign::plus ? " S+" : " S-");
        check(strip_covers(*s, br.span), stag + ": rectangles do not cover the span");
        for (std::size_t k = 0; k < s->rects.size(); ++k) {
          std::string w;
          check(recheck_rect(o, s->rects[k], s->sign, thr, c.M, &w),
                stag + " rect " + std::to_string(k) + ": " + w);
        }
      }
      std::string w;
      check(br.plus_to_minus.from == StripSign::plus &&
                recheck_transfer(br.plus_to_minus, br.plus, br.minus, &w),
            btag + " transfer S+ -> S-: " + w);
      w.clear();
      check(br.minus_to_plus.from == StripSign::minus &&
                recheck_transfer(br.minus_to_plus, br.minus, br.plus, &w),
            btag + " transfer S- -> S+: " + w);
    }
  }
  for (const auto& ci : c.certified_action_intervals) {
    bool covered = false;
    for (const auto& b : c.backends)
      for (const auto& br : b.branches) covered = covered || br.span.contains(ci);
    check(covered, "certified interval " + to_display(ci, 6) + " not backed by a branch");
  }
  return rep;
}

}  // namespace drift
