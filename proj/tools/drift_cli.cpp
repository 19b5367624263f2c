// drift: certify Arnold diffusion hypotheses, replay certificates, export
// strip geometry.
//
//   drift run --config <path> [--backend cone|param|both] [--workers k] [--out <dir>]
//   drift replay <certificate.json>
//   drift plot <certificate.json> <dir>
//
// Exit status: 0 success, 1 certification or replay failure, 2 usage or I/O error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "drift/drift.hpp"

namespace fs = std::filesystem;
using namespace drift;

namespace {

constexpr int kOk = 0;
constexpr int kCertFail = 1;
constexpr int kUsage = 2;

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out.precision(17);
  return out;
}

void write_strip_csv(const DiffusionCertificate& c, const fs::path& dir) {
  for (const auto& b : c.backends) {
    std::ofstream out = open_out(dir / (std::string("strips_") + to_string(b.backend) + ".csv"));
    out << "theta_lo,theta_hi,I_lo,I_hi,sign,inf_sum,witness_m\n";
    const OrbitSines o = orbit_sines(b.homoclinic);
    for (const auto& br : b.branches)
      for (const Strip* s : {&br.plus, &br.minus})
        for (const auto& r : s->rects) {
          const auto leaves = tree_leaves({r.theta, r.action}, r.grid_theta, r.grid_action, r.tree);
          for (std::size_t i = 0; i < leaves.size() && i < r.witnesses.size(); ++i) {
            const Interval sum = orbit_sum(o, leaves[i].theta, leaves[i].action);
            const double inf_sum = s->sign == StripSign::plus ? sum.lo() : -sum.hi();
            out << leaves[i].theta.lo() << ',' << leaves[i].theta.hi() << ',' << leaves[i].action.lo()
                << ',' << leaves[i].action.hi() << ',' << to_string(s->sign) << ',' << inf_sum << ','
                << r.witnesses[i] << '\n';
          }
        }
  }
}

void write_plot_files(const DiffusionCertificate& c, const fs::path& dir) {
  write_strip_csv(c, dir);
  for (const auto& b : c.backends) {
    const std::string tag = to_string(b.backend);
    std::ofstream h = open_out(dir / ("homoclinic_" + tag + ".csv"));
    h << "i,x_lo,x_hi,y_lo,y_hi\n";
    for (std::size_t i = 0; i < b.homoclinic.boxes.size(); ++i) {
      const PhaseBox2& v = b.homoclinic.boxes[i];
      h << i << ',' << v.x.lo() << ',' << v.x.hi() << ',' << v.y.lo() << ',' << v.y.hi() << '\n';
    }
    std::ofstream ch = open_out(dir / ("charts_" + tag + ".csv"));
    ch << "kind,t,x,y\n";
    for (const ManifoldChart* m : {&b.unstable, &b.stable}) {
      const int n = 200;
      for (int k = 0; k <= n; ++k) {
        const double t = m->domain.lo() + (m->domain.hi() - m->domain.lo()) * k / n;
        const PhasePoint2 p = chart_point(*m, t);
        ch << to_string(m->kind) << ',' << t << ',' << p.x << ',' << p.y << '\n';
      }
    }
  }
}

void print_summary(const DiffusionCertificate& c) {
  std::printf("alpha = %g, M = %d, lambda in %s\n", c.alpha, c.M, to_display(c.lambda, 12).c_str());
  for (const auto& b : c.backends) {
    std::printf("[%s] charts: C = %.6g (unstable), %.6g (stable); homoclinic radius %.3g\n",
                to_string(b.backend), b.unstable.C, b.stable.C, b.homoclinic.radius);
    std::printf("[%s] strip threshold %s\n", to_string(b.backend), to_display(b.threshold, 10).c_str());
    for (const auto& br : b.branches)
      std::printf("[%s] I in %s: S+ %zu rects, S- %zu rects, transfers verified\n", to_string(b.backend),
                  to_display(br.span, 8).c_str(), br.plus.rects.size(), br.minus.rects.size());
  }
  std::printf("%s\n", c.conclusion.c_str());
}

int cmd_run(const std::string& config, const std::string& backend, int workers, const std::string& out) {
  RunConfig c;
  try {
    c = load_config(config);
    if (!backend.empty()) c.backends = parse_backends(backend);
    if (workers > 0) c.strips.workers = workers;
    if (!out.empty()) c.out = out;
    validate_config(c);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "drift: %s\n", e.what());
    return kUsage;
  }
  const auto t0 = std::chrono::steady_clock::now();
  DiffusionCertificate cert;
  try {
    cert = certify_diffusion(c);
  } catch (const StageError& e) {
    std::fprintf(stderr, "certification failed at stage %s\n", e.what());
    return kCertFail;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "certification failed: %s\n", e.what());
    return kCertFail;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    fs::create_directories(c.out);
    write_certificate(cert, (fs::path(c.out) / "certificate.json").string());
    write_strip_csv(cert, c.out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "drift: %s\n", e.what());
    return kUsage;
  }
  print_summary(cert);
  std::printf("certified in %.2f s; certificate written to %s\n", secs,
              (fs::path(c.out) / "certificate.json").string().c_str());
  return kOk;
}

int cmd_replay(const std::string& path) {
  DiffusionCertificate c;
  try {
    c = read_certificate(path);
  } catch (const CertificateFormatError& e) {
    std::fprintf(stderr, "replay failed: malformed certificate: %s\n", e.what());
    return kCertFail;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "drift: %s\n", e.what());
    return kUsage;
  }
  const ReplayReport r = replay(c);
  if (!r.ok()) {
    for (const auto& f : r.failures) std::fprintf(stderr, "replay failed: %s\n", f.c_str());
    return kCertFail;
  }
  std::printf("replay ok: %zu checks passed\n", r.checks);
  return kOk;
}

int cmd_plot(const std::string& path, const std::string& dir) {
  try {
    const DiffusionCertificate c = read_certificate(path);
    fs::create_directories(dir);
    write_plot_files(c, dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "drift: %s\n", e.what());
    return kUsage;
  }
  std::printf("plot data written to %s\n", dir.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify and replay drift hypotheses for coupled standard maps"};
  app.require_subcommand(1);

  std::string config, backend, out;
  int workers = 0;
  auto* run = app.add_subcommand("run", "Certify charts, homoclinic orbit, strips and transfers");
  run->add_option("--config", config, "Run configuration (key = value lines)")->required();
  run->add_option("--backend", backend, "Chart backend")->check(CLI::IsMember({"cone", "param", "both"}));
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "Output directory");

  std::string cert;
  auto* rep = app.add_subcommand("replay", "Independently re-check a certificate");
  rep->add_option("certificate", cert, "Certificate JSON")->required();

  std::string plot_cert, plot_dir;
  auto* plot = app.add_subcommand("plot", "Export strips, homoclinic points and chart samples as CSV");
  plot->add_option("certificate", plot_cert, "Certificate JSON")->required();
  plot->add_option("dir", plot_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (*run) return cmd_run(config, backend, workers, out);
  if (*rep) return cmd_replay(cert);
  return cmd_plot(plot_cert, plot_dir);
}
