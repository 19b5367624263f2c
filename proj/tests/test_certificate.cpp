#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "drift/pipeline.hpp"

using namespace drift;

namespace {

// A small but complete certificate: both backends, one short action span.
const DiffusionCertificate& small_certificate() {
  static const DiffusionCertificate c = [] {
    RunConfig rc;
    rc.guess = "table1";
    rc.backends = {ChartBackend::cone, ChartBackend::parameterization};
    rc.spans = {parse_span("1/5..1/4")};
    return certify_diffusion(rc);
  }();
  return c;
}

json mutate(const DiffusionCertificate& c, const std::function<void(json&)>& f) {
  json j = certificate_to_json(c);
  f(j);
  return j;
}

bool replays(const json& j) {
  try {
    return replay(certificate_from_json(j)).ok();
  } catch (const CertificateFormatError&) {
    return false;
  }
}

std::string flip_last_bit(const std::string& hex) {
  double v = parse_hex(hex);
  return to_hex(std::nextafter(v, v < 0 ? 0.0 : 1e300));
}

}  // namespace

TEST_CASE("certificate replays", "[certificate]") {
  const ReplayReport r = replay(small_certificate());
  INFO((r.failures.empty() ? std::string() : r.failures.front()));
  CHECK(r.ok());
  CHECK(r.checks > 10);
}

TEST_CASE("replay is idempotent through serialization", "[certificate]") {
  const json j1 = certificate_to_json(small_certificate());
  const DiffusionCertificate back = certificate_from_json(j1);
  const json j2 = certificate_to_json(back);
  CHECK(j1 == j2);
  CHECK(replay(back).ok());
  CHECK(replay(certificate_from_json(j2)).ok());
  const auto path = std::filesystem::temp_directory_path() / "drift_test_certificate.json";
  write_certificate(small_certificate(), path.string());
  CHECK(certificate_to_json(read_certificate(path.string())) == j1);
  std::filesystem::remove(path);
}

TEST_CASE("mutated certificates are rejected", "[certificate]") {
  const DiffusionCertificate& c = small_certificate();
  SECTION("return witness below M") {
    CHECK_FALSE(replays(mutate(c, [](json& j) {
      j["backends"][0]["branches"][0]["S_plus"]["rects"][0]["witnesses"][0] = 9;
    })));
  }
  SECTION("return witness that misses the arc") {
    // Replace the witness by the first m >= M that does not return into the arc.
    const StripRect& r = c.backends[0].branches[0].plus.rects[0];
    const Box2 leaf = tree_leaves({r.theta, r.action}, r.grid_theta, r.grid_action, r.tree)[0];
    int m = c.M;
    while (arc_contains_strict(r.theta, leaf.theta + Interval(static_cast<double>(m)) * leaf.action)) ++m;
    CHECK_FALSE(replays(mutate(c, [m](json& j) {
      j["backends"][0]["branches"][0]["S_plus"]["rects"][0]["witnesses"][0] = m;
    })));
  }
  SECTION("bit flip in a homoclinic box") {
    CHECK_FALSE(replays(mutate(c, [](json& j) {
      auto& b = j["backends"][0]["homoclinic"]["boxes"][4][0][0];
      b = flip_last_bit(b.get<std::string>());
      auto& b2 = j["backends"][0]["homoclinic"]["boxes"][4][0][1];
      b2 = to_hex(parse_hex(b2.get<std::string>()) - 1e-3);
    })));
  }
  SECTION("bit flip in a parameterization coefficient") {
    CHECK_FALSE(replays(mutate(c, [](json& j) {
      // move p_3.x one ulp above its enclosure
      auto& p = j["backends"][1]["unstable_chart"]["coeffs"][3][0];
      const std::string above = flip_last_bit(p[1].get<std::string>());
      p[0] = above;
      p[1] = flip_last_bit(above);
    })));
  }
  SECTION("smaller defect bound") {
    CHECK_FALSE(replays(mutate(c, [](json& j) {
      j["backends"][1]["stable_chart"]["eps_N"] = to_hex(1e-30);
    })));
  }
  SECTION("cone slope too small") {
    CHECK_FALSE(replays(mutate(c, [](json& j) { j["backends"][0]["unstable_chart"]["L"] = to_hex(1e-12); })));
  }
  SECTION("threshold lowered") {
    CHECK_FALSE(replays(mutate(c, [](json& j) {
      j["backends"][0]["threshold"] = json::array({to_hex(0.001), to_hex(0.002)});
    })));
  }
  SECTION("tail constant understated") {
    CHECK_FALSE(replays(mutate(c, [](json& j) { j["backends"][0]["unstable_chart"]["C"] = to_hex(1e-6); })));
  }
  SECTION("span widened beyond the strips") {
    CHECK_FALSE(replays(mutate(c, [](json& j) {
      j["backends"][0]["branches"][0]["span"][1] = to_hex(0.3);
    })));
  }
  SECTION("certified interval without a branch") {
    CHECK_FALSE(replays(mutate(c, [](json& j) {
      j["certified_action_intervals"].push_back(json::array({to_hex(4.0), to_hex(4.5)}));
    })));
  }
  SECTION("transfer witness altered") {
    // n = 0 leaves the S+ leaf in place, which never meets the disjoint S- arc.
    CHECK_FALSE(replays(mutate(c, [](json& j) {
      j["backends"][0]["branches"][0]["transfer_plus_to_minus"]["rows"][0]["n"][0] = 0;
    })));
    const TransferTable& t = c.backends[0].branches[0].plus_to_minus;
    const int dst = t.rows[0].leaves[0].dst;
    CHECK_FALSE(replays(mutate(c, [dst](json& j) {
      j["backends"][0]["branches"][0]["transfer_plus_to_minus"]["rows"][0]["dst"][0] = dst + 1000;
    })));
  }
  SECTION("malformed fields") {
    CHECK_FALSE(replays(mutate(c, [](json& j) { j["alpha"] = "4.0"; })));
    CHECK_FALSE(replays(mutate(c, [](json& j) { j.erase("lambda"); })));
    CHECK_FALSE(replays(mutate(c, [](json& j) { j["format"] = "other"; })));
    CHECK_FALSE(replays(mutate(c, [](json& j) {
      j["backends"][0]["branches"][0]["S_plus"]["rects"][0]["tree"] = "Q";
    })));
  }
}

TEST_CASE("hex encoding is exact", "[certificate]") {
  const DiffusionCertificate& c = small_certificate();
  const json j = certificate_to_json(c);
  CHECK(read_interval(j["lambda"]) == c.lambda);
  CHECK(read_double(j["backends"][0]["unstable_chart"]["C"]) == c.backends[0].unstable.C);
  CHECK_THROWS_AS(read_interval(json::array({"0x1p+0", "0x1p-1"})), CertificateFormatError);
}

TEST_CASE("config parsing", "[certificate][config]") {
  std::istringstream in(
      "# comment\nalpha = 4\nbackend = both\nM = 10\nspans = 1/5..pi-1/10, pi+1/10..2pi-1/5\n"
      "workers = 2\nguess = table1\n");
  const RunConfig c = parse_config(in);
  CHECK(c.backends.size() == 2);
  REQUIRE(c.spans.size() == 2);
  CHECK(c.spans[0].lo() <= 0.2);
  CHECK(c.spans[0].lo() > 0.2 - 1e-15);
  CHECK(c.spans[0].contains(Interval(0.2, 3.0415926535897)));
  CHECK(c.spans[1].hi() >= 2.0 * M_PI - 0.2);
  // the exact endpoint 1/5 lies inside: inf of its enclosure
  CHECK(c.spans[0].lo() == (Interval(1.0) / Interval(5.0)).lo());
  CHECK(parse_expression("2pi").contains(two_pi_interval()));
  CHECK(parse_expression("(1+2)*3") == Interval(9.0));
  CHECK(parse_expression("-pi/2").contains(-M_PI / 2));
  CHECK(parse_expression("0.1").contains(Interval(0.1)));
  CHECK(parse_expression("0.1").width() > 0.0);
  std::istringstream bad1("alpha = x\n"), bad2("nonsense = 1\n"), bad3("M = 9\n"), bad4("spans = 3..2\n");
  CHECK_THROWS_AS(parse_config(bad1), ConfigError);
  CHECK_THROWS_AS(parse_config(bad2), ConfigError);
  CHECK_THROWS_AS(parse_config(bad3), ConfigError);
  CHECK_THROWS_AS(parse_config(bad4), ConfigError);
  CHECK_THROWS_AS(parse_expression("1/0"), ConfigError);
}

TEST_CASE("stage failures name the stage", "[certificate][config]") {
  RunConfig c;
  c.guess = "table1";
  c.spans = {parse_span("3.1..3.2")};
  try {
    certify_diffusion(c);
    FAIL("certification over pi should fail");
  } catch (const StageError& e) {
    CHECK(e.stage == "strips");
  }
  RunConfig weak;
  weak.alpha = 0.15;
  try {
    certify_diffusion(weak);
    FAIL("cone charts at alpha = 0.15 should fail");
  } catch (const StageError& e) {
    CHECK(e.stage == "charts");
  }
}
