#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "drift/newton.hpp"

using namespace drift;

namespace {

VectorFunction scalar(double c) {
  VectorFunction f;
  f.dim = 1;
  f.value = [c](const IVector& v) { return IVector{sqr(v[0]) - Interval(c)}; };
  f.jacobian = [](const IVector& v) {
    IMatrix j(1, 1);
    j(0, 0) = Interval(2.0) * v[0];
    return j;
  };
  return f;
}

}  // namespace

TEST_CASE("interval Newton proves sqrt 2", "[newton]") {
  const NewtonVerdict v = interval_newton(scalar(2.0), IVector{Interval(1.0, 2.0)}, {1.5});
  REQUIRE(v.status == NewtonStatus::unique_root);
  CHECK(v.refined_box[0].contains(std::sqrt(2.0)));
  CHECK(v.refined_box[0].width() < 1e-15);
  CHECK(subset(v.newton_image, v.proof_box));
}

TEST_CASE("interval Newton excludes roots", "[newton]") {
  const NewtonVerdict v = interval_newton(scalar(2.0), IVector{Interval(3.0, 4.0)}, {3.5});
  CHECK(v.status == NewtonStatus::no_root);
}

TEST_CASE("interval Newton is inconclusive on a singular Jacobian", "[newton]") {
  const NewtonVerdict v = interval_newton(scalar(2.0), IVector{Interval(-2.0, 2.0)}, {0.5});
  CHECK(v.status == NewtonStatus::inconclusive);
  CHECK_FALSE(v.message.empty());
}

TEST_CASE("interval Newton on a coupled 2d system", "[newton]") {
  // x^2 + y^2 = 1, y = x^3 near (0.826, 0.5636)
  VectorFunction f;
  f.dim = 2;
  f.value = [](const IVector& v) {
    return IVector{sqr(v[0]) + sqr(v[1]) - Interval(1.0), v[1] - pow(v[0], 3u)};
  };
  f.jacobian = [](const IVector& v) {
    IMatrix j(2, 2);
    j(0, 0) = Interval(2.0) * v[0];
    j(0, 1) = Interval(2.0) * v[1];
    j(1, 0) = Interval(-3.0) * sqr(v[0]);
    j(1, 1) = Interval(1.0);
    return j;
  };
  const IVector box{Interval(0.8, 0.85), Interval(0.54, 0.59)};
  const NewtonVerdict v = interval_newton(f, box, {0.826, 0.5636});
  REQUIRE(v.status == NewtonStatus::unique_root);
  const double x = v.refined_box[0].mid(), y = v.refined_box[1].mid();
  CHECK(std::fabs(x * x + y * y - 1.0) < 1e-14);
  CHECK(std::fabs(y - x * x * x) < 1e-14);
}

TEST_CASE("interval Newton rejects a centre outside the box", "[newton]") {
  CHECK_THROWS_AS(interval_newton(scalar(2.0), IVector{Interval(1.0, 2.0)}, {3.0}),
                  std::invalid_argument);
}
