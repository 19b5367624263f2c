// Interval Newton operator N(x0, X) = x0 - [DF(X)]^{-1} F(x0).
//
// If N(x0, X) lies in the interior of X, F has exactly one zero in X and it
// lies in N(x0, X).  If N(x0, X) and X are disjoint, F has no zero in X.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "drift/linalg.hpp"

namespace drift {

// A C^1 map R^k -> R^k described by enclosures.  `value` receives a
// degenerate (point) box and may return a non-degenerate enclosure when the
// function itself is only known up to a bound, e.g. a manifold chart.
struct VectorFunction {
  std::size_t dim = 0;
  std::function<IVector(const IVector&)> value;
  std::function<IMatrix(const IVector&)> jacobian;
};

enum class NewtonStatus { unique_root, no_root, inconclusive };

inline const char* to_string(NewtonStatus s) {
  switch (s) {
    case NewtonStatus::unique_root: return "unique_root";
    case NewtonStatus::no_root: return "no_root";
    case NewtonStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

struct NewtonVerdict {
  NewtonStatus status = NewtonStatus::inconclusive;
  // Enclosure of the zero (unique_root) or the last box examined.
  IVector refined_box;
  // N(x0, X) from the last iteration with strict inclusion (unique_root), or
  // from the last iteration attempted.
  IVector newton_image;
  // The (X, x0) pair for which strict inclusion was verified; a replay
  // recomputes N(proof_center, proof_box) and compares with newton_image.
  IVector proof_box;
  std::vector<double> proof_center;
  int iterations = 0;
  std::string message;
};

struct NewtonOptions {
  int max_iterations = 50;
  // Stop refining once the box radius shrinks by less than this factor.
  double stagnation_ratio = 0.9;
};

// One Newton step; throws NotInvertible if [DF(X)] cannot be inverted.
inline IVector newton_image(const VectorFunction& fn, const IVector& box,
                            const std::vector<double>& center) {
  const IMatrix inv = imat_inverse(fn.jacobian(box));
  const IVector fx = fn.value(IVector::from_points(center));
  return IVector::from_points(center) - inv * fx;
}

inline NewtonVerdict interval_newton(const VectorFunction& fn, const IVector& box,
                                     const std::vector<double>& x0,
                                     const NewtonOptions& opts = {}) {
  NewtonVerdict verdict;
  if (box.size() != fn.dim || x0.size() != fn.dim)
    throw std::invalid_argument("interval_newton: dimension mismatch");
  for (std::size_t i = 0; i < x0.size(); ++i)
    if (!box[i].contains(x0[i])) throw std::invalid_argument("interval_newton: x0 outside X");

  IVector current = box;
  std::vector<double> center = x0;
  bool proven = false;
  double last_radius = radius(current);

  for (int it = 0; it < opts.max_iterations; ++it) {
    verdict.iterations = it + 1;
    IVector image;
    try {
      image = newton_image(fn, current, center);
    } catch (const NotInvertible& e) {
      if (!proven) {
        verdict.status = NewtonStatus::inconclusive;
        verdict.refined_box = current;
        verdict.message = e.what();
      }
      return verdict;
    }
    const auto inter = intersect(image, current);
    if (!inter) {
      if (!proven) {
        verdict.status = NewtonStatus::no_root;
        verdict.refined_box = current;
        verdict.newton_image = image;
        verdict.message = "Newton image disjoint from the box";
      }
      return verdict;
    }
    if (subset(image, current)) {
      proven = true;
      verdict.status = NewtonStatus::unique_root;
      verdict.proof_box = current;
      verdict.proof_center = center;
      verdict.newton_image = image;
      verdict.refined_box = image;
    } else if (!proven) {
      verdict.newton_image = image;
    }
    const double r = radius(*inter);
    if (proven && r > opts.stagnation_ratio * last_radius) break;
    last_radius = r;
    current = *inter;
    center = midpoint(current);
  }
  if (!proven) {
    verdict.status = NewtonStatus::inconclusive;
    verdict.refined_box = current;
    verdict.message = "no strict inclusion within the iteration budget";
  }
  return verdict;
}

}  // namespace drift
