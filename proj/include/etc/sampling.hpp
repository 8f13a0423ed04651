#pragma once

#include <cstddef>
#include <cmath>
#include <random>

#include "etc/matrix.hpp"

namespace etc {

/// Uniform point in the closed Euclidean ball of the given radius in R^dim:
/// Gaussian direction, radius R * u^(1/dim).
template <class Rng>
Vector sample_ball(Rng& rng, std::size_t dim, double radius) {
  Vector v(dim);
  if (dim == 0 || radius <= 0.0) return v;
  std::normal_distribution<double> gauss(0.0, 1.0);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& c : v) {
      c = gauss(rng);
      n2 += c * c;
    }
  } while (n2 == 0.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(dim));
  const double s = r / std::sqrt(n2);
  for (double& c : v) c *= s;
  return v;
}

}  // namespace etc
