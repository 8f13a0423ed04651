#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "etc/matrix.hpp"

namespace etc {

/// q = (x, e, tau): plant+controller state, network-induced error and the
/// clock measuring time since the last transmission.
struct HybridState {
  Vector x;
  Vector e;
  double tau = 0.0;

  friend bool operator==(const HybridState&, const HybridState&) = default;
};

using FieldFn = std::function<Vector(std::span<const double> x, std::span<const double> e)>;
using OutputFn = std::function<Vector(std::span<const double> x)>;
using ScalarFn = std::function<double(std::span<const double>)>;
using GainFn = std::function<double(double)>;

/// Flow maps of the networked loop between transmissions:
///   x' = f(x, e),  e' = g(x, e),  tau' = 1.
/// f(0,0) = 0 and g(0,0) = 0.
struct ClosedLoopSystem {
  std::string name;
  std::size_t n_x = 0;
  std::size_t n_e = 0;
  std::size_t n_y = 0;
  FieldFn f;
  FieldFn g;
  OutputFn y_of_x;
};

/// The Lyapunov-type data for the loop:
///   alpha_lower(|x|) <= V(x) <= alpha_upper(|x|)
///   <grad V, f> <= -alpha(|x|) - H(x)^2 - delta(y) + gamma^2 W(e)^2
///   <grad W, g> <= L W(e) + H(x)
/// `output` is the output map delta is evaluated on (the same map as the
/// system's y_of_x). Missing locality bounds mean the inequalities hold
/// globally.
struct Certificate {
  std::string name;
  std::size_t n_x = 0;
  std::size_t n_e = 0;
  std::size_t n_y = 0;
  ScalarFn V;
  ScalarFn W;
  ScalarFn H;
  ScalarFn delta;
  GainFn alpha;
  GainFn alpha_lower;
  GainFn alpha_upper;
  OutputFn output;
  double gamma = 0.0;
  double L = 0.0;
  std::optional<double> delta_x;
  std::optional<double> delta_e;

  [[nodiscard]] bool is_global() const { return !delta_x && !delta_e; }
};

}  // namespace etc
