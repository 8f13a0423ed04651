#include "etc/systems.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "etc/errors.hpp"
#include "etc/linalg.hpp"
#include "etc/sampling.hpp"

namespace etc {

LoopWithCertificate lorenz_loop(const LorenzParams& p) {
  if (!(p.a > 0.0)) throw DomainError("lorenz_loop: requires a > 0");
  if (!(p.b > 0.0)) throw DomainError("lorenz_loop: requires b > 0");
  if (!(p.c > 0.0)) throw DomainError("lorenz_loop: requires c > 0");
  if (!(p.p1 > 1.0)) throw DomainError("lorenz_loop: requires p1 > 1");
  if (!(p.p2 > 2.0 * p.a)) throw DomainError("lorenz_loop: requires p2 > 2a");

  const double a = p.a;
  const double b = p.b;
  const double c = p.c;
  const double gain = p.p1 / p.p2 * a + b;

  LoopWithCertificate out;
  ClosedLoopSystem& sys = out.sys;
  sys.name = "lorenz";
  sys.n_x = 3;
  sys.n_e = 1;
  sys.n_y = 1;
  sys.f = [a, b, c, gain](std::span<const double> x, std::span<const double> e) {
    const double u = -gain * (x[0] + e[0]);
    return Vector{-a * x[0] + a * x[1], b * x[0] - x[1] - x[0] * x[2] + u, x[0] * x[1] - c * x[2]};
  };
  // e = y_hat - y with y_hat held: e' = -x1'.
  sys.g = [a](std::span<const double> x, std::span<const double>) { return Vector{a * x[0] - a * x[1]}; };
  sys.y_of_x = [](std::span<const double> x) { return Vector{x[0]}; };

  const double p1 = p.p1;
  const double p2 = p.p2;
  const double alpha_coef = std::min({a * (p1 - 1.0), p2 - 2.0 * a, 2.0 * p2 * c});
  const double delta_coef = a * (p1 - 1.0);
  const double lo = std::min(p1, p2);
  const double hi = std::max(p1, p2);

  Certificate& cert = out.cert;
  cert.name = "lorenz-analytic";
  cert.n_x = 3;
  cert.n_e = 1;
  cert.n_y = 1;
  cert.V = [p1, p2](std::span<const double> x) { return p1 * x[0] * x[0] + p2 * x[1] * x[1] + p2 * x[2] * x[2]; };
  cert.W = [](std::span<const double> e) { return std::abs(e[0]); };
  cert.H = [a](std::span<const double> x) { return a * (std::abs(x[0]) + std::abs(x[1])); };
  cert.delta = [delta_coef](std::span<const double> y) { return delta_coef * y[0] * y[0]; };
  cert.alpha = [alpha_coef](double s) { return alpha_coef * s * s; };
  cert.alpha_lower = [lo](double s) { return lo * s * s; };
  cert.alpha_upper = [hi](double s) { return hi * s * s; };
  cert.output = sys.y_of_x;
  const double k = p1 / p2 * a + c;
  cert.gamma = std::sqrt(p2 * k * k);
  cert.L = 0.0;
  return out;
}

ClosedLoopSystem lti_loop(const ClosedLoopMatrices& clm) {
  if (!clm.A1.is_square() || clm.B1.rows() != clm.n_x() || clm.A2.cols() != clm.n_x() ||
      clm.B2.rows() != clm.n_e() || clm.B2.cols() != clm.n_e() || clm.A2.rows() != clm.n_e() ||
      clm.Cbar.cols() != clm.n_x())
    throw DimensionError("lti_loop: inconsistent closed-loop blocks");
  ClosedLoopSystem sys;
  sys.name = "lti";
  sys.n_x = clm.n_x();
  sys.n_e = clm.n_e();
  sys.n_y = clm.n_y();
  auto affine = [](const Matrix& M, const Matrix& N) {
    return [M, N](std::span<const double> x, std::span<const double> e) {
      Vector out = M * x;
      const Vector ne = N * e;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += ne[i];
      return out;
    };
  };
  sys.f = affine(clm.A1, clm.B1);
  sys.g = affine(clm.A2, clm.B2);
  sys.y_of_x = [C = clm.Cbar](std::span<const double> x) { return C * x; };
  return sys;
}

ClosedLoopSystem lti_loop(const LtiPlant& plant, const LtiController& ctrl, const Certificate& cert) {
  const ClosedLoopMatrices clm = assemble(plant, ctrl);
  if (cert.n_x != clm.n_x() || cert.n_e != clm.n_e() || cert.n_y != clm.n_y())
    throw DimensionError("lti_loop: certificate dimensions do not match the assembled loop");
  return lti_loop(clm);
}

LtiPlant tabuada_plant() {
  return LtiPlant{Matrix{{0.0, 1.0}, {-2.0, 3.0}}, Matrix{{0.0}, {1.0}}, Matrix::identity(2)};
}

LtiController tabuada_controller() { return LtiController::static_gain(Matrix{{1.0, -4.0}}); }

LtiLoopDesign design_lti_loop(const LtiPlant& plant, const LtiController& ctrl, double eps1, double eps2,
                              const Vector& slack_grid) {
  LtiLoopDesign d;
  d.clm = assemble(plant, ctrl);
  d.lmi = design_certificate(d.clm, eps1, eps2, slack_grid);
  d.cert = extract_assumption(d.clm, d.lmi);
  d.sys = lti_loop(d.clm);
  return d;
}

// ---------------------------------------------------------------------------

namespace {

struct Directional {
  double value = 0.0;
  bool smooth = true;
};

// <grad F(p), v> by central differences along v/|v|.
Directional directional_derivative(const ScalarFn& F, std::span<const double> p, std::span<const double> v) {
  const double vn = norm(v);
  if (vn == 0.0) return {};
  const double h = 1e-6 * std::max(1.0, norm(p));
  Vector plus(p.begin(), p.end());
  Vector minus(p.begin(), p.end());
  for (std::size_t i = 0; i < p.size(); ++i) {
    plus[i] += h * v[i] / vn;
    minus[i] -= h * v[i] / vn;
  }
  const double fp = F(plus);
  const double fm = F(minus);
  const double f0 = F(p);
  const double fwd = (fp - f0) / h;
  const double bwd = (f0 - fm) / h;
  Directional d;
  d.value = (fp - fm) / (2.0 * h) * vn;
  d.smooth = std::abs(fwd - bwd) <= 1e-3 * std::max(1.0, std::abs(fwd) + std::abs(bwd));
  return d;
}

void record(InequalityCheck& chk, double violation, std::span<const double> x, std::span<const double> e) {
  ++chk.checked;
  if (violation > chk.max_violation) {
    chk.max_violation = violation;
    chk.worst_x.assign(x.begin(), x.end());
    chk.worst_e.assign(e.begin(), e.end());
  }
}

}  // namespace

AssumptionReport check_assumption_sampled(const ClosedLoopSystem& sys, const Certificate& cert,
                                          std::size_t n_samples, double radius, std::uint64_t seed,
                                          double tolerance) {
  if (!(radius > 0.0)) throw DomainError("check_assumption_sampled: radius must be positive");
  if (cert.delta_x && radius > *cert.delta_x) throw DomainError("check_assumption_sampled: radius exceeds Delta_x");
  if (cert.delta_e && radius > *cert.delta_e) throw DomainError("check_assumption_sampled: radius exceeds Delta_e");
  if (sys.n_x != cert.n_x || sys.n_e != cert.n_e)
    throw DimensionError("check_assumption_sampled: system and certificate dimensions differ");

  AssumptionReport rep;
  rep.tolerance = tolerance;
  std::mt19937_64 rng(seed);
  const std::size_t nx = sys.n_x;
  const std::size_t ne = sys.n_e;

  for (std::size_t k = 0; k <= n_samples; ++k) {
    // Sample 0 is the origin.
    const Vector z = k == 0 ? Vector(nx + ne, 0.0) : sample_ball(rng, nx + ne, radius);
    const std::span<const double> x(z.data(), nx);
    const std::span<const double> e(z.data() + nx, ne);
    const double xn = norm(x);

    const double v = cert.V(x);
    const double lo = cert.alpha_lower(xn);
    const double hi = cert.alpha_upper(xn);
    const double bscale = std::max(1.0, std::abs(v) + std::abs(lo) + std::abs(hi));
    record(rep.bounds, std::max(lo - v, v - hi) / bscale, x, e);

    const Vector fx = sys.f(x, e);
    const Directional dv = directional_derivative(cert.V, x, fx);
    if (!dv.smooth) {
      ++rep.v_dot.skipped;
    } else {
      const double h = cert.H(x);
      const double w = cert.W(e);
      const double a = cert.alpha(xn);
      const double d = cert.delta(sys.y_of_x(x));
      const double g2w2 = cert.gamma * cert.gamma * w * w;
      const double rhs = -a - h * h - d + g2w2;
      const double scale = std::max(1.0, std::abs(dv.value) + std::abs(a) + h * h + std::abs(d) + g2w2);
      record(rep.v_dot, (dv.value - rhs) / scale, x, e);
    }

    const Vector ge = sys.g(x, e);
    const Directional dw = directional_derivative(cert.W, e, ge);
    if (!dw.smooth) {
      ++rep.w_dot.skipped;
    } else {
      const double h = cert.H(x);
      const double lw = cert.L * cert.W(e);
      const double scale = std::max(1.0, std::abs(dw.value) + std::abs(lw) + std::abs(h));
      record(rep.w_dot, (dw.value - (lw + h)) / scale, x, e);
    }
  }
  return rep;
}

}  // namespace etc
