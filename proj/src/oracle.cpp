#include "bperc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bperc/rng.hpp"

namespace bperc {

namespace {

struct Segment {
  double lo, hi;
  double flo, fmid, fhi;
  double simpson;
};

double simpson_rule(double lo, double hi, double flo, double fmid,
                    double fhi) {
  return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
}

void check_config(const QuadratureConfig& cfg) {
  if (!(cfg.abs_tol > 0.0)) {
    throw std::invalid_argument("QuadratureConfig: abs_tol must be > 0");
  }
  if (!(cfg.half_width_sigmas >= 8.0)) {
    throw std::invalid_argument(
        "QuadratureConfig: half-width must be >= 8 sigma");
  }
}

double gaussian_pdf(double a, double mean, double sd) {
  return std_normal_pdf((a - mean) / sd) / sd;
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double lo,
                          double hi, const QuadratureConfig& cfg) {
  if (!(hi > lo)) return 0.0;
  const int panels = std::max(1, cfg.initial_panels);
  // Each panel gets an equal share of the tolerance budget.
  const double seg_tol = cfg.abs_tol / panels;

  std::vector<Segment> stack;
  stack.reserve(64);
  const double width = (hi - lo) / panels;
  for (int i = 0; i < panels; ++i) {
    Segment s;
    s.lo = lo + i * width;
    s.hi = (i + 1 == panels) ? hi : lo + (i + 1) * width;
    s.flo = f(s.lo);
    s.fhi = f(s.hi);
    s.fmid = f(0.5 * (s.lo + s.hi));
    s.simpson = simpson_rule(s.lo, s.hi, s.flo, s.fmid, s.fhi);
    stack.push_back(s);
  }

  double total = 0.0;
  double unresolved_error = 0.0;
  int subdivisions = 0;
  // Tolerance halves with each split so the per-segment budget is
  // conserved under subdivision.
  std::vector<double> tol_stack(stack.size(), seg_tol);

  while (!stack.empty()) {
    const Segment s = stack.back();
    stack.pop_back();
    const double tol = tol_stack.back();
    tol_stack.pop_back();

    const double mid = 0.5 * (s.lo + s.hi);
    const double flm = f(0.5 * (s.lo + mid));
    const double frm = f(0.5 * (mid + s.hi));
    const double left = simpson_rule(s.lo, mid, s.flo, flm, s.fmid);
    const double right = simpson_rule(mid, s.hi, s.fmid, frm, s.fhi);
    const double err = (left + right - s.simpson) / 15.0;

    if (std::abs(err) <= tol || (s.hi - s.lo) < 1e-15 * (hi - lo)) {
      total += left + right + err;
      continue;
    }
    if (subdivisions >= cfg.max_subdivisions) {
      total += left + right + err;
      unresolved_error += std::abs(err);
      continue;
    }
    ++subdivisions;
    stack.push_back(Segment{s.lo, mid, s.flo, flm, s.fmid, left});
    tol_stack.push_back(0.5 * tol);
    stack.push_back(Segment{mid, s.hi, s.fmid, frm, s.fhi, right});
    tol_stack.push_back(0.5 * tol);
  }

  if (unresolved_error > cfg.abs_tol) {
    throw QuadratureError(
        "integrate_adaptive: subdivision budget exhausted, achieved error "
        "estimate " +
            std::to_string(unresolved_error),
        unresolved_error);
  }
  return total;
}

OutputMoments quad_output_moments(const Activation& act, const Gaussian1D& a,
                                  const QuadratureConfig& cfg) {
  check_config(cfg);
  if (!(a.variance >= 0.0)) {
    throw std::invalid_argument("quad_output_moments: negative variance");
  }
  if (a.variance == 0.0) {
    return OutputMoments{act(a.mean), 0.0, 0.0};
  }
  const double sd = std::sqrt(a.variance);
  const double lo = a.mean - cfg.half_width_sigmas * sd;
  const double hi = a.mean + cfg.half_width_sigmas * sd;

  auto moment = [&](auto&& weight) {
    auto integrand = [&](double t) {
      return weight(t) * gaussian_pdf(t, a.mean, sd);
    };
    // Pwl activations have a kink at zero; integrate the pieces separately.
    if (act.kind() == ActivationKind::kPwl && lo < 0.0 && 0.0 < hi) {
      return integrate_adaptive(integrand, lo, 0.0, cfg) +
             integrate_adaptive(integrand, 0.0, hi, cfg);
    }
    return integrate_adaptive(integrand, lo, hi, cfg);
  };

  OutputMoments out;
  out.mu_y = moment([&](double t) { return act(t); });
  const double e_y2 = moment([&](double t) {
    const double y = act(t);
    return y * y;
  });
  const double e_ya = moment([&](double t) { return t * act(t); });
  out.sigma_y2 = std::max(e_y2 - out.mu_y * out.mu_y, 0.0);
  out.sigma_ya = e_ya - out.mu_y * a.mean;
  return out;
}

Gaussian1D true_posterior_a(const Activation& act, const Gaussian1D& prior,
                            double y, double epsilon,
                            const QuadratureConfig& cfg) {
  check_config(cfg);
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("true_posterior_a: epsilon must be > 0");
  }
  if (!(prior.variance > 0.0)) {
    throw std::invalid_argument("true_posterior_a: prior variance must be > 0");
  }
  const double sd = std::sqrt(prior.variance);
  const double lo = prior.mean - cfg.half_width_sigmas * sd;
  const double hi = prior.mean + cfg.half_width_sigmas * sd;

  auto log_density = [&](double t) {
    const double r = y - act(t);
    const double z = (t - prior.mean) / sd;
    return -0.5 * r * r / epsilon - 0.5 * z * z;
  };

  // Rescale by the peak so the unnormalized density is O(1); the scale
  // cancels in the normalized moments.
  double log_peak = -std::numeric_limits<double>::infinity();
  const int scan_points = 2048;
  for (int i = 0; i <= scan_points; ++i) {
    const double t = lo + (hi - lo) * i / scan_points;
    log_peak = std::max(log_peak, log_density(t));
  }
  if (!std::isfinite(log_peak)) {
    throw std::runtime_error("true_posterior_a: vanishing normalization");
  }

  auto density = [&](double t) { return std::exp(log_density(t) - log_peak); };
  const double z0 = integrate_adaptive(density, lo, hi, cfg);
  if (!(z0 > 1e-250)) {
    throw std::runtime_error(
        "true_posterior_a: normalization constant vanishes beyond numeric "
        "range");
  }
  QuadratureConfig moment_cfg = cfg;
  moment_cfg.abs_tol = cfg.abs_tol * z0;
  const double m1 =
      integrate_adaptive([&](double t) { return t * density(t); }, lo, hi,
                         moment_cfg) /
      z0;
  const double m2 =
      integrate_adaptive([&](double t) { return t * t * density(t); }, lo, hi,
                         moment_cfg) /
      z0;
  return Gaussian1D{m1, std::max(m2 - m1 * m1, 0.0)};
}

WeightPosterior exact_linear_posterior(const WeightPosterior& w,
                                       const Eigen::VectorXd& x, double y,
                                       double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("exact_linear_posterior: epsilon must be > 0");
  }
  if (x.size() != w.dim()) {
    throw std::invalid_argument("exact_linear_posterior: dimension mismatch");
  }
  const Eigen::VectorXd cx = w.cov * x;
  const double denom = x.dot(cx) + epsilon;
  WeightPosterior out;
  out.mean = w.mean + cx * ((y - x.dot(w.mean)) / denom);
  out.cov = w.cov - (cx * cx.transpose()) / denom;
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

McMoments mc_output_moments(const Activation& act, const Gaussian1D& a,
                            std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 10000) {
    throw std::invalid_argument("mc_output_moments: need >= 10^4 samples");
  }
  if (a.variance == 0.0) {
    return McMoments{act(a.mean), 0.0, 0.0, 0.0, 0.0, 0.0};
  }
  const double sd = std::sqrt(a.variance);
  Rng rng(seed);
  std::vector<double> as(n_samples), ys(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    as[i] = rng.normal(a.mean, sd);
    ys[i] = act(as[i]);
  }
  const double n = static_cast<double>(n_samples);
  double mean_a = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    mean_a += as[i];
    mean_y += ys[i];
  }
  mean_a /= n;
  mean_y /= n;

  // Central moments needed for the estimates and their standard errors.
  double m2y = 0.0, m4y = 0.0, cya = 0.0, m2ya = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double dy = ys[i] - mean_y;
    const double da = as[i] - mean_a;
    m2y += dy * dy;
    m4y += dy * dy * dy * dy;
    cya += dy * da;
    m2ya += dy * dy * da * da;
  }
  m2y /= n;
  m4y /= n;
  cya /= n;
  m2ya /= n;

  McMoments out;
  out.mu_y = mean_y;
  out.sigma_y2 = m2y;
  out.sigma_ya = cya;
  out.se_mu_y = std::sqrt(m2y / n);
  out.se_sigma_y2 = std::sqrt(std::max(m4y - m2y * m2y, 0.0) / n);
  out.se_sigma_ya = std::sqrt(std::max(m2ya - cya * cya, 0.0) / n);
  return out;
}

}  // namespace bperc
