#include "ionspec/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ionspec {

namespace {

constexpr int NP = 5;

Eigen::Matrix<double, NP, 1> pack(const LineshapeParams& p) {
  Eigen::Matrix<double, NP, 1> v;
  v << p.contrast, p.omega, p.tau, p.alpha, p.center;
  return v;
}

LineshapeParams unpack(const Eigen::Matrix<double, NP, 1>& v) {
  return LineshapeParams{v(0), v(1), v(2), v(3), v(4)};
}

void clip(Eigen::Matrix<double, NP, 1>& v, const FitOptions& opts) {
  v(0) = std::clamp(v(0), 1e-6, 2.0);
  v(1) = std::max(v(1), 1e-9);
  v(2) = std::max(v(2), 1e-12);
  v(3) = std::clamp(v(3), opts.alpha_min, opts.alpha_max);
}

struct Derivs {
  double objective = 0.0;
  double ssr = 0.0;
  Eigen::Matrix<double, NP, 1> grad = Eigen::Matrix<double, NP, 1>::Zero();
  Eigen::Matrix<double, NP, NP> fisher = Eigen::Matrix<double, NP, NP>::Zero();
};

Derivs evaluate(const FitData& data, const LineshapeParams& p) {
  Derivs out;
  double n = static_cast<double>(data.shots);
  for (int i = 0; i < data.delta.size(); ++i) {
    LineshapeGrad g = lineshape_grad(p, data.delta(i));
    Eigen::Matrix<double, NP, 1> dp;
    for (int k = 0; k < NP; ++k) dp(k) = g.d_param[k];
    double r = data.y(i) - g.value;
    out.ssr += r * r;
    if (data.shots == 0) {
      out.objective += -0.5 * r * r;
      out.grad += r * dp;
      out.fisher += dp * dp.transpose();
    } else {
      double prob = std::clamp(g.value, 1e-10, 1.0 - 1e-10);
      out.objective +=
          n * (data.y(i) * std::log(prob) + (1.0 - data.y(i)) * std::log(1.0 - prob));
      double w = n / (prob * (1.0 - prob));
      out.grad += w * (data.y(i) - prob) * dp;
      out.fisher += w * dp * dp.transpose();
    }
  }
  return out;
}

struct SingleFit {
  LineshapeParams params;
  Derivs at_opt;
  bool converged = false;
  int iterations = 0;
};

SingleFit run_from(const FitData& data, LineshapeParams start,
                   const std::vector<int>& free_idx, const FitOptions& opts) {
  Eigen::Matrix<double, NP, 1> theta = pack(start);
  clip(theta, opts);
  Derivs cur = evaluate(data, unpack(theta));
  double lambda = 1e-3;
  int nf = static_cast<int>(free_idx.size());
  SingleFit out;

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    Eigen::VectorXd g(nf);
    Eigen::MatrixXd f(nf, nf);
    for (int a = 0; a < nf; ++a) {
      g(a) = cur.grad(free_idx[a]);
      for (int b = 0; b < nf; ++b) f(a, b) = cur.fisher(free_idx[a], free_idx[b]);
    }
    bool improved = false;
    Eigen::Matrix<double, NP, 1> theta_new = theta;
    Derivs next;
    for (int tries = 0; tries < 14; ++tries) {
      Eigen::MatrixXd damped = f;
      for (int a = 0; a < nf; ++a)
        damped(a, a) += lambda * std::max(f(a, a), 1e-12) + 1e-12;
      Eigen::VectorXd step = damped.ldlt().solve(g);
      theta_new = theta;
      for (int a = 0; a < nf; ++a) theta_new(free_idx[a]) += step(a);
      clip(theta_new, opts);
      next = evaluate(data, unpack(theta_new));
      if (std::isfinite(next.objective) && next.objective >= cur.objective) {
        improved = true;
        lambda = std::max(lambda / 3.0, 1e-12);
        break;
      }
      lambda *= 4.0;
    }
    if (!improved) break;  // damping maxed out, treat as stationary
    double gain = next.objective - cur.objective;
    theta = theta_new;
    cur = next;
    if (gain < 1e-13 * (1.0 + std::abs(cur.objective))) {
      out.converged = true;
      break;
    }
  }
  if (iter == opts.max_iter) out.converged = false;
  else if (!out.converged) out.converged = true;  // stationary counts as done
  out.iterations = iter;
  out.params = unpack(theta);
  out.at_opt = cur;
  return out;
}

}  // namespace

FitResult fit_lineshape(const FitData& data, const LineshapeParams& init,
                        const FitOptions& opts) {
  if (data.delta.size() != data.y.size())
    throw std::invalid_argument("axis and value lengths differ");
  if (data.delta.size() < 3)
    throw std::invalid_argument("fit needs at least three points");
  if (init.omega <= 0 || init.tau <= 0)
    throw std::invalid_argument("initial omega and tau must be positive");

  std::vector<int> free_idx;
  for (int k = 0; k < NP; ++k)
    if (opts.free[k]) free_idx.push_back(k);
  if (free_idx.empty()) {
    FitResult out;
    out.params = init;
    Derivs d = evaluate(data, init);
    out.objective = d.objective;
    out.ssr = d.ssr;
    out.converged = true;
    return out;
  }

  // Deterministic start list: the caller's guess, a peak-anchored variant,
  // then the peak-anchored variant swept over alpha.
  int i_peak = 0;
  data.y.maxCoeff(&i_peak);
  LineshapeParams anchored = init;
  if (opts.free[4]) anchored.center = data.delta(i_peak);
  if (opts.free[0])
    anchored.contrast = std::clamp(data.y(i_peak), 0.05, 1.0);

  std::vector<LineshapeParams> starts{init, anchored};
  if (opts.free[3]) {
    for (int k = 0; k < opts.multistart; ++k) {
      LineshapeParams s = anchored;
      s.alpha = opts.alpha_min + (k + 0.5) * (opts.alpha_max - opts.alpha_min) /
                                     std::max(opts.multistart, 1);
      starts.push_back(s);
    }
  }

  bool have_best = false;
  SingleFit best;
  for (const LineshapeParams& s : starts) {
    SingleFit r = run_from(data, s, free_idx, opts);
    if (!have_best) {
      best = r;
      have_best = true;
      continue;
    }
    double margin = 1e-9 * (1.0 + std::abs(best.at_opt.objective));
    if (r.at_opt.objective > best.at_opt.objective + margin ||
        (std::abs(r.at_opt.objective - best.at_opt.objective) <= margin &&
         r.params.alpha < best.params.alpha)) {
      best = r;
    }
  }

  FitResult out;
  out.params = best.params;
  out.objective = best.at_opt.objective;
  out.ssr = best.at_opt.ssr;
  out.converged = best.converged;
  out.iterations = best.iterations;

  int nf = static_cast<int>(free_idx.size());
  if (nf > 0) {
    Eigen::MatrixXd f(nf, nf);
    for (int a = 0; a < nf; ++a)
      for (int b = 0; b < nf; ++b)
        f(a, b) = best.at_opt.fisher(free_idx[a], free_idx[b]);
    Eigen::MatrixXd cov = f.ldlt().solve(Eigen::MatrixXd::Identity(nf, nf));
    double scale = 1.0;
    if (data.shots == 0) {
      long dof = data.delta.size() - nf;
      scale = dof > 0 ? best.at_opt.ssr / double(dof) : 0.0;
    }
    for (int a = 0; a < nf; ++a) {
      double v = scale * cov(a, a);
      out.std_error[free_idx[a]] = v > 0 ? std::sqrt(v) : 0.0;
    }
  }
  return out;
}

}  // namespace ionspec
