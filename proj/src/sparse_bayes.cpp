#include "doabcs/sparse_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "doabcs/kernels.hpp"

namespace doabcs {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

struct PosteriorStats {
  std::vector<double> mean;      // full length; pinned entries hold x_e
  std::vector<double> cov_diag;  // 0 for pinned entries
  double logdet_sigma = 0.0;     // over the active block
  double logdet_p = 0.0;         // over the active block
  double resid_sq = 0.0;         // ||y - A mean||^2
  double quad = 0.0;             // sum_active p (mean - x_e)^2
};

// Posterior statistics restricted to the active set, with inactive
// coefficients pinned to their prior mean. Two algebraically equivalent
// routes: a factorization of (sigma^-2 A^T A + P) on the active block, or,
// when the active set is larger than the measurement dimension, the
// measurement-space form via (sigma^2 I + A P^-1 A^T).
PosteriorStats posterior_stats(const SparseProblem& problem,
                               std::span<const double> precision,
                               std::span<const std::uint8_t> active,
                               double noise_var) {
  const Dictionary& dict = *problem.dict;
  const std::size_t m2 = problem.meas_dim();
  const std::size_t n2 = problem.coef_dim();
  const double inv_s2 = 1.0 / noise_var;

  std::vector<std::size_t> act;
  act.reserve(n2);
  for (std::size_t n = 0; n < n2; ++n)
    if (active[n]) act.push_back(n);
  const std::size_t s = act.size();

  PosteriorStats st;
  st.mean = problem.prior_mean;
  st.cov_diag.assign(n2, 0.0);

  // r0 = y - A x_e; both routes express the mean as x_e plus a correction
  // driven by this residual.
  std::vector<double> r0(m2);
  kern::gemv(dict.a.data.data(), m2, n2, problem.prior_mean.data(), r0.data());
  for (std::size_t i = 0; i < m2; ++i) r0[i] = problem.y[i] - r0[i];

  if (s > 0 && s <= m2) {
    Matrix h(s, s);
    for (std::size_t i = 0; i < s; ++i) {
      const double* grow = dict.gram.row(act[i]);
      for (std::size_t j = 0; j < s; ++j) h(i, j) = inv_s2 * grow[act[j]];
      h(i, i) += precision[act[i]];
    }
    Cholesky chol(h);
    st.logdet_sigma = -chol.log_det();

    std::vector<double> rhs(s);
    for (std::size_t i = 0; i < s; ++i) {
      rhs[i] = inv_s2 * kern::dot(dict.a_t.row(act[i]), r0.data(), m2);
    }
    const std::vector<double> delta = chol.solve(rhs);
    const std::vector<double> diag = chol.inverse_diag();
    for (std::size_t i = 0; i < s; ++i) {
      st.mean[act[i]] = problem.prior_mean[act[i]] + delta[i];
      st.cov_diag[act[i]] = diag[i];
      st.logdet_p += std::log(precision[act[i]]);
    }
  } else if (s > 0) {
    // Measurement-space route: C = sigma^2 I + A_S P_S^-1 A_S^T.
    Matrix t(s, m2);
    std::vector<double> w(s);
    for (std::size_t i = 0; i < s; ++i) {
      w[i] = 1.0 / precision[act[i]];
      const double sw = std::sqrt(w[i]);
      const double* col = dict.a_t.row(act[i]);
      double* trow = t.row(i);
      for (std::size_t j = 0; j < m2; ++j) trow[j] = sw * col[j];
    }
    Matrix c(m2, m2);
    kern::gram(t.data.data(), s, m2, c.data.data());
    for (std::size_t i = 0; i < m2; ++i) c(i, i) += noise_var;
    Cholesky chol(c);

    const std::vector<double> u = chol.solve(r0);
    for (std::size_t i = 0; i < s; ++i) {
      const double* col = dict.a_t.row(act[i]);
      st.mean[act[i]] = problem.prior_mean[act[i]] + w[i] * kern::dot(col, u.data(), m2);
      const std::vector<double> z = chol.solve_lower(std::span(col, m2));
      st.cov_diag[act[i]] = w[i] - w[i] * w[i] * kern::sum_sq(z.data(), m2);
      st.logdet_p += std::log(precision[act[i]]);
    }
    st.logdet_sigma =
        static_cast<double>(m2) * std::log(noise_var) - st.logdet_p - chol.log_det();
  }

  std::vector<double> resid(m2);
  kern::gemv(dict.a.data.data(), m2, n2, st.mean.data(), resid.data());
  for (std::size_t i = 0; i < m2; ++i) resid[i] = problem.y[i] - resid[i];
  st.resid_sq = kern::sum_sq(resid.data(), m2);

  for (const std::size_t n : act) {
    const double d = st.mean[n] - problem.prior_mean[n];
    st.quad += precision[n] * d * d;
  }
  return st;
}

double evidence_from_stats(const PosteriorStats& st, std::size_t m2, double noise_var) {
  return -0.5 * (static_cast<double>(m2) * kLog2Pi +
                 static_cast<double>(m2) * std::log(noise_var) - st.logdet_sigma -
                 st.logdet_p + st.resid_sq / noise_var + st.quad);
}

void validate_problem(const SparseProblem& problem) {
  if (problem.dict == nullptr) throw std::invalid_argument("problem: missing dictionary");
  if (problem.y.size() != problem.meas_dim()) {
    throw std::invalid_argument("problem: measurement length mismatch");
  }
  if (problem.prior_mean.size() != problem.coef_dim()) {
    throw std::invalid_argument("problem: prior mean length mismatch");
  }
  for (const double v : problem.prior_mean) {
    if (!std::isfinite(v)) throw std::invalid_argument("problem: prior mean must be finite");
  }
}

void validate_hyper(std::span<const double> precision, double noise_var, std::size_t n2) {
  if (precision.size() != n2) throw std::invalid_argument("precision length mismatch");
  for (const double p : precision) {
    if (!(p > 0.0)) throw std::invalid_argument("precisions must be positive");
  }
  if (!(noise_var > 0.0)) throw std::invalid_argument("noise variance must be positive");
}

}  // namespace

SparseProblem::SparseProblem(const Dictionary& d, std::vector<double> y_stacked,
                             std::vector<double> x_e)
    : dict(&d), y(std::move(y_stacked)), prior_mean(std::move(x_e)) {
  validate_problem(*this);
}

PosteriorResult posterior(const SparseProblem& problem, std::span<const double> precision,
                          double noise_var) {
  validate_problem(problem);
  validate_hyper(precision, noise_var, problem.coef_dim());
  const Dictionary& dict = *problem.dict;
  const std::size_t n2 = problem.coef_dim();
  const double inv_s2 = 1.0 / noise_var;

  Matrix h = dict.gram;
  for (double& v : h.data) v *= inv_s2;
  for (std::size_t n = 0; n < n2; ++n) h(n, n) += precision[n];
  Cholesky chol(h);

  std::vector<double> rhs = matvec_t(dict.a, problem.y);
  for (std::size_t n = 0; n < n2; ++n) {
    rhs[n] = inv_s2 * rhs[n] + precision[n] * problem.prior_mean[n];
  }

  PosteriorResult out;
  out.mean = chol.solve(rhs);
  out.cov = chol.inverse();
  symmetrize(out.cov);
  return out;
}

double log_marginal(const SparseProblem& problem, std::span<const double> precision,
                    double noise_var) {
  validate_problem(problem);
  validate_hyper(precision, noise_var, problem.coef_dim());
  const std::vector<std::uint8_t> all(problem.coef_dim(), 1);
  const PosteriorStats st = posterior_stats(problem, precision, all, noise_var);
  return evidence_from_stats(st, problem.meas_dim(), noise_var);
}

std::vector<double> update_precisions(const RvmState& state, std::span<const double> prior_mean,
                                      PrecisionUpdate mode, double denom_eps) {
  const std::size_t n2 = state.precision.size();
  std::vector<double> out = state.precision;
  const double cross = mode == PrecisionUpdate::paper ? 1.0 : 2.0;
  for (std::size_t n = 0; n < n2; ++n) {
    if (!state.active[n]) continue;
    const double mu = state.mean[n];
    const double xe = prior_mean[n];
    const double denom = mu * mu + xe * xe - cross * xe * mu;
    out[n] = state.gamma[n] / std::max(denom, denom_eps);
  }
  return out;
}

double update_noise_var(const RvmState& state, const SparseProblem& problem) {
  const std::size_t m2 = problem.meas_dim();
  std::vector<double> resid(m2);
  kern::gemv(problem.dict->a.data.data(), m2, problem.coef_dim(), state.mean.data(),
             resid.data());
  for (std::size_t i = 0; i < m2; ++i) resid[i] = problem.y[i] - resid[i];
  const double gamma_sum = std::accumulate(state.gamma.begin(), state.gamma.end(), 0.0);
  const double denom = static_cast<double>(m2) - gamma_sum;
  if (!(denom > 0.0)) {
    throw SolverError("noise update: nonpositive degrees of freedom (overparameterized)",
                      denom);
  }
  return kern::sum_sq(resid.data(), m2) / denom;
}

RvmResult run_modified_rvm(const SparseProblem& problem, const SolverConfig& config,
                           const IterationObserver& observer) {
  validate_problem(problem);
  if (config.max_iters < 1 || !(config.tol > 0.0) || !(config.tol < 1.0) ||
      !(config.p_init > 0.0) || !(config.sigma2_init > 0.0) || !(config.p_cap > 0.0) ||
      !(config.denom_eps > 0.0) || !(config.eta > 0.0) || !(config.eta <= 1.0)) {
    throw std::invalid_argument("solver config: invalid field");
  }
  const std::size_t m2 = problem.meas_dim();
  const std::size_t n2 = problem.coef_dim();
  if (n2 % 2 != 0) {
    throw std::invalid_argument("solver: coefficient dimension must be even");
  }

  RvmState state;
  state.precision.assign(n2, config.p_init);
  state.noise_var = std::max(config.sigma2_init, config.sigma2_floor);
  state.active.assign(n2, 1);
  state.gamma.assign(n2, 0.0);

  double prev_evidence = -std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    const PosteriorStats st =
        posterior_stats(problem, state.precision, state.active, state.noise_var);
    for (std::size_t n = 0; n < n2; ++n) {
      state.gamma[n] = state.active[n] ? 1.0 - state.precision[n] * st.cov_diag[n] : 0.0;
    }
    state.mean = st.mean;
    state.cov_diag = st.cov_diag;

    const double evidence = evidence_from_stats(st, m2, state.noise_var);
    if (evidence < prev_evidence - 1e-9 * (1.0 + std::abs(evidence))) {
      ++state.evidence_decreases;
    }
    prev_evidence = evidence;
    state.log_evidence = evidence;

    std::vector<double> p_new =
        update_precisions(state, problem.prior_mean, config.update_mode, config.denom_eps);

    double sigma2_new = state.noise_var;
    if (config.noise_schedule == NoiseSchedule::per_iteration) {
      const double gamma_sum =
          std::accumulate(state.gamma.begin(), state.gamma.end(), 0.0);
      const double dof = static_cast<double>(m2) - gamma_sum;
      if (!(dof > 0.0)) {
        throw SolverError("noise update: nonpositive degrees of freedom (overparameterized)",
                          dof);
      }
      if (dof >= config.noise_dof_min) {
        sigma2_new = std::max(st.resid_sq / dof, config.sigma2_floor);
      }
    }

    double delta = 0.0;
    bool any_active = false;
    for (std::size_t n = 0; n < n2; ++n) {
      if (!state.active[n]) continue;
      delta = std::max(delta, std::abs(p_new[n] - state.precision[n]) / state.precision[n]);
      if (p_new[n] > config.p_cap) {
        state.active[n] = 0;
        p_new[n] = config.p_cap;
      } else {
        any_active = true;
      }
    }

    state.precision = std::move(p_new);
    state.noise_var = sigma2_new;
    state.iterations = iter;

    if (observer) observer(state);

    if (delta < config.tol) {
      state.converged = true;
      break;
    }
    if (!any_active) break;
  }

  // Refresh the posterior at the final hyperparameters so the reported state
  // is internally consistent.
  const PosteriorStats st =
      posterior_stats(problem, state.precision, state.active, state.noise_var);
  state.mean = st.mean;
  state.cov_diag = st.cov_diag;
  for (std::size_t n = 0; n < n2; ++n) {
    state.gamma[n] = state.active[n] ? 1.0 - state.precision[n] * st.cov_diag[n] : 0.0;
  }
  state.log_evidence = evidence_from_stats(st, m2, state.noise_var);

  RvmResult result;
  result.estimate.p_opt = state.precision;
  result.estimate.log_evidence = state.log_evidence;
  result.estimate.x_opt = complexify_vector(state.mean);
  const ThresholdResult thr = threshold_signals(result.estimate.x_opt, config.eta);
  result.estimate.kept_indices = thr.kept_indices;
  const std::size_t half = result.estimate.x_opt.size();
  std::vector<std::uint8_t> keep(half, 0);
  for (const std::size_t i : thr.kept_indices) keep[i] = 1;
  for (std::size_t i = 0; i < half; ++i) {
    if (!keep[i]) result.estimate.x_opt[i] = cplx(0.0, 0.0);
  }
  if (problem.dict->grid.size() == half) {
    result.estimate.doas_deg = estimate_doas(result.estimate.kept_indices, problem.dict->grid);
  }

  if (config.noise_schedule == NoiseSchedule::final_thresholded) {
    // The noise-variance formula applied once to the thresholded signal: the
    // surviving support is too small to absorb the noise, so the residual is
    // an honest one.
    std::vector<double> mu_thr(n2, 0.0);
    double gamma_kept = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      if (!keep[i]) continue;
      mu_thr[i] = state.mean[i];
      mu_thr[i + half] = state.mean[i + half];
      gamma_kept += state.gamma[i] + state.gamma[i + half];
    }
    std::vector<double> resid(m2);
    kern::gemv(problem.dict->a.data.data(), m2, n2, mu_thr.data(), resid.data());
    for (std::size_t i = 0; i < m2; ++i) resid[i] = problem.y[i] - resid[i];
    const double dof = static_cast<double>(m2) - gamma_kept;
    if (dof > 0.0) {
      state.noise_var =
          std::max(kern::sum_sq(resid.data(), m2) / dof, config.sigma2_floor);
    }
  }
  result.estimate.sigma2_opt = state.noise_var;
  result.state = std::move(state);
  return result;
}

std::vector<double> final_estimate(const RvmState& state, const SparseProblem& problem) {
  return posterior(problem, state.precision, state.noise_var).mean;
}

ThresholdResult threshold_signals(std::span<const cplx> x, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("threshold: eta must lie in (0, 1]");
  }
  const std::size_t n = x.size();
  std::vector<double> energy(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    energy[i] = std::norm(x[i]);
    total += energy[i];
  }
  ThresholdResult out;
  if (total <= 0.0) return out;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (energy[a] != energy[b]) return energy[a] > energy[b];
    return a < b;
  });

  const double target = eta * total;
  double cum = 0.0;
  for (const std::size_t i : order) {
    if (energy[i] <= 0.0) break;
    out.kept_indices.push_back(i);
    cum += energy[i];
    if (cum >= target) break;
  }
  std::sort(out.kept_indices.begin(), out.kept_indices.end());
  out.num_kept = out.kept_indices.size();
  return out;
}

std::vector<double> estimate_doas(std::span<const std::size_t> kept_indices,
                                  const AngularGrid& grid) {
  std::vector<double> doas;
  doas.reserve(kept_indices.size());
  for (const std::size_t i : kept_indices) doas.push_back(grid.angle(i));
  std::sort(doas.begin(), doas.end());
  return doas;
}

}  // namespace doabcs
