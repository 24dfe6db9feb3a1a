#include "rcscme/em.hpp"

#include <cmath>
#include <numbers>

#include "rcscme/parallel.hpp"

namespace rcscme {

namespace {

// Cholesky of the per-frame mixture covariance r_t a a^H + r_n R_n.
Eigen::LLT<CMat> mixture_llt(const CVec& a, const CMat& R_n, double r_t,
                             double r_n, CMat& scratch) {
  scratch.noalias() = r_t * (a * a.adjoint());
  scratch.noalias() += r_n * R_n;
  Eigen::LLT<CMat> llt(scratch);
  if (llt.info() != Eigen::Success)
    throw NumericalError("mixture covariance is not positive definite");
  return llt;
}

double log_det_from_llt(const Eigen::LLT<CMat>& llt) {
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().real().array().log().sum();
}

CMat compose_noise_scm(const CMat& R_prime, const EmState& state, Index i) {
  if (state.variant == Variant::conventional)
    return R_prime + state.lambda[i] * (state.basis[i] * state.basis[i].adjoint());
  return R_prime + state.basis[i] * state.basis[i].adjoint();
}

}  // namespace

PriorConfig PriorConfig::defaults(Variant v) {
  PriorConfig cfg;
  cfg.variant = v;
  cfg.alpha = v == Variant::conventional ? 2.5 : 0.1;
  cfg.beta = 1e-16;
  cfg.n_iterations = 200;
  return cfg;
}

void PriorConfig::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw ConfigError("PriorConfig: alpha and beta must be positive");
  if (n_iterations < 0)
    throw ConfigError("PriorConfig: negative iteration count");
}

PosteriorStats e_step(const Spectrogram& observed,
                      const std::vector<CVec>& a_target, const EmState& state) {
  const Index bands = observed.bands();
  const Index frames = observed.frames();
  const Index channels = observed.channels();

  PosteriorStats stats;
  stats.r_hat_t.resize(bands, frames);
  stats.R_hat_n.assign(bands, std::vector<CMat>(frames));
  stats.T_hat.assign(bands, CMat());

  parallel_for(bands, [&](Index i) {
    const CVec& a = a_target[i];
    const CMat& R_n = state.R_n[i];
    CMat scratch(channels, channels);
    CMat T = CMat::Zero(channels, channels);
    for (Index j = 0; j < frames; ++j) {
      const double r_t = state.r_t(i, j);
      const double r_n = state.r_n(i, j);
      const auto llt = mixture_llt(a, R_n, r_t, r_n, scratch);

      const CVec x = observed.bins[i].col(j);
      const CVec inv_a = llt.solve(a);
      const CVec inv_x = llt.solve(x);

      const double a_quad = std::real(a.dot(inv_a));
      const Complex cross = x.dot(inv_a);  // x^H (R^x)^{-1} a
      stats.r_hat_t(i, j) =
          r_t - r_t * r_t * a_quad + std::norm(r_t * cross);

      const CMat inv_Rn = llt.solve(R_n);
      const CVec g = R_n * inv_x;
      CMat R_hat = r_n * R_n;
      R_hat.noalias() -= (r_n * r_n) * (R_n * inv_Rn);
      R_hat.noalias() += (r_n * r_n) * (g * g.adjoint());
      R_hat = hermitize(R_hat);
      T.noalias() += R_hat / r_n;
      stats.R_hat_n[i][j] = std::move(R_hat);
    }
    stats.T_hat[i] = hermitize(T / static_cast<double>(frames));
  });
  return stats;
}

namespace {

// Shared tail of both M-steps: recompose R_n and refresh r_t, r_n.
void finish_m_step(const PosteriorStats& stats, const NoiseScmBundle& bundle,
                   const PriorConfig& prior, EmState& next) {
  const Index bands = next.r_t.rows();
  const Index frames = next.r_t.cols();
  const Index channels = bundle.channels();

  next.r_t = ((stats.r_hat_t.array() + prior.beta) / (prior.alpha + 2.0))
                 .max(kVarianceFloor)
                 .matrix();

  parallel_for(bands, [&](Index i) {
    next.R_n[i] = hermitize(compose_noise_scm(bundle.R_prime[i], next, i));
    Eigen::LLT<CMat> llt(next.R_n[i]);
    if (llt.info() != Eigen::Success)
      throw NumericalError("m_step: updated noise SCM is not positive definite");
    for (Index j = 0; j < frames; ++j) {
      const double trace =
          std::real(llt.solve(stats.R_hat_n[i][j]).trace()) / channels;
      next.r_n(i, j) = std::max(trace, kVarianceFloor);
    }
  });
}

}  // namespace

EmState m_step_conventional(const PosteriorStats& stats,
                            const NoiseScmBundle& bundle,
                            const PriorConfig& prior, const EmState& state) {
  const Index bands = bundle.bands();
  EmState next = state;
  for (Index i = 0; i < bands; ++i) {
    const CVec& u = bundle.null_vector[i];
    const CVec& b = state.basis[i];
    const double alignment = std::norm(b.dot(u));
    if (!(alignment > 1e-12))
      throw NumericalError("m_step_conventional: basis orthogonal to null vector");
    const double lambda =
        std::real(u.dot(stats.T_hat[i] * u)) / alignment;
    if (!(lambda > 0.0))
      throw NumericalError("m_step_conventional: non-positive scale update");
    next.lambda[i] = lambda;
  }
  finish_m_step(stats, bundle, prior, next);
  return next;
}

EmState m_step_proposed(const PosteriorStats& stats,
                        const NoiseScmBundle& bundle, const PriorConfig& prior,
                        const EmState& state) {
  const Index bands = bundle.bands();
  EmState next = state;
  for (Index i = 0; i < bands; ++i) {
    const CVec& u = bundle.null_vector[i];
    const CVec t = stats.T_hat[i] * u;
    const double quad = std::real(u.dot(t));
    if (!(quad > 0.0))
      throw NumericalError("m_step_proposed: u^H T u not positive");
    next.basis[i] = t / std::sqrt(quad);
  }
  finish_m_step(stats, bundle, prior, next);
  return next;
}

double claim1_identity(const CMat& R_prime, const CVec& c, const CVec& u) {
  const Complex inner = c.dot(u);  // c^H u
  if (std::abs(inner) <= 1e-12 * c.norm() * u.norm())
    throw ConfigError("claim1_identity: c lies in the column space (c^H u = 0)");
  const CMat R = R_prime + c * c.adjoint();
  const CVec lhs = R.partialPivLu().solve(c);
  if (!lhs.allFinite())
    throw NumericalError("claim1_identity: singular full-rank SCM");
  const CVec rhs = u / inner;
  return (lhs - rhs).norm();
}

double q_function(const EmState& state, const PosteriorStats& stats,
                  const PriorConfig& prior) {
  const Index bands = state.r_t.rows();
  const Index frames = state.r_t.cols();
  const double channels = static_cast<double>(state.R_n.front().rows());

  double q = 0.0;
  for (Index i = 0; i < bands; ++i) {
    Eigen::LLT<CMat> llt(state.R_n[i]);
    if (llt.info() != Eigen::Success)
      throw NumericalError("q_function: noise SCM not positive definite");
    const double log_det = log_det_from_llt(llt);
    for (Index j = 0; j < frames; ++j) {
      const double r_t = state.r_t(i, j);
      const double r_n = state.r_n(i, j);
      q += -(prior.alpha + 2.0) * std::log(r_t) - channels * std::log(r_n) -
           log_det - (stats.r_hat_t(i, j) + prior.beta) / r_t -
           std::real(llt.solve(stats.R_hat_n[i][j]).trace()) / r_n;
    }
  }
  return q;
}

CVec q_gradient_c(const CMat& R_prime, const CVec& c, const CMat& T_hat,
                  double frames) {
  const CMat R = hermitize(R_prime + c * c.adjoint());
  Eigen::LLT<CMat> llt(R);
  if (llt.info() != Eigen::Success)
    throw NumericalError("q_gradient_c: noise SCM not positive definite");
  const CVec inv_c = llt.solve(c);
  return -frames * inv_c + frames * llt.solve(T_hat * inv_c);
}

double map_objective(const Spectrogram& observed,
                     const std::vector<CVec>& a_target, const EmState& state,
                     const PriorConfig& prior) {
  const Index bands = observed.bands();
  const Index frames = observed.frames();
  const Index channels = observed.channels();
  const double log_pi = std::log(std::numbers::pi);
  const double prior_const =
      prior.alpha * std::log(prior.beta) - std::lgamma(prior.alpha);

  std::vector<double> per_band(bands, 0.0);
  parallel_for(bands, [&](Index i) {
    CMat scratch(channels, channels);
    double acc = 0.0;
    for (Index j = 0; j < frames; ++j) {
      const double r_t = state.r_t(i, j);
      const double r_n = state.r_n(i, j);
      const auto llt =
          mixture_llt(a_target[i], state.R_n[i], r_t, r_n, scratch);
      const CVec x = observed.bins[i].col(j);
      acc += -channels * log_pi - log_det_from_llt(llt) -
             std::real(x.dot(llt.solve(x)));
      acc += prior_const - (prior.alpha + 1.0) * std::log(r_t) -
             prior.beta / r_t;
    }
    per_band[i] = acc;
  });
  double total = 0.0;
  for (double v : per_band) total += v;
  return total;
}

Spectrogram wiener_extract(const Spectrogram& observed,
                           const std::vector<CVec>& a_target,
                           const EmState& state) {
  const Index bands = observed.bands();
  const Index frames = observed.frames();
  const Index channels = observed.channels();

  Spectrogram out;
  out.cfg = observed.cfg;
  out.num_samples = observed.num_samples;
  out.bins.assign(bands, CMat(channels, frames));

  parallel_for(bands, [&](Index i) {
    const CVec& a = a_target[i];
    CMat scratch(channels, channels);
    for (Index j = 0; j < frames; ++j) {
      const double r_t = state.r_t(i, j);
      const auto llt =
          mixture_llt(a, state.R_n[i], r_t, state.r_n(i, j), scratch);
      const CVec inv_x = llt.solve(observed.bins[i].col(j));
      out.bins[i].col(j) = (r_t * a.dot(inv_x)) * a;
    }
  });
  return out;
}

EmState init_state(const Spectrogram& observed, const DemixingSet& demix,
                   Index target_channel, const NoiseScmBundle& bundle,
                   const PriorConfig& prior) {
  prior.validate();
  const Index bands = observed.bands();
  const Index frames = observed.frames();

  EmState state;
  state.variant = prior.variant;
  state.r_t.resize(bands, frames);
  state.r_n = Mat::Ones(bands, frames);
  state.lambda.resize(bands);
  state.basis.resize(bands);
  state.R_n.resize(bands);

  for (Index i = 0; i < bands; ++i) {
    const Eigen::RowVectorXcd y_t =
        demix.W[i].row(target_channel) * observed.bins[i];
    state.r_t.row(i) = y_t.cwiseAbs2().cwiseMax(kVarianceFloor).real();

    const double sigma = bundle.sigma_min_pos[i];
    const CVec& u = bundle.null_vector[i];
    if (prior.variant == Variant::conventional) {
      state.lambda[i] = sigma;
      state.basis[i] = u;
    } else {
      state.basis[i] = std::sqrt(sigma) * u;
    }
    state.R_n[i] = hermitize(bundle.R_prime[i] + sigma * (u * u.adjoint()));
  }
  return state;
}

EmRunResult run(const Spectrogram& observed, const DemixingSet& demix,
                Index target_channel, const NoiseScmBundle& bundle,
                const PriorConfig& prior, const IterationObserver& observer) {
  prior.validate();
  const std::vector<CVec>& a_target = bundle.a_target;

  EmRunResult result;
  result.state = init_state(observed, demix, target_channel, bundle, prior);

  const auto record = [&](int iter, const PosteriorStats& stats) {
    IterationDiagnostics diag;
    diag.iteration = iter;
    diag.q_value = q_function(result.state, stats, prior);
    diag.map_objective = map_objective(observed, a_target, result.state, prior);
    double min_eig = std::numeric_limits<double>::infinity();
    for (const CMat& R : result.state.R_n) {
      const auto [values, vectors] = eig_hermitian(R);
      min_eig = std::min(min_eig, values[0]);
    }
    diag.min_eigenvalue = min_eig;
    result.diagnostics.push_back(diag);
  };

  PosteriorStats stats = e_step(observed, a_target, result.state);
  record(0, stats);
  if (observer) observer(0, result.state);

  for (int iter = 1; iter <= prior.n_iterations; ++iter) {
    result.state = prior.variant == Variant::conventional
                       ? m_step_conventional(stats, bundle, prior, result.state)
                       : m_step_proposed(stats, bundle, prior, result.state);
    record(iter, stats);
    if (observer) observer(iter, result.state);
    if (iter < prior.n_iterations)
      stats = e_step(observed, a_target, result.state);
  }

  result.extracted = wiener_extract(observed, a_target, result.state);
  return result;
}

}  // namespace rcscme
