#ifndef RCSCME_EM_HPP
#define RCSCME_EM_HPP

#include <functional>
#include <vector>

#include "rcscme/scm.hpp"
#include "rcscme/stft.hpp"
#include "rcscme/types.hpp"

namespace rcscme {

enum class Variant { conventional, proposed };

// Inverse-gamma prior on the target variance plus the variant selector.
struct PriorConfig {
  double alpha = 0.1;
  double beta = 1e-16;
  Variant variant = Variant::proposed;
  int n_iterations = 200;

  static PriorConfig defaults(Variant v);
  void validate() const;
};

constexpr double kVarianceFloor = 1e-18;

// EM parameter set. The noise SCM is R_prime + lambda*b*b^H (conventional,
// with b fixed to the null direction) or R_prime + c*c^H (proposed, with c
// a free complex vector stored in `basis`).
struct EmState {
  Variant variant = Variant::proposed;
  Mat r_t;                     // bands x frames, target variance
  Mat r_n;                     // bands x frames, noise variance
  std::vector<double> lambda;  // conventional scale, per band
  std::vector<CVec> basis;     // b_i (unit) or c_i
  std::vector<CMat> R_n;       // full-rank noise SCM per band
};

// Posterior statistics from the E-step.
struct PosteriorStats {
  Mat r_hat_t;                             // bands x frames
  std::vector<std::vector<CMat>> R_hat_n;  // [band][frame], Hermitian PSD
  std::vector<CMat> T_hat;                 // per band
};

struct IterationDiagnostics {
  int iteration = 0;
  double q_value = 0.0;
  double map_objective = 0.0;
  double min_eigenvalue = 0.0;  // smallest eigenvalue of any R_n
};

struct EmRunResult {
  EmState state;
  std::vector<IterationDiagnostics> diagnostics;
  Spectrogram extracted;  // M-channel target image
};

PosteriorStats e_step(const Spectrogram& observed,
                      const std::vector<CVec>& a_target, const EmState& state);

EmState m_step_conventional(const PosteriorStats& stats,
                            const NoiseScmBundle& bundle,
                            const PriorConfig& prior, const EmState& state);

EmState m_step_proposed(const PosteriorStats& stats,
                        const NoiseScmBundle& bundle, const PriorConfig& prior,
                        const EmState& state);

// Residual of the rank-one-update inverse identity
// (R' + c c^H)^{-1} c = u / (c^H u), with R' u = 0.
double claim1_identity(const CMat& R_prime, const CVec& c, const CVec& u);

// Expected complete-data log-posterior (constants dropped).
double q_function(const EmState& state, const PosteriorStats& stats,
                  const PriorConfig& prior);

// Wirtinger derivative of the Q function with respect to conj(c).
CVec q_gradient_c(const CMat& R_prime, const CVec& c, const CMat& T_hat,
                  double frames);

// Marginal log-likelihood of the observations under the current parameters
// plus the inverse-gamma log-prior; the quantity EM must not decrease.
double map_objective(const Spectrogram& observed,
                     const std::vector<CVec>& a_target, const EmState& state,
                     const PriorConfig& prior);

// Posterior-mean target image: r_t a a^H (r_t a a^H + r_n R_n)^{-1} x.
Spectrogram wiener_extract(const Spectrogram& observed,
                           const std::vector<CVec>& a_target,
                           const EmState& state);

// Initial parameters: r_t from the target estimate power, r_n = 1,
// lambda = sigma (conventional) or c = sqrt(sigma) u (proposed).
EmState init_state(const Spectrogram& observed, const DemixingSet& demix,
                   Index target_channel, const NoiseScmBundle& bundle,
                   const PriorConfig& prior);

using IterationObserver = std::function<void(int iteration, const EmState&)>;

// Full EM loop with per-iteration diagnostics and final Wiener extraction.
EmRunResult run(const Spectrogram& observed, const DemixingSet& demix,
                Index target_channel, const NoiseScmBundle& bundle,
                const PriorConfig& prior,
                const IterationObserver& observer = nullptr);

}  // namespace rcscme

#endif  // RCSCME_EM_HPP
