#include "rcscme/pipeline.hpp"

namespace rcscme {

PipelineResult extract(const Signal& input, const PipelineConfig& cfg,
                       const IterationObserver& observer) {
  if (input.rows() < 2)
    throw ConfigError("extract: need at least 2 input channels");

  const Spectrogram observed = analyze(input, cfg.stft);
  const IlrmaResult ilrma = run_ilrma(observed, cfg.ilrma);
  const Index n_t = select_target_channel(ilrma.estimates);
  const NoiseScmBundle bundle = noise_scm(observed, ilrma.demix, n_t);
  const EmRunResult em =
      run(observed, ilrma.demix, n_t, bundle, cfg.prior, observer);

  PipelineResult result;
  result.target_channel = n_t;
  result.extracted = em.extracted;
  result.extracted_signal = synthesize(em.extracted);
  result.diagnostics = em.diagnostics;
  result.ilrma_costs = ilrma.costs;
  return result;
}

namespace {

// Reference-channel time signal of the Wiener extraction for a given state.
Vec extraction_trace(const Spectrogram& observed,
                     const std::vector<CVec>& a_target, const EmState& state,
                     Index ref_channel) {
  const Spectrogram image = wiener_extract(observed, a_target, state);
  const Signal resynth = synthesize(image.select_channel(ref_channel));
  return resynth.row(0).transpose();
}

}  // namespace

SceneEvaluation evaluate_scene(const SceneConfig& scene,
                               const PipelineConfig& cfg) {
  const Mixture mix = make_default_mixture(scene);
  const Index ref_channel = 0;
  const Vec reference = mix.target_image.row(ref_channel).transpose();
  const Vec mixture_ref = mix.observed.row(ref_channel).transpose();

  const Spectrogram observed = analyze(mix.observed, cfg.stft);
  const IlrmaResult ilrma = run_ilrma(observed, cfg.ilrma);
  const Index n_t = select_target_channel(ilrma.estimates);
  const NoiseScmBundle bundle = noise_scm(observed, ilrma.demix, n_t);

  SceneEvaluation eval;
  eval.target_channel = n_t;

  // Preprocessing-only baseline: back-projected target estimate.
  const Spectrogram baseline_image =
      back_project(ilrma.estimates, ilrma.demix, {n_t});
  const Vec baseline =
      synthesize(baseline_image.select_channel(ref_channel)).row(0).transpose();
  const double input_sdr = sdr(mixture_ref, reference);
  eval.ilrma_improvement_db = sdr(baseline, reference) - input_sdr;

  for (const Variant variant : {Variant::conventional, Variant::proposed}) {
    PriorConfig prior = PriorConfig::defaults(variant);
    prior.n_iterations = cfg.prior.n_iterations;

    std::vector<Vec> trajectory;
    trajectory.reserve(prior.n_iterations + 1);
    const IterationObserver observer = [&](int, const EmState& state) {
      trajectory.push_back(
          extraction_trace(observed, bundle.a_target, state, ref_channel));
    };
    run(observed, ilrma.demix, n_t, bundle, prior, observer);

    MetricReport report = evaluate_run(trajectory, reference, mixture_ref);
    if (variant == Variant::conventional)
      eval.conventional = std::move(report);
    else
      eval.proposed = std::move(report);
  }
  return eval;
}

}  // namespace rcscme
