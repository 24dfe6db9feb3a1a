#ifndef RCSCME_PIPELINE_HPP
#define RCSCME_PIPELINE_HPP

#include "rcscme/config.hpp"
#include "rcscme/metrics.hpp"
#include "rcscme/mixture.hpp"

namespace rcscme {

struct PipelineResult {
  Index target_channel = 0;
  Spectrogram extracted;                          // M-channel target image
  Signal extracted_signal;                        // channels x length
  std::vector<IterationDiagnostics> diagnostics;  // per EM iteration
  std::vector<double> ilrma_costs;
};

// Full extraction: STFT -> ILRMA -> kurtosis channel selection -> noise SCM
// -> EM -> multichannel Wiener filter -> inverse STFT. The observer, when
// set, sees the EM state after every iteration (0 = initialization).
PipelineResult extract(const Signal& input, const PipelineConfig& cfg,
                       const IterationObserver& observer = nullptr);

struct VariantScore {
  MetricReport report;
};

// One scene, both EM variants sharing a single preprocessing run, plus the
// back-projected preprocessing-only baseline score.
struct SceneEvaluation {
  MetricReport conventional;
  MetricReport proposed;
  double ilrma_improvement_db = 0.0;
  Index target_channel = 0;
};

SceneEvaluation evaluate_scene(const SceneConfig& scene,
                               const PipelineConfig& cfg);

}  // namespace rcscme

#endif  // RCSCME_PIPELINE_HPP
