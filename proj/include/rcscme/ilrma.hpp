#ifndef RCSCME_ILRMA_HPP
#define RCSCME_ILRMA_HPP

#include <vector>

#include "rcscme/stft.hpp"
#include "rcscme/types.hpp"

namespace rcscme {

// Per-frequency demixing matrices W[i] and their inverses A[i], whose
// columns are the estimated steering vectors.
struct DemixingSet {
  std::vector<CMat> W;
  std::vector<CMat> A;

  Index bands() const { return static_cast<Index>(W.size()); }
  Index channels() const { return W.empty() ? 0 : W.front().rows(); }
};

struct IlrmaConfig {
  int n_bases = 10;
  int n_iterations = 50;
  unsigned seed = 0;
};

struct IlrmaResult {
  DemixingSet demix;
  Spectrogram estimates;      // y[i](m, j) = w_{i,m}^H x_{ij}
  std::vector<double> costs;  // negative log-likelihood per iteration (incl. init)
};

// Independent low-rank matrix analysis with per-source NMF variance model
// and iterative-projection demixing updates. W is initialized to identity,
// NMF variables to uniform randoms from the seed.
IlrmaResult run_ilrma(const Spectrogram& observed, const IlrmaConfig& cfg);

// Maps the estimate vector through A[i] with channels outside `keep`
// zeroed, producing an M-channel image (back projection).
Spectrogram back_project(const Spectrogram& estimates, const DemixingSet& demix,
                         const std::vector<Index>& keep);

// Excess kurtosis of a real sample sequence; requires positive variance.
double excess_kurtosis(const Vec& samples);

// Index of the estimate with maximum time-domain kurtosis; ties break to
// the lowest index. Zero-variance estimates are excluded.
Index select_target_channel(const Spectrogram& estimates);

}  // namespace rcscme

#endif  // RCSCME_ILRMA_HPP
