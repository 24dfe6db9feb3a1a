#include "rcscme/ilrma.hpp"

#include <cmath>
#include <random>

namespace rcscme {

namespace {

constexpr double kNmfFloor = 1e-12;

// Negative log-likelihood of the ILRMA model, dropping constants.
double ilrma_cost(const std::vector<Mat>& power, const std::vector<Mat>& model,
                  const std::vector<CMat>& W) {
  const Index sources = static_cast<Index>(power.size());
  double cost = 0.0;
  for (Index n = 0; n < sources; ++n)
    cost += (power[n].array() / model[n].array() + model[n].array().log()).sum();
  const double frames = static_cast<double>(power.front().cols());
  for (const CMat& Wi : W) {
    const Complex det = Wi.partialPivLu().determinant();
    cost -= 2.0 * frames * std::log(std::abs(det));
  }
  return cost;
}

}  // namespace

IlrmaResult run_ilrma(const Spectrogram& observed, const IlrmaConfig& cfg) {
  const Index channels = observed.channels();
  const Index bands = observed.bands();
  const Index frames = observed.frames();
  if (channels < 2) throw ConfigError("run_ilrma: need at least 2 channels");
  if (frames < channels)
    throw ConfigError("run_ilrma: need at least as many frames as channels");
  if (cfg.n_bases < 1 || cfg.n_iterations < 0)
    throw ConfigError("run_ilrma: bad basis or iteration count");

  const Index sources = channels;
  const Index n_bases = cfg.n_bases;

  std::mt19937 rng(cfg.seed);
  std::uniform_real_distribution<double> uniform(0.1, 1.0);

  std::vector<Mat> basis(sources), activation(sources), model(sources),
      power(sources);
  std::vector<CMat> Y(sources, CMat(bands, frames));
  for (Index n = 0; n < sources; ++n) {
    basis[n] = Mat::NullaryExpr(bands, n_bases, [&] { return uniform(rng); });
    activation[n] =
        Mat::NullaryExpr(n_bases, frames, [&] { return uniform(rng); });
    model[n] = basis[n] * activation[n];
    for (Index i = 0; i < bands; ++i) Y[n].row(i) = observed.bins[i].row(n);
    power[n] = Y[n].cwiseAbs2();
  }

  std::vector<CMat> W(bands, CMat::Identity(channels, channels));

  IlrmaResult result;
  result.costs.push_back(ilrma_cost(power, model, W));

  for (int iter = 0; iter < cfg.n_iterations; ++iter) {
    // NMF multiplicative updates under the Itakura-Saito divergence.
    for (Index n = 0; n < sources; ++n) {
      Mat& T = basis[n];
      Mat& V = activation[n];
      Mat& R = model[n];
      const Mat& P = power[n];

      Mat inv = R.cwiseInverse();
      Mat num = (P.array() * inv.array().square()).matrix() * V.transpose();
      Mat den = inv * V.transpose();
      T = (T.array() * (num.array() / den.array()).sqrt())
              .max(kNmfFloor)
              .matrix();
      R = T * V;

      inv = R.cwiseInverse();
      num = T.transpose() * (P.array() * inv.array().square()).matrix();
      den = T.transpose() * inv;
      V = (V.array() * (num.array() / den.array()).sqrt())
              .max(kNmfFloor)
              .matrix();
      R = T * V;
    }

    // Iterative-projection demixing updates.
    for (Index n = 0; n < sources; ++n) {
      for (Index i = 0; i < bands; ++i) {
        const CMat& X = observed.bins[i];
        CMat U = CMat::Zero(channels, channels);
        for (Index j = 0; j < frames; ++j)
          U.noalias() += X.col(j) * X.col(j).adjoint() / model[n](i, j);
        U /= static_cast<double>(frames);
        U += (1e-12 * U.real().trace() / channels) *
             CMat::Identity(channels, channels);

        Eigen::PartialPivLU<CMat> lu(W[i] * U);
        CVec w = lu.solve(CVec::Unit(channels, n));
        if (!w.allFinite())
          throw NumericalError("run_ilrma: singular demixing update");
        const double scale = std::real((w.adjoint() * U * w)(0, 0));
        if (!(scale > 0.0))
          throw NumericalError("run_ilrma: degenerate projection scale");
        w /= std::sqrt(scale);
        W[i].row(n) = w.adjoint();
        Y[n].row(i) = w.adjoint() * X;
      }
      power[n] = Y[n].cwiseAbs2();
    }
    result.costs.push_back(ilrma_cost(power, model, W));
  }

  result.demix.W = std::move(W);
  result.demix.A.resize(bands);
  for (Index i = 0; i < bands; ++i) {
    Eigen::PartialPivLU<CMat> lu(result.demix.W[i]);
    result.demix.A[i] = lu.inverse();
    if (!result.demix.A[i].allFinite())
      throw NumericalError("run_ilrma: singular demixing matrix");
  }

  result.estimates.cfg = observed.cfg;
  result.estimates.num_samples = observed.num_samples;
  result.estimates.bins.assign(bands, CMat(channels, frames));
  for (Index i = 0; i < bands; ++i)
    for (Index n = 0; n < sources; ++n)
      result.estimates.bins[i].row(n) = Y[n].row(i);
  return result;
}

Spectrogram back_project(const Spectrogram& estimates, const DemixingSet& demix,
                         const std::vector<Index>& keep) {
  if (keep.empty()) throw ConfigError("back_project: empty channel subset");
  const Index channels = estimates.channels();
  const Index bands = estimates.bands();
  if (demix.bands() != bands || demix.channels() != channels)
    throw ConfigError("back_project: demixing set does not match estimates");
  CVec mask = CVec::Zero(channels);
  for (Index m : keep) {
    if (m < 0 || m >= channels)
      throw ConfigError("back_project: channel index out of range");
    mask[m] = 1.0;
  }

  Spectrogram out;
  out.cfg = estimates.cfg;
  out.num_samples = estimates.num_samples;
  out.bins.resize(bands);
  for (Index i = 0; i < bands; ++i)
    out.bins[i] = demix.A[i] * mask.asDiagonal() * estimates.bins[i];
  return out;
}

double excess_kurtosis(const Vec& samples) {
  const double mean = samples.mean();
  const Vec centered = samples.array() - mean;
  const double m2 = centered.array().square().mean();
  if (!(m2 > 0.0))
    throw NumericalError("excess_kurtosis: zero-variance input");
  const double m4 = centered.array().square().square().mean();
  return m4 / (m2 * m2) - 3.0;
}

Index select_target_channel(const Spectrogram& estimates) {
  const Index channels = estimates.channels();
  if (channels < 2)
    throw ConfigError("select_target_channel: need at least 2 estimates");
  const Signal resynth = synthesize(estimates);

  Index best = -1;
  double best_kurtosis = 0.0;
  for (Index m = 0; m < channels; ++m) {
    const Vec row = resynth.row(m).transpose();
    const double mean = row.mean();
    const double var = (row.array() - mean).square().mean();
    if (!(var > 0.0)) continue;  // kurtosis undefined, exclude
    const double k = excess_kurtosis(row);
    if (best < 0 || k > best_kurtosis) {
      best = m;
      best_kurtosis = k;
    }
  }
  if (best < 0)
    throw NumericalError("select_target_channel: all estimates degenerate");
  return best;
}

}  // namespace rcscme
