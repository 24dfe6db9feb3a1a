#include "rcscme/scm.hpp"

#include <cmath>
#include <fstream>

namespace rcscme {

namespace {

// Make the largest-magnitude entry of v real and positive.
void fix_phase(CVec& v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  const Complex pivot = v[arg];
  if (std::abs(pivot) > 0.0) v *= std::conj(pivot) / std::abs(pivot);
}

}  // namespace

std::pair<Vec, CMat> eig_hermitian(const CMat& H) {
  if (H.rows() != H.cols()) throw ConfigError("eig_hermitian: not square");
  const double scale = H.cwiseAbs().maxCoeff();
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * std::max(scale, 1e-300))
    throw NumericalError("eig_hermitian: matrix not Hermitian within tolerance");

  Eigen::SelfAdjointEigenSolver<CMat> solver(hermitize(H));
  if (solver.info() != Eigen::Success)
    throw NumericalError("eig_hermitian: eigendecomposition failed");
  Vec values = solver.eigenvalues();
  CMat vectors = solver.eigenvectors();
  for (Index k = 0; k < vectors.cols(); ++k) {
    CVec v = vectors.col(k);
    fix_phase(v);
    vectors.col(k) = v;
  }
  return {values, vectors};
}

NoiseScmBundle noise_scm(const Spectrogram& observed, const DemixingSet& demix,
                         Index target_channel) {
  const Index channels = observed.channels();
  const Index bands = observed.bands();
  const Index frames = observed.frames();
  if (frames == 0) throw ConfigError("noise_scm: no frames");
  if (target_channel < 0 || target_channel >= channels)
    throw ConfigError("noise_scm: target channel out of range");
  if (demix.bands() != bands)
    throw ConfigError("noise_scm: demixing set does not match spectrogram");

  Spectrogram estimates;
  estimates.cfg = observed.cfg;
  estimates.num_samples = observed.num_samples;
  estimates.bins.resize(bands);
  for (Index i = 0; i < bands; ++i)
    estimates.bins[i] = demix.W[i] * observed.bins[i];

  std::vector<Index> keep;
  for (Index m = 0; m < channels; ++m)
    if (m != target_channel) keep.push_back(m);
  const Spectrogram noise_image = back_project(estimates, demix, keep);

  NoiseScmBundle bundle;
  bundle.R_prime.resize(bands);
  bundle.null_vector.resize(bands);
  bundle.sigma_min_pos.resize(bands);
  bundle.a_target.resize(bands);

  for (Index i = 0; i < bands; ++i) {
    const CMat& Yn = noise_image.bins[i];
    CMat R = (Yn * Yn.adjoint()) / static_cast<double>(frames);
    R = hermitize(R);

    auto [values, vectors] = eig_hermitian(R);
    const double largest = values[channels - 1];
    if (!(largest > 0.0))
      throw NumericalError("noise_scm: degenerate rank (all-zero noise SCM)");
    if (channels > 2 && values[1] < 1e-6 * largest)
      throw NumericalError(
          "noise_scm: more than one near-zero eigenvalue (preprocessing collapse)");
    if (values[0] > 1e-8 * largest)
      throw NumericalError("noise_scm: SCM not rank deficient as expected");

    bundle.R_prime[i] = std::move(R);
    bundle.null_vector[i] = vectors.col(0);
    bundle.sigma_min_pos[i] = values[1];
    bundle.a_target[i] = demix.A[i].col(target_channel);
  }
  return bundle;
}

void dump_bundle(const NoiseScmBundle& bundle, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot create dump file: " + path);
  const Index bands = bundle.bands();
  const Index channels = bundle.channels();
  auto put = [&](Complex z) {
    const float re = static_cast<float>(z.real());
    const float im = static_cast<float>(z.imag());
    out.write(reinterpret_cast<const char*>(&re), 4);
    out.write(reinterpret_cast<const char*>(&im), 4);
  };
  const uint32_t header[2] = {static_cast<uint32_t>(bands),
                              static_cast<uint32_t>(channels)};
  out.write(reinterpret_cast<const char*>(header), 8);
  for (Index i = 0; i < bands; ++i) {
    for (Index r = 0; r < channels; ++r)
      for (Index c = 0; c < channels; ++c) put(bundle.R_prime[i](r, c));
    for (Index r = 0; r < channels; ++r) put(bundle.null_vector[i][r]);
    put(Complex(bundle.sigma_min_pos[i], 0.0));
    for (Index r = 0; r < channels; ++r) put(bundle.a_target[i][r]);
  }
}

}  // namespace rcscme
