#ifndef RCSCME_SCM_HPP
#define RCSCME_SCM_HPP

#include <string>
#include <utility>
#include <vector>

#include "rcscme/ilrma.hpp"
#include "rcscme/types.hpp"

namespace rcscme {

// Rank-deficient noise spatial covariance per frequency, together with its
// null direction, minimum positive eigenvalue, and the target steering vector.
struct NoiseScmBundle {
  std::vector<CMat> R_prime;      // Hermitian PSD, rank M-1
  std::vector<CVec> null_vector;  // unit u_i with R'_i u_i ~ 0
  std::vector<double> sigma_min_pos;
  std::vector<CVec> a_target;

  Index bands() const { return static_cast<Index>(R_prime.size()); }
  Index channels() const { return R_prime.empty() ? 0 : R_prime.front().rows(); }
};

// Eigendecomposition of a Hermitian matrix: eigenvalues ascending,
// eigenvectors orthonormal with the largest-magnitude entry made real
// positive. Throws if H is non-Hermitian beyond tolerance.
std::pair<Vec, CMat> eig_hermitian(const CMat& H);

// Builds the rank-(M-1) noise SCM from the zeroed-target back projection
// of the demixed estimates, averaged over frames.
NoiseScmBundle noise_scm(const Spectrogram& observed, const DemixingSet& demix,
                         Index target_channel);

// Diagnostic binary dump: per-frequency little-endian complex64 blocks
// (R', u, sigma, a_target).
void dump_bundle(const NoiseScmBundle& bundle, const std::string& path);

}  // namespace rcscme

#endif  // RCSCME_SCM_HPP
