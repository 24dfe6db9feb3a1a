#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "rcscme/scm.hpp"

using namespace rcscme;

namespace {

std::mt19937 rng(12345);

Complex complex_gauss() {
  static std::normal_distribution<double> gauss(0.0, 0.7071067811865476);
  return {gauss(rng), gauss(rng)};
}

CMat random_hermitian(Index n) {
  CMat B = CMat::NullaryExpr(n, n, [] { return complex_gauss(); });
  return hermitize(B + B.adjoint());
}

Spectrogram single_frame(const CVec& x) {
  Spectrogram spec;
  spec.bins.assign(1, x);
  return spec;
}

DemixingSet identity_demix(Index bands, Index channels) {
  DemixingSet demix;
  demix.W.assign(bands, CMat::Identity(channels, channels));
  demix.A.assign(bands, CMat::Identity(channels, channels));
  return demix;
}

}  // namespace

TEST_CASE("eig_hermitian: identity") {
  const auto [values, vectors] = eig_hermitian(CMat::Identity(3, 3));
  for (Index k = 0; k < 3; ++k) CHECK(values[k] == doctest::Approx(1.0));
  CHECK((vectors * vectors.adjoint() - CMat::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() < 1e-9);
}

TEST_CASE("eig_hermitian: diagonal eigenvalues come back ascending") {
  CMat H = CMat::Zero(3, 3);
  H(0, 0) = 3.0;
  H(1, 1) = 1.0;
  H(2, 2) = 2.0;
  const auto [values, vectors] = eig_hermitian(H);
  CHECK(values[0] == doctest::Approx(1.0));
  CHECK(values[1] == doctest::Approx(2.0));
  CHECK(values[2] == doctest::Approx(3.0));
}

TEST_CASE("eig_hermitian: reconstruction residual on random Hermitian matrices") {
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + trial % 3;
    const CMat H = random_hermitian(n);
    const auto [values, vectors] = eig_hermitian(H);
    const CMat rebuilt =
        vectors * values.asDiagonal().toDenseMatrix().cast<Complex>() *
        vectors.adjoint();
    const double scale = std::max(H.cwiseAbs().maxCoeff(), 1e-12);
    CHECK((rebuilt - H).cwiseAbs().maxCoeff() < 1e-9 * scale);
    CHECK((vectors.adjoint() * vectors - CMat::Identity(n, n))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("eig_hermitian rejects clearly non-Hermitian input") {
  CMat H = CMat::Zero(2, 2);
  H(0, 1) = Complex(1.0, 0.0);
  H(1, 0) = Complex(0.0, 0.5);
  CHECK_THROWS_AS(eig_hermitian(H), NumericalError);
}

TEST_CASE("eig_hermitian phase convention is deterministic") {
  const CMat H = random_hermitian(4);
  const auto [v1, V1] = eig_hermitian(H);
  const auto [v2, V2] = eig_hermitian(H * Complex(1.0, 0.0));
  CHECK((V1 - V2).cwiseAbs().maxCoeff() == 0.0);
  for (Index k = 0; k < 4; ++k) {
    Index arg = 0;
    V1.col(k).cwiseAbs().maxCoeff(&arg);
    CHECK(V1(arg, k).imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(V1(arg, k).real() > 0.0);
  }
}

TEST_CASE("noise_scm hand instance: M=2, J=1, identity demixing") {
  // x = (1,2)^T, target channel 0 -> noise image (0,2)^T.
  const Spectrogram X =
      single_frame((CVec(2) << Complex(1, 0), Complex(2, 0)).finished());
  const NoiseScmBundle bundle = noise_scm(X, identity_demix(1, 2), 0);

  CMat expected(2, 2);
  expected << Complex(0, 0), Complex(0, 0), Complex(0, 0), Complex(4, 0);
  CHECK((bundle.R_prime[0] - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(bundle.null_vector[0][0] - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(bundle.null_vector[0][1]) < 1e-12);
  CHECK(bundle.sigma_min_pos[0] == doctest::Approx(4.0));
  CHECK((bundle.a_target[0] - CVec::Unit(2, 0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("noise_scm rejects all-zero frames") {
  const Spectrogram X = single_frame(CVec::Zero(2));
  CHECK_THROWS_AS(noise_scm(X, identity_demix(1, 2), 0), NumericalError);
}

TEST_CASE("noise_scm M=3: rank 2 with null vector orthogonal to the noise span") {
  // Demixed noise estimates span channels 1 and 2; steering via A != I.
  const Index frames = 32;
  Spectrogram X;
  CMat A(3, 3);
  A << Complex(1, 0), Complex(0.3, 0.1), Complex(-0.2, 0.4), Complex(0.1, -0.2),
      Complex(1, 0), Complex(0.5, 0), Complex(0.3, 0.3), Complex(-0.1, 0.2),
      Complex(1, 0);
  CMat sources(3, frames);
  for (Index j = 0; j < frames; ++j)
    for (Index m = 0; m < 3; ++m) sources(m, j) = complex_gauss();
  X.bins.assign(1, A * sources);

  DemixingSet demix;
  demix.A.assign(1, A);
  demix.W.assign(1, A.inverse());

  const NoiseScmBundle bundle = noise_scm(X, demix, 0);
  const auto [values, vectors] = eig_hermitian(bundle.R_prime[0]);
  CHECK(values[0] <= 1e-8 * values[2]);
  CHECK(values[1] > 1e-6 * values[2]);  // genuinely rank 2
  const CVec& u = bundle.null_vector[0];
  CHECK(std::abs(u.norm() - 1.0) < 1e-12);
  CHECK((bundle.R_prime[0] * u).norm() < 1e-8 * values[2]);
  // Orthogonal to both noise image directions A e1, A e2.
  CHECK(std::abs(u.dot(A.col(1))) < 1e-8 * A.col(1).norm());
  CHECK(std::abs(u.dot(A.col(2))) < 1e-8 * A.col(2).norm());
  CHECK((bundle.a_target[0] - A.col(0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("noise_scm is invariant to a unimodular phase on all frames") {
  const Index frames = 16;
  Spectrogram X;
  X.bins.assign(1, CMat(2, frames));
  for (Index j = 0; j < frames; ++j)
    X.bins[0].col(j) = (CVec(2) << complex_gauss(), complex_gauss()).finished();
  Spectrogram Xphase = X;
  Xphase.bins[0] *= std::polar(1.0, 1.234);

  const DemixingSet demix = identity_demix(1, 2);
  const NoiseScmBundle b1 = noise_scm(X, demix, 0);
  const NoiseScmBundle b2 = noise_scm(Xphase, demix, 0);
  CHECK((b1.R_prime[0] - b2.R_prime[0]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bundle dump writes the documented block layout") {
  const Spectrogram X =
      single_frame((CVec(2) << Complex(1, 0), Complex(2, 0)).finished());
  const NoiseScmBundle bundle = noise_scm(X, identity_demix(1, 2), 0);
  const std::string path = "/tmp/rcscme_bundle.bin";
  dump_bundle(bundle, path);

  std::ifstream in(path, std::ios::binary);
  uint32_t header[2];
  in.read(reinterpret_cast<char*>(header), 8);
  CHECK(header[0] == 1);
  CHECK(header[1] == 2);
  float block[2 * (4 + 2 + 1 + 2)];
  in.read(reinterpret_cast<char*>(block), sizeof(block));
  CHECK(in.good());
  CHECK(block[6] == 4.0f);   // R'(1,1) real part
  CHECK(block[12] == 4.0f);  // sigma real part
  std::remove(path.c_str());
}
