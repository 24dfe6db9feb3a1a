#ifndef RCSCME_TYPES_HPP
#define RCSCME_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rcscme {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Index = Eigen::Index;

// Multichannel time-domain signal, one row per channel.
using Signal = Eigen::MatrixXd;

// Raised when a precondition or configuration is violated (CLI exit 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised on numerical failure such as a singular solve (CLI exit 3).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline CMat hermitize(const CMat& h) { return 0.5 * (h + h.adjoint()); }

}  // namespace rcscme

#endif  // RCSCME_TYPES_HPP
