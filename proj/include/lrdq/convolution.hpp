#pragma once

#include <Eigen/Dense>

namespace lrdq {

// Linear convolution out[j] = sum_k a[k] b[j-k], j = 0 .. na+nb-2,
// via real FFT with zero padding to a power of two.
Eigen::VectorXd fft_convolve(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// O(na*nb) reference used as the oracle in tests.
Eigen::VectorXd direct_convolve(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace lrdq
