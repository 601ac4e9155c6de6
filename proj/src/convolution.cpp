#include "lrdq/convolution.hpp"

#include <unsupported/Eigen/FFT>
#include <complex>
#include <vector>

namespace lrdq {

Eigen::VectorXd fft_convolve(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index na = a.size(), nb = b.size();
  const Eigen::Index nout = na + nb - 1;
  Eigen::Index nfft = 1;
  while (nfft < nout) nfft <<= 1;

  std::vector<double> pa(static_cast<size_t>(nfft), 0.0), pb(static_cast<size_t>(nfft), 0.0);
  std::copy(a.data(), a.data() + na, pa.begin());
  std::copy(b.data(), b.data() + nb, pb.begin());

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> fa, fb;
  fft.fwd(fa, pa);
  fft.fwd(fb, pb);
  for (size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  std::vector<double> out;
  fft.inv(out, fa);

  return Eigen::Map<const Eigen::VectorXd>(out.data(), nout);
}

Eigen::VectorXd direct_convolve(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index na = a.size(), nb = b.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(na + nb - 1);
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < nb; ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace lrdq
