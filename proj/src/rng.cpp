#include "woldkit/rng.hpp"

#include <Eigen/QR>
#include <cmath>
#include <random>

namespace woldkit {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base ^ (salt + 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

ComplexMatrix seeded_gaussian(Index rows, Index cols, std::uint64_t seed) {
  if (rows < 0 || cols < 0)
    throw InputError("seeded gaussian: negative dimensions");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(gen);
      const double im = normal(gen);
      m(i, j) = Complex(re, im);
    }
  return m;
}

ComplexMatrix seeded_unitary(Index n, std::uint64_t seed) {
  if (n <= 0) throw InputError("seeded unitary: dimension must be positive");
  const ComplexMatrix g = seeded_gaussian(n, n, seed);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0) ? d / a : Complex(1.0, 0.0);
  }
  return q;
}

}  // namespace woldkit
