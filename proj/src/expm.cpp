#include <array>
#include <cmath>

#include "rydsim/errors.hpp"
#include "rydsim/linalg.hpp"

namespace rydsim {

namespace {

// Backward-error bounds for the diagonal Pade approximants [m/m] in double
// precision (Higham, SIAM J. Matrix Anal. Appl. 26, 2005).
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                           30270240.0,    2162160.0,    110880.0,     3960.0,
                                           90.0,          1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

ComplexMatrix solve_pade(ComplexMatrix& u, ComplexMatrix& v) {
  ComplexMatrix numer = v + u;
  v -= u;  // denominator
  Eigen::PartialPivLU<ComplexMatrix> lu(v);
  return lu.solve(numer);
}

// Low-degree approximants: U = A * sum_odd b_k A^(k-1), V = sum_even b_k A^k.
template <std::size_t N>
ComplexMatrix pade_low(const ComplexMatrix& a, const std::array<double, N>& b) {
  const Eigen::Index n = a.rows();
  const ComplexMatrix a2 = a * a;
  ComplexMatrix odd = b[1] * ComplexMatrix::Identity(n, n);
  ComplexMatrix v = b[0] * ComplexMatrix::Identity(n, n);
  ComplexMatrix power = ComplexMatrix::Identity(n, n);
  for (std::size_t k = 2; k < N; k += 2) {
    power = power * a2;
    v += b[k] * power;
    if (k + 1 < N) odd += b[k + 1] * power;
  }
  ComplexMatrix u = a * odd;
  return solve_pade(u, v);
}

ComplexMatrix pade13(const ComplexMatrix& a) {
  const auto& b = kPade13;
  const Eigen::Index n = a.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix a2 = a * a;
  const ComplexMatrix a4 = a2 * a2;
  const ComplexMatrix a6 = a4 * a2;

  ComplexMatrix tmp = b[13] * a6 + b[11] * a4 + b[9] * a2;
  ComplexMatrix inner = a6 * tmp;
  inner += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  ComplexMatrix u = a * inner;

  tmp = b[12] * a6 + b[10] * a4 + b[8] * a2;
  ComplexMatrix v = a6 * tmp;
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return solve_pade(u, v);
}

}  // namespace

ComplexMatrix expm(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("expm: expected a square matrix");
  if (!a.allFinite()) throw NumericalError("expm: input contains non-finite entries");
  const double norm = norm1(a);

  if (norm <= kTheta3) return pade_low(a, kPade3);
  if (norm <= kTheta5) return pade_low(a, kPade5);
  if (norm <= kTheta7) return pade_low(a, kPade7);
  if (norm <= kTheta9) return pade_low(a, kPade9);

  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
  ComplexMatrix result = pade13(a * std::ldexp(1.0, -squarings));
  ComplexMatrix scratch(a.rows(), a.cols());
  for (int s = 0; s < squarings; ++s) {
    scratch.noalias() = result * result;
    result.swap(scratch);
  }
  return result;
}

}  // namespace rydsim
