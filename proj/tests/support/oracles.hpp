// Reference implementations used only by tests. Each one is written from the
// textbook definition with plain loops so it shares no code with the library.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline Complex expj(double phase) { return {std::cos(phase), std::sin(phase)}; }

/// Unitary DFT matrix, [F]_{a,b} = e^{-j 2 pi ab / n} / sqrt(n).
inline Matrix dft(int n) {
  Matrix f(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) f(a, b) = expj(-2.0 * kPi * a * b / n) / std::sqrt(double(n));
  }
  return f;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

/// X[m, n] = (1/sqrt(MN)) sum_{k, l} x[k, l] e^{-j2pi mk/M} e^{+j2pi nl/N}.
inline Matrix isfft_sum(const Matrix& x) {
  const auto m = x.rows();
  const auto n = x.cols();
  Matrix out = Matrix::Zero(m, n);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      Complex acc = 0.0;
      for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index l = 0; l < n; ++l) {
          acc += x(k, l) * expj(-2.0 * kPi * double(a * k) / double(m) + 2.0 * kPi * double(b * l) / double(n));
        }
      }
      out(a, b) = acc / std::sqrt(double(m * n));
    }
  }
  return out;
}

/// Column-major stacking, entry (m, n) at n * M + m.
inline Vector vec(const Matrix& x) {
  Vector v(x.size());
  for (Eigen::Index n = 0; n < x.cols(); ++n) {
    for (Eigen::Index m = 0; m < x.rows(); ++m) v(n * x.rows() + m) = x(m, n);
  }
  return v;
}

/// Doolittle LU without pivoting: A = L U, L unit lower triangular.
inline void doolittle(const Matrix& a, Matrix& l, Matrix& u) {
  const auto n = a.rows();
  l = Matrix::Identity(n, n);
  u = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = i; k < n; ++k) {
      Complex sum = 0.0;
      for (Eigen::Index j = 0; j < i; ++j) sum += l(i, j) * u(j, k);
      u(i, k) = a(i, k) - sum;
    }
    for (Eigen::Index k = i + 1; k < n; ++k) {
      Complex sum = 0.0;
      for (Eigen::Index j = 0; j < i; ++j) sum += l(k, j) * u(j, i);
      l(k, i) = (a(k, i) - sum) / u(i, i);
    }
  }
}

/// Max entrywise deviation of block (i, k) from block (0, (k - i) mod N).
inline double block_shift_deviation(const Matrix& a, int m, int n) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const int shift = ((k - i) % n + n) % n;
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
          worst = std::max(worst, std::abs(a(i * m + r, k * m + c) - a(r, shift * m + c)));
        }
      }
    }
  }
  return worst;
}

inline double rel_max_error(const Matrix& a, const Matrix& ref) {
  return (a - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
}

/// Tail probability of the standard normal.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline Vector random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

inline Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Matrix a(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  return a;
}

/// Transmits each length-M symbol with an L_cp-sample cyclic prefix through a
/// tap-delay line, sample by sample, and returns the received symbols with
/// the prefix removed. Sample t of the stream (0-based) sits at absolute time
/// (t + 1) T_s, so tap k contributes g_k e^{j2pi nu_k (t+1) T_s} s[t - d_k].
inline std::vector<Vector> tdl_receive(const std::vector<Vector>& symbols, int cp, const std::vector<int>& delays,
                                       const std::vector<Complex>& gains, const std::vector<double>& doppler_hz,
                                       double sample_period) {
  const auto m = symbols.front().size();
  std::vector<Complex> stream;
  for (const auto& s : symbols) {
    for (Eigen::Index i = m - cp; i < m; ++i) stream.push_back(s(i));
    for (Eigen::Index i = 0; i < m; ++i) stream.push_back(s(i));
  }
  std::vector<Complex> rx(stream.size(), 0.0);
  for (std::size_t t = 0; t < stream.size(); ++t) {
    for (std::size_t k = 0; k < delays.size(); ++k) {
      if (t < std::size_t(delays[k])) continue;
      rx[t] += gains[k] * expj(2.0 * kPi * doppler_hz[k] * double(t + 1) * sample_period) * stream[t - delays[k]];
    }
  }
  std::vector<Vector> out;
  const std::size_t len = std::size_t(m + cp);
  for (std::size_t p = 0; p < symbols.size(); ++p) {
    Vector y(m);
    for (Eigen::Index i = 0; i < m; ++i) y(i) = rx[p * len + std::size_t(cp) + std::size_t(i)];
    out.push_back(y);
  }
  return out;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
