#pragma once

// Brute-force reference implementations used to freeze expected values.
// They share no code with the library beyond Eigen types.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXcd;

/// Digits of a flat index in a mixed radix, most significant first.
inline std::vector<int> digits(long idx, const std::vector<int>& dims) {
  std::vector<int> d(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    d[k] = static_cast<int>(idx % dims[k]);
    idx /= dims[k];
  }
  return d;
}

inline long flat(const std::vector<int>& d, const std::vector<int>& dims) {
  long idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + d[k];
  return idx;
}

/// Marginal over the factors whose `keep` flag is set, by summing over every
/// index pair that agrees on the discarded digits.
inline Mat partial_trace(const Mat& m, const std::vector<int>& dims, const std::vector<bool>& keep) {
  std::vector<int> kd;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (keep[k]) kd.push_back(dims[k]);
  long kn = 1;
  for (int d : kd) kn *= d;
  Mat out = Mat::Zero(kn, kn);
  const long n = m.rows();
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      const auto di = digits(i, dims), dj = digits(j, dims);
      bool agree = true;
      std::vector<int> ki, kj;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (keep[k]) {
          ki.push_back(di[k]);
          kj.push_back(dj[k]);
        } else if (di[k] != dj[k]) {
          agree = false;
        }
      }
      if (agree) out(flat(ki, kd), flat(kj, kd)) += m(i, j);
    }
  return out;
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
inline double trace_norm_hermitian(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  return es.eigenvalues().cwiseAbs().sum();
}

inline double log2_safe(double x) { return std::log(x) / std::log(2.0); }

/// Minimum of f over a closed interval by golden-section search (unimodal f).
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

/// Qubit state from a Bloch vector (x, y, z), |r| <= 1.
inline Mat bloch(double x, double y, double z) {
  Mat s(2, 2);
  s << std::complex<double>(1 + z, 0), std::complex<double>(x, -y), std::complex<double>(x, y),
      std::complex<double>(1 - z, 0);
  return 0.5 * s;
}

/// Smallest t with t * (left (x) sigma) >= rho, via the largest generalized
/// eigenvalue; sigma must be full rank.
inline double dmax_factor(const Mat& rho, const Mat& bound) {
  Eigen::SelfAdjointEigenSolver<Mat> es(bound);
  Eigen::VectorXd w = es.eigenvalues();
  Eigen::VectorXd inv(w.size());
  for (long i = 0; i < w.size(); ++i) inv(i) = 1.0 / std::sqrt(w(i));
  const Mat is = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
  const Mat m = is * rho * is;
  return Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (m + m.adjoint())).eigenvalues().maxCoeff();
}

/// Grid over (r, theta, phi), then coordinate steps halved down to 1e-10.
inline double spherical_search(const std::function<double(const Mat&)>& f, int grid, bool closed) {
  const double pi = std::acos(-1.0);
  const double r_max = closed ? 1.0 : 0.999999;
  auto value = [&](double r, double th, double ph) {
    if (r < 0 || r > r_max) return 1e300;
    return f(bloch(r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph), r * std::cos(th)));
  };
  double best = 1e300, p[3] = {0, 0, 0};
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; j <= grid; ++j)
      for (int k = 0; k < 2 * grid; ++k) {
        const double r = r_max * i / grid, th = pi * j / grid, ph = pi * k / grid;
        const double v = value(r, th, ph);
        if (v < best) {
          best = v;
          p[0] = r;
          p[1] = th;
          p[2] = ph;
        }
      }
  double step[3] = {r_max / grid, pi / grid, pi / grid};
  while (step[0] > 1e-10) {
    bool improved = false;
    for (int axis = 0; axis < 3; ++axis)
      for (int sgn : {-1, 1}) {
        double q[3] = {p[0], p[1], p[2]};
        q[axis] += sgn * step[axis];
        if (axis == 0) q[0] = std::clamp(q[0], 0.0, r_max);
        const double v = value(q[0], q[1], q[2]);
        if (v < best) {
          best = v;
          std::copy(q, q + 3, p);
          improved = true;
        }
      }
    if (!improved)
      for (double& s : step) s *= 0.5;
  }
  return best;
}

/// Cubic grid over (x, y, z), then coordinate steps halved down to 1e-9.
inline double cartesian_search(const std::function<double(const Mat&)>& f, int grid) {
  auto value = [&](double x, double y, double z) {
    if (std::sqrt(x * x + y * y + z * z) >= 0.999999) return 1e300;
    return f(bloch(x, y, z));
  };
  double best = 1e300, p[3] = {0, 0, 0};
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; j <= grid; ++j)
      for (int k = 0; k <= grid; ++k) {
        const double q[3] = {-0.98 + 1.96 * i / grid, -0.98 + 1.96 * j / grid, -0.98 + 1.96 * k / grid};
        const double v = value(q[0], q[1], q[2]);
        if (v < best) {
          best = v;
          std::copy(q, q + 3, p);
        }
      }
  double step = 1.96 / grid;
  while (step > 1e-9) {
    bool improved = false;
    for (int axis = 0; axis < 3; ++axis)
      for (int sgn : {-1, 1}) {
        double q[3] = {p[0], p[1], p[2]};
        q[axis] += sgn * step;
        const double v = value(q[0], q[1], q[2]);
        if (v < best) {
          best = v;
          std::copy(q, q + 3, p);
          improved = true;
        }
      }
    if (!improved) step *= 0.5;
  }
  return best;
}

/// Minimum of f over the Bloch ball. Every evaluated point is feasible, so the
/// better of two searches is still an attained value: the Cartesian one handles
/// interior kinks, the spherical one reaches the surface. With `closed` the
/// surface r = 1 (pure sigma) is included.
inline double bloch_minimize(const std::function<double(const Mat&)>& f, int grid = 24, bool closed = false) {
  return std::min(cartesian_search(f, grid), spherical_search(f, grid, closed));
}

/// left (x) sigma with sigma a qubit, left first.
inline Mat kron_qubit(const Mat& left, const Mat& sigma) {
  Mat out(left.rows() * 2, left.cols() * 2);
  for (long i = 0; i < left.rows(); ++i)
    for (long j = 0; j < left.cols(); ++j) out.block(2 * i, 2 * j, 2, 2) = left(i, j) * sigma;
  return out;
}

/// min over qubit states sigma of lambda_max((left (x) sigma)^{-1/2} rho (...)^{-1/2}),
/// in bits: -H_min when left = I and I_max when left = rho_A.
inline double min_over_qubit_sigma(const Mat& rho, const Mat& left, int grid = 24) {
  return log2_safe(bloch_minimize([&](const Mat& s) { return dmax_factor(rho, kron_qubit(left, s)); }, grid));
}

/// Positive square root of a PSD matrix; negative eigenvalues are clipped.
inline Mat psd_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

/// max over qubit sigma on the last factor of log ||sqrt(rho) sqrt(I (x) sigma)||_1^2.
inline double hmax_over_qubit_sigma(const Mat& rho, long dim_a, int grid = 24) {
  const Mat sr = psd_sqrt(rho);
  const Mat id = Mat::Identity(dim_a, dim_a);
  const double best = bloch_minimize(
      [&](const Mat& s) {
        const Mat inner = sr * kron_qubit(id, s) * sr;
        const double f = psd_sqrt(inner).trace().real();
        return -f * f;
      },
      grid, true);
  return log2_safe(-best);
}

}  // namespace oracle
