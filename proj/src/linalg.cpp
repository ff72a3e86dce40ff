#include "nlap/linalg.hpp"

#include <cmath>
#include <cstdlib>

namespace nlap {

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void add_scaled(Vector& y, double a, const Vector& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

Vector scaled(const Vector& x, double a) {
  Vector y(x);
  for (double& v : y) v *= a;
  return y;
}

Vector subtract(const Vector& a, const Vector& b) {
  Vector y(a);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= b[i];
  return y;
}

bool lu_factor(Matrix& a, std::vector<int>& piv) {
  const std::size_t n = a.rows();
  piv.resize(n);
  for (std::size_t i = 0; i < n; ++i) piv[i] = static_cast<int>(i);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best > 0.0) || !std::isfinite(best)) return false;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(piv[k], piv[p]);
    }
    const double inv = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) * inv;
      a(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return true;
}

Vector lu_apply(const Matrix& lu, const std::vector<int>& piv, Vector b) {
  const std::size_t n = lu.rows();
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[piv[i]];
  for (std::size_t i = 1; i < n; ++i) {
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
    x[i] = s / lu(i, i);
  }
  return x;
}

Vector solve_dense(Matrix a, Vector b) {
  std::vector<int> piv;
  if (!lu_factor(a, piv)) throw Error("solve_dense: singular matrix");
  return lu_apply(a, piv, std::move(b));
}

double Rng::normal() {
  // Box-Muller on two fresh uniforms; the spare is discarded to keep the
  // stream position independent of call history.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

Vector Rng::gaussian_vector(std::size_t n) {
  Vector v(n);
  for (double& x : v) x = normal();
  return v;
}

}  // namespace nlap
