#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlap {

using Vector = std::vector<double>;

/// Base error type for the library. Subcommands map these to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Configuration / regime rejection (exit code 2 at the CLI).
struct ConfigError : Error {
  using Error::Error;
};

/// Dense row-major matrix, desk-scale only.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Vector& data() { return data_; }
  const Vector& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
double norm_inf(const Vector& a);
/// y += a*x
void add_scaled(Vector& y, double a, const Vector& x);
Vector scaled(const Vector& x, double a);
Vector subtract(const Vector& a, const Vector& b);

/// In-place LU factorization with partial pivoting. Returns false when the
/// matrix is numerically singular.
bool lu_factor(Matrix& a, std::vector<int>& piv);
Vector lu_apply(const Matrix& lu, const std::vector<int>& piv, Vector b);

/// One-shot dense solve; throws Error on singular systems.
Vector solve_dense(Matrix a, Vector b);

/// Deterministic random stream. Uses the mt19937_64 engine directly (its
/// output sequence is pinned by the standard) and maps to doubles by hand so
/// that streams are reproducible across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (deterministic, no cached spare).
  double normal();

  Vector gaussian_vector(std::size_t n);

 private:
  std::mt19937_64 eng_;
};

}  // namespace nlap
