#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ctwrc {

using Cplx = std::complex<double>;
using CVec = std::vector<Cplx>;

/* Dense complex matrix, row major.  Sized for K x K channel matrices and
 * K x T signal blocks, so everything is plain O(n^3) with no blocking. */
class CMat {
 public:
  CMat() : rows_(0), cols_(0) {}
  CMat(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("CMat: negative dimension");
    data_.assign(static_cast<std::size_t>(rows) * cols, Cplx(0.0, 0.0));
  }

  static CMat identity(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Cplx& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Cplx& operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  bool same_shape(const CMat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  int rows_, cols_;
  std::vector<Cplx> data_;
};

inline CMat operator*(const CMat& a, const CMat& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("CMat multiply: shape mismatch");
  CMat c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const Cplx aik = a(i, k);
      if (aik == Cplx(0.0, 0.0)) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline CMat operator+(const CMat& a, const CMat& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("CMat add: shape mismatch");
  CMat c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

inline CMat operator-(const CMat& a, const CMat& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("CMat subtract: shape mismatch");
  CMat c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

inline CMat adjoint(const CMat& a) {
  CMat c(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
  return c;
}

inline CMat transpose(const CMat& a) {
  CMat c(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(j, i) = a(i, j);
  return c;
}

/* Rotate by 180 degrees (reverse rows and columns).  Maps upper triangular
 * to lower triangular and back; used to derive QL from QR. */
inline CMat flip_both(const CMat& a) {
  CMat c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(a.rows() - 1 - i, a.cols() - 1 - j) = a(i, j);
  return c;
}

inline double max_abs(const CMat& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

inline double max_abs_diff(const CMat& a, const CMat& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

}  // namespace ctwrc
