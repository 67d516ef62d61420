#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmat.hpp"

namespace ctwrc {

struct RankDeficientError : std::runtime_error {
  explicit RankDeficientError(const std::string& what) : std::runtime_error(what) {}
};

enum class FactorMode { QR, RQ, LQ, QL };

struct Factorization {
  CMat unitary;     /* Q */
  CMat triangular;  /* R (upper) for QR/RQ, L (lower) for LQ/QL */
};

/* A matrix counts as rank deficient when smin/smax falls below this. */
inline constexpr double kRankTol = 1e-9;

/* Squared singular values, descending, by one-sided Jacobi: right-rotate
 * column pairs until all are mutually orthogonal, then read off the squared
 * column norms.  Plenty for K <= 16 and has no LAPACK dependency. */
inline std::vector<double> singular_values_sq(const CMat& a) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw std::invalid_argument("singular_values_sq: square nonempty matrix required");
  const int n = a.rows();
  CMat w = a;
  const double tol = 1e-14;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0;
        Cplx apq(0.0, 0.0);
        for (int i = 0; i < n; ++i) {
          app += std::norm(w(i, p));
          aqq += std::norm(w(i, q));
          apq += std::conj(w(i, p)) * w(i, q);
        }
        const double g = std::abs(apq);
        if (g <= tol * std::sqrt(app * aqq) || g == 0.0) continue;
        rotated = true;
        /* Phase-align column q so the 2x2 Gram block becomes real symmetric,
         * then apply the classic symmetric Schur rotation. */
        const Cplx ph = apq / g;  /* e^{i phi} */
        const double tau = (aqq - app) / (2.0 * g);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const Cplx up = w(i, p);
          const Cplx uq = std::conj(ph) * w(i, q);  /* phase-aligned column q */
          w(i, p) = c * up - s * uq;
          w(i, q) = s * up + c * uq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> lam(n);
  for (int p = 0; p < n; ++p) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += std::norm(w(i, p));
    lam[p] = sum;
  }
  std::sort(lam.begin(), lam.end(), std::greater<double>());
  return lam;
}

namespace detail {

/* Householder QR of a square complex matrix with the diagonal phase pulled
 * out, so R has real, non-negative diagonal entries.  That normalization
 * makes the factorization unique for full-rank input, which the layer above
 * relies on (alpha ratios come out real and positive). */
inline void householder_qr(const CMat& a, CMat& q_out, CMat& r_out) {
  const int n = a.rows();
  CMat r = a;
  CMat q = CMat::identity(n);
  std::vector<Cplx> v(n);
  for (int k = 0; k < n; ++k) {
    double normx2 = 0.0;
    for (int i = k; i < n; ++i) normx2 += std::norm(r(i, k));
    const double normx = std::sqrt(normx2);
    if (normx == 0.0) continue;
    const Cplx x0 = r(k, k);
    const Cplx phase = (x0 == Cplx(0.0, 0.0)) ? Cplx(1.0, 0.0) : x0 / std::abs(x0);
    const Cplx alpha = -phase * normx;
    double vnorm2 = 0.0;
    for (int i = k; i < n; ++i) {
      v[i] = r(i, k);
      if (i == k) v[i] -= alpha;
      vnorm2 += std::norm(v[i]);
    }
    if (vnorm2 == 0.0) continue;
    const double tau = 2.0 / vnorm2;
    /* R <- H R with H = I - tau v v^H, applied to the trailing block. */
    for (int j = k; j < n; ++j) {
      Cplx dot(0.0, 0.0);
      for (int i = k; i < n; ++i) dot += std::conj(v[i]) * r(i, j);
      dot *= tau;
      for (int i = k; i < n; ++i) r(i, j) -= dot * v[i];
    }
    /* Q <- Q H (right side, since Q accumulates H_1 H_2 ... H_{n-1}). */
    for (int i = 0; i < n; ++i) {
      Cplx dot(0.0, 0.0);
      for (int j = k; j < n; ++j) dot += q(i, j) * v[j];
      dot *= tau;
      for (int j = k; j < n; ++j) q(i, j) -= dot * std::conj(v[j]);
    }
  }
  /* Exact triangular shape, then absorb residual diagonal phases into Q. */
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) r(i, j) = Cplx(0.0, 0.0);
  for (int k = 0; k < n; ++k) {
    const Cplx d = r(k, k);
    const double mag = std::abs(d);
    if (mag == 0.0) {
      r(k, k) = Cplx(0.0, 0.0);
      continue;
    }
    const Cplx ph = d / mag;
    r(k, k) = Cplx(mag, 0.0);
    for (int j = k + 1; j < n; ++j) r(k, j) *= std::conj(ph);
    for (int i = 0; i < n; ++i) q(i, k) *= ph;
  }
  q_out = q;
  r_out = r;
}

}  // namespace detail

/* One factorization kernel, four modes.  The derived modes reuse the QR
 * kernel on flipped or adjointed input:
 *
 *   QR: A = Q R           directly
 *   QL: A = Q L           flip(A) = flip(Q) flip(L) is a QR
 *   LQ: A = L Q           A^H = Q^H L^H is a QR
 *   RQ: A = R Q           A^H = Q^H R^H is a QL
 *
 * Flips and adjoints keep the normalized diagonal real and non-negative, so
 * every mode inherits uniqueness from the QR kernel. */
inline Factorization triangular_factor(const CMat& a, FactorMode mode) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw std::invalid_argument("triangular_factor: square nonempty matrix required");
  {
    const std::vector<double> lam = singular_values_sq(a);
    const double smax = std::sqrt(lam.front());
    const double smin = std::sqrt(lam.back());
    if (smax == 0.0 || smin < kRankTol * smax)
      throw RankDeficientError("triangular_factor: rank deficient to tolerance 1e-9");
  }
  Factorization f;
  switch (mode) {
    case FactorMode::QR: {
      detail::householder_qr(a, f.unitary, f.triangular);
      break;
    }
    case FactorMode::QL: {
      CMat qf, rf;
      detail::householder_qr(flip_both(a), qf, rf);
      f.unitary = flip_both(qf);
      f.triangular = flip_both(rf);
      break;
    }
    case FactorMode::LQ: {
      CMat qf, rf;
      detail::householder_qr(adjoint(a), qf, rf);
      f.unitary = adjoint(qf);
      f.triangular = adjoint(rf);
      break;
    }
    case FactorMode::RQ: {
      CMat qf, rf;
      detail::householder_qr(flip_both(adjoint(a)), qf, rf);
      f.unitary = adjoint(flip_both(qf));
      f.triangular = adjoint(flip_both(rf));
      break;
    }
  }
  return f;
}

/* |det A|, read off the QR diagonal (unitary factors have unit modulus). */
inline double abs_det(const CMat& a) {
  CMat q, r;
  detail::householder_qr(a, q, r);
  double d = 1.0;
  for (int k = 0; k < a.rows(); ++k) d *= r(k, k).real();
  return std::abs(d);
}

}  // namespace ctwrc
