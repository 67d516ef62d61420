#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "channel.hpp"
#include "matfact.hpp"
#include "rng.hpp"

namespace ctwrc {

struct TooLargeError : std::runtime_error {
  explicit TooLargeError(const std::string& what) : std::runtime_error(what) {}
};

/* DPC encoding order.  mu[n] is the station encoded in slot n of the
 * second phase; q is the inverse map (mu[q[k]] = k), so station k owns row
 * q[k] of the permuted downlink system. */
struct Permutation {
  std::vector<int> mu;
  std::vector<int> q;

  static Permutation from_mu(std::vector<int> mu_in) {
    const int k = static_cast<int>(mu_in.size());
    std::vector<int> seen(k, 0);
    for (int v : mu_in) {
      if (v < 0 || v >= k || seen[v]) throw std::invalid_argument("Permutation: not a bijection");
      seen[v] = 1;
    }
    Permutation p;
    p.mu = std::move(mu_in);
    p.q.assign(k, 0);
    for (int n = 0; n < k; ++n) p.q[p.mu[n]] = n;
    return p;
  }

  static Permutation identity(int k) {
    std::vector<int> mu(k);
    std::iota(mu.begin(), mu.end(), 0);
    return from_mu(std::move(mu));
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (i) s += '-';
      s += std::to_string(mu[i]);
    }
    return s;
  }
};

/* All four triangular factors for one channel realization and one DPC
 * order, plus the interference pre-compensation pair (u_r, rp_br) and the
 * per-stream scaling constants derived from the diagonals. */
struct Triangularization {
  int k = 0;
  Permutation perm;
  CMat q_mr, r_mr;   /* H_MR = Q_MR R_MR */
  CMat q_br, r_br;   /* Q_MR^H H_BR = R_BR Q_BR */
  CMat q_rm, l_rm;   /* Phi H_RM = L_RM Q_RM */
  CMat q_rb, l_rb;   /* H_RB Q_RM^H = Q_RB L_RB */
  CMat u_r;          /* strictly upper; relay-side successive cancellation taps */
  CMat rp_br;        /* (R_MR)_diag R_MR^{-1} R_BR; same diagonal as R_BR */
  std::vector<double> alpha;     /* r_mr(k,k) / r_br(k,k), real > 0 */
  std::vector<double> sigma_k2;  /* sigma^2 / r_br(k,k)^2 */
};

inline CMat reorder_rows(const CMat& a, const std::vector<int>& mu) {
  CMat out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = a(mu[i], j);
  return out;
}

inline Triangularization triangularize(const ChannelSet& ch, const Permutation& perm) {
  validate(ch);
  if (static_cast<int>(perm.mu.size()) != ch.k)
    throw std::invalid_argument("triangularize: permutation size mismatch");
  Triangularization t;
  t.k = ch.k;
  t.perm = perm;

  Factorization f = triangular_factor(ch.h_mr, FactorMode::QR);
  t.q_mr = f.unitary;
  t.r_mr = f.triangular;

  f = triangular_factor(adjoint(t.q_mr) * ch.h_br, FactorMode::RQ);
  t.q_br = f.unitary;
  t.r_br = f.triangular;

  f = triangular_factor(reorder_rows(ch.h_rm, perm.mu), FactorMode::LQ);
  t.q_rm = f.unitary;
  t.l_rm = f.triangular;

  f = triangular_factor(ch.h_rb * adjoint(t.q_rm), FactorMode::QL);
  t.q_rb = f.unitary;
  t.l_rb = f.triangular;

  const int k = ch.k;
  t.u_r = CMat(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) t.u_r(i, j) = t.r_mr(i, j) / t.r_mr(j, j);

  /* rp_br = (R_MR)_diag R_MR^{-1} R_BR by back substitution, with the
   * diagonal scaling folded into the recurrence:
   *   rp(i,j) = r_br(i,j) - sum_{m>i} r_mr(i,m)/r_mr(m,m) * rp(m,j)
   * so rp(j,j) = r_br(j,j) lands exactly, not just to rounding. */
  t.rp_br = CMat(k, k);
  for (int j = 0; j < k; ++j) {
    for (int i = j; i >= 0; --i) {
      Cplx acc = t.r_br(i, j);
      for (int m = i + 1; m <= j; ++m) acc -= t.u_r(i, m) * t.rp_br(m, j);
      t.rp_br(i, j) = acc;
    }
  }

  t.alpha.resize(k);
  t.sigma_k2.resize(k);
  for (int i = 0; i < k; ++i) {
    const double rbr = t.r_br(i, i).real();
    t.alpha[i] = t.r_mr(i, i).real() / rbr;
    t.sigma_k2[i] = ch.sigma2 / (rbr * rbr);
  }
  return t;
}

/* Max-entry residual of the cancellation identity
 *   U_R (Rp_BR S_B + (R_MR)_diag S_M) = (R_BR - Rp_BR) S_B + (R_MR - (R_MR)_diag) S_M
 * which is what lets the relay subtract already-decoded streams.  Callers
 * compare against 1e-9 times their signal scale. */
inline double interference_identity_residual(const Triangularization& t, const CMat& s_b,
                                             const CMat& s_m) {
  if (s_b.rows() != t.k || s_m.rows() != t.k || s_b.cols() != s_m.cols())
    throw std::invalid_argument("interference_identity_residual: shape mismatch");
  const int k = t.k;
  CMat d_mr(k, k);
  for (int i = 0; i < k; ++i) d_mr(i, i) = t.r_mr(i, i);
  const CMat lhs = t.u_r * ((t.rp_br * s_b) + (d_mr * s_m));
  const CMat rhs = ((t.r_br - t.rp_br) * s_b) + ((t.r_mr - d_mr) * s_m);
  return max_abs_diff(lhs, rhs);
}

/* Every DPC order, in lexicographic order of mu.  Factorial growth, so this
 * refuses K > 6; use random_permutations beyond that. */
inline std::vector<Permutation> all_permutations(int k) {
  if (k < 1) throw std::invalid_argument("all_permutations: k must be >= 1");
  if (k > 6) throw TooLargeError("all_permutations: exhaustive enumeration capped at K = 6");
  std::vector<int> mu(k);
  std::iota(mu.begin(), mu.end(), 0);
  std::vector<Permutation> out;
  do {
    out.push_back(Permutation::from_mu(mu));
  } while (std::next_permutation(mu.begin(), mu.end()));
  return out;
}

/* n independent uniform draws (duplicates allowed), deterministic in seed. */
inline std::vector<Permutation> random_permutations(int k, int n, std::uint64_t seed) {
  if (k < 1 || n < 1) throw std::invalid_argument("random_permutations: k and n must be >= 1");
  std::vector<Permutation> out;
  out.reserve(n);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    std::vector<int> mu(k);
    std::iota(mu.begin(), mu.end(), 0);
    rng.shuffle(mu);
    out.push_back(Permutation::from_mu(std::move(mu)));
  }
  return out;
}

}  // namespace ctwrc
