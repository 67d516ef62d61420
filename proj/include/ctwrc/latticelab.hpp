#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cmat.hpp"
#include "rng.hpp"
#include "triangulate.hpp"

namespace ctwrc {

/* Noiseless end-to-end check of the nested-lattice modular algebra.  Complex
 * symbols are treated as two independent real scaled-integer lattices, so
 * "mod Lambda" is a per-component centered wrap.  With sigma^2 = 0 the MMSE
 * scaling beta is exactly 1 and every decode step must recover its codeword
 * exactly; any residual is a logic error, not noise. */

/* Centered wrap onto [-q/2, q/2).  The half boundary maps to -q/2. */
inline double wrap_mod(double x, double q) {
  return x - q * std::floor(x / q + 0.5);
}

inline Cplx wrap_mod(Cplx x, double q) {
  return {wrap_mod(x.real(), q), wrap_mod(x.imag(), q)};
}

inline CVec mod_lattice(const CVec& x, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("mod_lattice: spacing must be > 0");
  CVec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = wrap_mod(x[i], q);
  return out;
}

/* Nearest point of the codeword grid q_c (Z + iZ); the decode decision.
 * Every decoder quantizes before its final wrap, which turns accumulated
 * float fuzz back into the exact lattice point. */
inline Cplx quantize_grid(Cplx x, double q_c) {
  return {q_c * std::round(x.real() / q_c), q_c * std::round(x.imag() / q_c)};
}

/* Per-stream lattice chain Lambda_M(k) subset Lambda_B(k) subset Lambda_C(k):
 * spacings q_b = b_k q_c and q_m = m_k q_b.  The BS codebook is the grid
 * inside the cell of Lambda_B (b_k points per real dimension), the MS
 * codebook the grid inside the cell of Lambda_M (b_k m_k points).  Relay
 * broadcast and DPC wrap by the coarsest lattice Lambda_M, whose cosets
 * absorb both shaping offsets. */
struct LatticeChain {
  int k = 0;
  int t = 0;                      /* symbols per frame */
  std::vector<double> q_c, q_b, q_m;
  std::vector<int> b, m;          /* nesting ratios, >= 1 */
  std::vector<CVec> d_b, d_m, d_r;
  std::vector<double> beta_m;     /* 1 exactly in the noiseless lab */
};

namespace detail {

inline CVec draw_dither(Rng& rng, double q, int t) {
  CVec d(t);
  for (int i = 0; i < t; ++i)
    d[i] = {(rng.uniform() - 0.5) * q, (rng.uniform() - 0.5) * q};
  return d;
}

/* Uniform codeword: grid points of q_c inside the centered cell of width
 * n q_c, i.e. q_c * j for j in [-floor(n/2), n - 1 - floor(n/2)]. */
inline CVec draw_codeword(Rng& rng, double q_c, int n, int t) {
  CVec c(t);
  const int off = n / 2;
  for (int i = 0; i < t; ++i) {
    const int jr = static_cast<int>(rng.below(static_cast<std::uint64_t>(n))) - off;
    const int ji = static_cast<int>(rng.below(static_cast<std::uint64_t>(n))) - off;
    c[i] = {q_c * jr, q_c * ji};
  }
  return c;
}

}  // namespace detail

inline LatticeChain make_noiseless_chain(int k, int t, const std::vector<double>& q_c,
                                         const std::vector<int>& b, const std::vector<int>& m,
                                         Rng& rng) {
  if (k < 1 || t < 1) throw std::invalid_argument("make_noiseless_chain: k and t must be >= 1");
  if (static_cast<int>(q_c.size()) != k || static_cast<int>(b.size()) != k ||
      static_cast<int>(m.size()) != k)
    throw std::invalid_argument("make_noiseless_chain: per-stream size mismatch");
  LatticeChain ch;
  ch.k = k;
  ch.t = t;
  ch.q_c = q_c;
  ch.b = b;
  ch.m = m;
  ch.q_b.resize(k);
  ch.q_m.resize(k);
  ch.beta_m.assign(k, 1.0);
  for (int i = 0; i < k; ++i) {
    if (!(q_c[i] > 0.0) || b[i] < 1 || m[i] < 1)
      throw std::invalid_argument("make_noiseless_chain: bad spacing or nesting ratio");
    ch.q_b[i] = b[i] * q_c[i];
    ch.q_m[i] = m[i] * ch.q_b[i];
  }
  ch.d_b.resize(k);
  ch.d_m.resize(k);
  ch.d_r.resize(k);
  for (int i = 0; i < k; ++i) {
    ch.d_b[i] = detail::draw_dither(rng, ch.q_b[i], t);
    ch.d_m[i] = detail::draw_dither(rng, ch.q_m[i], t);
    ch.d_r[i] = detail::draw_dither(rng, ch.q_m[i], t);
  }
  return ch;
}

/* Default chain: q_c = 1, b = 4, m = 2 for every stream. */
inline LatticeChain make_noiseless_chain(int k, int t, Rng& rng) {
  return make_noiseless_chain(k, t, std::vector<double>(k, 1.0), std::vector<int>(k, 4),
                              std::vector<int>(k, 2), rng);
}

/* BS stream encode: s_B = (c_B - v - d_B) mod Lambda_B, with v the known
 * residual interference from already-encoded lower streams. */
inline CVec encode_bs(const CVec& c, const CVec& v, const CVec& d, double q_b) {
  if (c.size() != v.size() || c.size() != d.size())
    throw std::invalid_argument("encode_bs: length mismatch");
  CVec s(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) s[i] = wrap_mod(c[i] - v[i] - d[i], q_b);
  return s;
}

/* MS stream encode: s_M = (1/alpha) (c_M - d_M) mod Lambda_M, so that after
 * the channel scales it by alpha the relay sees the plain wrapped word. */
inline CVec encode_ms(const CVec& c, const CVec& d, double alpha, double q_m) {
  if (c.size() != d.size()) throw std::invalid_argument("encode_ms: length mismatch");
  if (!(alpha > 0.0)) throw std::invalid_argument("encode_ms: alpha must be > 0");
  CVec s(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) s[i] = wrap_mod(c[i] - d[i], q_m) / alpha;
  return s;
}

/* Everything one frame carries, kept so tests can poke at the intermediate
 * quantities.  ct_b = c_B - Q_B and ct_m = c_M - Q_M are the dithered
 * lattice words actually superimposed at the relay; each end node knows its
 * own and subtracts it during decode. */
struct LatticeFrame {
  std::vector<CVec> c_b, c_m;    /* messages */
  std::vector<CVec> v;           /* known BS-side interference */
  std::vector<CVec> s_b, s_m;    /* transmitted streams */
  std::vector<CVec> ct_b, ct_m;
  std::vector<CVec> y_r;         /* relay phase-1 rows (triangular model) */
  std::vector<CVec> s_r;         /* relay words (c~_B + c~_M) mod Lambda_M */
  std::vector<CVec> x_dpc;       /* phase-2 relay transmit, slot order */
  std::vector<CVec> y_slot;      /* rows of L_RM X; station k listens on slot q_k */
  std::vector<CVec> y_b;         /* rows of L_RB X at the BS */
  std::vector<CVec> c_b_hat;     /* per-station decode of the BS message */
  std::vector<CVec> c_m_hat;     /* BS decode of each station's message */
};

/* Draw messages and run both encoders.  Stream K-1 first: v_k needs the
 * already-encoded streams below it. */
inline LatticeFrame build_frame(const Triangularization& tri, const LatticeChain& ch, Rng& rng) {
  if (tri.k != ch.k) throw std::invalid_argument("build_frame: k mismatch");
  const int k = ch.k, t = ch.t;
  LatticeFrame f;
  f.c_b.resize(k);
  f.c_m.resize(k);
  f.v.assign(k, CVec(t));
  f.s_b.resize(k);
  f.s_m.resize(k);
  f.ct_b.assign(k, CVec(t));
  f.ct_m.assign(k, CVec(t));
  for (int i = 0; i < k; ++i) {
    f.c_b[i] = detail::draw_codeword(rng, ch.q_c[i], ch.b[i], t);
    f.c_m[i] = detail::draw_codeword(rng, ch.q_c[i], ch.b[i] * ch.m[i], t);
  }
  for (int i = k - 1; i >= 0; --i) {
    for (int j = i + 1; j < k; ++j) {
      const Cplx w = tri.rp_br(i, j) / tri.r_br(i, i);
      for (int n = 0; n < t; ++n) f.v[i][n] += w * f.s_b[j][n];
    }
    f.s_b[i] = encode_bs(f.c_b[i], f.v[i], ch.d_b[i], ch.q_b[i]);
    f.s_m[i] = encode_ms(f.c_m[i], ch.d_m[i], tri.alpha[i], ch.q_m[i]);
    for (int n = 0; n < t; ++n) {
      f.ct_b[i][n] = f.s_b[i][n] + ch.d_b[i][n] + f.v[i][n];
      f.ct_m[i][n] = tri.alpha[i] * f.s_m[i][n] + ch.d_m[i][n];
    }
  }
  return f;
}

/* Phase-1 channel in the equivalent triangular model, noiseless:
 * Y~_R = R_BR S_B + R_MR S_M. */
inline void channel_phase1(const Triangularization& tri, LatticeFrame& f) {
  const int k = tri.k;
  const int t = static_cast<int>(f.s_b[0].size());
  f.y_r.assign(k, CVec(t));
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      const Cplx a = tri.r_br(i, j), b = tri.r_mr(i, j);
      for (int n = 0; n < t; ++n) f.y_r[i][n] += a * f.s_b[j][n] + b * f.s_m[j][n];
    }
}

/* Relay decode, bottom stream up.  Each step strips the already-decoded
 * streams through u_r, rescales, re-adds the dithers, and reads off the
 * exact lattice word c~_B + c~_M; reconstruction for the next step uses
 * only decoded quantities, never the transmitted signals.  The broadcast
 * word s_R is the sum wrapped into the cell of Lambda_M. */
inline std::vector<CVec> relay_frame(const Triangularization& tri, const LatticeChain& ch,
                                     LatticeFrame& f) {
  if (tri.k != ch.k) throw std::invalid_argument("relay_frame: k mismatch");
  if (static_cast<int>(f.y_r.size()) != ch.k)
    throw std::invalid_argument("relay_frame: missing phase-1 observations");
  const int k = ch.k, t = ch.t;
  f.s_r.assign(k, CVec(t));
  std::vector<CVec> s_tilde(k, CVec(t));  /* reconstructed rows of S~ */
  for (int i = k - 1; i >= 0; --i) {
    for (int n = 0; n < t; ++n) {
      Cplx w(0.0, 0.0);
      for (int j = i + 1; j < k; ++j) w += tri.u_r(i, j) * s_tilde[j][n];
      const Cplx y = (f.y_r[i][n] - w) / tri.r_br(i, i);
      const Cplx word = quantize_grid(y + ch.d_b[i][n] + ch.d_m[i][n], ch.q_c[i]);
      f.s_r[i][n] = wrap_mod(word, ch.q_m[i]);
      s_tilde[i][n] = tri.r_br(i, i) * (word - ch.d_b[i][n] - ch.d_m[i][n]);
    }
  }
  return f.s_r;
}

/* Phase-2 DPC encode in slot order.  Slot n serves station mu[n]; the known
 * interference from earlier slots is pre-subtracted inside the mod. */
inline void dpc_encode(const Triangularization& tri, const LatticeChain& ch, LatticeFrame& f) {
  const int k = ch.k, t = ch.t;
  f.x_dpc.assign(k, CVec(t));
  for (int n = 0; n < k; ++n) {
    const int st = tri.perm.mu[n];
    const Cplx l = tri.l_rm(n, n);
    for (int s = 0; s < t; ++s) {
      Cplx acc(0.0, 0.0);
      for (int j = 0; j < n; ++j) acc += tri.l_rm(n, j) * f.x_dpc[j][s];
      f.x_dpc[n][s] =
          wrap_mod(f.s_r[st][s] - ch.beta_m[st] * acc / l - ch.d_r[st][s], ch.q_m[st]);
    }
  }
}

/* Noiseless phase-2 observations: slot rows of L_RM X for the stations and
 * rows of L_RB X for the BS. */
inline void channel_phase2(const Triangularization& tri, LatticeFrame& f) {
  const int k = tri.k;
  const int t = static_cast<int>(f.x_dpc[0].size());
  f.y_slot.assign(k, CVec(t));
  f.y_b.assign(k, CVec(t));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= i; ++j) {
      const Cplx a = tri.l_rm(i, j), b = tri.l_rb(i, j);
      for (int n = 0; n < t; ++n) {
        f.y_slot[i][n] += a * f.x_dpc[j][n];
        f.y_b[i][n] += b * f.x_dpc[j][n];
      }
    }
}

/* MS receiver for one station: mod front end on its own slot recovers s_R
 * (the DPC mod already disposed of the inter-slot interference), then the
 * station subtracts its own lattice word and wraps by Lambda_B.  The relay
 * wrap lives in Lambda_M, a sublattice of Lambda_B, so it drops out. */
inline CVec ms_decode(const Triangularization& tri, const LatticeChain& ch,
                      const LatticeFrame& f, int station) {
  const int qi = tri.perm.q[station];
  const Cplx l = tri.l_rm(qi, qi);
  const double qc = ch.q_c[station], qb = ch.q_b[station], qm = ch.q_m[station];
  const CVec& y = f.y_slot[qi];
  CVec out(y.size());
  for (std::size_t s = 0; s < y.size(); ++s) {
    const Cplx raw = ch.beta_m[station] * y[s] / l + ch.d_r[station][s];
    const Cplx s_hat = wrap_mod(quantize_grid(raw, qc), qm);
    out[s] = wrap_mod(quantize_grid(s_hat - f.ct_m[station][s], qc), qb);
  }
  return out;
}

/* BS receiver: forward substitution on the lower-triangular phase-2 system
 * recovers the relay transmit, redoing the DPC bookkeeping per slot gives
 * s_R, and subtracting the BS's own lattice word mod Lambda_M leaves c_M. */
inline std::vector<CVec> bs_decode(const Triangularization& tri, const LatticeChain& ch,
                                   LatticeFrame& f) {
  const int k = ch.k, t = ch.t;
  std::vector<CVec> x_hat(k, CVec(t));
  f.c_m_hat.assign(k, CVec(t));
  for (int n = 0; n < k; ++n) {
    const int st = tri.perm.mu[n];
    const Cplx l = tri.l_rm(n, n);
    for (int s = 0; s < t; ++s) {
      Cplx acc = f.y_b[n][s];
      for (int j = 0; j < n; ++j) acc -= tri.l_rb(n, j) * x_hat[j][s];
      x_hat[n][s] = acc / tri.l_rb(n, n);
      Cplx tm(0.0, 0.0);
      for (int j = 0; j < n; ++j) tm += tri.l_rm(n, j) * x_hat[j][s];
      const Cplx raw = x_hat[n][s] + ch.beta_m[st] * tm / l + ch.d_r[st][s];
      const Cplx s_hat = wrap_mod(quantize_grid(raw, ch.q_c[st]), ch.q_m[st]);
      f.c_m_hat[st][s] =
          wrap_mod(quantize_grid(s_hat - f.ct_b[st][s], ch.q_c[st]), ch.q_m[st]);
    }
  }
  return f.c_m_hat;
}

struct NoiselessReport {
  int component_errors_b = 0;   /* BS message mismatches, decoded at the MSs */
  int component_errors_m = 0;   /* MS message mismatches, decoded at the BS */
  double max_residual = 0.0;
  bool ok = false;
};

/* One full frame through both phases.  With inject set, one relay word is
 * shifted off the lattice before phase 2; the decoders must then miss,
 * which is the negative control for the comparison itself. */
inline NoiselessReport run_noiseless_frame(const Triangularization& tri, const LatticeChain& ch,
                                           Rng& rng, bool inject = false) {
  LatticeFrame f = build_frame(tri, ch, rng);
  channel_phase1(tri, f);
  relay_frame(tri, ch, f);
  if (inject) f.s_r[0][0] += Cplx(0.37 * ch.q_b[0], 0.0);
  dpc_encode(tri, ch, f);
  channel_phase2(tri, f);
  f.c_b_hat.resize(ch.k);
  for (int st = 0; st < ch.k; ++st) f.c_b_hat[st] = ms_decode(tri, ch, f, st);
  bs_decode(tri, ch, f);

  NoiselessReport rep;
  const double tol = 1e-9;
  for (int i = 0; i < ch.k; ++i)
    for (int n = 0; n < ch.t; ++n) {
      const double eb = std::abs(f.c_b_hat[i][n] - f.c_b[i][n]);
      const double em = std::abs(f.c_m_hat[i][n] - f.c_m[i][n]);
      if (eb > tol) ++rep.component_errors_b;
      if (em > tol) ++rep.component_errors_m;
      if (eb <= tol) rep.max_residual = std::max(rep.max_residual, eb);
      if (em <= tol) rep.max_residual = std::max(rep.max_residual, em);
    }
  rep.ok = (rep.component_errors_b == 0 && rep.component_errors_m == 0);
  return rep;
}

}  // namespace ctwrc
