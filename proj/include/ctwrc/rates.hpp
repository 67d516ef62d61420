#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "channel.hpp"
#include "triangulate.hpp"

namespace ctwrc {

/* Per-stream transmit powers.  p_b[k] is the BS power on stream k, p_r[k]
 * the relay power on stream k; MS powers live in ChannelSet::p_m. */
struct PowerProfile {
  std::vector<double> p_b;
  std::vector<double> p_r;

  static PowerProfile equal(const ChannelSet& ch) {
    PowerProfile p;
    p.p_b.assign(ch.k, ch.p_b / ch.k);
    p.p_r.assign(ch.k, ch.p_r / ch.k);
    return p;
  }
};

struct Weights {
  std::vector<double> xi_b;
  std::vector<double> xi_m;

  static Weights uniform(int k) {
    Weights w;
    w.xi_b.assign(k, 1.0);
    w.xi_m.assign(k, 1.0);
    return w;
  }
};

struct Theorem2Record {
  double rho_b = 0.0;
  double rho_m = 0.0;
  std::vector<double> rho_bk;
  std::vector<double> rho_mk;
  bool c1 = false, c2 = false, c3 = false, c4 = false;
};

struct RateReport {
  std::vector<double> r_b_to_r;  /* BS -> RS, per stream */
  std::vector<double> r_m_to_r;  /* MS -> RS */
  std::vector<double> r_r_to_m;  /* RS -> MS */
  std::vector<double> r_r_to_b;  /* RS -> BS */
  std::vector<double> r_b;       /* end-to-end downlink, min of the two hops */
  std::vector<double> r_m;       /* end-to-end uplink */
  double sum_rate = 0.0;
  double weighted_sum_rate = 0.0;
};

/* [log2 x]^+ as (1/2) log2(1 + (x-1)^+).  The first-phase rates and the MP
 * solver both go through this identity, so the clamp behaves identically on
 * both paths (and x = 0 is safe). */
inline double half_log2_pos(double x) {
  return 0.5 * std::log2(1.0 + std::max(x - 1.0, 0.0));
}

inline double half_log2_1p(double snr) { return 0.5 * std::log2(1.0 + snr); }

/* The four per-stream link rates of the two-phase scheme.  Station k is
 * served on row q[k] of the permuted second-phase system. */
inline RateReport stream_rates(const Triangularization& t, const PowerProfile& pw,
                               const ChannelSet& ch) {
  if (static_cast<int>(pw.p_b.size()) != t.k || static_cast<int>(pw.p_r.size()) != t.k)
    throw std::invalid_argument("stream_rates: power profile size mismatch");
  for (double p : pw.p_b)
    if (p < 0.0) throw std::invalid_argument("stream_rates: negative BS power");
  for (double p : pw.p_r)
    if (p < 0.0) throw std::invalid_argument("stream_rates: negative RS power");
  RateReport rep;
  const int k = t.k;
  rep.r_b_to_r.resize(k);
  rep.r_m_to_r.resize(k);
  rep.r_r_to_m.resize(k);
  rep.r_r_to_b.resize(k);
  for (int i = 0; i < k; ++i) {
    const int qi = t.perm.q[i];
    const double rbr2 = t.r_br(i, i).real() * t.r_br(i, i).real();
    const double rmr2 = t.r_mr(i, i).real() * t.r_mr(i, i).real();
    const double lrm2 = t.l_rm(qi, qi).real() * t.l_rm(qi, qi).real();
    const double lrb2 = t.l_rb(qi, qi).real() * t.l_rb(qi, qi).real();
    rep.r_b_to_r[i] = half_log2_pos(rbr2 * pw.p_b[i] / ch.sigma2);
    rep.r_m_to_r[i] = half_log2_pos(rmr2 * ch.p_m[i] / ch.sigma2);
    rep.r_r_to_m[i] = half_log2_1p(lrm2 * pw.p_r[i] / ch.sigma2);
    rep.r_r_to_b[i] = half_log2_1p(lrb2 * pw.p_r[i] / ch.sigma2);
  }
  return rep;
}

/* Fold the hop rates into end-to-end stream rates and the two totals. */
inline void achievable_tuple(RateReport& rep, const Weights& w) {
  const int k = static_cast<int>(rep.r_b_to_r.size());
  if (static_cast<int>(w.xi_b.size()) != k || static_cast<int>(w.xi_m.size()) != k)
    throw std::invalid_argument("achievable_tuple: weight size mismatch");
  rep.r_b.resize(k);
  rep.r_m.resize(k);
  rep.sum_rate = 0.0;
  rep.weighted_sum_rate = 0.0;
  for (int i = 0; i < k; ++i) {
    rep.r_b[i] = std::min(rep.r_b_to_r[i], rep.r_r_to_m[i]);
    rep.r_m[i] = std::min(rep.r_m_to_r[i], rep.r_r_to_b[i]);
    rep.sum_rate += rep.r_b[i] + rep.r_m[i];
    rep.weighted_sum_rate += w.xi_b[i] * rep.r_b[i] + w.xi_m[i] * rep.r_m[i];
  }
}

enum class CutsetMode { ExactEqualPower, HighSnr };

struct CutsetBounds {
  double dl = 0.0;
  double ul = 0.0;
};

/* Cut-set outer bound on the sum rates, with equal-power covariances at the
 * BS and relay (Q_B = (P_B/K) I, Q_R = (P_R/K) I) and Q_M = diag(P_M).
 * Each direction is the smaller of its two cuts.  The high-SNR mode drops
 * the "1 +" and is only meaningful where every log argument exceeds one. */
inline CutsetBounds cutset_bounds(const ChannelSet& ch, CutsetMode mode) {
  validate(ch);
  const int k = ch.k;
  const std::vector<double> lam_br = singular_values_sq(ch.h_br);
  const std::vector<double> lam_rm = singular_values_sq(ch.h_rm);
  const std::vector<double> lam_rb = singular_values_sq(ch.h_rb);
  CMat h_mr_scaled = ch.h_mr;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) h_mr_scaled(i, j) *= std::sqrt(ch.p_m[j]);
  const std::vector<double> lam_mr_p = singular_values_sq(h_mr_scaled);  /* H Q_M H^H spectrum */
  const std::vector<double> lam_mr = singular_values_sq(ch.h_mr);

  double bs_rs = 0.0, rs_ms = 0.0, ms_rs = 0.0, rs_bs = 0.0;
  if (mode == CutsetMode::ExactEqualPower) {
    for (int i = 0; i < k; ++i) {
      bs_rs += half_log2_1p(lam_br[i] * ch.p_b / (k * ch.sigma2));
      rs_ms += half_log2_1p(lam_rm[i] * ch.p_r / (k * ch.sigma2));
      ms_rs += half_log2_1p(lam_mr_p[i] / ch.sigma2);
      rs_bs += half_log2_1p(lam_rb[i] * ch.p_r / (k * ch.sigma2));
    }
  } else {
    for (int i = 0; i < k; ++i) {
      bs_rs += 0.5 * std::log2(lam_br[i] * ch.p_b / (k * ch.sigma2));
      rs_ms += 0.5 * std::log2(lam_rm[i] * ch.p_r / (k * ch.sigma2));
      ms_rs += 0.5 * std::log2(lam_mr[i] * ch.p_m[i] / ch.sigma2);
      rs_bs += 0.5 * std::log2(lam_rb[i] * ch.p_r / (k * ch.sigma2));
    }
  }
  CutsetBounds b;
  b.dl = std::min(bs_rs, rs_ms);
  b.ul = std::min(ms_rs, rs_bs);
  return b;
}

/* Budget-balance conditions under which the scheme meets the cut-set bound
 * asymptotically.  rho_b / rho_m compare spectra geometrically; the per-
 * stream ratios compare the triangular diagonals the scheme actually sees. */
inline Theorem2Record check_theorem2(const Triangularization& t, const ChannelSet& ch) {
  const int k = t.k;
  Theorem2Record rec;
  const std::vector<double> lam_br = singular_values_sq(ch.h_br);
  const std::vector<double> lam_rm = singular_values_sq(ch.h_rm);
  const std::vector<double> lam_mr = singular_values_sq(ch.h_mr);
  const std::vector<double> lam_rb = singular_values_sq(ch.h_rb);
  double prod_b = 1.0, prod_m = 1.0, geo_pm = 1.0;
  rec.rho_bk.resize(k);
  rec.rho_mk.resize(k);
  for (int i = 0; i < k; ++i) {
    prod_b *= lam_rm[i] / lam_br[i];
    prod_m *= lam_mr[i] / lam_rb[i];
    geo_pm *= ch.p_m[i];
    const int qi = t.perm.q[i];
    const double rbr2 = t.r_br(i, i).real() * t.r_br(i, i).real();
    const double rmr2 = t.r_mr(i, i).real() * t.r_mr(i, i).real();
    const double lrm2 = t.l_rm(qi, qi).real() * t.l_rm(qi, qi).real();
    const double lrb2 = t.l_rb(qi, qi).real() * t.l_rb(qi, qi).real();
    rec.rho_bk[i] = lrm2 / rbr2;
    rec.rho_mk[i] = rmr2 / lrb2;
  }
  rec.rho_b = std::pow(prod_b, 1.0 / k);
  rec.rho_m = std::pow(prod_m, 1.0 / k);
  geo_pm = std::pow(geo_pm, 1.0 / k);

  double min_bk = rec.rho_bk[0], max_bk = rec.rho_bk[0];
  double min_mk = rec.rho_mk[0] * ch.p_m[0], max_mk = rec.rho_mk[0] * ch.p_m[0];
  for (int i = 1; i < k; ++i) {
    min_bk = std::min(min_bk, rec.rho_bk[i]);
    max_bk = std::max(max_bk, rec.rho_bk[i]);
    min_mk = std::min(min_mk, rec.rho_mk[i] * ch.p_m[i]);
    max_mk = std::max(max_mk, rec.rho_mk[i] * ch.p_m[i]);
  }
  rec.c1 = ch.p_b <= std::min(rec.rho_b, min_bk) * ch.p_r;
  rec.c2 = ch.p_b >= std::max(rec.rho_b, max_bk) * ch.p_r;
  rec.c3 = ch.p_r <= std::min(rec.rho_m * geo_pm, min_mk);
  rec.c4 = ch.p_r >= std::max(rec.rho_m * geo_pm, max_mk);
  return rec;
}

}  // namespace ctwrc
