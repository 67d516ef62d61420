#pragma once

#include <stdexcept>
#include <vector>

#include "cmat.hpp"
#include "rng.hpp"

namespace ctwrc {

/* One channel realization plus the power budgets and noise level that go
 * with it.  K single-antenna mobile stations (or virtual streams), K
 * antennas at the base station and the relay.
 *
 *   h_br: BS -> RS    h_mr: MS -> RS (column k = station k)
 *   h_rb: RS -> BS    h_rm: RS -> MS (row k = station k)
 */
struct ChannelSet {
  int k = 0;
  CMat h_br, h_mr, h_rb, h_rm;
  double sigma2 = 1.0;
  double p_b = 1.0;
  double p_r = 1.0;
  std::vector<double> p_m;
};

inline void validate(const ChannelSet& ch) {
  if (ch.k < 1) throw std::invalid_argument("ChannelSet: k must be >= 1");
  if (!(ch.sigma2 > 0.0)) throw std::invalid_argument("ChannelSet: sigma2 must be > 0");
  if (!(ch.p_b > 0.0) || !(ch.p_r > 0.0))
    throw std::invalid_argument("ChannelSet: power budgets must be > 0");
  if (static_cast<int>(ch.p_m.size()) != ch.k)
    throw std::invalid_argument("ChannelSet: p_m must have k entries");
  for (double p : ch.p_m)
    if (!(p > 0.0)) throw std::invalid_argument("ChannelSet: p_m entries must be > 0");
  for (const CMat* m : {&ch.h_br, &ch.h_mr, &ch.h_rb, &ch.h_rm})
    if (m->rows() != ch.k || m->cols() != ch.k)
      throw std::invalid_argument("ChannelSet: matrices must be k x k");
}

/* i.i.d. CN(0,1) entries, filled row major in a fixed order so a seed pins
 * the realization exactly.  With reciprocal=true the second-phase matrices
 * are the transposes of the first-phase ones, entry for entry. */
inline ChannelSet gen_channels(int k, std::uint64_t seed, bool reciprocal, double sigma2,
                               double p_b, double p_r, const std::vector<double>& p_m) {
  ChannelSet ch;
  ch.k = k;
  ch.sigma2 = sigma2;
  ch.p_b = p_b;
  ch.p_r = p_r;
  ch.p_m = p_m;
  ch.h_br = CMat(k, k);
  ch.h_mr = CMat(k, k);
  Rng rng(seed);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) ch.h_br(i, j) = rng.cgauss();
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) ch.h_mr(i, j) = rng.cgauss();
  if (reciprocal) {
    ch.h_rb = transpose(ch.h_br);
    ch.h_rm = transpose(ch.h_mr);
  } else {
    ch.h_rb = CMat(k, k);
    ch.h_rm = CMat(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) ch.h_rb(i, j) = rng.cgauss();
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) ch.h_rm(i, j) = rng.cgauss();
  }
  validate(ch);
  return ch;
}

}  // namespace ctwrc
