#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "rates.hpp"
#include "triangulate.hpp"

namespace ctwrc {

/* Weighted sum-rate power allocation as a monotonic program over
 * z in R^{2K}: z_i = 1 + SNR_i, first K entries downlink, last K uplink.
 * Solved by polyblock outer approximation; the projection onto the feasible
 * boundary splits into three closed-form / scalar subproblems. */
struct MpProblem {
  int k = 0;
  std::vector<double> xi;                          /* 2K objective weights */
  std::vector<double> r_br2, r_mr2, l_rm2, l_rb2;  /* squared diagonals, station order */
  std::vector<double> sigma_k2;                    /* sigma^2 / r_br2 */
  double sigma2 = 1.0;
  double p_b = 1.0;
  double p_r = 1.0;
  std::vector<double> p_m;
};

inline MpProblem make_mp_problem(const Triangularization& t, const ChannelSet& ch,
                                 const Weights& w) {
  if (static_cast<int>(w.xi_b.size()) != t.k || static_cast<int>(w.xi_m.size()) != t.k)
    throw std::invalid_argument("make_mp_problem: weight size mismatch");
  MpProblem pr;
  pr.k = t.k;
  pr.sigma2 = ch.sigma2;
  pr.p_b = ch.p_b;
  pr.p_r = ch.p_r;
  pr.p_m = ch.p_m;
  pr.xi.resize(2 * t.k);
  pr.r_br2.resize(t.k);
  pr.r_mr2.resize(t.k);
  pr.l_rm2.resize(t.k);
  pr.l_rb2.resize(t.k);
  pr.sigma_k2 = t.sigma_k2;
  double xi_sum = 0.0;
  for (int i = 0; i < t.k; ++i) {
    if (w.xi_b[i] < 0.0 || w.xi_m[i] < 0.0)
      throw std::invalid_argument("make_mp_problem: negative weight");
    xi_sum += w.xi_b[i] + w.xi_m[i];
    pr.xi[i] = w.xi_b[i];
    pr.xi[t.k + i] = w.xi_m[i];
    const int qi = t.perm.q[i];
    pr.r_br2[i] = t.r_br(i, i).real() * t.r_br(i, i).real();
    pr.r_mr2[i] = t.r_mr(i, i).real() * t.r_mr(i, i).real();
    pr.l_rm2[i] = t.l_rm(qi, qi).real() * t.l_rm(qi, qi).real();
    pr.l_rb2[i] = t.l_rb(qi, qi).real() * t.l_rb(qi, qi).real();
  }
  if (!(xi_sum > 0.0)) throw std::invalid_argument("make_mp_problem: all weights zero");
  return pr;
}

/* Objective Gamma(z) = sum_i (xi_i / 2) log2 z_i, in bits. */
inline double mp_gamma(const MpProblem& pr, const std::vector<double>& z) {
  double g = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) g += 0.5 * pr.xi[i] * std::log2(z[i]);
  return g;
}

/* The 2K effective SNRs a power profile actually delivers; each direction
 * is limited by the weaker of its two hops, with the first hop clamped at
 * the noise floor. */
inline std::vector<double> mp_snr(const MpProblem& pr, const PowerProfile& pw) {
  std::vector<double> s(2 * pr.k);
  for (int i = 0; i < pr.k; ++i) {
    const double first_dl = std::max(pr.r_br2[i] * pw.p_b[i] / pr.sigma2 - 1.0, 0.0);
    s[i] = std::min(first_dl, pr.l_rm2[i] * pw.p_r[i] / pr.sigma2);
    const double first_ul = std::max(pr.r_mr2[i] * pr.p_m[i] / pr.sigma2 - 1.0, 0.0);
    s[pr.k + i] = std::min(first_ul, pr.l_rb2[i] * pw.p_r[i] / pr.sigma2);
  }
  return s;
}

struct P1Result {
  double theta = 0.0;
  std::vector<double> p;
};

/* max-min level over the BS budget alone:
 *   theta1 = max_{sum p <= P_B} min_k (1 + (p_k/sigma_k^2 - 1)^+) / z_k
 * Water pours only into streams whose floor 1/z_k sits below the final
 * level; the bracket scan finds the active set in closed form. */
inline P1Result solve_p1(const std::vector<double>& z, const std::vector<double>& sigma_k2,
                         double p_b) {
  const int k = static_cast<int>(z.size());
  if (k == 0 || sigma_k2.size() != z.size())
    throw std::invalid_argument("solve_p1: size mismatch");
  if (!(p_b > 0.0)) throw std::invalid_argument("solve_p1: budget must be > 0");
  for (int i = 0; i < k; ++i)
    if (!(z[i] > 0.0) || !(sigma_k2[i] > 0.0))
      throw std::invalid_argument("solve_p1: z and sigma_k2 must be > 0");

  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return z[a] < z[b] || (z[a] == z[b] && a < b); });

  /* suffix[l] = sum_{j >= l} z_pi(j) sigma_pi(j)^2 over the sorted order */
  std::vector<double> suffix(k + 1, 0.0);
  for (int l = k - 1; l >= 0; --l) suffix[l] = suffix[l + 1] + z[idx[l]] * sigma_k2[idx[l]];

  int l = k - 1;
  while (l > 0 && p_b >= suffix[l] / z[idx[l - 1]]) --l;

  const double theta_floor = 1.0 / z[idx[l]];
  const double theta_budget = p_b / suffix[l];
  P1Result res;
  res.p.assign(k, 0.0);
  if (theta_budget >= theta_floor) {
    /* budget-limited: every stream from l up runs exactly at the level */
    res.theta = theta_budget;
    for (int j = l; j < k; ++j) res.p[idx[j]] = z[idx[j]] * sigma_k2[idx[j]] * res.theta;
  } else {
    /* floor-limited: stream l is clamped below its noise floor and absorbs
     * the leftover budget */
    res.theta = theta_floor;
    double rest = 0.0;
    for (int j = l + 1; j < k; ++j) {
      res.p[idx[j]] = z[idx[j]] * sigma_k2[idx[j]] * theta_floor;
      rest += res.p[idx[j]];
    }
    res.p[idx[l]] = std::max(0.0, p_b - rest);
  }
  return res;
}

struct P2Result {
  double theta = 0.0;
  std::vector<double> p;
};

namespace detail {

/* Relay power needed to hold level theta, and its slope in theta.  Piecewise
 * linear and non-decreasing. */
inline double p2_demand(double theta, const std::vector<double>& z,
                        const std::vector<double>& l_rm2, const std::vector<double>& l_rb2,
                        double sigma2, double* slope_out) {
  const int k = static_cast<int>(l_rm2.size());
  double total = 0.0, slope = 0.0;
  for (int i = 0; i < k; ++i) {
    const double a1 = (theta * z[i] - 1.0) * sigma2 / l_rm2[i];
    const double a2 = (theta * z[k + i] - 1.0) * sigma2 / l_rb2[i];
    double a, s;
    if (a1 >= a2) {
      a = a1;
      s = z[i] * sigma2 / l_rm2[i];
    } else {
      a = a2;
      s = z[k + i] * sigma2 / l_rb2[i];
    }
    if (a > 0.0) {
      total += a;
      slope += s;
    }
  }
  if (slope_out) *slope_out = slope;
  return total;
}

}  // namespace detail

/* max-min level over the relay budget: bisection brackets the kink-free
 * segment, a Newton step inside it lands on the exact root of the piecewise
 * linear demand curve. */
inline P2Result solve_p2(const std::vector<double>& z, const std::vector<double>& l_rm2,
                         const std::vector<double>& l_rb2, double sigma2, double p_r) {
  const int k = static_cast<int>(l_rm2.size());
  if (k == 0 || z.size() != 2 * l_rm2.size() || l_rb2.size() != l_rm2.size())
    throw std::invalid_argument("solve_p2: size mismatch");
  if (!(p_r > 0.0) || !(sigma2 > 0.0))
    throw std::invalid_argument("solve_p2: budget and sigma2 must be > 0");
  double maxz = 0.0, minz = z[0], maxl2 = 0.0;
  for (double v : z) {
    if (!(v > 0.0)) throw std::invalid_argument("solve_p2: z must be > 0");
    maxz = std::max(maxz, v);
    minz = std::min(minz, v);
  }
  for (int i = 0; i < k; ++i) {
    if (!(l_rm2[i] > 0.0) || !(l_rb2[i] > 0.0))
      throw std::invalid_argument("solve_p2: gains must be > 0");
    maxl2 = std::max(maxl2, std::max(l_rm2[i], l_rb2[i]));
  }

  double lo = 1.0 / maxz;                                    /* demand 0 here */
  double hi = 1.0 / minz + p_r * maxl2 / (sigma2 * minz);    /* demand >= p_r here */
  for (int it = 0; it < 120 && (hi - lo) > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (detail::p2_demand(mid, z, l_rm2, l_rb2, sigma2, nullptr) >= p_r)
      hi = mid;
    else
      lo = mid;
  }
  double theta = hi;
  for (int it = 0; it < 3; ++it) {
    double slope = 0.0;
    const double demand = detail::p2_demand(theta, z, l_rm2, l_rb2, sigma2, &slope);
    if (slope <= 0.0) break;
    theta += (p_r - demand) / slope;
  }
  theta = std::max(theta, 1.0 / maxz);

  P2Result res;
  res.theta = theta;
  res.p.assign(k, 0.0);
  for (int i = 0; i < k; ++i) {
    const double a1 = (theta * z[i] - 1.0) * sigma2 / l_rm2[i];
    const double a2 = (theta * z[k + i] - 1.0) * sigma2 / l_rb2[i];
    res.p[i] = std::max(std::max(a1, a2), 0.0);
  }
  return res;
}

/* Uplink first-hop cap; MS powers are fixed, so this is a plain minimum. */
inline double theta3(const std::vector<double>& z_m, const std::vector<double>& r_mr2,
                     const std::vector<double>& p_m, double sigma2) {
  const int k = static_cast<int>(z_m.size());
  if (k == 0 || r_mr2.size() != z_m.size() || p_m.size() != z_m.size())
    throw std::invalid_argument("theta3: size mismatch");
  double th = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    const double cap = 1.0 + std::max(r_mr2[i] * p_m[i] / sigma2 - 1.0, 0.0);
    th = std::min(th, cap / z_m[i]);
  }
  return th;
}

struct Projection {
  double theta = 0.0, theta1 = 0.0, theta2 = 0.0, theta3 = 0.0;
  std::vector<double> y;
  PowerProfile profile;
};

/* Boundary point of the feasible region along the ray through z, together
 * with a power profile that supports it. */
inline Projection project(const MpProblem& pr, const std::vector<double>& z) {
  if (static_cast<int>(z.size()) != 2 * pr.k) throw std::invalid_argument("project: bad z size");
  const std::vector<double> zb(z.begin(), z.begin() + pr.k);
  const std::vector<double> zm(z.begin() + pr.k, z.end());
  const P1Result p1 = solve_p1(zb, pr.sigma_k2, pr.p_b);
  const P2Result p2 = solve_p2(z, pr.l_rm2, pr.l_rb2, pr.sigma2, pr.p_r);
  const double t3 = theta3(zm, pr.r_mr2, pr.p_m, pr.sigma2);
  Projection proj;
  proj.theta1 = p1.theta;
  proj.theta2 = p2.theta;
  proj.theta3 = t3;
  proj.theta = std::min(p1.theta, std::min(p2.theta, t3));
  proj.y.resize(2 * pr.k);
  for (int i = 0; i < 2 * pr.k; ++i) proj.y[i] = proj.theta * z[i];
  proj.profile.p_b = p1.p;
  proj.profile.p_r = p2.p;
  return proj;
}

struct MpOptions {
  double epsilon = 0.01;            /* relative optimality gap on Gamma */
  std::size_t max_iterations = 100000;
  /* Stop once the remaining upper bound drops below this value; 0 disables.
   * Used when comparing candidates: a run whose bound sinks below a rate
   * already achieved elsewhere can be abandoned without certifying. */
  double abort_below = 0.0;
};

namespace detail {

struct Vertex {
  std::vector<double> z;
  double bound;   /* upper bound on Gamma over the box [1, z] cap feasible */
};

struct VertexOrder {
  bool operator()(const Vertex& a, const Vertex& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.z < b.z;  /* deterministic tie-break */
  }
};

/* max sum (xi_i/2) log2 z_i over 1 <= z <= cap, sum a_i (z_i - 1) <= budget.
 * Water filling by bisection on the multiplier; the bracket keeps the
 * returned value on the high side, so it stays a true upper bound. */
inline double waterfill_bound(const std::vector<double>& xi, const std::vector<double>& cap,
                              const std::vector<double>& a, double budget) {
  const std::size_t n = xi.size();
  const double kln2i = 0.5 / std::log(2.0);
  double cap_demand = 0.0, cap_gamma = 0.0, lam_hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cap_demand += a[i] * (cap[i] - 1.0);
    cap_gamma += 0.5 * xi[i] * std::log2(cap[i]);
    lam_hi = std::max(lam_hi, kln2i * xi[i] / a[i]);
  }
  if (cap_demand <= budget || lam_hi <= 0.0) return cap_gamma;

  const auto eval = [&](double lam, double* gamma_out) {
    double demand = 0.0, gamma = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = std::clamp(kln2i * xi[i] / (a[i] * lam), 1.0, cap[i]);
      demand += a[i] * (z - 1.0);
      gamma += 0.5 * xi[i] * std::log2(z);
    }
    if (gamma_out) *gamma_out = gamma;
    return demand;
  };

  double lam_lo = lam_hi;
  for (int it = 0; it < 200 && eval(lam_lo, nullptr) < budget; ++it) lam_lo *= 0.5;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lam_lo + lam_hi);
    if (eval(mid, nullptr) >= budget)
      lam_lo = mid;
    else
      lam_hi = mid;
  }
  double gamma = 0.0;
  eval(lam_lo, &gamma);   /* demand >= budget here: on or beyond the boundary */
  return gamma;
}

/* Per-stream term of the Lagrangian bound below.  With x the downlink SNR
 * factor, R the relay power drawn by the stream, and y = min(cm, 1 + R/b)
 * the uplink factor it supports, maximize
 *   wb ln x - mu s x [x > 1] + wm ln y - lam R
 * over 1 <= x <= min(cb, 1 + R/a), 0 <= R.  The downlink either stays off
 * (x = 1, no BS charge) or pays for the noise floor too; each branch is
 * concave in R after maximizing x, so bisect each on its one-sided
 * derivative and keep the better. */
struct StreamSup {
  double value;
  double bs_demand;
  double relay_demand;
};

inline StreamSup stream_sup(double wb, double wm, double s, double a, double b,
                            double cb, double cm, double mu, double lam) {
  StreamSup off;
  {
    const double r_cap = b * (cm - 1.0);
    const double r = (lam > 0.0) ? std::clamp(wm / lam - b, 0.0, r_cap) : r_cap;
    off.value = wm * std::log(std::min(cm, 1.0 + r / b)) - lam * r;
    off.bs_demand = 0.0;
    off.relay_demand = r;
  }

  const double r_cap = std::max(a * (cb - 1.0), b * (cm - 1.0));
  const auto slope = [&](double r) {
    double d = -lam;
    const double hi = std::min(cb, 1.0 + r / a);
    const double xq = (mu > 0.0) ? wb / (mu * s) : cb;
    if (hi < cb && xq > hi) d += wb / (a + r) - mu * s / a;
    if (r < b * (cm - 1.0)) d += wm / (b + r);
    return d;
  };
  double lo = 0.0, hi = r_cap;
  if (slope(0.0) <= 0.0) hi = 0.0;
  for (int it = 0; it < 44 && hi > lo; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double r = lo;
  const double x_hi = std::min(cb, 1.0 + r / a);
  const double x = (mu > 0.0) ? std::clamp(wb / (mu * s), 1.0, x_hi) : x_hi;
  const double y = std::min(cm, 1.0 + r / b);
  StreamSup on;
  on.value = wb * std::log(x) - mu * s * x + wm * std::log(y) - lam * r;
  on.bs_demand = s * x;
  on.relay_demand = r;
  return on.value >= off.value ? on : off;
}

/* Upper bound on Gamma over [1, z] intersected with the feasible set.
 * Dropping only the floor jump in the BS demand leaves a concave problem
 * with two budget constraints; any nonnegative multiplier pair (mu, lam)
 * then gives a valid bound by weak duality,
 *   sum_i sup_i(mu, lam) + mu P_B + lam P_R.
 * A few rounds of alternating bisection tune the pair so each budget's
 * demand meets its supply; every evaluation along the way is valid, so the
 * running minimum is kept.  A one-constraint water filling pair serves as a
 * cheap fallback min. */
inline double vertex_bound(const MpProblem& pr, const std::vector<double>& z) {
  const int k = pr.k;
  const double kln2i = 0.5 / std::log(2.0);
  std::vector<double> xi_b(pr.xi.begin(), pr.xi.begin() + k);
  std::vector<double> xi_m(pr.xi.begin() + k, pr.xi.end());
  std::vector<double> zb(z.begin(), z.begin() + k);
  std::vector<double> zm(z.begin() + k, z.end());
  std::vector<double> a_bs(k), a_rm(k), a_rb(k);
  for (int i = 0; i < k; ++i) {
    a_bs[i] = pr.sigma_k2[i];
    a_rm[i] = pr.sigma2 / pr.l_rm2[i];
    a_rb[i] = pr.sigma2 / pr.l_rb2[i];
  }
  double best = std::min(waterfill_bound(xi_b, zb, a_bs, pr.p_b),
                         waterfill_bound(xi_b, zb, a_rm, pr.p_r)) +
                waterfill_bound(xi_m, zm, a_rb, pr.p_r);

  const auto dual = [&](double mu, double lam, double* bs_dem, double* relay_dem) {
    double v = mu * pr.p_b + lam * pr.p_r, db = 0.0, dr = 0.0;
    for (int i = 0; i < k; ++i) {
      const StreamSup s = stream_sup(kln2i * pr.xi[i], kln2i * pr.xi[k + i], a_bs[i],
                                     a_rm[i], a_rb[i], zb[i], zm[i], mu, lam);
      v += s.value;
      db += s.bs_demand;
      dr += s.relay_demand;
    }
    if (bs_dem) *bs_dem = db;
    if (relay_dem) *relay_dem = dr;
    best = std::min(best, v);
    return v;
  };

  const auto balance = [&](double* target, double other, bool tune_mu, double budget) {
    double hi = 1.0, dem = 0.0;
    const auto eval = [&](double v) {
      return tune_mu ? (dual(v, other, &dem, nullptr), dem) : (dual(other, v, nullptr, &dem), dem);
    };
    eval(hi);
    for (int it = 0; it < 50 && dem > budget; ++it) {
      hi *= 2.0;
      eval(hi);
    }
    double lo = 0.0;
    for (int it = 0; it < 28; ++it) {
      const double mid = 0.5 * (lo + hi);
      eval(mid);
      if (std::abs(dem - budget) <= 1e-3 * budget) {
        *target = mid;
        return;
      }
      if (dem > budget)
        lo = mid;
      else
        hi = mid;
    }
    *target = hi;
  };

  double mu = 0.0, lam = 0.0;
  for (int round = 0; round < 2; ++round) {
    balance(&mu, lam, true, pr.p_b);
    balance(&lam, mu, false, pr.p_r);
    double db = 0.0, dr = 0.0;
    dual(mu, lam, &db, &dr);
    if (std::abs(db - pr.p_b) <= 2e-3 * pr.p_b && std::abs(dr - pr.p_r) <= 2e-3 * pr.p_r) break;
  }
  return best;
}

}  // namespace detail

struct MpState {
  std::set<detail::Vertex, detail::VertexOrder> vertices;
  double cbv = 0.0;
  std::vector<double> incumbent_z;
  PowerProfile incumbent;
  double epsilon = 0.01;
  std::size_t iterations = 0;
};

struct MpResult {
  PowerProfile profile;
  double r_ws = 0.0;       /* weighted sum rate of the returned profile */
  std::size_t iterations = 0;
  bool certified = false;  /* true: (1 + eps) r_ws >= optimum is proven */
  bool aborted = false;    /* stopped early because the bound fell below abort_below */
  std::vector<double> cbv_trace;
};

/* Polyblock outer approximation.  Starts from the componentwise upper
 * corner, repeatedly projects the best vertex onto the feasible boundary
 * and splits it into 2K children.  Every projection yields a feasible
 * profile, so the incumbent improves monotonically; vertices whose Gamma
 * cannot beat cbv (1 + eps) are discarded, and children that fall below the
 * z >= 1 floor cover no feasible point and are dropped outright. */
inline MpResult maximize_weighted_sum_rate(const MpProblem& pr, const MpOptions& opts = {}) {
  if (!(opts.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  const int n = 2 * pr.k;

  MpState st;
  st.epsilon = opts.epsilon;

  /* Incumbent seed: equal split of both budgets. */
  PowerProfile eq;
  eq.p_b.assign(pr.k, pr.p_b / pr.k);
  eq.p_r.assign(pr.k, pr.p_r / pr.k);
  {
    const std::vector<double> s = mp_snr(pr, eq);
    st.incumbent_z.resize(n);
    for (int i = 0; i < n; ++i) st.incumbent_z[i] = 1.0 + s[i];
    st.cbv = mp_gamma(pr, st.incumbent_z);
    st.incumbent = eq;
  }
  MpResult res;
  res.cbv_trace.push_back(st.cbv);

  /* Componentwise upper corner: full budget thrown at each stream alone. */
  detail::Vertex v0;
  v0.z.resize(n);
  for (int i = 0; i < pr.k; ++i) {
    const double dl = std::max(pr.r_br2[i] * pr.p_b / pr.sigma2 - 1.0, 0.0);
    v0.z[i] = 1.0 + std::min(dl, pr.l_rm2[i] * pr.p_r / pr.sigma2);
    const double ul = std::max(pr.r_mr2[i] * pr.p_m[i] / pr.sigma2 - 1.0, 0.0);
    v0.z[pr.k + i] = 1.0 + std::min(ul, pr.l_rb2[i] * pr.p_r / pr.sigma2);
  }
  v0.bound = detail::vertex_bound(pr, v0.z);
  st.vertices.insert(v0);

  bool certified = false;
  while (st.iterations < opts.max_iterations) {
    if (st.vertices.empty()) {
      certified = true;
      break;
    }
    const detail::Vertex top = *st.vertices.begin();
    /* Ordered by bound, so once the best vertex is prunable, all are. */
    if (top.bound <= st.cbv * (1.0 + st.epsilon)) {
      certified = true;
      break;
    }
    if (opts.abort_below > 0.0 && top.bound <= opts.abort_below) {
      res.aborted = true;
      break;
    }
    st.vertices.erase(st.vertices.begin());
    ++st.iterations;

    Projection proj = project(pr, top.z);

    /* The projection's profile is feasible regardless of where y lands;
     * refresh the incumbent from what it actually achieves. */
    const std::vector<double> s = mp_snr(pr, proj.profile);
    std::vector<double> z_act(n);
    for (int i = 0; i < n; ++i) z_act[i] = 1.0 + s[i];
    const double g_act = mp_gamma(pr, z_act);
    if (g_act > st.cbv) {
      st.cbv = g_act;
      st.incumbent = proj.profile;
      st.incumbent_z = z_act;
      res.cbv_trace.push_back(st.cbv);
      /* Prunable vertices form a suffix of the ordering. */
      while (!st.vertices.empty() &&
             std::prev(st.vertices.end())->bound <= st.cbv * (1.0 + st.epsilon))
        st.vertices.erase(std::prev(st.vertices.end()));
    }

    /* theta >= 1 means the corner itself is feasible, so the box maximum is
     * Gamma(top.z), which the refresh above just captured.  Nothing left in
     * this box to branch on. */
    if (proj.theta >= 1.0) continue;

    const double thr = st.cbv * (1.0 + st.epsilon);
    for (int i = 0; i < n; ++i) {
      const double yi = proj.theta * top.z[i];
      if (yi < 1.0) continue;  /* child box entirely below the z >= 1 floor */
      detail::Vertex child;
      child.z = top.z;
      child.z[i] = yi;
      child.bound = detail::vertex_bound(pr, child.z);
      if (child.bound > thr) st.vertices.insert(std::move(child));
    }
  }

  res.profile = st.incumbent;
  res.r_ws = st.cbv;
  res.iterations = st.iterations;
  res.certified = certified;
  return res;
}

}  // namespace ctwrc
