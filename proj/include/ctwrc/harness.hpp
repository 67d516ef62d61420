#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "channel.hpp"
#include "latticelab.hpp"
#include "powalloc.hpp"
#include "rates.hpp"
#include "triangulate.hpp"

namespace ctwrc {

inline double db_to_power(double db, double sigma2) {
  return sigma2 * std::pow(10.0, db / 10.0);
}

/* Monte Carlo sweep over an SNR grid.  "snr" accepts "a:b:step" or a comma
 * list; sweep_target picks which budgets ride the grid:
 *   all  every budget equals the grid point
 *   b    only the BS budget; relay and MS budgets stay at snr_r_db / snr_m_db
 * A mobile with ms_antennas > 1 becomes that many virtual single-antenna
 * streams splitting the per-mobile budget evenly. */
struct SweepConfig {
  int k = 2;
  int ms_antennas = 1;
  std::string snr = "0:30:5";
  std::string sweep_target = "all";
  double snr_r_db = 20.0;
  double snr_m_db = 20.0;
  int trials = 50;
  std::uint64_t seed = 1;
  std::string dpc = "exhaustive";   /* exhaustive | random:N */
  std::string power = "equal";      /* perm search objective: equal | mp */
  double eps = 0.01;
  double xi_b = 1.0;
  double xi_m = 1.0;
  std::string out;                  /* CSV path; empty = stdout */
  int threads = 1;
  double sigma2 = 1.0;
  bool reciprocal = true;
};

struct DpcRule {
  bool exhaustive = true;
  int samples = 0;
};

inline DpcRule parse_dpc_rule(const std::string& s) {
  DpcRule r;
  if (s == "exhaustive") return r;
  if (s.rfind("random:", 0) == 0) {
    r.exhaustive = false;
    r.samples = std::stoi(s.substr(7));
    if (r.samples < 1) throw std::invalid_argument("dpc: random sample count must be >= 1");
    return r;
  }
  throw std::invalid_argument("dpc: expected 'exhaustive' or 'random:N', got '" + s + "'");
}

inline std::vector<double> parse_snr_grid(const std::string& s) {
  std::vector<double> grid;
  if (s.find(',') != std::string::npos) {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
  } else if (s.find(':') != std::string::npos) {
    double a, b, step;
    char c1, c2;
    std::stringstream ss(s);
    if (!(ss >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0))
      throw std::invalid_argument("snr: expected 'start:end:step' with step > 0");
    for (double v = a; v <= b + 1e-9; v += step) grid.push_back(v);
  } else {
    grid.push_back(std::stod(s));
  }
  if (grid.empty()) throw std::invalid_argument("snr: empty grid");
  return grid;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

inline std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace detail

/* "key = value" per line, '#' starts a comment.  Unknown keys are errors so
 * a typo cannot silently fall back to a default. */
inline std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(ln) + ": expected key = value");
    kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  return kv;
}

inline void apply_config(SweepConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, val] : kv) {
    if (key == "k") cfg.k = std::stoi(val);
    else if (key == "ms_antennas") cfg.ms_antennas = std::stoi(val);
    else if (key == "snr") cfg.snr = val;
    else if (key == "sweep_target") cfg.sweep_target = val;
    else if (key == "snr_r_db") cfg.snr_r_db = std::stod(val);
    else if (key == "snr_m_db") cfg.snr_m_db = std::stod(val);
    else if (key == "trials") cfg.trials = std::stoi(val);
    else if (key == "seed") cfg.seed = std::stoull(val);
    else if (key == "dpc") cfg.dpc = val;
    else if (key == "power") cfg.power = val;
    else if (key == "eps") cfg.eps = std::stod(val);
    else if (key == "xi_b") cfg.xi_b = std::stod(val);
    else if (key == "xi_m") cfg.xi_m = std::stod(val);
    else if (key == "out") cfg.out = val;
    else if (key == "threads") cfg.threads = std::stoi(val);
    else if (key == "sigma2") cfg.sigma2 = std::stod(val);
    else if (key == "reciprocal") cfg.reciprocal = detail::parse_bool(val);
    else throw std::runtime_error("unknown config key: " + key);
  }
}

inline void validate(const SweepConfig& cfg) {
  if (cfg.k < 1) throw std::invalid_argument("sweep: k must be >= 1");
  if (cfg.ms_antennas < 1) throw std::invalid_argument("sweep: ms_antennas must be >= 1");
  if (cfg.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (cfg.threads < 1) throw std::invalid_argument("sweep: threads must be >= 1");
  if (!(cfg.eps >= 0.0)) throw std::invalid_argument("sweep: eps must be >= 0");
  if (!(cfg.sigma2 > 0.0)) throw std::invalid_argument("sweep: sigma2 must be > 0");
  if (cfg.sweep_target != "all" && cfg.sweep_target != "b")
    throw std::invalid_argument("sweep: sweep_target must be 'all' or 'b'");
  if (cfg.power != "equal" && cfg.power != "mp")
    throw std::invalid_argument("sweep: power must be 'equal' or 'mp'");
  if (cfg.xi_b < 0.0 || cfg.xi_m < 0.0 || cfg.xi_b + cfg.xi_m <= 0.0)
    throw std::invalid_argument("sweep: weights must be >= 0 and not both zero");
  parse_dpc_rule(cfg.dpc);
  parse_snr_grid(cfg.snr);
}

/* Best DPC order among the candidates under one of the two power rules.
 * The permutation only enters through the second phase, so the search
 * re-triangularizes per candidate but the channel stays fixed. */
struct PermChoice {
  Permutation perm;
  Triangularization tri;
  PowerProfile profile;
  RateReport report;
  std::size_t mp_iterations = 0;
  bool mp_certified = true;
};

inline PermChoice best_permutation(const ChannelSet& ch, const std::vector<Permutation>& perms,
                                   const Weights& w, bool use_mp, double eps) {
  if (perms.empty()) throw std::invalid_argument("best_permutation: no candidates");

  /* Equal-power pass over every candidate; doubles as the search order for
   * the refinement below. */
  std::vector<PermChoice> eq(perms.size());
  for (std::size_t i = 0; i < perms.size(); ++i) {
    eq[i].perm = perms[i];
    eq[i].tri = triangularize(ch, perms[i]);
    eq[i].profile = PowerProfile::equal(ch);
    eq[i].report = stream_rates(eq[i].tri, eq[i].profile, ch);
    achievable_tuple(eq[i].report, w);
  }
  std::vector<std::size_t> order(perms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (!use_mp) {
    std::size_t arg = order[0];
    for (std::size_t i : order)
      if (eq[i].report.weighted_sum_rate > eq[arg].report.weighted_sum_rate) arg = i;
    return eq[arg];
  }

  /* Refine candidates best-first.  A run whose upper bound falls below the
   * best rate achieved so far is abandoned early; its own achieved rate
   * still competes, so the winner stays within the solver's epsilon of the
   * best candidate overall. */
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (eq[a].report.weighted_sum_rate != eq[b].report.weighted_sum_rate)
      return eq[a].report.weighted_sum_rate > eq[b].report.weighted_sum_rate;
    return a < b;
  });
  PermChoice best;
  bool have = false;
  for (std::size_t i : order) {
    PermChoice cand = std::move(eq[i]);
    MpOptions opts;
    opts.epsilon = eps;
    if (have) opts.abort_below = best.report.weighted_sum_rate;
    const MpResult mp = maximize_weighted_sum_rate(make_mp_problem(cand.tri, ch, w), opts);
    cand.profile = mp.profile;
    cand.mp_iterations = mp.iterations;
    cand.mp_certified = mp.certified;
    cand.report = stream_rates(cand.tri, cand.profile, ch);
    achievable_tuple(cand.report, w);
    if (!have || cand.report.weighted_sum_rate > best.report.weighted_sum_rate) {
      best = std::move(cand);
      have = true;
    }
  }
  return best;
}

struct SweepRow {
  double snr_db = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string perm;
  std::string scheme;
  double sum_rate = 0.0;
  double weighted_sum_rate = 0.0;
  double cutset_dl = 0.0;
  double cutset_ul = 0.0;
  double gap_to_cutset = 0.0;
  std::size_t mp_iterations = 0;
  bool c1 = false, c2 = false, c3 = false, c4 = false;
};

struct SweepResult {
  SweepConfig cfg;
  std::vector<double> snr_grid;
  std::vector<SweepRow> rows;   /* 3 per (snr, trial): equal, mp, cutset */
};

namespace detail {

/* Swept-direction gap.  Target "b" varies only the downlink budget, so the
 * meaningful distance is to the downlink cut; target "all" compares totals. */
inline double cutset_gap(const SweepConfig& cfg, const RateReport& rep, const CutsetBounds& cut) {
  if (cfg.sweep_target == "b") {
    double r_b = 0.0;
    for (double v : rep.r_b) r_b += v;
    return cut.dl - r_b;
  }
  return (cut.dl + cut.ul) - rep.sum_rate;
}

inline void fill_theorem2(SweepRow& row, const Triangularization& tri, const ChannelSet& ch) {
  const Theorem2Record rec = check_theorem2(tri, ch);
  row.c1 = rec.c1;
  row.c2 = rec.c2;
  row.c3 = rec.c3;
  row.c4 = rec.c4;
}

}  // namespace detail

inline SweepResult compute_sweep(const SweepConfig& cfg) {
  validate(cfg);
  SweepResult result;
  result.cfg = cfg;
  result.snr_grid = parse_snr_grid(cfg.snr);
  const DpcRule dpc = parse_dpc_rule(cfg.dpc);
  const int n = cfg.k * cfg.ms_antennas;

  const std::size_t tasks = result.snr_grid.size() * static_cast<std::size_t>(cfg.trials);
  result.rows.assign(tasks * 3, SweepRow{});

  auto run_task = [&](std::size_t task) {
    const std::size_t snr_idx = task / cfg.trials;
    const int trial = static_cast<int>(task % cfg.trials);
    const double snr_db = result.snr_grid[snr_idx];

    const double s_pow = db_to_power(snr_db, cfg.sigma2);
    const double p_b = s_pow;
    const double p_r = (cfg.sweep_target == "b") ? db_to_power(cfg.snr_r_db, cfg.sigma2) : s_pow;
    const double per_ms = (cfg.sweep_target == "b") ? db_to_power(cfg.snr_m_db, cfg.sigma2) : s_pow;
    const std::vector<double> p_m(n, per_ms / cfg.ms_antennas);

    Weights w;
    w.xi_b.assign(n, cfg.xi_b);
    w.xi_m.assign(n, cfg.xi_m);

    const std::uint64_t base_seed = Rng::derive(Rng::derive(cfg.seed, snr_idx), trial);

    /* A rank-deficient draw has measure zero but the tolerance check can
     * still fire; redraw deterministically instead of aborting the sweep. */
    std::uint64_t used_seed = base_seed;
    ChannelSet ch;
    PermChoice eq_choice;
    std::vector<Permutation> perms;
    for (int attempt = 0;; ++attempt) {
      try {
        ch = gen_channels(n, used_seed, cfg.reciprocal, cfg.sigma2, p_b, p_r, p_m);
        perms = dpc.exhaustive
                    ? all_permutations(n)
                    : random_permutations(n, dpc.samples, Rng::derive(used_seed, 7));
        if (!dpc.exhaustive) perms.insert(perms.begin(), Permutation::identity(n));
        eq_choice = best_permutation(ch, perms, w, false, cfg.eps);
        break;
      } catch (const RankDeficientError&) {
        if (attempt >= 32) throw;
        used_seed = Rng::derive(base_seed, 0xBAD0 + attempt);
      }
    }

    PermChoice mp_choice;
    if (cfg.power == "mp") {
      mp_choice = best_permutation(ch, perms, w, true, cfg.eps);
    } else {
      mp_choice = best_permutation(ch, {eq_choice.perm}, w, true, cfg.eps);
    }

    const CutsetBounds cut = cutset_bounds(ch, CutsetMode::ExactEqualPower);

    SweepRow base;
    base.snr_db = snr_db;
    base.trial = trial;
    base.seed = used_seed;
    base.cutset_dl = cut.dl;
    base.cutset_ul = cut.ul;

    SweepRow r_eq = base;
    r_eq.scheme = "proposed-equal";
    r_eq.perm = eq_choice.perm.to_string();
    r_eq.sum_rate = eq_choice.report.sum_rate;
    r_eq.weighted_sum_rate = eq_choice.report.weighted_sum_rate;
    r_eq.gap_to_cutset = detail::cutset_gap(cfg, eq_choice.report, cut);
    detail::fill_theorem2(r_eq, eq_choice.tri, ch);

    SweepRow r_mp = base;
    r_mp.scheme = "proposed-mp";
    r_mp.perm = mp_choice.perm.to_string();
    r_mp.sum_rate = mp_choice.report.sum_rate;
    r_mp.weighted_sum_rate = mp_choice.report.weighted_sum_rate;
    r_mp.gap_to_cutset = detail::cutset_gap(cfg, mp_choice.report, cut);
    r_mp.mp_iterations = mp_choice.mp_iterations;
    detail::fill_theorem2(r_mp, mp_choice.tri, ch);

    SweepRow r_cut = base;
    r_cut.scheme = "cutset";
    r_cut.perm = "-";
    r_cut.sum_rate = cut.dl + cut.ul;
    r_cut.weighted_sum_rate = cut.dl + cut.ul;
    r_cut.c1 = r_eq.c1;
    r_cut.c2 = r_eq.c2;
    r_cut.c3 = r_eq.c3;
    r_cut.c4 = r_eq.c4;

    result.rows[task * 3 + 0] = std::move(r_eq);
    result.rows[task * 3 + 1] = std::move(r_mp);
    result.rows[task * 3 + 2] = std::move(r_cut);
  };

  const int nthreads = std::min<std::size_t>(cfg.threads, tasks);
  if (nthreads <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next(0);
    std::exception_ptr first_error;
    std::atomic<bool> failed(false);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int i = 0; i < nthreads; ++i)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t t = next.fetch_add(1);
          if (t >= tasks || failed.load()) return;
          try {
            run_task(t);
          } catch (...) {
            if (!failed.exchange(true)) first_error = std::current_exception();
            return;
          }
        }
      });
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(first_error);
  }
  return result;
}

inline void write_sweep_csv(const SweepResult& res, std::ostream& out) {
  const SweepConfig& c = res.cfg;
  out << "# two-way relay sweep\n";
  out << "# k = " << c.k << ", ms_antennas = " << c.ms_antennas
      << ", streams = " << c.k * c.ms_antennas << "\n";
  out << "# snr = " << c.snr << ", sweep_target = " << c.sweep_target;
  if (c.sweep_target == "b")
    out << ", snr_r_db = " << detail::format_g(c.snr_r_db)
        << ", snr_m_db = " << detail::format_g(c.snr_m_db);
  out << "\n";
  out << "# trials = " << c.trials << ", seed = " << c.seed << ", dpc = " << c.dpc
      << ", power = " << c.power << ", eps = " << detail::format_g(c.eps) << "\n";
  out << "# xi_b = " << detail::format_g(c.xi_b) << ", xi_m = " << detail::format_g(c.xi_m)
      << ", sigma2 = " << detail::format_g(c.sigma2)
      << ", reciprocal = " << (c.reciprocal ? "true" : "false") << "\n";
  out << "# gap_to_cutset: cut minus achieved, total for target=all, downlink for target=b\n";
  out << "snr_db,trial,seed,perm,scheme,sum_rate,weighted_sum_rate,cutset_dl,cutset_ul,"
         "gap_to_cutset,mp_iterations,c1,c2,c3,c4\n";
  for (const SweepRow& r : res.rows) {
    out << detail::format_g(r.snr_db) << ',' << r.trial << ',' << r.seed << ',' << r.perm << ','
        << r.scheme << ',' << detail::format_g(r.sum_rate) << ','
        << detail::format_g(r.weighted_sum_rate) << ',' << detail::format_g(r.cutset_dl) << ','
        << detail::format_g(r.cutset_ul) << ',' << detail::format_g(r.gap_to_cutset) << ','
        << r.mp_iterations << ',' << int(r.c1) << ',' << int(r.c2) << ',' << int(r.c3) << ','
        << int(r.c4) << '\n';
  }
}

/* Noiseless lattice lab driver: fresh channel, DPC order, dithers and
 * messages every frame, all decodes compared against the sent words. */
struct LabConfig {
  int k = 2;
  int t = 64;
  int frames = 200;
  std::uint64_t seed = 1;
  double q_c = 1.0;
  int b = 4;
  int m = 2;
  bool reciprocal = true;
};

struct LabReport {
  long frames = 0;
  long component_errors_b = 0;
  long component_errors_m = 0;
  double max_residual = 0.0;
  bool inject_detected = false;
  bool ok = false;
};

inline LabReport run_latticelab(const LabConfig& cfg) {
  if (cfg.k < 1 || cfg.t < 1 || cfg.frames < 1)
    throw std::invalid_argument("latticelab: k, t and frames must be >= 1");
  if (!(cfg.q_c > 0.0) || cfg.b < 2 || cfg.m < 1)
    throw std::invalid_argument("latticelab: need q_c > 0, b >= 2, m >= 1");
  LabReport rep;
  for (int fr = 0; fr < cfg.frames; ++fr) {
    const std::uint64_t fs = Rng::derive(cfg.seed, fr);
    std::uint64_t used = fs;
    Triangularization tri;
    for (int attempt = 0;; ++attempt) {
      try {
        const ChannelSet ch = gen_channels(cfg.k, used, cfg.reciprocal, 1.0, 1.0, 1.0,
                                           std::vector<double>(cfg.k, 1.0));
        tri = triangularize(ch, random_permutations(cfg.k, 1, Rng::derive(fs, 1))[0]);
        break;
      } catch (const RankDeficientError&) {
        if (attempt >= 32) throw;
        used = Rng::derive(fs, 0xBAD0 + attempt);
      }
    }
    Rng rng(Rng::derive(fs, 2));
    const LatticeChain chain =
        make_noiseless_chain(cfg.k, cfg.t, std::vector<double>(cfg.k, cfg.q_c),
                             std::vector<int>(cfg.k, cfg.b), std::vector<int>(cfg.k, cfg.m), rng);
    const NoiselessReport r = run_noiseless_frame(tri, chain, rng);
    ++rep.frames;
    rep.component_errors_b += r.component_errors_b;
    rep.component_errors_m += r.component_errors_m;
    rep.max_residual = std::max(rep.max_residual, r.max_residual);

    if (fr == 0) {
      Rng rng2(Rng::derive(fs, 3));
      const LatticeChain chain2 =
          make_noiseless_chain(cfg.k, cfg.t, std::vector<double>(cfg.k, cfg.q_c),
                               std::vector<int>(cfg.k, cfg.b), std::vector<int>(cfg.k, cfg.m),
                               rng2);
      rep.inject_detected = !run_noiseless_frame(tri, chain2, rng2, true).ok;
    }
  }
  rep.ok = rep.component_errors_b == 0 && rep.component_errors_m == 0 && rep.inject_detected;
  return rep;
}

/* Structural invariants of the triangularization chain, checked over a grid
 * of sizes and seeds.  Shared by the CLI check command and the test suite,
 * with the tolerances pinned here. */
struct InvariantConfig {
  int k_min = 1;
  int k_max = 6;
  int seeds_per_k = 100;
  std::uint64_t seed = 1;
};

struct InvariantReport {
  long cases = 0;
  double max_unitarity = 0.0;        /* |Q^H Q - I|, absolute */
  double max_reconstruction = 0.0;   /* factor product vs input, relative */
  double max_interference = 0.0;     /* cancellation identity, relative */
  double max_det_rel = 0.0;          /* |det| vs diagonal product, relative */
  long diag_mismatches = 0;          /* rp_br diagonal must equal r_br's exactly */
  long scale_violations = 0;         /* alpha and sigma_k^2 must be positive finite */
  bool ok = false;

  static constexpr double tol_unitarity = 1e-12;
  static constexpr double tol_reconstruction = 1e-10;
  static constexpr double tol_interference = 1e-9;
  static constexpr double tol_det = 1e-8;
};

inline InvariantReport run_invariant_suite(const InvariantConfig& cfg = {}) {
  if (cfg.k_min < 1 || cfg.k_max < cfg.k_min || cfg.seeds_per_k < 1)
    throw std::invalid_argument("invariants: bad size grid");
  InvariantReport rep;
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    for (int s = 0; s < cfg.seeds_per_k; ++s) {
      const std::uint64_t cs = Rng::derive(Rng::derive(cfg.seed, k), s);
      ChannelSet ch;
      Triangularization tri;
      std::uint64_t used = cs;
      for (int attempt = 0;; ++attempt) {
        try {
          ch = gen_channels(k, used, true, 1.0, 1.0, 1.0, std::vector<double>(k, 1.0));
          const Permutation perm = (s % 2 == 0)
                                       ? Permutation::identity(k)
                                       : random_permutations(k, 1, Rng::derive(cs, 5))[0];
          tri = triangularize(ch, perm);
          break;
        } catch (const RankDeficientError&) {
          if (attempt >= 32) throw;
          used = Rng::derive(cs, 0xBAD0 + attempt);
        }
      }
      ++rep.cases;

      const CMat eye = CMat::identity(k);
      for (const CMat* q : {&tri.q_mr, &tri.q_br, &tri.q_rm, &tri.q_rb})
        rep.max_unitarity =
            std::max(rep.max_unitarity, max_abs_diff(adjoint(*q) * (*q), eye));

      const CMat a_mr = ch.h_mr;
      const CMat a_br = adjoint(tri.q_mr) * ch.h_br;
      const CMat a_rm = reorder_rows(ch.h_rm, tri.perm.mu);
      const CMat a_rb = ch.h_rb * adjoint(tri.q_rm);
      const auto rel = [](const CMat& got, const CMat& want) {
        return max_abs_diff(got, want) / std::max(max_abs(want), 1e-300);
      };
      rep.max_reconstruction = std::max(rep.max_reconstruction, rel(tri.q_mr * tri.r_mr, a_mr));
      rep.max_reconstruction = std::max(rep.max_reconstruction, rel(tri.r_br * tri.q_br, a_br));
      rep.max_reconstruction = std::max(rep.max_reconstruction, rel(tri.l_rm * tri.q_rm, a_rm));
      rep.max_reconstruction = std::max(rep.max_reconstruction, rel(tri.q_rb * tri.l_rb, a_rb));

      Rng srng(Rng::derive(cs, 9));
      CMat s_b(k, 8), s_m(k, 8);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < 8; ++j) {
          s_b(i, j) = srng.cgauss();
          s_m(i, j) = srng.cgauss();
        }
      const double sig_scale = std::max(max_abs(s_b), max_abs(s_m));
      const double mat_scale = max_abs(tri.r_br) + max_abs(tri.r_mr) + max_abs(tri.rp_br);
      const double scale = std::max(1.0, mat_scale * sig_scale * k);
      rep.max_interference = std::max(
          rep.max_interference, interference_identity_residual(tri, s_b, s_m) / scale);

      const auto det_rel = [&](const CMat& h, const CMat& tr) {
        double prod = 1.0;
        for (int i = 0; i < k; ++i) prod *= tr(i, i).real();
        const double ad = abs_det(h);
        return std::abs(prod - ad) / std::max(ad, 1e-300);
      };
      rep.max_det_rel = std::max(rep.max_det_rel, det_rel(ch.h_mr, tri.r_mr));
      rep.max_det_rel = std::max(rep.max_det_rel, det_rel(ch.h_br, tri.r_br));
      rep.max_det_rel = std::max(rep.max_det_rel, det_rel(ch.h_rm, tri.l_rm));
      rep.max_det_rel = std::max(rep.max_det_rel, det_rel(ch.h_rb, tri.l_rb));

      for (int i = 0; i < k; ++i) {
        if (tri.rp_br(i, i).real() != tri.r_br(i, i).real() ||
            tri.rp_br(i, i).imag() != tri.r_br(i, i).imag())
          ++rep.diag_mismatches;
        if (!(tri.alpha[i] > 0.0) || !std::isfinite(tri.alpha[i]) ||
            !(tri.sigma_k2[i] > 0.0) || !std::isfinite(tri.sigma_k2[i]))
          ++rep.scale_violations;
      }
    }
  }
  rep.ok = rep.max_unitarity <= InvariantReport::tol_unitarity &&
           rep.max_reconstruction <= InvariantReport::tol_reconstruction &&
           rep.max_interference <= InvariantReport::tol_interference &&
           rep.max_det_rel <= InvariantReport::tol_det && rep.diag_mismatches == 0 &&
           rep.scale_violations == 0;
  return rep;
}

}  // namespace ctwrc
