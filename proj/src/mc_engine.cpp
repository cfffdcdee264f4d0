#include "irbmr/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "irbmr/normal.hpp"
#include "irbmr/special.hpp"

namespace irbmr {

namespace {

// Paths are generated in fixed-size blocks, each with its own addressed
// random stream. The block layout is part of the reproducibility contract:
// path j always lives in block j / kBlockSize at offset j % kBlockSize.
constexpr std::int64_t kBlockSize = 65536;
constexpr int kHistogramBins = 65536;

void validate_config(const SimulationConfig& cfg) {
  if (cfg.n_sim < 1000) {
    throw std::domain_error("SimulationConfig: n_sim must be at least 1000");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw std::domain_error("SimulationConfig: alpha must lie in (0, 1)");
  }
  if (cfg.n_obligors < 0) {
    throw std::domain_error("SimulationConfig: n_obligors must be >= 0");
  }
  if (cfg.max_buffer_bytes < (1u << 20)) {
    throw std::domain_error(
        "SimulationConfig: max_buffer_bytes must be at least 1 MiB");
  }
}

// Inverse-CDF sampling of Binomial(n, p) from a single uniform. The CDF walk
// starts at zero; when the starting mass would underflow (very large books)
// the quantile is found by bisecting the CDF written through the regularized
// incomplete beta, P(X <= k) = I_{1-p}(n - k, k + 1).
int binomial_inverse(double u, int n, double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p > 0.5) return n - binomial_inverse(1.0 - u, n, 1.0 - p);

  const double log_q = std::log1p(-p);
  if (n * log_q > -700.0) {
    double pmf = std::exp(n * log_q);
    double cdf = pmf;
    const double odds = p / (1.0 - p);
    int k = 0;
    while (cdf < u && k < n) {
      pmf *= odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
      ++k;
      cdf += pmf;
    }
    return k;
  }

  int lo = 0;
  int hi = n;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    const double cdf =
        ibeta(static_cast<double>(n - mid), static_cast<double>(mid + 1),
              1.0 - p);
    if (cdf >= u) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

// Per-path loss generator. Parameter draws go through ParameterSampler so
// the draw order (k innovation, lgd innovation, systematic factor, then the
// granularity uniform if any) is identical in every consumer.
struct Kernel {
  ParameterSampler sampler;
  bool rho_realized;
  double rho_fixed;
  int n_obligors;

  Kernel(const UncertaintyModel& m, const SimulationConfig& cfg)
      : sampler(m, cfg.clamp_lgd),
        rho_realized(cfg.rho_mode == RhoMode::of_realized_pd),
        rho_fixed(basel_correlation(expected_pd(m.k_hat, m.sigma_k))),
        n_obligors(cfg.n_obligors) {}

  double operator()(NormalStream& s) const {
    const ParameterDraw d = sampler(s);
    const double m = s.normal();
    const double rho =
        rho_realized ? basel_correlation(norm_cdf(d.k)) : rho_fixed;
    const double p_cond = conditional_default_probability(m, d.k, rho);
    if (n_obligors == 0) return d.lgd * p_cond;
    const int defaults = binomial_inverse(s.uniform(), n_obligors, p_cond);
    return d.lgd * (static_cast<double>(defaults) / n_obligors);
  }
};

int resolve_threads(int threads, std::int64_t n_blocks) {
  int t = threads;
  if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
  if (t < 1) t = 1;
  return static_cast<int>(
      std::min<std::int64_t>(static_cast<std::int64_t>(t), n_blocks));
}

// Runs body(block_index, first_path, path_count, worker) over all blocks,
// statically striped across `t` workers. Workers only ever touch
// block-indexed or worker-indexed storage, so nothing about the schedule
// leaks into the output.
template <class Body>
void run_blocks(std::int64_t n_sim, int t, Body&& body) {
  const std::int64_t n_blocks = (n_sim + kBlockSize - 1) / kBlockSize;

  auto run_stripe = [&](int worker) {
    for (std::int64_t b = worker; b < n_blocks; b += t) {
      const std::int64_t first = b * kBlockSize;
      const std::int64_t count = std::min(kBlockSize, n_sim - first);
      body(b, first, count, worker);
    }
  };

  if (t == 1) {
    run_stripe(0);
    return;
  }

  std::mutex err_mu;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        run_stripe(w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

// Streaming moments in Welford form, combined across blocks in block order
// so the totals never depend on the thread schedule.
struct Moments {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
    if (x < min) min = x;
    if (x > max) max = x;
  }

  void combine(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const std::int64_t total = n + o.n;
    const double d = o.mean - mean;
    m2 += o.m2 + d * d * (static_cast<double>(n) / total) * o.n;
    mean += d * (static_cast<double>(o.n) / total);
    n = total;
    min = std::min(min, o.min);
    max = std::max(max, o.max);
  }
};

Moments collect_moments(const Kernel& kernel, const SimulationConfig& cfg,
                        std::uint32_t scenario_id, int t) {
  const std::int64_t n_blocks = (cfg.n_sim + kBlockSize - 1) / kBlockSize;
  std::vector<Moments> per_block(n_blocks);
  run_blocks(cfg.n_sim, t,
             [&](std::int64_t b, std::int64_t, std::int64_t count, int) {
               NormalStream s(derive_stream_seed(cfg.seed, scenario_id, b));
               Moments local;
               for (std::int64_t i = 0; i < count; ++i) local.add(kernel(s));
               per_block[b] = local;
             });
  Moments total;
  for (const Moments& m : per_block) total.combine(m);
  return total;
}

// 1-based rank of the alpha-quantile order statistic, ceil(alpha n). The
// product is taken in extended precision and snapped down when the binary
// representation of a decimal alpha overshoots an integer by rounding slop,
// so e.g. alpha = 0.999 with n = 10^6 selects rank 999000.
std::int64_t quantile_rank(std::int64_t n, double alpha) {
  const long double x =
      static_cast<long double>(alpha) * static_cast<long double>(n);
  std::int64_t r = static_cast<std::int64_t>(std::ceil(x));
  if (r > 1 &&
      static_cast<long double>(r - 1) >= x - std::fabs(x) * 1e-15L - 1e-15L) {
    r -= 1;
  }
  return std::clamp<std::int64_t>(r, 1, n);
}

// Exact order statistic of the regenerated loss sample at 1-based global
// rank `rank`, found without retaining the sample. Histogram passes narrow
// an enclosing range until the target cell fits in memory, then a collection
// pass materializes just that cell. The global rank is carried throughout
// and every pass recounts the values below the current range from scratch,
// so correctness never relies on cell edges matching across passes; an edge
// clipped by a rounding ulp is healed by widening the range and repeating.
double streamed_order_stat(const Kernel& kernel, const SimulationConfig& cfg,
                           std::uint32_t scenario_id, int t,
                           std::int64_t rank, double global_min,
                           double global_max) {
  double lo = global_min;
  double hi = global_max;
  const std::size_t value_budget = cfg.max_buffer_bytes / sizeof(double);

  for (int level = 0; level < 256; ++level) {
    if (lo == hi) return lo;

    // Endgame: the range spans only a handful of adjacent doubles. One
    // counting pass over those exact values resolves the rank.
    std::vector<double> candidates;
    for (double v = lo; v < hi && candidates.size() <= 9;
         v = std::nextafter(v, std::numeric_limits<double>::infinity())) {
      candidates.push_back(v);
    }
    if (candidates.size() <= 9) {
      candidates.push_back(hi);
      std::vector<std::int64_t> below_w(t, 0);
      std::vector<std::vector<std::int64_t>> counts_w(
          t, std::vector<std::int64_t>(candidates.size(), 0));
      run_blocks(cfg.n_sim, t,
                 [&](std::int64_t b, std::int64_t, std::int64_t count,
                     int w) {
                   NormalStream s(
                       derive_stream_seed(cfg.seed, scenario_id, b));
                   for (std::int64_t i = 0; i < count; ++i) {
                     const double x = kernel(s);
                     if (x < lo) {
                       ++below_w[w];
                     } else if (x <= hi) {
                       const auto it = std::lower_bound(candidates.begin(),
                                                        candidates.end(), x);
                       ++counts_w[w][it - candidates.begin()];
                     }
                   }
                 });
      std::int64_t cum = 0;
      for (int w = 0; w < t; ++w) cum += below_w[w];
      if (cum >= rank) {
        lo = std::nextafter(lo, -std::numeric_limits<double>::infinity());
        continue;
      }
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        for (int w = 0; w < t; ++w) cum += counts_w[w][c];
        if (cum >= rank) return candidates[c];
      }
      hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
      continue;
    }

    // Histogram pass over [lo, hi]. The cell map is monotone in the value,
    // so the cells slice the range into ordered pieces even where division
    // rounding makes the nominal edges fuzzy by an ulp.
    const double width = hi - lo;
    std::vector<std::int64_t> below_w(t, 0);
    std::vector<std::vector<std::int64_t>> hist_w(
        t, std::vector<std::int64_t>(kHistogramBins, 0));
    run_blocks(cfg.n_sim, t,
               [&](std::int64_t b, std::int64_t, std::int64_t count, int w) {
                 NormalStream s(derive_stream_seed(cfg.seed, scenario_id, b));
                 for (std::int64_t i = 0; i < count; ++i) {
                   const double x = kernel(s);
                   if (x < lo) {
                     ++below_w[w];
                   } else if (x <= hi) {
                     const int cell = std::clamp(
                         static_cast<int>((x - lo) / width * kHistogramBins),
                         0, kHistogramBins - 1);
                     ++hist_w[w][cell];
                   }
                 }
               });

    std::int64_t below = 0;
    for (int w = 0; w < t; ++w) below += below_w[w];
    if (below >= rank) {
      // A refinement clipped the target below the range; widen and retry.
      lo = std::nextafter(lo, -std::numeric_limits<double>::infinity());
      continue;
    }

    std::vector<std::int64_t> hist(kHistogramBins, 0);
    for (int w = 0; w < t; ++w) {
      for (int c = 0; c < kHistogramBins; ++c) hist[c] += hist_w[w][c];
    }

    std::int64_t cum = below;
    int target_cell = -1;
    for (int c = 0; c < kHistogramBins; ++c) {
      cum += hist[c];
      if (cum >= rank) {
        target_cell = c;
        break;
      }
    }
    if (target_cell < 0) {
      // Clipped above the range; widen and retry.
      hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
      continue;
    }

    if (static_cast<std::size_t>(hist[target_cell]) <= value_budget) {
      // Collection pass: materialize the target cell only. The cell map is
      // recomputed with the exact same inputs, so the collected multiset is
      // the one the histogram counted.
      std::vector<std::vector<double>> collected(t);
      run_blocks(cfg.n_sim, t,
                 [&](std::int64_t b, std::int64_t, std::int64_t count,
                     int w) {
                   NormalStream s(
                       derive_stream_seed(cfg.seed, scenario_id, b));
                   for (std::int64_t i = 0; i < count; ++i) {
                     const double x = kernel(s);
                     if (x >= lo && x <= hi) {
                       const int cell = std::clamp(
                           static_cast<int>((x - lo) / width *
                                            kHistogramBins),
                           0, kHistogramBins - 1);
                       if (cell == target_cell) collected[w].push_back(x);
                     }
                   }
                 });
      std::vector<double> vals;
      vals.reserve(hist[target_cell]);
      for (auto& v : collected) vals.insert(vals.end(), v.begin(), v.end());
      const std::int64_t before = cum - hist[target_cell];
      const std::int64_t within = rank - before;
      if (within < 1 || within > static_cast<std::int64_t>(vals.size())) {
        throw std::logic_error("streamed_order_stat: inconsistent counts");
      }
      std::nth_element(vals.begin(), vals.begin() + (within - 1), vals.end());
      return vals[within - 1];
    }

    // Cell too populous to hold; descend into its nominal range. The global
    // rank is unchanged: the next pass recounts everything below the new lo.
    const double cell_lo =
        (target_cell == 0)
            ? lo
            : lo + width * (static_cast<double>(target_cell) / kHistogramBins);
    const double cell_hi =
        (target_cell == kHistogramBins - 1)
            ? hi
            : lo + width * (static_cast<double>(target_cell + 1) /
                            kHistogramBins);
    lo = cell_lo;
    hi = cell_hi;
  }
  throw std::logic_error("streamed_order_stat: refinement did not converge");
}

}  // namespace

double var_quantile(const std::vector<double>& sorted, double alpha) {
  if (sorted.empty()) {
    throw std::domain_error("var_quantile: sample must be non-empty");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("var_quantile: alpha must lie in (0, 1)");
  }
  const std::int64_t r =
      quantile_rank(static_cast<std::int64_t>(sorted.size()), alpha);
  return sorted[r - 1];
}

LossSummary simulate_losses(const UncertaintyModel& m,
                            const SimulationConfig& cfg, int threads,
                            std::uint32_t scenario_id) {
  validate(m);
  validate_config(cfg);

  const Kernel kernel(m, cfg);
  const std::int64_t n = cfg.n_sim;
  const std::int64_t n_blocks = (n + kBlockSize - 1) / kBlockSize;
  const int t = resolve_threads(threads, n_blocks);

  LossSummary out;
  out.n = n;
  out.alpha = cfg.alpha;

  const std::int64_t r = quantile_rank(n, cfg.alpha);
  // Order-statistic band at +-3 standard deviations of the binomial rank
  // count; the spread of the bracketing order statistics estimates the
  // quantile standard error.
  const std::int64_t half_band = static_cast<std::int64_t>(
      std::ceil(3.0 * std::sqrt(n * cfg.alpha * (1.0 - cfg.alpha))));
  const std::int64_t r_lo = std::max<std::int64_t>(1, r - half_band);
  const std::int64_t r_hi = std::min<std::int64_t>(n, r + half_band);

  const bool buffered =
      static_cast<std::size_t>(n) * sizeof(double) <= cfg.max_buffer_bytes;

  if (buffered) {
    std::vector<double> losses(n);
    std::vector<Moments> per_block(n_blocks);
    run_blocks(n, t,
               [&](std::int64_t b, std::int64_t first, std::int64_t count,
                   int) {
                 NormalStream s(derive_stream_seed(cfg.seed, scenario_id, b));
                 Moments local;
                 for (std::int64_t i = 0; i < count; ++i) {
                   const double x = kernel(s);
                   losses[first + i] = x;
                   local.add(x);
                 }
                 per_block[b] = local;
               });
    Moments total;
    for (const Moments& mm : per_block) total.combine(mm);
    std::sort(losses.begin(), losses.end());

    out.mean = total.mean;
    out.min = total.min;
    out.max = total.max;
    out.mean_se = (n > 1) ? std::sqrt(total.m2 / (n - 1) / n) : 0.0;
    out.var_alpha = losses[r - 1];
    out.var_se =
        (r_hi > r_lo) ? (losses[r_hi - 1] - losses[r_lo - 1]) / 6.0 : 0.0;
    out.streamed = false;
    out.losses = std::move(losses);
    return out;
  }

  const Moments total = collect_moments(kernel, cfg, scenario_id, t);
  out.mean = total.mean;
  out.min = total.min;
  out.max = total.max;
  out.mean_se = (n > 1) ? std::sqrt(total.m2 / (n - 1) / n) : 0.0;
  out.streamed = true;

  out.var_alpha =
      streamed_order_stat(kernel, cfg, scenario_id, t, r, total.min, total.max);
  if (r_hi > r_lo) {
    const double q_lo = streamed_order_stat(kernel, cfg, scenario_id, t, r_lo,
                                            total.min, total.max);
    const double q_hi = streamed_order_stat(kernel, cfg, scenario_id, t, r_hi,
                                            total.min, total.max);
    out.var_se = (q_hi - q_lo) / 6.0;
  }
  return out;
}

CapitalResult correct_capital(const LossSummary& s) {
  CapitalResult out;
  out.alpha = s.alpha;
  out.value_at_risk = s.var_alpha;
  out.expected_loss = s.mean;
  out.rc = s.var_alpha - s.mean;
  return out;
}

double add_on(const CapitalResult& correct, const CapitalResult& naive) {
  if (!(naive.rc > 0.0)) {
    throw std::domain_error("add_on: naive rc must be positive");
  }
  return ((correct.rc - naive.rc) +
          (correct.expected_loss - naive.expected_loss)) /
         naive.rc;
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::plain:
      return "plain";
    case Scenario::lgd_only:
      return "lgd_only";
    case Scenario::k_only:
      return "k_only";
    case Scenario::independent:
      return "independent";
    case Scenario::correlated:
      return "correlated";
  }
  throw std::domain_error("scenario_name: unknown scenario");
}

UncertaintyModel scenario_model(const UncertaintyModel& full,
                                const PointEstimates& pe, Scenario s) {
  validate(full);
  if (!(pe.pd_hat > 0.0 && pe.pd_hat < 1.0)) {
    throw std::domain_error("scenario_model: pd_hat must lie in (0, 1)");
  }
  UncertaintyModel m = full;
  switch (s) {
    case Scenario::plain:
      m.k_hat = norm_quantile(pe.pd_hat);
      m.sigma_k = 0.0;
      m.sigma_lgd = 0.0;
      m.rho_lgd_k = 0.0;
      break;
    case Scenario::lgd_only:
      // With the threshold dispersion off, matching the mean default rate
      // forces k back to the plain quantile.
      m.k_hat = norm_quantile(pe.pd_hat);
      m.sigma_k = 0.0;
      m.rho_lgd_k = 0.0;
      break;
    case Scenario::k_only:
      m.sigma_lgd = 0.0;
      m.rho_lgd_k = 0.0;
      break;
    case Scenario::independent:
      m.rho_lgd_k = 0.0;
      break;
    case Scenario::correlated:
      break;
  }
  return m;
}

AddOnReport scenario_addons(const UncertaintyModel& m,
                            const PointEstimates& pe,
                            const SimulationConfig& cfg, int threads) {
  AddOnReport report;
  report.naive = naive_capital(pe, cfg.alpha);

  static constexpr Scenario kOrder[] = {Scenario::lgd_only, Scenario::k_only,
                                        Scenario::independent,
                                        Scenario::correlated};
  for (Scenario s : kOrder) {
    const UncertaintyModel restricted = scenario_model(m, pe, s);
    const LossSummary summary = simulate_losses(
        restricted, cfg, threads, static_cast<std::uint32_t>(s));
    ScenarioResult sr;
    sr.scenario = s;
    sr.name = scenario_name(s);
    sr.capital = correct_capital(summary);
    sr.add_on = add_on(sr.capital, report.naive);
    sr.mean_se = summary.mean_se;
    sr.var_se = summary.var_se;
    report.scenarios.push_back(std::move(sr));
  }
  report.excess_el = report.scenarios.back().capital.expected_loss -
                     report.naive.expected_loss;
  return report;
}

LossHistogram loss_histogram(const LossSummary& s, int bins) {
  if (bins < 1) {
    throw std::domain_error("loss_histogram: bins must be positive");
  }
  if (s.streamed || s.losses.empty()) {
    throw std::domain_error(
        "loss_histogram: loss sample was not retained (streamed run)");
  }
  LossHistogram h;
  h.lo = s.min;
  h.hi = s.max;
  h.counts.assign(bins, 0);
  const double width = s.max - s.min;
  if (width == 0.0) {
    h.counts[0] = s.n;
    return h;
  }
  for (double x : s.losses) {
    const int cell = std::clamp(
        static_cast<int>((x - s.min) / width * bins), 0, bins - 1);
    ++h.counts[cell];
  }
  return h;
}

}  // namespace irbmr
