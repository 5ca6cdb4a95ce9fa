#include "cfmimo/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace cfmimo {

std::string_view to_string(Selection selection) {
  switch (selection) {
    case Selection::None: return "NS";
    case Selection::LargeScale: return "LS";
    case Selection::Exhaustive: return "ES";
  }
  return "?";
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Snr: return "snr_db";
    case SweepAxis::SelectionFraction: return "selection_fraction";
    case SweepAxis::AntennasPerAp: return "antennas_per_ap";
  }
  return "?";
}

std::string Scheme::name() const {
  std::string out{to_string(precoder)};
  out += '+';
  out += to_string(allocation);
  out += '+';
  out += to_string(selection);
  return out;
}

std::string valid_scheme_names() {
  return "precoders {MMSE, MMSE-CONV, ZF, CB} x allocations {OPA, APA, UPA} x "
         "selections {NS, LS, ES}, written PRECODER+ALLOCATION[+SELECTION], e.g. MMSE+OPA+LS";
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

[[noreturn]] void bad_scheme(std::string_view text) {
  throw std::invalid_argument("unknown scheme '" + std::string(text) + "'; valid: " +
                              valid_scheme_names());
}

}  // namespace

Scheme Scheme::parse(std::string_view text) {
  std::vector<std::string> parts;
  std::string token;
  for (char c : text) {
    if (c == '+') {
      parts.push_back(upper(token));
      token.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      token += c;
    }
  }
  parts.push_back(upper(token));
  if (parts.size() < 2 || parts.size() > 3) bad_scheme(text);

  Scheme s;
  if (parts[0] == "MMSE") s.precoder = PrecoderScheme::MmseIterative;
  else if (parts[0] == "MMSE-CONV") s.precoder = PrecoderScheme::MmseConventional;
  else if (parts[0] == "ZF") s.precoder = PrecoderScheme::ZeroForcing;
  else if (parts[0] == "CB") s.precoder = PrecoderScheme::ConjugateBeamforming;
  else bad_scheme(text);

  if (parts[1] == "OPA") s.allocation = AllocationScheme::Optimal;
  else if (parts[1] == "APA") s.allocation = AllocationScheme::Adaptive;
  else if (parts[1] == "UPA") s.allocation = AllocationScheme::Uniform;
  else bad_scheme(text);

  if (parts.size() == 3) {
    if (parts[2] == "NS") s.selection = Selection::None;
    else if (parts[2] == "LS") s.selection = Selection::LargeScale;
    else if (parts[2] == "ES") s.selection = Selection::Exhaustive;
    else bad_scheme(text);
  }
  s.check_supported();
  return s;
}

void Scheme::check_supported() const {
  const bool mmse = precoder == PrecoderScheme::MmseIterative ||
                    precoder == PrecoderScheme::MmseConventional;
  if (allocation == AllocationScheme::Adaptive && !mmse)
    throw std::invalid_argument("scheme " + name() +
                                ": APA needs an MMSE precoder (its cost uses the MMSE normalization f)");
}

LinkBudget make_budget(const SystemConfig& cfg, const ChannelRealization& r, double snr_db) {
  LinkBudget b;
  b.noise_var = cfg.noise_variance();
  b.symbol_power = cfg.symbol_power;
  b.rho_f = snr_to_rho_f(db_to_linear(snr_db), r.G_hat, b.noise_var);
  b.E_tr = cfg.total_power_factor * static_cast<double>(r.antennas()) * b.rho_f;
  return b;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

PrecoderOutput form_precoder(PrecoderScheme scheme, const MatrixXc& G_hat, const LinkBudget& b) {
  MmseParams params{b.E_tr, b.rho_f, b.noise_var, b.symbol_power, RidgeSolve::Auto};
  switch (scheme) {
    case PrecoderScheme::MmseIterative:
      return mmse_precoder(G_hat, VectorXr::Ones(G_hat.cols()), params);
    case PrecoderScheme::MmseConventional:
      return conventional_mmse_precoder(G_hat, params);
    case PrecoderScheme::ZeroForcing:
      return zf_precoder(G_hat);
    case PrecoderScheme::ConjugateBeamforming:
      return cb_precoder(G_hat);
  }
  throw std::logic_error("form_precoder: unhandled scheme");
}

AllocationResult allocate(AllocationScheme scheme, const PrecoderOutput& pre, const MaskedChannel& ch,
                          const MatrixXr& error_variance, const LinkBudget& b,
                          const SolverSettings& solver) {
  switch (scheme) {
    case AllocationScheme::Uniform:
      return upa(pre.delta);
    case AllocationScheme::Optimal: {
      const SinrCoefficients c = sinr_coefficients(pre.P, ch.G_hat, error_variance, b.rho_f, b.noise_var);
      OpaSettings s;
      s.iterations = solver.opa_iterations;
      s.tol = solver.opa_tol;
      return opa_bisection(c, pre.delta, s);
    }
    case AllocationScheme::Adaptive: {
      const MseCost cost{pre.P, ch.G_hat, pre.f, b.rho_f, b.noise_var, b.symbol_power};
      ApaSettings s;
      s.step = solver.apa_step;
      s.iterations = solver.apa_iterations;
      return apa_sgd(cost, pre.delta, s);
    }
  }
  throw std::logic_error("allocate: unhandled scheme");
}

}  // namespace

PipelineResult evaluate_with_mask(const ChannelRealization& r, const SelectionMask& mask,
                                  const Scheme& scheme, const LinkBudget& budget,
                                  const SolverSettings& solver) {
  scheme.check_supported();
  PipelineResult out;
  out.mask = mask;
  const MaskedChannel ch = apply_mask(mask, r);
  const MatrixXr error_variance = ch.error_variance();

  auto t0 = Clock::now();
  PrecoderOutput pre = form_precoder(scheme.precoder, ch.G_hat, budget);
  out.trace.precoder_formations = 1;
  out.trace.precoding_seconds += seconds_since(t0);

  t0 = Clock::now();
  out.first = allocate(scheme.allocation, pre, ch, error_variance, budget, solver);
  out.trace.allocation_solves = 1;
  out.trace.solver_iterations.push_back(out.first.iterations);
  out.trace.allocation_seconds += seconds_since(t0);

  if (scheme.precoder == PrecoderScheme::MmseConventional) {
    // no re-formation and no second allocation
    out.final = out.first;
  } else {
    if (scheme.precoder == PrecoderScheme::MmseIterative) {
      t0 = Clock::now();
      pre = reform_mmse(pre, out.first.n_diag(), budget.rho_f);
      out.trace.precoder_formations = 2;
      out.trace.precoding_seconds += seconds_since(t0);
    }
    t0 = Clock::now();
    out.final = allocate(scheme.allocation, pre, ch, error_variance, budget, solver);
    out.trace.allocation_solves = 2;
    out.trace.solver_iterations.push_back(out.final.iterations);
    out.trace.allocation_seconds += seconds_since(t0);
  }

  out.precoder = std::move(pre);
  out.coeffs = sinr_coefficients(out.precoder.P, ch.G_hat, error_variance, budget.rho_f, budget.noise_var);
  out.metrics = rates(analytic_sinr(out.coeffs, out.final.eta));
  return out;
}

PipelineResult run_scheme(const ChannelRealization& r, const SystemConfig& cfg, const Scheme& scheme,
                          const LinkBudget& budget) {
  const int N = cfg.antennas_per_ap;
  switch (scheme.selection) {
    case Selection::None:
      return evaluate_with_mask(r, full_mask(cfg.num_aps, N, cfg.num_users), scheme, budget, cfg.solver);
    case Selection::LargeScale:
      return evaluate_with_mask(r, ls_aps(r.beta, cfg.selected_aps, N), scheme, budget, cfg.solver);
    case Selection::Exhaustive: {
      const EsResult es = es_aps(
          cfg.num_aps, cfg.selected_aps, cfg.num_users, N,
          [&](const SelectionMask& m) {
            return evaluate_with_mask(r, m, scheme, budget, cfg.solver).metrics.min_sinr;
          },
          cfg.solver.es_budget);
      PipelineResult out = evaluate_with_mask(r, es.mask, scheme, budget, cfg.solver);
      out.trace.es_candidates = es.candidates;
      return out;
    }
  }
  throw std::logic_error("run_scheme: unhandled selection");
}

PipelineResult run_trial(const SystemConfig& cfg, const Scheme& scheme, double snr_db,
                         std::uint64_t trial) {
  cfg.validate();
  const ChannelRealization r = make_realization(cfg, trial);
  return run_scheme(r, cfg, scheme, make_budget(cfg, r, snr_db));
}

BerResult measure_ber(const PipelineResult& result, const ChannelRealization& r,
                      const LinkBudget& budget, const SystemConfig& cfg, std::uint64_t trial) {
  const MaskedChannel ch = apply_mask(result.mask, r);
  const MatrixXc G = ch.G();
  Rng symbols = make_stream(cfg.rng_seed, trial, Stream::Symbols);
  Rng noise = make_stream(cfg.rng_seed, trial, Stream::Noise);
  const BerLink link{result.precoder.P, result.final.eta, G, ch.G_hat, budget.rho_f, budget.noise_var};
  return ber_qpsk(link, cfg.solver.symbols_per_packet, cfg.solver.packets, symbols, noise);
}

std::pair<double, double> mean_and_se(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

namespace {

struct SweepPoint {
  SystemConfig cfg;
  double snr_db = 0.0;
  double axis_value = 0.0;
  std::string axis_name;
};

std::vector<SweepPoint> plan_points(const SystemConfig& cfg, const SweepSpec& spec) {
  std::vector<SweepPoint> points;
  if (spec.axis == SweepAxis::Snr) {
    for (double snr : cfg.snr_grid_db) points.push_back({cfg, snr, snr, "snr_db"});
    return points;
  }
  if (spec.values.empty()) throw std::invalid_argument("run_sweep: axis values are empty");
  const bool several_snr = cfg.snr_grid_db.size() > 1;
  for (double snr : cfg.snr_grid_db) {
    std::string name{to_string(spec.axis)};
    if (several_snr) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "@snr_db=%g", snr);
      name += buf;
    }
    for (double v : spec.values) {
      SystemConfig c = cfg;
      if (spec.axis == SweepAxis::SelectionFraction) {
        if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("run_sweep: selection fraction must lie in (0, 1]");
        c.selected_aps = std::clamp(static_cast<int>(std::lround(v * cfg.num_aps)), 1, cfg.num_aps);
      } else {
        const int n = static_cast<int>(std::lround(v));
        const int M = cfg.total_antennas();
        if (n < 1 || M % n != 0)
          throw std::invalid_argument("run_sweep: antennas_per_ap must divide the total antenna count");
        const double fraction = static_cast<double>(cfg.selected_aps) / cfg.num_aps;
        c.antennas_per_ap = n;
        c.num_aps = M / n;
        c.selected_aps = std::clamp(static_cast<int>(std::lround(fraction * c.num_aps)), 1, c.num_aps);
      }
      c.validate();
      points.push_back({c, snr, v, name});
    }
  }
  return points;
}

int worker_count(const SystemConfig& cfg, int trials) {
  int n = cfg.solver.threads > 0 ? cfg.solver.threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(n, 1, std::max(1, trials));
}

/// Runs body(trial) for every trial on a small pool; rethrows the first failure.
template <class Body>
void for_each_trial(int trials, int workers, const Body& body, const ProgressFn& progress) {
  std::atomic<int> next{0};
  std::mutex mu;
  int done = 0;
  std::exception_ptr failure;
  auto work = [&] {
    while (true) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        body(t);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(trials);
        return;
      }
      std::lock_guard lock(mu);
      ++done;
      if (progress) progress(done, trials);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

SweepResult run_sweep(const SystemConfig& cfg, const SweepSpec& spec, const ProgressFn& progress) {
  cfg.validate();
  if (spec.schemes.empty()) throw std::invalid_argument("run_sweep: no schemes given");
  for (const auto& s : spec.schemes) s.check_supported();
  const std::vector<SweepPoint> points = plan_points(cfg, spec);
  const int trials = cfg.solver.trials;
  const std::size_t rows = points.size() * spec.schemes.size();

  // per_trial[trial][row]
  std::vector<std::vector<TrialSample>> per_trial(trials, std::vector<TrialSample>(rows));
  for_each_trial(
      trials, worker_count(cfg, trials),
      [&](int t) {
        std::optional<ChannelRealization> r;
        const SystemConfig* geometry = nullptr;
        for (std::size_t p = 0; p < points.size(); ++p) {
          const SweepPoint& pt = points[p];
          if (!geometry || geometry->num_aps != pt.cfg.num_aps ||
              geometry->antennas_per_ap != pt.cfg.antennas_per_ap) {
            r = make_realization(pt.cfg, static_cast<std::uint64_t>(t));
            geometry = &pt.cfg;
          }
          const LinkBudget budget = make_budget(pt.cfg, *r, pt.snr_db);
          for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
            const PipelineResult res = run_scheme(*r, pt.cfg, spec.schemes[s], budget);
            TrialSample& sample = per_trial[t][p * spec.schemes.size() + s];
            sample.sum_rate = res.metrics.sum_rate;
            sample.min_sinr = res.metrics.min_sinr;
            sample.min_sinr_db = linear_to_db(std::max(res.metrics.min_sinr, 1e-30));
            if (spec.measure_ber)
              sample.ber = measure_ber(res, *r, budget, pt.cfg, static_cast<std::uint64_t>(t)).ber();
          }
        }
      },
      progress);

  SweepResult out;
  out.samples.assign(rows, std::vector<TrialSample>(trials));
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
      const std::size_t row = p * spec.schemes.size() + s;
      std::vector<double> sr, ms, ber;
      for (int t = 0; t < trials; ++t) {
        const TrialSample& x = per_trial[t][row];
        out.samples[row][t] = x;
        sr.push_back(x.sum_rate);
        ms.push_back(x.min_sinr_db);
        if (x.ber) ber.push_back(*x.ber);
      }
      SweepRow r;
      r.scheme = spec.schemes[s].name();
      r.axis_name = points[p].axis_name;
      r.axis_value = points[p].axis_value;
      std::tie(r.sum_rate_mean, r.sum_rate_se) = mean_and_se(sr);
      std::tie(r.min_sinr_db_mean, r.min_sinr_db_se) = mean_and_se(ms);
      if (spec.measure_ber) {
        const auto [m, se] = mean_and_se(ber);
        r.ber_mean = m;
        r.ber_se = se;
      }
      r.trials = trials;
      r.seed = cfg.rng_seed;
      out.rows.push_back(std::move(r));
    }
  }
  return out;
}

LearningCurve run_learning_curve(const SystemConfig& cfg, const Scheme& scheme, double snr_db,
                                 const ProgressFn& progress) {
  cfg.validate();
  if (scheme.allocation != AllocationScheme::Adaptive)
    throw std::invalid_argument("run_learning_curve: scheme must use APA");
  const int trials = cfg.solver.trials;
  LearningCurve out;
  out.traces.resize(trials);
  for_each_trial(
      trials, worker_count(cfg, trials),
      [&](int t) {
        const ChannelRealization r = make_realization(cfg, static_cast<std::uint64_t>(t));
        const PipelineResult res = run_scheme(r, cfg, scheme, make_budget(cfg, r, snr_db));
        out.traces[t] = res.first.cost_trace;
      },
      progress);
  const std::size_t len = out.traces.empty() ? 0 : out.traces.front().size();
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<double> column;
    for (const auto& tr : out.traces) column.push_back(tr[i]);
    const auto [m, se] = mean_and_se(column);
    out.cost_mean.push_back(m);
    out.cost_se.push_back(se);
  }
  return out;
}

}  // namespace cfmimo
