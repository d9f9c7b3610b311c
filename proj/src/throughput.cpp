#include "ldnoma/throughput.hpp"

#include "ldnoma/parallel.hpp"
#include "ldnoma/quadrature.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ldnoma {

double law_throughput(double snr, const SpectralLaw& law) {
  if (!(snr >= 0.0) || !std::isfinite(snr)) {
    throw std::invalid_argument("throughput: snr must be finite and >= 0");
  }
  if (snr == 0.0) return 0.0;
  auto f = [&](double lambda) { return std::log2(1.0 + snr * lambda) * law.density(lambda); };
  QuadratureOptions opts;
  opts.abs_tol = 1e-13;
  return 0.5 * integrate_sqrt_edges(f, law.lo, law.hi, opts).value;
}

double regular_throughput(double snr, const DensityParams& p) {
  return law_throughput(snr, regular_law(p));
}

double dense_rs_throughput(double snr, double beta) {
  return law_throughput(snr, marchenko_pastur_law(beta));
}

double cover_wyner_bound(double snr, double beta) {
  if (beta < 1.0) throw std::invalid_argument("cover_wyner_bound: beta must be >= 1");
  return 0.5 * std::log2(1.0 + beta * snr);
}

double ebno_from_snr(double snr, double beta, double capacity) {
  if (!(capacity > 0.0)) throw std::invalid_argument("ebno_from_snr: capacity must be > 0");
  return beta * snr / (2.0 * capacity);
}

double snr_for_ebno(double ebno_target, double beta,
                    const std::function<double(double)>& capacity) {
  if (!(ebno_target > std::numbers::ln2)) {
    throw BracketError("Eb/N0 target must exceed ln 2 (-1.59 dB)");
  }
  auto ebno = [&](double log_snr) {
    const double snr = std::exp(log_snr);
    return ebno_from_snr(snr, beta, capacity(snr));
  };
  double lo = std::log(1e-6);
  double hi = std::log(1e6);

  constexpr int scan_points = 25;
  double prev = ebno(lo);
  for (int i = 1; i <= scan_points; ++i) {
    const double x = lo + (hi - lo) * i / scan_points;
    const double cur = ebno(x);
    if (!(cur > prev)) throw BracketError("Eb/N0(snr) is not increasing on the scan grid");
    prev = cur;
  }
  const double f_lo = ebno(lo);
  const double f_hi = prev;
  if (ebno_target < f_lo || ebno_target > f_hi) {
    std::ostringstream os;
    os << "Eb/N0 target " << ebno_target << " outside attainable range [" << f_lo << ", " << f_hi
       << "] for snr in [1e-6, 1e6]";
    throw BracketError(os.str());
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ebno(mid) < ebno_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(0.5 * (lo + hi));
}

double snr_for_ebno(double ebno_target, double beta, std::optional<double> d) {
  if (d) {
    const auto p = DensityParams::make(beta, *d);
    return snr_for_ebno(ebno_target, beta, [&](double s) { return regular_throughput(s, p); });
  }
  const auto law = marchenko_pastur_law(beta);
  return snr_for_ebno(ebno_target, beta, [&](double s) { return law_throughput(s, law); });
}

std::vector<McEstimate> finite_n_throughput_mc(const EnsembleSpec& spec,
                                               std::span<const double> snrs, std::size_t trials,
                                               Ensemble ensemble, unsigned threads) {
  if (trials == 0) throw std::invalid_argument("finite_n_throughput_mc: trials must be >= 1");
  if (ensemble == Ensemble::Regular) {
    spec.validate_regular();
  } else {
    spec.validate_irregular();
  }
  const std::size_t k = snrs.size();
  const double half_over_n = 0.5 / static_cast<double>(spec.n_resources);

  // per_trial[t * k + j], NaN marks a failed trial.
  std::vector<double> per_trial(trials * k, std::nan(""));
  parallel_for(trials, threads, [&](std::size_t t) {
    try {
      const auto a = ensemble == Ensemble::Regular ? generate_regular(spec, t)
                                                   : generate_irregular(spec, t);
      const auto s = empirical_spectrum(a, t);
      for (std::size_t j = 0; j < k; ++j) {
        double acc = 0.0;
        for (const double lambda : s.eigenvalues) acc += std::log2(1.0 + snrs[j] * lambda);
        per_trial[t * k + j] = half_over_n * acc;
      }
    } catch (const GenerationError&) {
    } catch (const EigenSolverError&) {
    }
  });

  std::vector<McEstimate> out(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto& est = out[j];
    double sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double v = per_trial[t * k + j];
      if (std::isnan(v)) {
        ++est.trials_failed;
        continue;
      }
      sum += v;
      ++est.trials_used;
    }
    if (est.trials_used == 0) continue;
    est.mean = sum / static_cast<double>(est.trials_used);
    double ss = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double v = per_trial[t * k + j];
      if (!std::isnan(v)) ss += (v - est.mean) * (v - est.mean);
    }
    if (est.trials_used > 1) {
      const double n = static_cast<double>(est.trials_used);
      est.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
  }
  return out;
}

McEstimate finite_n_throughput_mc(const EnsembleSpec& spec, double snr, std::size_t trials,
                                  Ensemble ensemble, unsigned threads) {
  const double snrs[] = {snr};
  return finite_n_throughput_mc(spec, snrs, trials, ensemble, threads).front();
}

std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::Load: return "load";
    case SweepVariable::Sparsity: return "sparsity";
    case SweepVariable::Ebno: return "ebno";
  }
  return "?";
}

namespace {

std::string lower(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-9; }

void append_error(std::string& dst, const std::string& what) {
  if (!dst.empty()) dst += "; ";
  dst += what;
}

} // namespace

SweepVariable parse_sweep_variable(std::string_view text) {
  const auto s = lower(text);
  if (s == "load") return SweepVariable::Load;
  if (s == "sparsity") return SweepVariable::Sparsity;
  if (s == "ebno") return SweepVariable::Ebno;
  throw std::invalid_argument("unknown sweep variable '" + std::string(text) + "'");
}

CurveSet CurveSet::parse(std::string_view text) {
  CurveSet c;
  std::stringstream ss{std::string(text)};
  std::string item;
  bool any = false;
  while (std::getline(ss, item, ',')) {
    const auto name = lower(item);
    if (name.empty()) continue;
    any = true;
    if (name == "regular") c.regular = true;
    else if (name == "dense_rs") c.dense_rs = true;
    else if (name == "cover_wyner") c.cover_wyner = true;
    else if (name == "regular_mc") c.regular_mc = true;
    else if (name == "irregular_mc") c.irregular_mc = true;
    else if (name == "analytic") c.regular = c.dense_rs = c.cover_wyner = true;
    else if (name == "all") c = CurveSet{true, true, true, true, true};
    else throw std::invalid_argument("unknown curve '" + item + "'");
  }
  if (!any) throw std::invalid_argument("no curves selected");
  return c;
}

SweepRow evaluate_point(double x, double beta, double d, const OperatingPoint& op,
                        const CurveSet& curves, const McSettings& mc) {
  SweepRow row;
  row.x = x;
  const auto p = DensityParams::make(beta, d);
  const bool by_ebno = op.kind == OperatingPoint::Kind::Ebno;

  auto attempt = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      append_error(row.error, std::string(name) + ": " + e.what());
    }
  };

  std::optional<double> snr_regular;
  if (curves.regular || curves.any_mc()) {
    attempt("regular", [&] {
      snr_regular = by_ebno ? snr_for_ebno(op.value, beta, d) : op.value;
      if (curves.regular) row.regular = regular_throughput(*snr_regular, p);
    });
  }
  if (curves.dense_rs) {
    attempt("dense_rs", [&] {
      const double s = by_ebno ? snr_for_ebno(op.value, beta, std::nullopt) : op.value;
      row.dense_rs = dense_rs_throughput(s, beta);
    });
  }
  if (curves.cover_wyner) {
    attempt("cover_wyner", [&] {
      const double s =
          by_ebno ? snr_for_ebno(op.value, beta, [&](double v) { return cover_wyner_bound(v, beta); })
                  : op.value;
      row.cover_wyner = cover_wyner_bound(s, beta);
    });
  }

  if (curves.any_mc() && snr_regular) {
    attempt("mc", [&] {
      const double users = beta * static_cast<double>(mc.n_resources);
      if (!near_integer(d) || !near_integer(users)) {
        throw EnsembleError("MC curves need integer d and integer K = beta N");
      }
      EnsembleSpec spec;
      spec.n_resources = mc.n_resources;
      spec.n_users = static_cast<std::size_t>(std::llround(users));
      spec.col_degree = static_cast<std::size_t>(std::llround(d));
      spec.entry_mode = mc.entry_mode;
      spec.seed = mc.seed;
      if (curves.regular_mc) {
        const auto est = finite_n_throughput_mc(spec, *snr_regular, mc.trials, Ensemble::Regular,
                                                mc.threads);
        if (est.trials_used > 0) {
          row.regular_mc = est.mean;
          row.regular_mc_stderr = est.std_error;
        }
      }
      if (curves.irregular_mc) {
        const auto est = finite_n_throughput_mc(spec, *snr_regular, mc.trials,
                                                Ensemble::Irregular, mc.threads);
        if (est.trials_used > 0) {
          row.irregular_mc = est.mean;
          row.irregular_mc_stderr = est.std_error;
        }
      }
    });
  }
  return row;
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
  if (spec.steps == 0) throw std::invalid_argument("sweep: steps must be >= 1");
  if (spec.steps > 1 && !(spec.hi >= spec.lo)) throw std::invalid_argument("sweep: hi < lo");
  std::vector<double> grid;
  for (std::size_t i = 0; i < spec.steps; ++i) {
    const double x = spec.steps == 1
                         ? spec.lo
                         : spec.lo + (spec.hi - spec.lo) * static_cast<double>(i) /
                                         static_cast<double>(spec.steps - 1);
    if (spec.variable == SweepVariable::Load) {
      const double row_degree = x * spec.d;
      if (!near_integer(row_degree) || std::round(row_degree) <= 1.0) continue;
    }
    grid.push_back(x);
  }
  return grid;
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
  std::vector<SweepRow> rows;
  for (const double x : sweep_grid(spec)) {
    double beta = spec.beta, d = spec.d, ebno_db = spec.ebno_db;
    switch (spec.variable) {
      case SweepVariable::Load: beta = x; break;
      case SweepVariable::Sparsity: d = x; break;
      case SweepVariable::Ebno: ebno_db = x; break;
    }
    const OperatingPoint op{OperatingPoint::Kind::Ebno, db_to_linear(ebno_db)};
    try {
      rows.push_back(evaluate_point(x, beta, d, op, spec.curves, spec.mc));
    } catch (const std::exception& e) {
      SweepRow row;
      row.x = x;
      row.error = e.what();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

} // namespace ldnoma
