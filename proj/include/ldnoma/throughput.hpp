#pragma once

#include "ldnoma/graphgen.hpp"
#include "ldnoma/spectra.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ldnoma {

// All throughputs are bits/s/Hz per dimension; snr is the linear per-user SNR.

// 1/2 * integral of log2(1 + snr lambda) against the law.
double law_throughput(double snr, const SpectralLaw& law);

double regular_throughput(double snr, const DensityParams& p);
double dense_rs_throughput(double snr, double beta);
// No-spreading sum capacity of the real channel, 1/2 log2(1 + beta snr).
double cover_wyner_bound(double snr, double beta);

// Eb/N0 = beta snr / (2 C), linear. Throws std::invalid_argument if C <= 0.
double ebno_from_snr(double snr, double beta, double capacity);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

class BracketError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// snr in [1e-6, 1e6] at which beta snr / (2 C(snr)) equals the target, by
// bisection in log snr after checking the map is increasing on a scan grid.
// Throws BracketError when the target is not attained in the bracket.
double snr_for_ebno(double ebno_target, double beta,
                    const std::function<double(double)>& capacity);

// d == nullopt selects the dense (Marchenko-Pastur) curve.
double snr_for_ebno(double ebno_target, double beta, std::optional<double> d);

enum class Ensemble { Regular, Irregular };

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials_used = 0;
  std::size_t trials_failed = 0;
};

// (1/2N) log2 det(I + snr A A^T / d) averaged over trials, for each snr.
// Trial t uses realization t of the spec; sums run in trial order.
std::vector<McEstimate> finite_n_throughput_mc(const EnsembleSpec& spec,
                                               std::span<const double> snrs, std::size_t trials,
                                               Ensemble ensemble = Ensemble::Regular,
                                               unsigned threads = 1);

McEstimate finite_n_throughput_mc(const EnsembleSpec& spec, double snr, std::size_t trials,
                                  Ensemble ensemble = Ensemble::Regular, unsigned threads = 1);

enum class SweepVariable { Load, Sparsity, Ebno };

std::string_view to_string(SweepVariable v);
SweepVariable parse_sweep_variable(std::string_view text);

struct CurveSet {
  bool regular = false;
  bool dense_rs = false;
  bool cover_wyner = false;
  bool regular_mc = false;
  bool irregular_mc = false;

  // Comma-separated names: regular, dense_rs, cover_wyner, regular_mc,
  // irregular_mc, or "all" / "analytic".
  static CurveSet parse(std::string_view text);
  bool any_mc() const { return regular_mc || irregular_mc; }
};

struct McSettings {
  std::size_t n_resources = 200;
  std::size_t trials = 100;
  EntryMode entry_mode = EntryMode::Rademacher;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

// Either a fixed linear snr shared by all curves, or a fixed linear Eb/N0 at
// which each analytic curve runs at its own snr. MC curves run at the snr of
// the regular asymptotic curve.
struct OperatingPoint {
  enum class Kind { Snr, Ebno } kind = Kind::Snr;
  double value = 1.0;
};

struct SweepRow {
  double x = 0.0;
  std::optional<double> regular, dense_rs, cover_wyner;
  std::optional<double> regular_mc, regular_mc_stderr;
  std::optional<double> irregular_mc, irregular_mc_stderr;
  std::string error;  // empty when every requested curve was evaluated
};

SweepRow evaluate_point(double x, double beta, double d, const OperatingPoint& op,
                        const CurveSet& curves, const McSettings& mc);

struct SweepSpec {
  SweepVariable variable = SweepVariable::Load;
  double lo = 1.0;
  double hi = 3.0;
  std::size_t steps = 5;
  double beta = 1.5;     // fixed unless swept
  double d = 2.0;        // fixed unless swept
  double ebno_db = 10.0; // fixed unless swept
  CurveSet curves{true, true, true, false, false};
  McSettings mc{};
};

// Grid x_i = lo + i (hi - lo) / (steps - 1). LOAD grids keep only points
// with integer beta*d > 1.
std::vector<double> sweep_grid(const SweepSpec& spec);

std::vector<SweepRow> sweep(const SweepSpec& spec);

} // namespace ldnoma
