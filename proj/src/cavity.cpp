#include "ldnoma/cavity.hpp"

#include "ldnoma/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ldnoma {

namespace {

std::string describe(cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << "z = " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

cplx user_map(cplx delta, cplx z, const DensityParams& p) {
  return 1.0 / (z - p.gamma / (1.0 - p.alpha * delta));
}

cplx gram_transform(cplx delta, cplx z, const DensityParams& p) {
  return 1.0 / (z - p.beta / (1.0 - p.alpha * delta));
}

// Roots of alpha z D^2 - (z - gamma + alpha) D + 1 = 0.
std::pair<cplx, cplx> quadratic_roots(cplx z, const DensityParams& p) {
  const cplx a2 = p.alpha * z;
  const cplx a1 = -(z - p.gamma + p.alpha);
  const cplx disc = std::sqrt(a1 * a1 - 4.0 * a2);
  const cplx plus = a1 + disc;
  const cplx minus = a1 - disc;
  const cplx q = -0.5 * (std::abs(plus) >= std::abs(minus) ? plus : minus);
  return {q / a2, 1.0 / q};
}

bool on_physical_branch(cplx delta) {
  return delta.imag() <= 1e-12 * std::max(1.0, std::abs(delta));
}

} // namespace

CavityState solve_fixed_point(cplx z, const DensityParams& p, double tol,
                              const FixedPointOptions& opts) {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("solve_fixed_point: Im z must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_fixed_point: tol must be > 0");

  CavityState st;
  st.z = z;
  cplx delta = opts.start == FixedPointStart::Zero ? cplx{0.0, 0.0} : 1.0 / z;
  const double eta = opts.damping;
  double residual = std::abs(user_map(delta, z, p) - delta);
  std::size_t it = 0;
  while (residual >= tol && it < opts.max_iterations) {
    delta = (1.0 - eta) * delta + eta * user_map(delta, z, p);
    residual = std::abs(user_map(delta, z, p) - delta);
    ++it;
  }
  st.iterations = it;

  if (residual >= tol) {
    const auto [r1, r2] = quadratic_roots(z, p);
    const double res1 = std::abs(user_map(r1, z, p) - r1);
    const double res2 = std::abs(user_map(r2, z, p) - r2);
    const bool ok1 = on_physical_branch(r1);
    const bool ok2 = on_physical_branch(r2);
    if (!ok1 && !ok2) {
      throw CavityError("cavity fixed point: no root with Im <= 0 at " + describe(z));
    }
    if (ok1 && (!ok2 || res1 <= res2)) {
      delta = r1;
      residual = res1;
    } else {
      delta = r2;
      residual = res2;
    }
    st.used_quadratic = true;
    // The quadratic root is exact up to rounding, which can exceed a very
    // tight tol when |D| is large; judge it relative to its magnitude.
    if (!(residual < std::max(tol, 1e-12 * std::abs(delta)))) {
      throw CavityError("cavity fixed point did not converge at " + describe(z));
    }
  }
  if (!on_physical_branch(delta)) {
    throw CavityError("cavity fixed point converged to a root with Im > 0 at " + describe(z));
  }
  st.delta = delta;
  st.delta_tilde = gram_transform(delta, z, p);
  st.residual = residual;
  return st;
}

std::vector<InversionPoint> stieltjes_inversion(std::span<const double> lambda_grid,
                                                const DensityParams& p, double epsilon,
                                                double tol, unsigned threads) {
  if (!(epsilon > 0.0 && epsilon <= 1e-3)) {
    throw std::invalid_argument("stieltjes_inversion: epsilon must be in (0, 1e-3]");
  }
  for (const double l : lambda_grid) {
    if (l < p.lambda_minus - 1.0 || l > p.lambda_plus + 1.0) {
      throw std::invalid_argument("stieltjes_inversion: grid point outside [lambda- - 1, lambda+ + 1]");
    }
  }
  std::vector<InversionPoint> out(lambda_grid.size());
  parallel_for(lambda_grid.size(), threads, [&](std::size_t i) {
    auto& pt = out[i];
    pt.lambda = lambda_grid[i];
    try {
      const auto st = solve_fixed_point({pt.lambda, epsilon}, p, tol);
      pt.density = -st.delta_tilde.imag() / std::numbers::pi;
      pt.converged = true;
    } catch (const CavityError& e) {
      pt.error = e.what();
    }
  });
  return out;
}

cplx GraphCavityMessages::adjacency_transform() const {
  cplx sum{0.0, 0.0};
  for (const auto& v : node_variance) sum += v;
  return sum / static_cast<double>(node_variance.size());
}

GraphCavityMessages cavity_on_graph(const SparseSignatureMatrix& a, cplx z, double tol,
                                    const GraphCavityOptions& opts) {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("cavity_on_graph: Im z must be > 0");
  const std::size_t n = a.rows();
  const std::size_t nodes = a.rows() + a.cols();
  const std::size_t m = a.nonzeros();
  const auto& entries = a.entries();

  std::vector<std::uint32_t> src(2 * m), dst(2 * m);
  std::vector<double> weight(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = entries[i].row;
    const auto u = static_cast<std::uint32_t>(n + entries[i].col);
    src[i] = r;
    dst[i] = u;
    src[m + i] = u;
    dst[m + i] = r;
    weight[i] = weight[m + i] = entries[i].value * entries[i].value;
  }
  auto reverse = [m](std::size_t e) { return e < m ? e + m : e - m; };

  GraphCavityMessages out;
  out.z = z;
  out.n_resources = n;
  if (opts.warm_start) {
    if (opts.warm_start->size() != 2 * m) {
      throw std::invalid_argument("cavity_on_graph: warm start has wrong size");
    }
    out.messages = *opts.warm_start;
  } else {
    out.messages.assign(2 * m, 1.0 / z);
  }

  auto& msg = out.messages;
  std::vector<cplx> incoming(nodes);
  std::vector<cplx> next(2 * m);
  const double eta = opts.damping;
  auto gather = [&] {
    std::fill(incoming.begin(), incoming.end(), cplx{0.0, 0.0});
    for (std::size_t e = 0; e < 2 * m; ++e) incoming[dst[e]] += weight[e] * msg[e];
  };

  double change = 0.0;
  std::size_t sweep = 0;
  for (; sweep < opts.max_sweeps; ++sweep) {
    gather();
    change = 0.0;
    for (std::size_t e = 0; e < 2 * m; ++e) {
      const std::size_t back = reverse(e);
      const cplx cavity_sum = incoming[src[e]] - weight[back] * msg[back];
      const cplx updated = (1.0 - eta) * msg[e] + eta / (z - cavity_sum);
      change = std::max(change, std::abs(updated - msg[e]));
      next[e] = updated;
    }
    msg.swap(next);
    if (change < tol) {
      ++sweep;
      break;
    }
  }
  out.sweeps = sweep;
  out.max_change = change;
  if (!(change < tol)) {
    throw CavityError("graph cavity messages did not converge at " + describe(z));
  }

  gather();
  out.node_variance.resize(nodes);
  for (std::size_t v = 0; v < nodes; ++v) out.node_variance[v] = 1.0 / (z - incoming[v]);
  return out;
}

MessageSpread message_spread(const GraphCavityMessages& m) {
  const std::size_t half = m.messages.size() / 2;
  auto spread = [&](std::size_t begin) {
    if (half < 2) return 0.0;
    cplx mean{0.0, 0.0};
    for (std::size_t e = begin; e < begin + half; ++e) mean += m.messages[e];
    mean /= static_cast<double>(half);
    double ss = 0.0;
    for (std::size_t e = begin; e < begin + half; ++e) ss += std::norm(m.messages[e] - mean);
    return std::sqrt(ss / static_cast<double>(half - 1));
  };
  return MessageSpread{spread(0), spread(half)};
}

GramTransform gram_density_from_adjacency_transform(cplx g_adjacency, cplx z,
                                                    const DensityParams& p) {
  const cplx w = z * z / p.d;
  if (w == cplx{0.0, 0.0}) {
    throw std::invalid_argument("gram transform: w = 0 is a pole of the zero-atom correction");
  }
  const cplx g_squared = g_adjacency / z;  // transform of the squared law at z^2 = d w
  const cplx value = 0.5 * (1.0 + p.beta) * p.d * g_squared - 0.5 * (p.beta - 1.0) / w;
  return GramTransform{w, value};
}

std::vector<InversionPoint> graph_density(const SparseSignatureMatrix& a,
                                          std::span<const double> lambda_grid, double epsilon,
                                          double tol) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("graph_density: epsilon must be > 0");
  const auto p = DensityParams::make(a.spec().beta(), static_cast<double>(a.spec().col_degree));
  std::vector<InversionPoint> out(lambda_grid.size());
  std::vector<cplx> warm;
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    auto& pt = out[i];
    pt.lambda = lambda_grid[i];
    const cplx w{pt.lambda, epsilon};
    const cplx z = std::sqrt(p.d * w);
    try {
      GraphCavityOptions opts;
      if (!warm.empty()) opts.warm_start = &warm;
      auto msgs = cavity_on_graph(a, z, tol, opts);
      const auto g = gram_density_from_adjacency_transform(msgs.adjacency_transform(), z, p);
      pt.density = -g.value.imag() / std::numbers::pi;
      pt.converged = true;
      warm = std::move(msgs.messages);
    } catch (const CavityError& e) {
      pt.error = e.what();
      warm.clear();
    }
  }
  return out;
}

} // namespace ldnoma
