#pragma once

#include "ldnoma/graphgen.hpp"
#include "ldnoma/spectra.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldnoma {

using cplx = std::complex<double>;

class CavityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Symmetric cavity solution at spectral point z (Im z > 0).
//   delta       : user-side cavity variance, Delta = 1 / (z - gamma / (1 - alpha Delta))
//   delta_tilde : Cauchy transform of the A A^T / d law, 1 / (z - beta / (1 - alpha Delta))
struct CavityState {
  cplx z;
  cplx delta;
  cplx delta_tilde;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool used_quadratic = false;
};

enum class FixedPointStart { Zero, InverseZ };

struct FixedPointOptions {
  double damping = 0.5;
  std::size_t max_iterations = 100000;
  FixedPointStart start = FixedPointStart::Zero;
};

// Damped iteration on Delta; when it does not reach tol within the cap, the
// equivalent quadratic alpha z D^2 - (z - gamma + alpha) D + 1 = 0 is solved
// and the root with Im D <= 0 kept. Throws CavityError on failure or when the
// accepted root is on the wrong branch.
CavityState solve_fixed_point(cplx z, const DensityParams& p, double tol,
                              const FixedPointOptions& opts = {});

struct InversionPoint {
  double lambda = 0.0;
  double density = 0.0;
  bool converged = false;
  std::string error;
};

// rho(lambda) ~ -Im delta_tilde(lambda + i epsilon) / pi per grid point.
// Failures are recorded per point. Grid points are independent and may be
// evaluated on `threads` workers.
std::vector<InversionPoint> stieltjes_inversion(std::span<const double> lambda_grid,
                                                const DensityParams& p, double epsilon,
                                                double tol = 1e-13, unsigned threads = 1);

// Belief-propagation messages on the (N+K)-node bipartite graph of A.
// Nodes 0..N-1 are resources, N..N+K-1 users. Directed edge i < M (M = nnz)
// runs from the resource of entry i to its user; edge M + i is the reverse.
// messages[e] for e = (s -> t) is the cavity variance Delta_s^(t).
struct GraphCavityMessages {
  cplx z;
  std::size_t n_resources = 0;
  std::vector<cplx> messages;
  std::vector<cplx> node_variance;
  std::size_t sweeps = 0;
  double max_change = 0.0;

  // Mean node variance, an estimate of the Cauchy transform of the spectral
  // law of the adjacency matrix at z.
  cplx adjacency_transform() const;
};

struct GraphCavityOptions {
  double damping = 0.5;
  std::size_t max_sweeps = 10000;
  // Initial messages; must hold 2*nnz values when given. Defaults to 1/z.
  const std::vector<cplx>* warm_start = nullptr;
};

// Synchronous damped updates until the largest message change is below tol.
// Throws CavityError if the sweep cap is hit first.
GraphCavityMessages cavity_on_graph(const SparseSignatureMatrix& a, cplx z, double tol,
                                    const GraphCavityOptions& opts = {});

struct MessageSpread {
  double resource_to_user = 0.0;  // sample std dev of complex messages
  double user_to_resource = 0.0;
};
MessageSpread message_spread(const GraphCavityMessages& m);

struct GramTransform {
  cplx w;      // Gram-domain point z^2 / d
  cplx value;  // Cauchy transform of the A A^T / d law at w
};

// Converts the adjacency-law transform G_adj(z) into the transform of the
// A A^T / d law at w = z^2 / d, using G_adj(z) = z G_sq(z^2) and removing the
// (K - N) zero eigenvalues of A^T A:
//   G(w) = ((1 + beta) / 2) d G_sq(d w) - (beta - 1) / (2 w).
// Throws std::invalid_argument when w == 0.
GramTransform gram_density_from_adjacency_transform(cplx g_adjacency, cplx z,
                                                    const DensityParams& p);

// Density of A A^T / d recovered through the graph route: for each lambda,
// z = sqrt(d (lambda + i epsilon)), messages are warm-started from the
// previous grid point.
std::vector<InversionPoint> graph_density(const SparseSignatureMatrix& a,
                                          std::span<const double> lambda_grid, double epsilon,
                                          double tol = 1e-10);

} // namespace ldnoma
