#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "elnet/delay.hpp"
#include "elnet/netcore.hpp"

namespace elnet {

/// Routing game with affine delays τ_e(f) = a_e f + b_e and throughput m.
struct AffineGame {
  DirectedNetwork network;
  std::vector<double> a;
  std::vector<double> b;
  double m = 1.0;
};

struct GeneralGame {
  DirectedNetwork network;
  std::vector<Delay> delays;
  double m = 1.0;

  static GeneralGame from_affine(const AffineGame& game);
};

std::vector<std::string> validate(const AffineGame& game);
/// Spot-checks positivity and monotonicity of each delay on [0, 2m].
std::vector<std::string> validate(const GeneralGame& game);

/// Restricts the game to links on o->d paths. `kept` receives the original
/// link ids when non-null.
AffineGame prune(const AffineGame& game, std::vector<LinkId>* kept = nullptr);
GeneralGame prune(const GeneralGame& game, std::vector<LinkId>* kept = nullptr);

/// Same game with a_e replaced by a_e / (1 + u).
AffineGame with_intervention(const AffineGame& game, LinkId e, double u);
GeneralGame with_intervention(const GeneralGame& game, LinkId e, double u);

struct Equilibrium {
  std::vector<double> f;
  std::vector<double> gamma;   // gamma[destination] == 0
  std::vector<double> lambda;  // zero on used links
  std::vector<LinkId> support_complement;  // E_+, increasing ids
  double social_cost = 0.0;
  double tolerance = 0.0;  // accuracy the producing solver guarantees

  bool unused(LinkId e) const;
};

/// Threshold used to classify a flow as zero.
inline double support_tolerance(double m) { return 1e-8 * m; }

/// Flows and node multipliers of the KKT system restricted to a candidate
/// support, with every other link held at zero flow. Support links outside
/// the destination's component are reported inactive and get no flow.
struct SupportSolution {
  std::vector<double> f;
  std::vector<double> gamma;  // NaN outside the destination's component
  std::vector<bool> active;
};

/// Throws SingularSystem when the origin is not connected to the destination
/// through the support.
SupportSolution solve_support_system(const AffineGame& game, const std::vector<bool>& support);

/// Active-set solve of the affine KKT system, falling back to solve_convex
/// (followed by an exact re-solve on the support it finds) if the iteration
/// cap is hit or a candidate support is disconnected.
Equilibrium solve_affine(const AffineGame& game);

/// Path-equilibration descent on the Beckmann program. `tol` bounds the
/// duality gap relative to the social cost. Throws NotConverged.
Equilibrium solve_convex(const GeneralGame& game, double tol = 1e-10,
                         std::size_t max_iter = 200000);

/// Σ f τ(f); throws InconsistentMultipliers when it disagrees with
/// m(γ_o − γ_d) beyond 10× the equilibrium tolerance.
double social_cost(const Equilibrium& eq, const AffineGame& game);
double social_cost(const Equilibrium& eq, const GeneralGame& game);

struct ThroughputThreshold {
  std::vector<double> per_link;  // may be negative or +inf
  double overall = 0.0;          // max(0, max per_link)
};

/// Smallest throughput above which every link carries flow (series-parallel
/// games only; throws NotSeriesParallel).
ThroughputThreshold min_throughput(const AffineGame& game);

/// Largest absolute violation over conservation, stationarity,
/// complementarity and the two sign constraints.
double kkt_residual(const Equilibrium& eq, const AffineGame& game);
double kkt_residual(const Equilibrium& eq, const GeneralGame& game);

}  // namespace elnet
