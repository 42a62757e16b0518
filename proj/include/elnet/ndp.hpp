#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "elnet/localres.hpp"
#include "elnet/resistor.hpp"
#include "elnet/wardrop.hpp"

namespace elnet {

struct Intervention {
  LinkId link = 0;
  double magnitude = 0.0;
};

/// Cost h_e(u) of an intervention of magnitude u, with h_e(0) = 0.
class InterventionCost {
 public:
  InterventionCost() = default;
  static InterventionCost linear(double rate);
  static InterventionCost custom(std::function<double(double)> h);

  double operator()(double u) const { return h_ ? h_(u) : rate_ * u; }
  /// The rate c when h(u) = c·u.
  std::optional<double> linear_rate() const {
    return h_ ? std::nullopt : std::optional<double>(rate_);
  }

 private:
  double rate_ = 1.0;
  std::function<double(double)> h_;
};

struct InterventionCostModel {
  double alpha = 0.0;
  std::vector<InterventionCost> h;  // per link; links past the end use fallback
  InterventionCost fallback = InterventionCost::linear(1.0);
  double u_max = 100.0;

  const InterventionCost& cost(LinkId e) const { return e < h.size() ? h[e] : fallback; }
  /// Checks α ≥ 0, u_max > 0, and h_e(0) = 0 with h_e nondecreasing on a grid.
  std::vector<std::string> validate(std::size_t link_count) const;
};

struct LinkEstimate {
  LinkId link = 0;
  bool candidate = false;  // false for unused (E_+) or excluded links
  double flow = 0.0;
  double current = 0.0;  // y_e
  double slope = 0.0;    // a_e, or the nonlinear surrogate
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> exact_resistance;
  double resistance = 0.0;  // value plugged into the gain formula
  double magnitude = 0.0;   // optimal u_e
  double gain = 0.0;        // ΔC estimate at `magnitude`
  double objective = 0.0;   // gain − α h_e(magnitude)
  double relative_bound = 0.0;
  double gain_floor = 0.0;
  std::optional<bool> assumption_holds;
};

struct NdpResult {
  std::vector<LinkEstimate> links;  // indexed by link id
  std::optional<LinkId> chosen_link;
  double chosen_magnitude = 0.0;
  double objective = 0.0;
  bool approximate = false;
};

// --- gain formulas ----------------------------------------------------------

/// a_e f_e y_e / (1/u + r_e/a_e); 0 at u = 0. Throws LinkUnsupported for
/// links in E_+. `volt` must carry the throughput m from origin to
/// destination.
double delta_cost_electrical(const AffineGame& game, const Equilibrium& eq,
                             const VoltageSolution& volt, double r_e, const Intervention& iv);

struct ExactGain {
  double delta = 0.0;  // C(0) − C(u)
  bool support_changed = false;
};

ExactGain delta_cost_exact(const AffineGame& game, const Intervention& iv);
ExactGain delta_cost_exact(const AffineGame& game, const Equilibrium& base, const Intervention& iv);
ExactGain delta_cost_exact(const GeneralGame& game, const Intervention& iv, double tol = 1e-12);
ExactGain delta_cost_exact(const GeneralGame& game, const Equilibrium& base, const Intervention& iv,
                           double tol = 1e-12);

/// a_e f_e y_e if λ_e = 0, else 0. Throws Degenerate when a link has zero
/// flow and zero multiplier.
double delta_cost_derivative(const AffineGame& game, const Equilibrium& eq,
                             const VoltageSolution& volt, LinkId e);

struct ErrorBound {
  double relative_bound = 0.0;
  double gain_floor = 0.0;
  double coarse_bound = 0.0;  // same bound with 1/(w*·a_e) for the resistance term
};

ErrorBound error_bound(double a_e, double f_e, double y_e, double u_e, double lower, double upper,
                       double w_star);

/// argmax over [0, u_max] of k/(1/u + (r^U + r^L)/(2a)) − α h(u), with
/// k = a f y.
double optimize_single_link(double a_e, double f_e, double y_e, double lower, double upper,
                            const InterventionCost& h, const InterventionCostModel& model);

// --- end-to-end -------------------------------------------------------------

struct NdpOptions {
  bool exact_resistance = false;  // plug exact r_e in place of the bound midpoint
  std::optional<double> fixed_u;  // evaluate every link at this u, no optimization
  bool check_assumption = false;  // re-solve to test whether E_+ survives
  unsigned jobs = 0;
};

NdpResult algorithm1(const AffineGame& game, const InterventionCostModel& model, int d,
                     const NdpOptions& options = {});

/// Same pipeline with conductances f/τ(f); the result is flagged approximate.
/// Links without flow are not candidates.
NdpResult algorithm1_nonlinear(const GeneralGame& game, const InterventionCostModel& model, int d,
                               const NdpOptions& options = {});

/// Bilevel oracle: each link's objective from re-solved equilibria.
NdpResult exact_ndp(const AffineGame& game, const InterventionCostModel& model,
                    const NdpOptions& options = {});
NdpResult exact_ndp(const GeneralGame& game, const InterventionCostModel& model,
                    const NdpOptions& options = {});

/// True iff the intervention leaves E_+ unchanged.
bool check_assumption1(const AffineGame& game, const Intervention& iv);

}  // namespace elnet
