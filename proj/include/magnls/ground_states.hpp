#pragma once

#include <optional>
#include <string>
#include <vector>

#include "magnls/dynamics.hpp"
#include "magnls/grid.hpp"
#include "magnls/soliton.hpp"

namespace magnls {

struct GroundStateResult {
  explicit GroundStateResult(Field f) : phi(std::move(f)) {}

  Field phi;
  std::string kind;        ///< "I_c", "Im_c" or "action"
  double omega = 0.0;
  double objective = 0.0;  ///< E(phi) for the mass problems, S_omega(phi) otherwise
  double residual_el = 0.0;  ///< ||-(grad+iA)^2 phi + omega phi - |phi|^alpha phi|| / ||phi||
  double k_omega = 0.0;
  double h_value = 0.0;
  double decay_delta = 0.0;
  double scaling_second_deriv = 0.0;
  double grad_sq = 0.0;
  double magkin = 0.0;
  double mass = 0.0;
  long iterations = 0;
  bool boundary_trapped = false;
  // Inputs.
  double c = 0.0;
  double m = 0.0;

  std::string to_json(const Params& p) const;
};

struct DescentConfig {
  double tol = 1e-8;
  long max_iterations = 20000;
  double step = 0.5;
  /// Shift s of the preconditioner (k^2 + s)^{-1}; 0 picks a default.
  double precond_shift = 0.0;
};

/// S'_omega(f) = -(grad+iA)^2 f + omega f - |f|^alpha f. The energy
/// gradient is the omega = 0 case.
Field action_gradient(const Field& f, const Params& p, double omega);

/// Normalized gradient flow for I(c) = inf{E(f) : ||f||^2 = c}. For alpha = 4/3
/// qc is required to check c < M(Q).
GroundStateResult minimize_I_c(double c, const Params& p, const Grid& grid, double tol,
                               const QConstants* qc = nullptr, DescentConfig cfg = {});

/// Gradient flow for I^m(c), steps that would push ||(grad+iA)f||^2 past m are
/// rejected. Starts from the transverse bump family inside D(m/4) unless
/// an initial field is given. A positive magkin_floor also rejects steps
/// below it, which restricts the search to a shell.
GroundStateResult minimize_Im_c(double c, double m, const Params& p, const Grid& grid, double tol,
                                const std::optional<Field>& initial = std::nullopt,
                                DescentConfig cfg = {}, double magkin_floor = 0.0);

/// Minimizes S_omega on the Nehari set via descent on S_omega followed by the
/// exact rescale onto K_omega = 0.
GroundStateResult minimize_action(double omega, const Params& p, const Grid& grid, double tol,
                                  const std::optional<Field>& initial = std::nullopt,
                                  DescentConfig cfg = {});

/// Smallest K with omega <= -|b|(1 - K c^{(4-alpha)/4} m^{(3 alpha-4)/4}) for
/// every state of a (c, m) sweep.
double fit_omega_bound(const std::vector<GroundStateResult>& states, const Params& p);

/// Exponential decay rate of |phi| along the x3 line through its maximum.
double fit_decay_rate(const Field& phi);

struct ScalingPoint {
  double lambda = 0.0;
  double S = 0.0;
  double dS = 0.0;
  double d2S = 0.0;
  double K = 0.0;
  double H = 0.0;
};

/// S_omega, its first two lambda-derivatives and K_omega, H along
/// phi^lambda(x) = lambda^{3/2} phi(lambda x), from closed forms in lambda.
std::vector<ScalingPoint> scaling_curve(const Field& phi, const Params& p, double omega,
                                        const std::vector<double>& lambdas);

/// lambda^{3/2} f(lambda x) by trigonometric interpolation.
Field dilate(const Field& f, double lambda);

struct MembershipRecord {
  double t = 0.0;
  double K = 0.0;
  double H = 0.0;
  double S = 0.0;
  double Fsecond = 0.0;
  bool in_set = false;          ///< K < 0, H < 0, S < d
  bool key_inequality = false;  ///< H <= 2 (S - d)
};

struct InstabilityReport {
  explicit InstabilityReport(EvolveOutcome o) : outcome(std::move(o)) {}

  EvolveOutcome outcome;
  double lambda = 1.0;
  double d_omega = 0.0;
  double S_initial = 0.0;
  double scaling_second_deriv = 0.0;
  /// Upper bound 16 (S(u0) - d) for F''.
  double fsecond_bound = 0.0;
  std::vector<MembershipRecord> membership;
  bool membership_held = true;
  bool key_inequality_held = true;
  /// max | |u(t)| - |phi| | / max |phi| over the records.
  double modulus_drift = 0.0;

  std::string to_json() const;
};

/// Evolves phi^lambda. Refused unless d^2/dlambda^2 S_omega(phi^lambda) <= 0
/// at lambda = 1 (and lambda >= 1).
InstabilityReport instability_experiment(const GroundStateResult& gs, const Params& p, double lambda,
                                         const EvolveConfig& cfg);

/// Writes dir/name.mnls (checkpoint) and dir/name.json (sidecar).
void write_ground_state(const std::string& dir, const std::string& name, const GroundStateResult& gs,
                        const Params& p);

}  // namespace magnls
