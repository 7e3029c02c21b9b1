#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "magnls/functionals.hpp"
#include "magnls/grid.hpp"

namespace magnls {

enum class EvolveStatus { ReachedTFinal, NumericalBlowUp, ResolutionLoss };
std::string to_string(EvolveStatus s);

struct EvolveConfig {
  double dt_initial = 1e-3;
  double t_final = 1.0;
  bool adapt = false;
  /// Blow-up needs ||grad u(t)|| / ||grad u0|| at least this large...
  double blowup_grad_ratio = 2.0;
  /// ...together with this much mass in the outer third of the spectrum.
  double tail_fraction_max = 1e-6;
  int record_stride = 10;
  /// 2 for Strang splitting, 4 for its symmetric triple-jump composition.
  int order = 2;
  bool nonlinear = true;
  /// Write a checkpoint every this many records into checkpoint_dir (0 = off).
  int checkpoint_stride = 0;
  std::string checkpoint_dir;
  /// Called with the state at every record.
  std::function<void(const Field&, const DiagnosticsRecord&)> observer;

  void validate() const;
};

struct EvolveOutcome {
  explicit EvolveOutcome(Field state) : final_state(std::move(state)) {}

  EvolveStatus status = EvolveStatus::ReachedTFinal;
  double t_end = 0.0;
  std::vector<DiagnosticsRecord> series;
  std::vector<double> tail_fractions;  ///< spectral tail fraction at each record
  std::vector<double> dts;             ///< step size in use at each record
  Field final_state;
  bool final_finite = true;
  std::optional<double> blowup_time_estimate;
  long steps = 0;
  std::string message;
};

/// One Strang step P(h/2) X1(h/2) X2(h/2) X3(h) X2(h/2) X1(h/2) P(h/2), where
/// X1, X2, X3 are the exact directional flows along each axis and P is the
/// pointwise flow of the confining potential and the nonlinearity.
Field step(const Field& state, const Params& p, double dt, bool nonlinear = true);

/// Exact flow of the three directional substeps over tau (no pointwise part).
void directional_flow(Field& u, const Params& p, double half, double full);
/// Exact flow of i u_t = (b^2 rho^2/4 - |u|^alpha) u over tau.
void pointwise_flow(Field& u, const Params& p, double tau, bool nonlinear);

/// Fraction of mass in modes with |k_j| > (2/3) k_max along some axis.
double spectral_tail_fraction(const Field& f);

EvolveOutcome evolve(const Field& u0, const Params& p, const EvolveConfig& cfg);

/// Extrapolates ||grad u||^{-2} linearly in t to zero once the gradient ratio
/// threshold has been crossed.
std::optional<double> detect_blowup(const std::vector<DiagnosticsRecord>& series,
                                    const EvolveConfig& cfg);

}  // namespace magnls
