#pragma once

#include <map>
#include <string>
#include <vector>

#include "magnls/grid.hpp"
#include "magnls/soliton.hpp"

namespace magnls {

enum class Verdict {
  GlobalMassCritical,
  BlowupKiefferLoss1,
  BlowupKiefferLoss2,
  BlowupKiefferLoss3,
  GlobalBelowThreshold,
  BlowupBelowThreshold,
  GlobalAtThreshold,
  ConditionalAtThreshold,
  BlowupAboveThreshold,
  NegativeEnergyBlowup,
  Indeterminate,
};
std::string to_string(Verdict v);
bool predicts_blowup(Verdict v);
bool predicts_global(Verdict v);

/// One inequality "lhs REL rhs"; margin is signed so that margin > 0 means
/// the inequality holds strictly.
struct Inequality {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  std::string relation;
  bool holds = false;
};

struct ClassificationReport {
  Verdict verdict = Verdict::Indeterminate;
  double alpha = 0.0;
  double b = 0.0;
  std::map<std::string, Inequality> evidence;
  std::map<std::string, double> quantities;
  std::vector<std::string> notes;
  double equality_tol = 1e-9;

  std::string to_json() const;
};

/// Relative tolerance used for every equality test.
inline constexpr double kEqualityTol = 1e-9;
/// Weighted integrals (|x|^2, rho^2) are trusted only below this boundary
/// mass fraction.
inline constexpr double kBoundaryTol = 1e-6;

ClassificationReport classify_kieffer_loss(const Field& u0, const Params& p);
ClassificationReport classify_mass_critical(const Field& u0, const Params& p, const QConstants& qc);
ClassificationReport classify_supercritical(const Field& u0, const Params& p, const QConstants& qc);
ClassificationReport classify_above(const Field& u0, const Params& p, const QConstants& qc);
/// Dispatches on alpha.
ClassificationReport classify(const Field& u0, const Params& p, const QConstants& qc);

struct Lambda0 {
  double value = 0.0;
  /// Relative residual of the implicit characterization of lambda_0.
  double implicit_residual = 0.0;
};
/// lambda_0 = 16 E0 (1 - E^0(Q) M(Q)^sc / (E0 M^sc)).
Lambda0 lambda0(double E0, double M, const QConstants& qc);
/// Residual lhs/rhs - 1 of the implicit equation defining lambda_0, for any
/// candidate value.
double lambda0_implicit_residual(double lambda, double E0, double M, const QConstants& qc);

/// Positive root of F0 + F0' t + 8 E0 t^2 (the virial upper parabola), or
/// +inf when it has none.
double virial_parabola_root(double F0, double Fprime0, double E0);

}  // namespace magnls
