#include "magnls/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <json.hpp>

#include "magnls/errors.hpp"
#include "magnls/functionals.hpp"

namespace magnls {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::GlobalMassCritical: return "GlobalMassCritical";
    case Verdict::BlowupKiefferLoss1: return "BlowupKiefferLoss1";
    case Verdict::BlowupKiefferLoss2: return "BlowupKiefferLoss2";
    case Verdict::BlowupKiefferLoss3: return "BlowupKiefferLoss3";
    case Verdict::GlobalBelowThreshold: return "GlobalBelowThreshold";
    case Verdict::BlowupBelowThreshold: return "BlowupBelowThreshold";
    case Verdict::GlobalAtThreshold: return "GlobalAtThreshold";
    case Verdict::ConditionalAtThreshold: return "ConditionalAtThreshold";
    case Verdict::BlowupAboveThreshold: return "BlowupAboveThreshold";
    case Verdict::NegativeEnergyBlowup: return "NegativeEnergyBlowup";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

bool predicts_blowup(Verdict v) {
  return v == Verdict::BlowupKiefferLoss1 || v == Verdict::BlowupKiefferLoss2 ||
         v == Verdict::BlowupKiefferLoss3 || v == Verdict::BlowupBelowThreshold ||
         v == Verdict::BlowupAboveThreshold || v == Verdict::NegativeEnergyBlowup;
}

bool predicts_global(Verdict v) {
  return v == Verdict::GlobalMassCritical || v == Verdict::GlobalBelowThreshold ||
         v == Verdict::GlobalAtThreshold;
}

namespace {

Inequality less(double lhs, double rhs, bool strict = true) {
  Inequality q;
  q.lhs = lhs;
  q.rhs = rhs;
  q.margin = rhs - lhs;
  q.relation = strict ? "<" : "<=";
  q.holds = strict ? lhs < rhs : lhs <= rhs;
  return q;
}

Inequality greater(double lhs, double rhs, bool strict = true) {
  Inequality q;
  q.lhs = lhs;
  q.rhs = rhs;
  q.margin = lhs - rhs;
  q.relation = strict ? ">" : ">=";
  q.holds = strict ? lhs > rhs : lhs >= rhs;
  return q;
}

bool near(double a, double b) {
  return std::abs(a - b) <= kEqualityTol * std::max({std::abs(a), std::abs(b), 1e-300});
}

struct Data {
  Integrals in;
  double E, E0, M, V, F, Fp, bnd;
};

Data gather(const Field& u0, const Params& p) {
  p.validate();
  u0.check_shape();
  if (!u0.all_finite()) throw InvalidArgument("classify: initial field is not finite");
  Data d;
  d.in = compute_integrals(u0, p);
  d.M = d.in.mass;
  d.E = 0.5 * d.in.magkin - d.in.lp / (p.alpha + 2.0);
  d.E0 = 0.5 * d.in.grad_sq + p.b * p.b / 8.0 * d.in.rho_sq - d.in.lp / (p.alpha + 2.0);
  d.V = d.in.x_dot_grad_im;
  d.F = d.in.x_sq;
  d.Fp = 4.0 * d.V;
  d.bnd = d.in.mass > 0.0 ? d.in.boundary_mass / d.in.mass : 0.0;
  return d;
}

void base_quantities(ClassificationReport& r, const Data& d, const Params& p) {
  r.alpha = p.alpha;
  r.b = p.b;
  r.quantities["M"] = d.M;
  r.quantities["E"] = d.E;
  r.quantities["E0"] = d.E0;
  r.quantities["R"] = d.in.R;
  r.quantities["grad_sq"] = d.in.grad_sq;
  r.quantities["magkin_sq"] = d.in.magkin;
  r.quantities["rho_sq"] = d.in.rho_sq;
  r.quantities["lp"] = d.in.lp;
  r.quantities["F"] = d.F;
  r.quantities["Fprime"] = d.Fp;
  r.quantities["Im_x_grad"] = d.V;
  r.quantities["boundary_mass_fraction"] = d.bnd;
}

// Energy scale against which "E0 = 0" is judged.
double energy_scale(const Data& d, const Params& p) {
  return 0.5 * d.in.grad_sq + p.b * p.b / 8.0 * d.in.rho_sq + d.in.lp / (p.alpha + 2.0);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double fsecond(const Data& d, const Params& p) {
  return 8.0 * d.in.grad_sq - 2.0 * p.b * p.b * d.in.rho_sq - 12.0 * p.alpha / (p.alpha + 2.0) * d.in.lp;
}

ClassificationReport kieffer_loss(const Data& d, const Params& p) {
  ClassificationReport r;
  base_quantities(r, d, p);
  if (d.bnd > kBoundaryTol)
    throw PreconditionRefused("classify: boundary mass fraction " + sci(d.bnd) +
                              " makes weighted integrals unreliable");
  const double tol = kEqualityTol * energy_scale(d, p);
  const double xnorm = std::sqrt(d.F);
  // Im int x.grad u conj(u) is bounded by ||xu|| ||grad u||; smaller values are round-off.
  const double vtol = kEqualityTol * xnorm * std::sqrt(d.in.grad_sq);
  r.evidence["kl1_E0_negative"] = less(d.E0, 0.0);
  r.evidence["kl2_Im_x_grad_negative"] = less(d.V, -vtol);
  r.evidence["kl3_Im_x_grad_bound"] = less(d.V, -std::sqrt(std::max(d.E0, 0.0) * 2.0) * xnorm);
  r.evidence["ribeiro_E_negative"] = less(d.E, 0.0);
  if (d.E0 < -tol) {
    r.verdict = Verdict::BlowupKiefferLoss1;
  } else if (std::abs(d.E0) <= tol) {
    if (d.V < -vtol) {
      if (d.E0 == 0.0) {
        r.verdict = Verdict::BlowupKiefferLoss2;
      } else {
        r.verdict = Verdict::ConditionalAtThreshold;
        r.notes.push_back("E0 = 0 holds only within tolerance; Kieffer-Loss condition (2) not certified");
      }
    } else if (d.E0 < 0.0) {
      r.verdict = Verdict::ConditionalAtThreshold;
      r.notes.push_back("E0 < 0 only within tolerance of zero");
    }
  } else if (r.evidence["kl3_Im_x_grad_bound"].holds) {
    r.verdict = Verdict::BlowupKiefferLoss3;
  }
  if (r.verdict == Verdict::Indeterminate && d.E < 0.0 && p.alpha >= 4.0 / 3.0 - 1e-12)
    r.verdict = Verdict::NegativeEnergyBlowup;
  if (predicts_blowup(r.verdict) && d.E < 0.0 && r.verdict != Verdict::NegativeEnergyBlowup)
    r.notes.push_back("E < 0 as well, so the negative-energy criterion also applies");
  const double tp = virial_parabola_root(d.F, d.Fp, d.E0);
  if (std::isfinite(tp)) r.quantities["virial_parabola_root"] = tp;
  return r;
}

ClassificationReport above(const Data& d, const Params& p, const QConstants& qc) {
  ClassificationReport r;
  base_quantities(r, d, p);
  if (d.bnd > kBoundaryTol)
    throw PreconditionRefused("classify_above: boundary mass fraction " + sci(d.bnd) +
                              " makes weighted integrals unreliable");
  if (!(d.E0 > 0.0)) throw PreconditionRefused("classify_above: requires E0(u0) > 0");
  if (!(d.F > 0.0)) throw PreconditionRefused("classify_above: requires F(u0) > 0");
  const double sc = qc.sigma_c;
  const double Msc = std::pow(d.M, sc);
  const double ratio = d.E0 * Msc / qc.e0_mq;
  r.quantities["E0_M_sc"] = d.E0 * Msc;
  r.quantities["e0_mq"] = qc.e0_mq;
  r.quantities["threshold_ratio"] = ratio;

  const auto c1 = greater(d.E0 * Msc, qc.e0_mq, false);
  const auto c2 = less(ratio * (1.0 - d.Fp * d.Fp / (32.0 * d.E0 * d.F)), 1.0, false);
  const auto c3 = greater(d.in.lp * Msc, qc.lp_mass_product);
  const auto c4 = less(d.V, 0.0, false);
  r.evidence["above1_energy"] = c1;
  r.evidence["above2_virial_ratio"] = c2;
  r.evidence["above3_lp"] = c3;
  r.evidence["above4_Im_x_grad"] = c4;
  r.evidence["above2_as_printed"] = less(ratio * (1.0 - d.Fp * d.Fp / (8.0 * d.E0 * d.F)), 1.0, false);

  const Lambda0 l0 = lambda0(d.E0, d.M, qc);
  r.quantities["lambda0"] = l0.value;
  r.quantities["lambda0_implicit_residual"] = l0.implicit_residual;
  const double zp = d.Fp / (2.0 * std::sqrt(d.F));
  r.quantities["z_prime"] = zp;
  const double fs = fsecond(d, p);
  r.quantities["Fsecond"] = fs;
  const auto e1 = greater(l0.value, 0.0, false);
  const auto e2 = greater(d.Fp * d.Fp, 2.0 * d.F * l0.value, false);
  const auto e3 = less(zp, 0.0, false);
  const auto e4 = less(fs + 4.0 * p.b * p.b * d.in.rho_sq, l0.value);
  r.evidence["lambda0_nonnegative"] = e1;
  r.evidence["zprime_sq_vs_lambda0"] = e2;
  r.evidence["zprime_nonpositive"] = e3;
  r.evidence["Fsecond_rho_vs_lambda0"] = e4;

  const bool all = c1.holds && c2.holds && c3.holds && c4.holds;
  const bool all_equiv = e1.holds && e2.holds && e3.holds && e4.holds;
  const bool agree = c1.holds == e1.holds && c2.holds == e2.holds && c3.holds == e4.holds &&
                     c4.holds == e3.holds;
  r.quantities["formulations_agree"] = agree ? 1.0 : 0.0;
  if (!agree) {
    // Disagreement is only legitimate right at a boundary of some condition.
    const double scale = kEqualityTol;
    const bool marginal = std::abs(c1.margin) <= scale * std::abs(qc.e0_mq) ||
                          std::abs(c2.margin) <= scale || std::abs(c3.margin) <= scale * qc.lp_mass_product ||
                          std::abs(c4.margin) <= scale * std::abs(d.V);
    r.notes.push_back(marginal ? "condition sets disagree at a tolerance boundary"
                               : "condition sets disagree away from any boundary");
  }
  r.verdict = all && all_equiv ? Verdict::BlowupAboveThreshold : Verdict::Indeterminate;
  return r;
}

ClassificationReport supercritical(const Data& d, const Params& p, const QConstants& qc) {
  ClassificationReport r;
  // Negative-energy criteria take precedence.
  bool weighted_ok = d.bnd <= kBoundaryTol;
  if (weighted_ok) {
    r = kieffer_loss(d, p);
    if (predicts_blowup(r.verdict) || r.verdict == Verdict::ConditionalAtThreshold) return r;
  } else {
    base_quantities(r, d, p);
    r.notes.push_back("boundary mass too large for weighted integrals; virial criteria skipped");
  }
  const double sc = qc.sigma_c;
  const double Msc = std::pow(d.M, sc);
  const double e_prod = d.E0 * Msc;
  const double g_prod = std::sqrt(d.in.grad_sq) * std::pow(d.M, 0.5 * sc);
  const double mg_prod = std::sqrt(d.in.magkin) * std::pow(d.M, 0.5 * sc);
  r.quantities["E0_M_sc"] = e_prod;
  r.quantities["E_M_sc"] = d.E * Msc;
  r.quantities["grad_mass_product"] = g_prod;
  r.quantities["magkin_mass_product"] = mg_prod;
  r.quantities["e0_mq"] = qc.e0_mq;
  r.quantities["Q_grad_mass_product"] = qc.grad_mass_product;
  r.evidence["E0_nonnegative"] = greater(d.E0, 0.0, false);
  r.evidence["ener_below"] = less(e_prod, qc.e0_mq);
  r.evidence["gwp_below"] = less(g_prod, qc.grad_mass_product);
  r.evidence["blow_below"] = greater(g_prod, qc.grad_mass_product);
  r.evidence["gwp1_E_nonnegative"] = greater(d.E, 0.0, false);
  r.evidence["gwp1_energy"] = less(d.E * Msc, qc.e0_mq);
  r.evidence["gwp1_magnetic_gradient"] = less(mg_prod, qc.grad_mass_product);

  const bool at = near(e_prod, qc.e0_mq);
  const bool grad_eq = near(g_prod, qc.grad_mass_product);
  if (d.E0 >= 0.0 && (at || e_prod < qc.e0_mq)) {
    if (grad_eq) {
      r.verdict = Verdict::Indeterminate;
      r.notes.push_back("gradient product equals the soliton value within tolerance; no datum attains this");
    } else if (at) {
      r.verdict = g_prod < qc.grad_mass_product ? Verdict::GlobalAtThreshold
                                                : Verdict::ConditionalAtThreshold;
      r.notes.push_back("E0 M^sigma_c equals the threshold within tolerance");
    } else {
      r.verdict = g_prod < qc.grad_mass_product ? Verdict::GlobalBelowThreshold
                                                : Verdict::BlowupBelowThreshold;
    }
    return r;
  }
  // Magnetic variants use E and the covariant gradient instead.
  const bool e_at = near(d.E * Msc, qc.e0_mq);
  if (d.E >= 0.0 && (e_at || d.E * Msc < qc.e0_mq) && mg_prod < qc.grad_mass_product &&
      !near(mg_prod, qc.grad_mass_product)) {
    r.verdict = Verdict::GlobalBelowThreshold;
    r.notes.push_back(e_at ? "magnetic energy at threshold with subcritical magnetic gradient"
                           : "magnetic energy below threshold with subcritical magnetic gradient");
    return r;
  }
  if (weighted_ok && d.E0 > 0.0 && d.F > 0.0) {
    ClassificationReport a = above(d, p, qc);
    for (auto& [k, v] : r.evidence) a.evidence.emplace(k, v);
    for (auto& [k, v] : r.quantities) a.quantities.emplace(k, v);
    for (auto& n : r.notes) a.notes.push_back(n);
    return a;
  }
  r.verdict = Verdict::Indeterminate;
  return r;
}

}  // namespace

ClassificationReport classify_kieffer_loss(const Field& u0, const Params& p) {
  return kieffer_loss(gather(u0, p), p);
}

ClassificationReport classify_mass_critical(const Field& u0, const Params& p, const QConstants& qc) {
  if (!is_mass_critical(p.alpha) || !qc.mass_critical())
    throw InvalidArgument("classify_mass_critical: requires alpha = 4/3");
  const Data d = gather(u0, p);
  const double ratio = std::sqrt(d.M / qc.mass_Q);
  ClassificationReport r;
  auto ineq = less(d.M, qc.mass_Q);
  if (std::abs(ratio - 1.0) <= kEqualityTol) {
    base_quantities(r, d, p);
    r.verdict = Verdict::Indeterminate;
    r.notes.push_back("mass equals M(Q) within tolerance; minimal-mass behaviour is open");
  } else if (ratio < 1.0) {
    base_quantities(r, d, p);
    r.verdict = Verdict::GlobalMassCritical;
    // Magnetic kinetic cap from the sharp Gagliardo-Nirenberg inequality.
    const double a43 = std::pow(ratio, 4.0 / 3.0);
    r.quantities["magkin_cap"] = 2.0 * d.E / (1.0 - a43);
  } else {
    r = kieffer_loss(d, p);
  }
  r.evidence["mass_below_Q"] = ineq;
  r.quantities["mass_ratio"] = ratio;
  r.quantities["mass_Q"] = qc.mass_Q;
  return r;
}

ClassificationReport classify_supercritical(const Field& u0, const Params& p, const QConstants& qc) {
  if (!(p.alpha > 4.0 / 3.0 && p.alpha < 4.0) || is_mass_critical(p.alpha))
    throw InvalidArgument("classify_supercritical: requires 4/3 < alpha < 4");
  if (qc.mass_critical() || !std::isfinite(qc.sigma_c) || std::abs(qc.alpha - p.alpha) > 1e-12)
    throw InvalidArgument("classify_supercritical: soliton constants do not match alpha");
  return supercritical(gather(u0, p), p, qc);
}

ClassificationReport classify_above(const Field& u0, const Params& p, const QConstants& qc) {
  if (!(p.alpha > 4.0 / 3.0 && p.alpha < 4.0) || is_mass_critical(p.alpha))
    throw InvalidArgument("classify_above: requires 4/3 < alpha < 4");
  if (std::abs(qc.alpha - p.alpha) > 1e-12)
    throw InvalidArgument("classify_above: soliton constants do not match alpha");
  return above(gather(u0, p), p, qc);
}

ClassificationReport classify(const Field& u0, const Params& p, const QConstants& qc) {
  if (is_mass_critical(p.alpha)) return classify_mass_critical(u0, p, qc);
  if (p.alpha > 4.0 / 3.0) return classify_supercritical(u0, p, qc);
  ClassificationReport r = classify_kieffer_loss(u0, p);
  r.notes.push_back("mass-subcritical power: the threshold results do not apply");
  return r;
}

double lambda0_implicit_residual(double lambda, double E0, double M, const QConstants& qc) {
  const double a = qc.alpha;
  const double C = qc.c_opt;
  const double m4 = std::pow(M, (4.0 - a) / 4.0);
  const double lhs = 3.0 * a * C * m4 / (2.0 * (a + 2.0));
  const double X = (a + 2.0) * (16.0 * E0 - lambda) / (4.0 * (3.0 * a - 4.0) * C * m4);
  const double rhs = std::pow(X, (4.0 - 3.0 * a) / (3.0 * a));
  return lhs / rhs - 1.0;
}

Lambda0 lambda0(double E0, double M, const QConstants& qc) {
  if (!(E0 > 0.0)) throw InvalidArgument("lambda0: requires E0 > 0");
  if (!(M > 0.0)) throw InvalidArgument("lambda0: requires M > 0");
  if (qc.mass_critical() || !std::isfinite(qc.sigma_c))
    throw InvalidArgument("lambda0: requires mass-supercritical constants");
  Lambda0 out;
  out.value = 16.0 * E0 * (1.0 - qc.e0_mq / (E0 * std::pow(M, qc.sigma_c)));
  out.implicit_residual = lambda0_implicit_residual(out.value, E0, M, qc);
  if (!(std::abs(out.implicit_residual) < 1e-9))
    throw NumericalFailure("lambda0: implicit characterization residual exceeds 1e-9");
  return out;
}

double virial_parabola_root(double F0, double Fprime0, double E0) {
  const double a = 8.0 * E0, b = Fprime0, c = F0;
  if (a == 0.0) return b < 0.0 ? -c / b : std::numeric_limits<double>::infinity();
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  const double s = std::sqrt(disc);
  // Numerically stable pair of roots.
  const double q = -0.5 * (b + (b >= 0.0 ? s : -s));
  double r1 = q / a, r2 = q != 0.0 ? c / q : r1;
  if (r1 > r2) std::swap(r1, r2);
  if (r1 > 0.0) return r1;
  if (r2 > 0.0) return r2;
  return std::numeric_limits<double>::infinity();
}

std::string ClassificationReport::to_json() const {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["verdict"] = to_string(verdict);
  j["alpha"] = alpha;
  j["b"] = b;
  nlohmann::json ev = nlohmann::json::object();
  for (const auto& [k, q] : evidence)
    ev[k] = {{"lhs", num(q.lhs)}, {"rhs", num(q.rhs)}, {"margin", num(q.margin)},
             {"relation", q.relation}, {"holds", q.holds}};
  j["evidence"] = ev;
  nlohmann::json qs = nlohmann::json::object();
  for (const auto& [k, v] : quantities) qs[k] = num(v);
  j["quantities"] = qs;
  j["notes"] = notes;
  j["tolerances"] = {{"equality_relative", equality_tol}, {"boundary_mass_fraction", kBoundaryTol}};
  return j.dump(2);
}

}  // namespace magnls
