#pragma once

#include <memory>
#include <span>
#include <vector>

#include "skewfatou/dynamics1d.hpp"

namespace skewfatou {

/// Koenigs coordinate at a repelling cycle: psi conjugates the return map
/// around points[0] to multiplication by the cycle multiplier,
/// psi(x_r) = 0, psi'(x_r) = 1.
struct KoenigsChart {
  Complex fixed_point{};
  Complex mu{};
  int period = 1;
  std::vector<Complex> coeffs;  // coeffs[k] multiplies (z - x_r)^(k+1)
  double radius = 0.0;          // domain-of-validity estimate

  Complex psi(Complex z) const;
};

/// Power-series solve of psi(g(z)) = mu * psi(z) for the return map,
/// order <= 40 coefficients, radius from a coefficient root test shrunk
/// until the residual is below 1e-8 on the half-radius disk.
KoenigsChart koenigs(const ComplexPoly& p, const CycleRecord& cycle, int order);

namespace detail {
struct BranchData;
}

/// Evaluator for the first coordinate of a critical branch
/// gamma(t) = (gamma1(t), t^l). For a fiber derivative that is linear in z
/// the root is evaluated directly (quad-precision capable); otherwise the
/// value is continued from an anchor root at |w| = eps_w along an arc plus a
/// radial 0.8-ladder, nearest-root matching at every step.
class BranchEvaluator {
 public:
  BranchEvaluator() = default;
  explicit BranchEvaluator(std::shared_ptr<const detail::BranchData> data)
      : data_(std::move(data)) {}

  Complex operator()(Complex t) const;
  QComplex eval_q(QComplex t) const;
  bool quad_exact() const;

 private:
  std::shared_ptr<const detail::BranchData> data_;
};

struct CriticalBranch {
  BranchEvaluator gamma1;
  int l = 1;       // gamma2(t) = t^l (monodromy order)
  int k = 0;       // local order of Phi; 0 until detected
  Complex x0{};    // gamma1(0), critical point of p
  Complex x_r{};   // repelling landing point (saddle of F)
  Complex mu{};    // p'(x_r) over the landing cycle
  Complex nu{};    // chosen l-th root of lambda
  int r = -1;      // preperiod
  int period = 1;  // landing-cycle period; stage steps scale by it
  double eps = 0.0;       // parameter-domain radius in t
  double escape_R = 0.0;  // guard radius for stage overflow
  bool has_saddle_data = false;

  Complex gamma2(Complex t) const;
};

/// Traces the critical variety of F through the chosen critical point and
/// attaches the saddle data from the certificate. eps_w is the fiber radius
/// used for monodromy detection; nu_branch_index picks among the l roots of
/// lambda. Throws BranchCollision when two branches come within 1e-6 on the
/// sampled |w| = eps_w circle.
CriticalBranch detect_branch(const SkewProduct& F, const SubhypCertificate& cert,
                             int which_critical, double eps_w,
                             int nu_branch_index = 0);

struct PhiApprox {
  int n = 0;
  int k = 1;
  std::vector<Complex> samples;
  std::vector<Complex> values;    // first coordinate of F^{kn}(gamma(mu^-n t))
  std::vector<QComplex> qvalues;  // same, full precision
  std::vector<QComplex> qw;       // carried second coordinates
  double cauchy_gap = 0.0;        // sup |Phi_n - Phi_{n-1}| over samples
};

/// Evaluates stage n at the samples (|t| <= branch.eps required) and records
/// the Cauchy gap against stage n-1. Orbits run in quadruple precision: the
/// pass near the saddle amplifies roundoff by |mu|^n and doubles drown the
/// gaps near stage 12. Throws OverflowEscape when an intermediate orbit
/// leaves |z| <= 10 R.
PhiApprox phi_stage(const CriticalBranch& branch, const SkewProduct& F, int n,
                    std::span<const Complex> samples, int k_override = 0);

/// Largest stage before mu^-n eps underflows the 1e-280 guard.
int max_stage(const CriticalBranch& branch);

/// 64 points on each of the circles |t| in {eps/4, eps/2, eps}.
std::vector<Complex> default_phi_samples(const CriticalBranch& branch);

/// Smallest candidate k whose stage sequence is Cauchy with a nonconstant
/// limit; the local vanishing order is then confirmed by a log-log slope
/// fit. Throws StableManifoldBranch when every candidate yields a constant
/// (the branch lies in the stable manifold).
int detect_order_k(const CriticalBranch& branch, const SkewProduct& F,
                   std::span<const int> candidates);

/// Log-log slope of |values - center_value| against the two radii; the
/// samples must lie on two concentric circles around 0.
double fit_vanishing_order(std::span<const Complex> ts,
                           std::span<const Complex> values, Complex value_at_0);

/// sup over samples of |F1^k(Phi_n(t), w_n(t)) - Phi_n(mu t)|, the scaled
/// stage evaluated fresh.
double functional_equation_residual(const PhiApprox& phi,
                                    const CriticalBranch& branch,
                                    const SkewProduct& F);

/// Stage value at a single parameter, advanced until the parameter underflow
/// guard; a cheap converged-Phi evaluation.
Complex phi_limit(const CriticalBranch& branch, const SkewProduct& F, Complex t,
                  int n_stage = 0);

}  // namespace skewfatou
