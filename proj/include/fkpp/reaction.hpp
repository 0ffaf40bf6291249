#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fkpp/common.hpp"
#include "fkpp/field.hpp"

namespace fkpp::dynamics {

enum class ReactionForm { logistic, concave_power };

/// KPP reaction term f(u) = rate * (u - u^q), concave on [0,1] with
/// f(0) = f(1) = 0 and f'(1) < 0 < f'(0) = rate.  logistic is q = 2.
class ReactionKPP {
 public:
  ReactionKPP() : ReactionKPP(ReactionForm::logistic, 1.0, 2.0) {}
  ReactionKPP(ReactionForm form, double rate, double exponent = 2.0);

  ReactionForm form() const { return form_; }
  double rate() const { return rate_; }
  double exponent() const { return q_; }

  // Inline so per-point solver loops vectorize.
  double operator()(double u) const {
    if (q_ == 2.0) return rate_ * u * (1.0 - u);
    // u < 0 can occur transiently at rounding scale; keep f smooth and odd-ish
    // there so tiny undershoots relax instead of producing NaNs.
    double uq = u > 0.0 ? std::pow(u, q_) : -std::pow(-u, q_);
    return rate_ * (u - uq);
  }
  void apply(const AlignedVector<double>& u, AlignedVector<double>& out) const;

  double fprime0() const { return rate_; }
  double fprime1() const { return rate_ * (1.0 - q_); }
  /// Lipschitz constant of f on [0, 1].
  double lipschitz() const { return rate_ * std::max(1.0, q_ - 1.0); }
  /// Contraction window for the fixed-point stepper: dt <= 1/(4 f'(0)).
  double contraction_window() const { return 1.0 / (4.0 * fprime0()); }

  /// Structural certificate: endpoint zeros at machine precision, slope
  /// signs by finite differences, concavity by second differences on a
  /// 1001-point probe of [0,1].
  std::vector<CheckResult> certify() const;

  std::string describe() const;

 private:
  ReactionForm form_;
  double rate_;
  double q_;
};

}  // namespace fkpp::dynamics
