#include "fkpp/reaction.hpp"

#include <cmath>

namespace fkpp::dynamics {

ReactionKPP::ReactionKPP(ReactionForm form, double rate, double exponent)
    : form_(form), rate_(rate), q_(form == ReactionForm::logistic ? 2.0 : exponent) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw InvalidArgument("reaction rate must be positive");
  if (!(q_ > 1.0) || !std::isfinite(q_))
    throw InvalidArgument("reaction exponent must be > 1");
}

void ReactionKPP::apply(const AlignedVector<double>& u,
                        AlignedVector<double>& out) const {
  out.resize(u.size());
  if (q_ == 2.0) {
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] = rate_ * u[i] * (1.0 - u[i]);
  } else {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = (*this)(u[i]);
  }
}

std::vector<CheckResult> ReactionKPP::certify() const {
  std::vector<CheckResult> out;
  out.push_back(check_leq("f_at_0", std::abs((*this)(0.0)), 0.0));
  out.push_back(check_leq("f_at_1", std::abs((*this)(1.0)), 0.0));
  double h = 1e-7;
  double d0 = ((*this)(h) - (*this)(0.0)) / h;
  double d1 = ((*this)(1.0) - (*this)(1.0 - h)) / h;
  out.push_back(make_check("fprime0_positive", d0, 0.0, d0 > 0.0));
  out.push_back(make_check("fprime1_negative", d1, 0.0, d1 < 0.0));
  double worst = 0.0;
  const int n = 1000;
  double du = 1.0 / n;
  for (int i = 1; i < n; ++i) {
    double u = i * du;
    double second = (*this)(u - du) - 2.0 * (*this)(u) + (*this)(u + du);
    worst = std::max(worst, second);
  }
  out.push_back(check_leq("concavity_defect", worst, 1e-10));
  return out;
}

std::string ReactionKPP::describe() const {
  if (form_ == ReactionForm::logistic) return "logistic";
  return "concave_power(q=" + std::to_string(q_) + ")";
}

}  // namespace fkpp::dynamics
