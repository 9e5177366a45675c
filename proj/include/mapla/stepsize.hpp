#pragma once

namespace mapla {

enum class StepRegime {
  SelfConcordant,      ///< b_SC(d, lambda, beta)
  SelfConcordantPlus,  ///< b_SC++(d, lambda, alpha, beta)
  Exponential,         ///< b_Exp(d, M, delta), linear potentials
};

struct StepSizeParams {
  double d = 1.0;
  double lambda = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
  double warmness = 1.0;  ///< M
  double delta = 0.1;
  double c1 = 1.0;        ///< unspecified universal constant; caller supplies it
};

/// c1 * min{...} over the regime's terms. A term whose denominator is zero
/// (e.g. beta = 0 in 1/beta^2) is dropped from the min; if every term is
/// dropped the result is +inf.
double recommend_step_size(StepRegime regime, const StepSizeParams& params);

}  // namespace mapla
