#include "mapla/stepsize.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <stdexcept>

namespace mapla {

namespace {

// min over 1 / denom for the positive denominators.
double min_reciprocal(std::initializer_list<double> denominators) {
  double best = std::numeric_limits<double>::infinity();
  for (double den : denominators) {
    if (den > 0.0) best = std::min(best, 1.0 / den);
  }
  return best;
}

}  // namespace

double recommend_step_size(StepRegime regime, const StepSizeParams& p) {
  if (p.d < 0 || p.lambda < 0 || p.beta < 0 || p.alpha < 0 || p.c1 < 0) {
    throw std::invalid_argument("recommend_step_size: parameters must be nonnegative");
  }
  const double two_thirds = 2.0 / 3.0;
  switch (regime) {
    case StepRegime::SelfConcordant:
      return p.c1 * min_reciprocal({
                        std::pow(p.d, 3),
                        p.d * p.lambda,
                        p.beta * p.beta,
                        std::pow(p.beta, two_thirds),
                        std::pow(p.beta * p.lambda, two_thirds),
                    });
    case StepRegime::SelfConcordantPlus:
      return p.c1 * min_reciprocal({
                        p.d * p.beta,
                        p.d * p.lambda,
                        p.d * (p.alpha + 4.0),
                        p.beta * p.beta,
                        std::pow(p.beta * (p.alpha + 4.0), two_thirds),
                        std::pow(p.beta * p.lambda, two_thirds),
                    });
    case StepRegime::Exponential: {
      if (!(p.warmness >= 1.0) || !(p.delta > 0.0)) {
        throw std::invalid_argument("recommend_step_size: need M >= 1 and delta > 0");
      }
      const double lg = std::log(p.warmness / p.delta);
      return p.c1 * min_reciprocal({p.d * p.d * lg * lg});
    }
  }
  throw std::invalid_argument("recommend_step_size: unknown regime");
}

}  // namespace mapla
