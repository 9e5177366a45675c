#include <doctest.h>

#include <cmath>
#include <limits>

#include "mapla/stepsize.hpp"

using namespace mapla;

TEST_CASE("self-concordant regime at unit parameters") {
  StepSizeParams p;
  p.d = 1;
  p.lambda = 1;
  p.beta = 1;
  CHECK(recommend_step_size(StepRegime::SelfConcordant, p) == doctest::Approx(1.0));
  p.c1 = 0.25;
  CHECK(recommend_step_size(StepRegime::SelfConcordant, p) == doctest::Approx(0.25));
}

TEST_CASE("exponential regime") {
  StepSizeParams p;
  p.d = 10;
  p.warmness = std::exp(1.0);
  p.delta = 1.0;
  CHECK(recommend_step_size(StepRegime::Exponential, p) == doctest::Approx(0.01));
}

TEST_CASE("SC++ improves on SC with dimension") {
  StepSizeParams p;
  p.lambda = 1;
  p.beta = 1;
  p.alpha = 1;
  p.d = 10;
  const double r10 = recommend_step_size(StepRegime::SelfConcordantPlus, p) /
                     recommend_step_size(StepRegime::SelfConcordant, p);
  p.d = 100;
  const double r100 = recommend_step_size(StepRegime::SelfConcordantPlus, p) /
                      recommend_step_size(StepRegime::SelfConcordant, p);
  CHECK(r10 > 1.0);
  CHECK(r100 > 10.0 * r10);
}

TEST_CASE("zero denominators drop out") {
  StepSizeParams p;
  p.d = 2;
  // lambda = beta = 0 leaves only d^-3
  CHECK(recommend_step_size(StepRegime::SelfConcordant, p) == doctest::Approx(0.125));
  p.d = 0;
  CHECK(recommend_step_size(StepRegime::SelfConcordant, p) == std::numeric_limits<double>::infinity());
}
