#include <cmath>

#include <gtest/gtest.h>

#include "jumpldp/process_model.hpp"
#include "testutil.hpp"

using namespace jumpldp;

namespace {

// Two states, q = (1, 2), deterministic swap kernel. Solved by hand:
// pi_tilde = (1/2, 1/2), pi = (2/3, 1/3), both detailed-balance fluxes 2/3.
ProcessSpec swap_model() {
  Vec q(2);
  q << 1.0, 2.0;
  Mat alpha(2, 2);
  alpha << 0.0, 1.0, 1.0, 0.0;
  return validate_spec({"a", "b"}, q, alpha);
}

}  // namespace

TEST(ValidateSpec, UniformCellModel) {
  const ProcessSpec spec = uniform_cell_model(4);
  EXPECT_EQ(spec.n(), 4);
  for (int x = 0; x < 4; ++x) {
    EXPECT_NEAR(spec.pi_tilde[x], 0.25, 1e-14);
    EXPECT_NEAR(spec.pi[x], 0.25, 1e-14);
  }
  EXPECT_DOUBLE_EQ(spec.q_min, 1.0);
  EXPECT_DOUBLE_EQ(spec.q_max, 1.0);
  EXPECT_NEAR(spec.mean_intensity, 1.0, 1e-14);
}

TEST(ValidateSpec, SingleState) {
  Vec q(1);
  q << 1.0;
  Mat alpha(1, 1);
  alpha << 1.0;
  const ProcessSpec spec = validate_spec({}, q, alpha);
  EXPECT_DOUBLE_EQ(spec.pi[0], 1.0);
  EXPECT_DOUBLE_EQ(spec.pi_tilde[0], 1.0);
}

TEST(ValidateSpec, SwapModelByHand) {
  const ProcessSpec spec = swap_model();
  EXPECT_NEAR(spec.pi_tilde[0], 0.5, 1e-12);
  EXPECT_NEAR(spec.pi_tilde[1], 0.5, 1e-12);
  EXPECT_NEAR(spec.pi[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(spec.pi[1], 1.0 / 3.0, 1e-12);
  const double flux_ab = spec.q[0] * spec.alpha(0, 1) * spec.pi[0];
  const double flux_ba = spec.q[1] * spec.alpha(1, 0) * spec.pi[1];
  EXPECT_NEAR(flux_ab, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(flux_ba, 2.0 / 3.0, 1e-12);
}

TEST(ValidateSpec, Rejections) {
  Vec q(2);
  q << 1.0, 1.0;

  Mat bad_rows(2, 2);
  bad_rows << 0.6, 0.6, 0.5, 0.5;
  EXPECT_THROW(validate_spec({}, q, bad_rows), RowSumError);

  Mat negative(2, 2);
  negative << 1.2, -0.2, 0.5, 0.5;
  EXPECT_THROW(validate_spec({}, q, negative), RowSumError);

  Vec bad_q(2);
  bad_q << 1.0, 0.0;
  Mat uniform2 = Mat::Constant(2, 2, 0.5);
  EXPECT_THROW(validate_spec({}, bad_q, uniform2), IntensityError);

  Mat absorbing(2, 2);
  absorbing << 0.0, 1.0, 0.0, 1.0;
  EXPECT_THROW(validate_spec({}, q, absorbing), ReducibleError);

  // Deterministic 3-cycle: irreducible but not reversible.
  Vec q3 = Vec::Ones(3);
  Mat cycle = Mat::Zero(3, 3);
  cycle(0, 1) = cycle(1, 2) = cycle(2, 0) = 1.0;
  EXPECT_THROW(validate_spec({}, q3, cycle), NotReversibleError);

  EXPECT_THROW(validate_spec({"x"}, q, uniform2), DimensionError);
  EXPECT_THROW(validate_spec({}, q, uniform2, -1.0), DomainError);
}

TEST(InvariantMeasures, DoublyStochasticIsUniform) {
  Vec q = Vec::Constant(3, 2.5);
  Mat alpha(3, 3);
  alpha << 0.2, 0.3, 0.5, 0.3, 0.5, 0.2, 0.5, 0.2, 0.3;
  const ProcessSpec spec = validate_spec({}, q, alpha);
  const auto [pi_tilde, pi] = invariant_measures(spec);
  for (int x = 0; x < 3; ++x) {
    EXPECT_NEAR(pi_tilde.w[x], 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(pi.w[x], 1.0 / 3.0, 1e-12);
  }
}

TEST(InvariantMeasures, GeneratorBalance) {
  rng::Stream stream = rng::stream_from_seed(11);
  for (int rep = 0; rep < 20; ++rep) {
    const ProcessSpec spec = testkit::random_reversible_spec(3 + rep % 4, stream);
    for (int k = 0; k < spec.n(); ++k) {
      Vec basis = Vec::Zero(spec.n());
      basis[k] = 1.0;
      EXPECT_NEAR(spec.pi.dot(generator_apply(spec, basis)), 0.0, 1e-10);
    }
  }
}

TEST(Minorization, KernelEqualToStationaryLaw) {
  const auto window = check_minorization(uniform_cell_model(4), 64);
  EXPECT_EQ(window.steps, 1);
  EXPECT_NEAR(window.bound, 1.0, 1e-12);

  const auto window3 = check_minorization(uniform_cell_model(3), 64);
  EXPECT_EQ(window3.steps, 1);
  EXPECT_NEAR(window3.bound, 1.0, 1e-12);
}

TEST(Minorization, PeriodicChainFails) {
  const ProcessSpec spec = swap_model();
  try {
    check_minorization(spec, 8);
    FAIL() << "expected NoMinorizationError";
  } catch (const NoMinorizationError& e) {
    // alpha^8 is the identity: the off-diagonal entries stay at zero
    EXPECT_EQ(e.violating.size(), 2u);
  }
}

TEST(Minorization, LazyChainNeedsOneStepOnly) {
  Vec q = Vec::Ones(2);
  Mat lazy(2, 2);
  lazy << 0.5, 0.5, 0.5, 0.5;
  const auto window = check_minorization(validate_spec({}, q, lazy), 64);
  EXPECT_EQ(window.steps, 1);
}

TEST(GeneratorApply, Examples) {
  const ProcessSpec uniform = uniform_cell_model(5);
  Vec constant = Vec::Constant(5, 3.7);
  EXPECT_NEAR(generator_apply(uniform, constant).cwiseAbs().maxCoeff(), 0.0, 1e-14);

  Vec f(5);
  f << 0.3, -1.0, 2.0, 0.0, 1.1;
  const Vec lf = generator_apply(uniform, f);
  const double mean = f.mean();
  for (int x = 0; x < 5; ++x) EXPECT_NEAR(lf[x], mean - f[x], 1e-14);

  const ProcessSpec spec = swap_model();
  Vec f2(2);
  f2 << 0.0, 1.0;
  const Vec lf2 = generator_apply(spec, f2);
  EXPECT_NEAR(lf2[0], 1.0, 1e-14);
  EXPECT_NEAR(lf2[1], -2.0, 1e-14);

  EXPECT_THROW(generator_apply(spec, f), DimensionError);
}

TEST(Reversibility, SelfAdjointness) {
  rng::Stream stream = rng::stream_from_seed(29);
  for (int rep = 0; rep < 25; ++rep) {
    const ProcessSpec spec = testkit::random_reversible_spec(3 + rep % 4, stream);
    Vec f(spec.n()), h(spec.n());
    for (int i = 0; i < spec.n(); ++i) {
      f[i] = 2.0 * stream.next_unit() - 1.0;
      h[i] = 2.0 * stream.next_unit() - 1.0;
    }
    const double lhs = generator_apply(spec, f).cwiseProduct(h).dot(spec.pi);
    const double rhs = generator_apply(spec, h).cwiseProduct(f).dot(spec.pi);
    EXPECT_NEAR(lhs, rhs, 1e-10);
    EXPECT_NEAR(spec.pi.dot(generator_apply(spec, f)), 0.0, 1e-10);
  }
}

TEST(Measures, DensityAttachment) {
  const ProcessSpec spec = swap_model();
  ProbMeasure eta = make_measure((Vec(2) << 0.5, 0.5).finished());
  eta = attach_density(spec, eta);
  ASSERT_TRUE(eta.theta.has_value());
  EXPECT_NEAR((*eta.theta)[0], 0.75, 1e-12);
  EXPECT_NEAR((*eta.theta)[1], 1.5, 1e-12);
  for (int x = 0; x < 2; ++x) EXPECT_DOUBLE_EQ((*eta.theta)[x] * spec.pi[x], eta.w[x]);

  EXPECT_THROW(make_measure((Vec(2) << 0.6, 0.5).finished()), DomainError);
  EXPECT_THROW(make_measure((Vec(2) << 1.1, -0.1).finished()), DomainError);
}
