#include <cmath>

#include <gtest/gtest.h>

#include "jumpldp/rate.hpp"
#include "testutil.hpp"

using namespace jumpldp;

namespace {

ProcessSpec swap_model() {
  Vec q(2);
  q << 1.0, 2.0;
  Mat alpha(2, 2);
  alpha << 0.0, 1.0, 1.0, 0.0;
  return validate_spec({}, q, alpha);
}

// Hand value for the swap model at eta = (1/2, 1/2): theta = (3/4, 3/2),
// first term 3/2, second term sqrt(9/8) * (2/3 + 2/3) = sqrt(2).
constexpr double kSwapRate = 0.08578643762690485;  // 3/2 - sqrt(2)

}  // namespace

TEST(RateExplicit, ZeroAtStationaryLaw) {
  rng::Stream stream = rng::stream_from_seed(3);
  for (int rep = 0; rep < 10; ++rep) {
    const ProcessSpec spec = testkit::random_reversible_spec(3 + rep % 4, stream);
    const RateResult r = rate_explicit(spec, ProbMeasure{spec.pi, std::nullopt});
    EXPECT_NEAR(r.value, 0.0, 1e-12);
  }
}

TEST(RateExplicit, HotCellClosedForm) {
  const ProcessSpec model = uniform_cell_model(4);
  const ProbMeasure eta = dirac_cell_target(model);
  const RateResult r = rate_explicit(model, eta);
  EXPECT_NEAR(r.value, 0.25, 1e-13);
  EXPECT_NEAR(r.first_term, 1.0, 1e-13);
  EXPECT_NEAR(r.second_term, 0.75, 1e-13);
  EXPECT_NEAR(r.value, r.first_term - r.second_term, 1e-15);
}

TEST(RateExplicit, SwapModelHandValue) {
  const ProcessSpec spec = swap_model();
  const ProbMeasure eta = attach_density(spec, make_measure((Vec(2) << 0.5, 0.5).finished()));
  const RateResult r = rate_explicit(spec, eta);
  EXPECT_NEAR(r.value, kSwapRate, 1e-12);
  EXPECT_NEAR((*eta.theta)[0], 0.75, 1e-12);
  EXPECT_NEAR((*eta.theta)[1], 1.5, 1e-12);
  EXPECT_THROW(rate_explicit(spec, make_measure(Vec::Constant(3, 1.0 / 3.0))), DimensionError);
}

TEST(RateExplicit, BoundedAndNonnegative) {
  rng::Stream stream = rng::stream_from_seed(17);
  for (int rep = 0; rep < 300; ++rep) {
    const ProcessSpec spec = testkit::random_reversible_spec(2 + rep % 5, stream);
    const ProbMeasure eta = testkit::random_target(spec, stream);
    const RateResult r = rate_explicit(spec, eta);
    EXPECT_GE(r.value, -1e-12);
    EXPECT_LE(r.value, spec.q_max + 1e-12);
    EXPECT_GE(r.second_term, 0.0);
  }
}

TEST(RateExplicit, Convexity) {
  rng::Stream stream = rng::stream_from_seed(23);
  for (int rep = 0; rep < 200; ++rep) {
    const ProcessSpec spec = testkit::random_reversible_spec(3 + rep % 4, stream);
    const ProbMeasure eta1 = testkit::random_target(spec, stream);
    const ProbMeasure eta2 = testkit::random_target(spec, stream);
    const double lam = stream.next_unit();
    const ProbMeasure mix =
        attach_density(spec, ProbMeasure{(lam * eta1.w + (1.0 - lam) * eta2.w).eval(), std::nullopt});
    const double lhs = rate_explicit(spec, mix).value;
    const double rhs =
        lam * rate_explicit(spec, eta1).value + (1.0 - lam) * rate_explicit(spec, eta2).value;
    EXPECT_LE(lhs, rhs + 1e-10);
  }
}

TEST(RateExplicit, ZeroOnlyAtStationaryLaw) {
  rng::Stream stream = rng::stream_from_seed(31);
  for (int rep = 0; rep < 50; ++rep) {
    const ProcessSpec spec = testkit::random_reversible_spec(3 + rep % 3, stream);
    ProbMeasure eta = testkit::random_interior_target(spec, stream);
    const double tv = 0.5 * (eta.w - spec.pi).cwiseAbs().sum();
    if (tv > 1e-2) {
      EXPECT_GT(rate_explicit(spec, eta).value, 1e-12);
    }
  }
}

TEST(Oracle, StationaryLawGivesZero) {
  const ProcessSpec spec = swap_model();
  const auto r = rate_variational_oracle(spec, attach_density(spec, ProbMeasure{spec.pi, std::nullopt}));
  EXPECT_NEAR(r.value, 0.0, 1e-9);
}

TEST(Oracle, MatchesExplicitOnSwapModel) {
  const ProcessSpec spec = swap_model();
  const ProbMeasure eta = attach_density(spec, make_measure((Vec(2) << 0.5, 0.5).finished()));
  const auto r = rate_variational_oracle(spec, eta);
  EXPECT_NEAR(r.value, kSwapRate, 1e-9);
}

TEST(Oracle, SoftenedHotCell) {
  const ProcessSpec model = uniform_cell_model(4);
  const ProbMeasure hot = dirac_cell_target(model);
  const ProbMeasure soft =
      attach_density(model, ProbMeasure{(0.99 * hot.w + 0.01 * model.pi).eval(), std::nullopt});
  const double explicit_value = rate_explicit(model, soft).value;
  const auto oracle = rate_variational_oracle(model, soft);
  EXPECT_NEAR(oracle.value, explicit_value, 5e-3);  // stated bound; usually far tighter
  EXPECT_NEAR(oracle.value, explicit_value, 1e-6);
}

TEST(Oracle, AgreementOnRandomInteriorBattery) {
  rng::Stream stream = rng::stream_from_seed(41);
  for (int rep = 0; rep < 40; ++rep) {
    const ProcessSpec spec = testkit::random_reversible_spec(3 + rep % 4, stream);
    const ProbMeasure eta = testkit::random_interior_target(spec, stream);
    const double explicit_value = rate_explicit(spec, eta).value;
    const auto oracle = rate_variational_oracle(spec, eta);
    EXPECT_NEAR(oracle.value, explicit_value, 1e-6);
  }
}

TEST(Oracle, RejectsBoundaryMeasures) {
  const ProcessSpec model = uniform_cell_model(3);
  Vec w(3);
  w << 0.5, 0.5, 0.0;
  EXPECT_THROW(rate_variational_oracle(model, attach_density(model, ProbMeasure{w, std::nullopt})),
               DomainError);
}

TEST(DiracFamily, ClosedFormAndMonotonicity) {
  const auto family = rate_lsc_extension_demo(12);
  ASSERT_EQ(family.size(), 11u);
  double prev = -1.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const int k = static_cast<int>(i) + 2;
    const double expected = 1.0 - 4.0 * (k - 1) / static_cast<double>(k) / k;
    EXPECT_NEAR(family[i].second, expected, 1e-12) << "k=" << k;
    EXPECT_GT(family[i].second, prev);
    EXPECT_LT(family[i].second, 1.0);
    prev = family[i].second;
  }
  EXPECT_NEAR(family[0].second, 0.0, 1e-12);   // k = 2: the target is pi itself
  EXPECT_NEAR(family[2].second, 0.25, 1e-12);  // k = 4
  EXPECT_THROW(rate_lsc_extension_demo(1), DomainError);
}
