#include <gtest/gtest.h>

#include <cmath>

#include "anisoflow/flow_engine.hpp"
#include "anisoflow/reference.hpp"

using namespace anisoflow;

namespace {

const FlowParams kSuper = FlowParams::make(2, 1, 3, 1);
const FlowParams kCritical = FlowParams::make(2, 1, 2, 1);
const FlowParams kSub = FlowParams::make(2, 1, 1.5, 1);

Grid polar(int m) { return Grid(GridKind::axisym_polar, m); }

// Integrate a centred sphere with a fixed step and return the relative error at t_end.
double sphere_time_error(double dt, Scheme scheme) {
  StepperConfig cfg;
  cfg.cfl = 1.0;
  cfg.scheme = scheme;
  auto f = sphere_initial(polar(8), 2.0);
  const double t_end = 1.0;
  const int n = static_cast<int>(std::lround(t_end / dt));
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    auto s = step(f, kSuper, cfg, FlowMode::normalized, t, dt);
    EXPECT_DOUBLE_EQ(s.dt, dt);
    f = s.field;
    t += dt;
  }
  const double exact = sphere_radius(t_end, SphereSolution(2.0, kSuper));
  return std::abs(std::exp(f.phi[0]) - exact) / exact;
}

}  // namespace

TEST(Params, RegimesAndGamma) {
  EXPECT_EQ(kSuper.regime(), Regime::super);
  EXPECT_EQ(kCritical.regime(), Regime::critical);
  EXPECT_EQ(kSub.regime(), Regime::sub);
  EXPECT_EQ(kCritical.excess(), 0.0);
  EXPECT_DOUBLE_EQ(FlowParams::make(3, 2, 4, 2).gamma(), std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(FlowParams::make(2, 2, 4, 2).gamma(), 1.0);
  EXPECT_THROW(FlowParams::make(2, 3, 4, 1), std::invalid_argument);
  EXPECT_THROW(FlowParams::make(2, 0, 4, 1), std::invalid_argument);
  EXPECT_THROW(FlowParams::make(2, 1, 4, 0), std::invalid_argument);
}

TEST(Rhs, UnitSphereIsFixedPoint) {
  for (const auto& p : {kSuper, kCritical, kSub}) {
    for (double v : rhs_normalized(sphere_initial(polar(32), 1.0), p)) EXPECT_NEAR(v, 0.0, 1e-15);
  }
}

TEST(Rhs, CriticalSpheresAreStationary) {
  for (double a : {0.3, 2.0, 7.5})
    for (double v : rhs_normalized(sphere_initial(polar(32), a), kCritical)) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(Rhs, SuperRegimeShrinksLargeSpheres) {
  for (double v : rhs_normalized(sphere_initial(polar(32), 2.0), kSuper)) EXPECT_LT(v, 0.0);
  for (double v : rhs_normalized(sphere_initial(polar(32), 0.5), kSuper)) EXPECT_GT(v, 0.0);
  for (double v : rhs_normalized(sphere_initial(polar(32), 2.0), kSub)) EXPECT_GT(v, 0.0);
}

TEST(Rhs, NormalizedIsUnnormalizedPlusGamma) {
  const auto f = elongated_initial(polar(64), 1.7);
  const auto p = FlowParams::make(2, 2, 3.3, 1.4);
  const auto a = rhs_normalized(f, p), b = rhs_unnormalized(f, p);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i] + p.gamma(), 1e-13);
}

TEST(Rhs, SphereSpeedMatchesClosedForm) {
  // d(log a)/dt = -gamma a^(alpha/beta - 1) a^(-k/beta) for the unnormalized sphere.
  const auto p = FlowParams::make(3, 2, 2.5, 1.5);
  const double a = 1.3;
  for (double v : rhs_unnormalized(sphere_initial(polar(16), a), p))
    EXPECT_NEAR(v, -p.gamma() * std::pow(a, (p.alpha - p.k) / p.beta - 1.0), 1e-13);
}

TEST(Rhs, ConeViolationCarriesValues) {
  const auto f = RadialField::from_radius(polar(128), [](double t) { return 1.0 + 0.4 * std::cos(6 * t); });
  try {
    rhs_normalized(f, FlowParams::make(2, 2, 4, 2));
    FAIL() << "expected ConeViolation";
  } catch (const ConeViolation& e) {
    EXPECT_EQ(e.per_j_values.size(), 2u);
    EXPECT_GE(e.node, 0);
    EXPECT_FALSE(e.per_j_values[0] > 0 && e.per_j_values[1] > 0);
  }
}

TEST(StableDt, UnitSphereHasUnitDiffusivity) {
  const auto f = sphere_initial(polar(64), 1.0);
  EXPECT_NEAR(max_diffusivity(f, kSuper), 1.0, 1e-14);
  StepperConfig cfg;
  const double h = polar(64).spacing();
  EXPECT_NEAR(stable_dt(f, kSuper, cfg), cfg.cfl * h * h, 1e-16);
}

TEST(StableDt, RefinementQuartersStep) {
  StepperConfig cfg;
  const double a = stable_dt(elongated_initial(polar(64), 1.5), kSuper, cfg);
  const double b = stable_dt(elongated_initial(polar(128), 1.5), kSuper, cfg);
  EXPECT_NEAR(a / b, 4.0, 0.1);
}

TEST(StableDt, DiffusivityMatchesPerturbation) {
  // Bumping phi at one node changes its rhs by about -2 D eps / h^2.
  const auto p = FlowParams::make(2, 2, 3.5, 1.5);
  const auto f = elongated_initial(polar(128), 1.5);
  const double h = f.grid.spacing();
  const auto base = rhs_normalized(f, p);
  double dmax = 0.0;
  for (int i = 0; i < f.grid.size(); ++i) {
    auto g = f;
    const double eps = 1e-7;
    g.phi[i] += eps;
    const double d = -(rhs_normalized(g, p)[i] - base[i]) / eps * h * h / 2.0;
    dmax = std::max(dmax, d);
  }
  EXPECT_NEAR(dmax / max_diffusivity(f, p), 1.0, 0.1);
}

TEST(StableDt, OutsideConeThrows) {
  const auto f = RadialField::from_radius(polar(64), [](double t) { return 1.0 + 0.4 * std::cos(6 * t); });
  EXPECT_THROW(stable_dt(f, FlowParams::make(2, 2, 4, 2), StepperConfig{}), ConeViolation);
}

TEST(StableDt, NonPositiveDiffusivityThrows) {
  // With the cone check skipped, sigma_{k-1}(kappa | mer) < 0 everywhere leaves no parabolic direction.
  auto g = geometry(sphere_initial(polar(16), 1.0), FlowParams::make(2, 2, 4, 2));
  for (auto& v : g.sigma_k_minus_mer) v = -1.0;
  EXPECT_THROW(detail::dt_from(g, 0.2), StabilityError);
}

TEST(Step, UnitSphereUnchanged) {
  StepperConfig cfg;
  const auto f = sphere_initial(polar(64), 1.0);
  const auto s = step(f, kSuper, cfg);
  for (double v : s.field.phi) EXPECT_NEAR(v, 0.0, 1e-14);
  EXPECT_DOUBLE_EQ(s.record.R, 1.0);
}

TEST(Step, LargeSphereShrinksMonotonically) {
  StepperConfig cfg;
  auto f = sphere_initial(polar(32), 2.0);
  double prev = f.phi[0];
  for (int i = 0; i < 200; ++i) {
    f = step(f, kSuper, cfg).field;
    EXPECT_LT(f.phi[0], prev);
    EXPECT_GT(f.phi[0], 0.0);
    prev = f.phi[0];
  }
}

TEST(Step, Rk4IsFourthOrderInTime) {
  const double e1 = sphere_time_error(0.04, Scheme::rk4);
  const double e2 = sphere_time_error(0.02, Scheme::rk4);
  const double e3 = sphere_time_error(0.01, Scheme::rk4);
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.3);
  EXPECT_NEAR(std::log2(e2 / e3), 4.0, 0.3);
}

TEST(Step, EulerIsFirstOrderInTime) {
  const double e1 = sphere_time_error(0.02, Scheme::euler);
  const double e2 = sphere_time_error(0.01, Scheme::euler);
  EXPECT_NEAR(std::log2(e1 / e2), 1.0, 0.1);
}

TEST(TimeMaps, RescaleFactor) {
  EXPECT_EQ(rescale_factor(0.0, kSuper), 1.0);
  EXPECT_NEAR(rescale_factor(1.0, kCritical), std::exp(-kCritical.gamma()), 1e-15);
  // (1 + q gamma t)^(-1/q) with q = 1, gamma = 2 for (2,1,3,1).
  EXPECT_NEAR(rescale_factor(0.5, kSuper), 0.5, 1e-15);
  EXPECT_THROW(rescale_factor(-1.0, kSuper), std::domain_error);
  // sub regime: q = -1/2, singular at t = 1 / (|q| gamma) = 1.
  EXPECT_NO_THROW(rescale_factor(0.99, kSub));
  EXPECT_THROW(rescale_factor(1.0, kSub), std::domain_error);
}

TEST(TimeMaps, Tau) {
  EXPECT_EQ(tau(0.0, kSuper), 0.0);
  EXPECT_EQ(tau(0.0, kSub), 0.0);
  EXPECT_EQ(tau(3.7, kCritical), 3.7);
  EXPECT_NEAR(tau(1.0, kSuper), std::log(3.0) / 2.0, 1e-15);
  EXPECT_THROW(tau(1.0, kSub), std::domain_error);
  EXPECT_THROW(tau(-0.1, kSuper), std::domain_error);
  for (double t : {0.1, 0.5, 2.0}) EXPECT_NEAR(tau_inverse(tau(t, kSuper), kSuper), t, 1e-14);
}

TEST(TimeMaps, TauDerivativeIsFactorPower) {
  const auto p = FlowParams::make(3, 2, 5.5, 1.5);
  for (double t : {0.2, 1.0, 3.0}) {
    const double e = 1e-5;
    const double dt = (tau(t + e, p) - tau(t - e, p)) / (2 * e);
    EXPECT_NEAR(dt, std::pow(rescale_factor(t, p), p.excess()), 1e-8);
  }
}

TEST(Run, SphereConvergesImmediately) {
  StepperConfig cfg;
  cfg.t_end = 5.0;
  for (const auto& p : {kSuper, kCritical}) {
    const auto r = run(sphere_initial(polar(32), 2.0), p, cfg);
    EXPECT_EQ(r.status, RunStatus::converged);
    EXPECT_NEAR(r.final_record().R, 1.0, 1e-10);
    EXPECT_EQ(r.steps, cfg.converge_steps);
  }
}

TEST(Run, StopsAtEndTimeExactly) {
  StepperConfig cfg;
  cfg.t_end = 0.05;
  cfg.converge_tol = 0.0;
  const auto r = run(elongated_initial(polar(32), 1.5), kSuper, cfg);
  EXPECT_EQ(r.status, RunStatus::t_end);
  EXPECT_DOUBLE_EQ(r.t, 0.05);
  EXPECT_DOUBLE_EQ(r.final_record().t, 0.05);
  EXPECT_EQ(r.series.size(), static_cast<std::size_t>(r.steps + 1));
}

TEST(Run, MaxStepsAndSubsampling) {
  StepperConfig cfg;
  cfg.max_steps = 25;
  cfg.record_every = 10;
  cfg.snapshot_every = 10;
  cfg.converge_tol = 0.0;
  const auto r = run(elongated_initial(polar(32), 1.5), kSuper, cfg);
  EXPECT_EQ(r.status, RunStatus::max_steps);
  EXPECT_EQ(r.steps, 25);
  ASSERT_EQ(r.series.size(), 4u);  // 0, 10, 20, 25
  ASSERT_EQ(r.snapshots.size(), 4u);
  EXPECT_EQ(r.snapshots.back().step, 25);
}

TEST(Run, ConeExitIsBlowup) {
  const auto f = RadialField::from_radius(polar(64), [](double t) { return 1.0 + 0.4 * std::cos(6 * t); });
  StepperConfig cfg;
  const auto r = run(f, FlowParams::make(2, 2, 4, 2), cfg);
  EXPECT_EQ(r.status, RunStatus::blowup);
  ASSERT_TRUE(r.cone_violation.has_value());
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(r.series.size(), 1u);
}

TEST(Run, InvalidConfigThrows) {
  StepperConfig cfg;
  cfg.cfl = 0.0;
  EXPECT_THROW(run(sphere_initial(polar(32), 1.0), kSuper, cfg), std::invalid_argument);
}

TEST(Run, CircleFlowRoundsOut) {
  const auto p = FlowParams::make(1, 1, 3, 1);
  StepperConfig cfg;
  cfg.t_end = 30.0;
  const auto r = run(elongated_initial(Grid(GridKind::periodic_circle, 64), 1.3), p, cfg);
  EXPECT_EQ(r.status, RunStatus::converged);
  EXPECT_LT(r.final_record().sphere_dev, 1e-6);
}
