#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rabies/errors.hpp"
#include "rabies/forcing.hpp"
#include "rabies/integrator.hpp"

using namespace rabies;

TEST(PeriodicRate, Examples)
{
    ForcingConfig cfg = ForcingConfig::all_rates(0.0);
    for (double t : {0.0, 1.3, 7.7, 123.4}) {
        EXPECT_EQ(periodic_rate(0.0004, cfg, t), 0.0004);
    }
    cfg = ForcingConfig::all_rates(0.5);
    EXPECT_EQ(periodic_rate(0.0004, cfg, 0.0), 0.0004);
    EXPECT_NEAR(periodic_rate(0.0004, cfg, 2.5), 0.0006, 1e-18);
    EXPECT_THROW(periodic_rate(-1.0, cfg, 0.0), DomainError);
}

TEST(PeriodicRate, ExactlyPeriodic)
{
    const ForcingConfig cfg = ForcingConfig::all_rates(0.7, 10.0, 0.3);
    // Bit-for-bit whenever t + T is exact.
    for (double t : {0.0, 0.125, 2.5, 3.25, 9.75, -4.0, 1234.5}) {
        EXPECT_EQ(modulation_factor(cfg, t), modulation_factor(cfg, t + 10.0)) << t;
        EXPECT_EQ(periodic_rate(0.0004, cfg, t), periodic_rate(0.0004, cfg, t + 10.0)) << t;
    }
    // Otherwise the rounding of t + T is the only difference.
    for (double t : {0.1, 3.3, 9.99, 77.7}) {
        EXPECT_NEAR(modulation_factor(cfg, t), modulation_factor(cfg, t + 10.0), 1e-14) << t;
    }
}

TEST(PeriodicRate, SameAsBiteIncidenceModulation)
{
    const ForcingConfig cfg = ForcingConfig::all_rates(0.4, 8.0, 1.1);
    for (double t : {0.5, 1.7, 6.2}) {
        EXPECT_NEAR(modulation_factor(cfg, t), modulation(0.4, t / 8.0, 1.1), 1e-15);
    }
}

TEST(BiteIncidence, Examples)
{
    EXPECT_EQ(bite_incidence(0.0004, 0.5, 0.3, 0.0, 100, 0), 0.0);
    EXPECT_DOUBLE_EQ(bite_incidence(0.0004, 0.0, 0.3, 0.0, 100, 10), 0.0004 * 1000);
    EXPECT_NEAR(bite_incidence(0.0004, 1.0, 0.25, 0.0, 100, 10), 0.8, 1e-15);
}

TEST(ForcingConfig, Validation)
{
    EXPECT_THROW(ForcingConfig::all_rates(1.5), ConfigError);
    EXPECT_THROW(ForcingConfig::all_rates(-0.1), ConfigError);
    EXPECT_THROW(ForcingConfig::all_rates(0.5, 0.0), ConfigError);
    EXPECT_THROW(ForcingConfig::all_rates(0.5, 10.0, std::nan("")), ConfigError);
    ForcingConfig cfg;
    cfg.amplitude = 0.5;
    cfg.targets = {"mu1"};
    EXPECT_THROW(cfg.validate(), ConfigError);
    EXPECT_NO_THROW(ForcingConfig::all_rates(1.0));
    EXPECT_EQ(ForcingConfig::all_rates(0.2).targets.size(), kForcibleRates.size());
}

TEST(ForcedParams, OnlyTargetsMove)
{
    ForcingConfig cfg;
    cfg.amplitude = 0.5;
    cfg.targets = {"tau1", "nu2"};
    const Params base = default_params();
    const Params q = forced_params(base, cfg, 2.5);
    EXPECT_DOUBLE_EQ(q.tau1, 1.5 * base.tau1);
    EXPECT_DOUBLE_EQ(q.nu2, 1.5 * base.nu2);
    EXPECT_EQ(q.tau2, base.tau2);
    EXPECT_EQ(q.mu1, base.mu1);
}

TEST(ForcedRhs, ReducesToUnforced)
{
    const Params p = default_params();
    const StateVector y = reference_initial_condition();
    const RhsFunction plain = make_rhs(p);
    ForcingConfig empty;
    empty.amplitude = 0.5;
    for (double t : {0.0, 1.0, 3.7}) {
        EXPECT_EQ(forced_rhs(p, ForcingConfig::all_rates(0.0))(t, y), plain(t, y));
        EXPECT_EQ(forced_rhs(p, empty)(t, y), plain(t, y));
    }
}

TEST(ForcedRhs, PeriodicInTime)
{
    ForcingConfig cfg;
    cfg.amplitude = 0.5;
    cfg.period = 10.0;
    cfg.targets = {"tau1"};
    StateVector y = reference_initial_condition();
    y[Compartment::IF] = 3.0;
    const RhsFunction f = forced_rhs(default_params(), cfg);
    for (double t : {0.0, 1.25, 4.5, 7.0}) {
        EXPECT_EQ(f(t, y), f(t + 10.0, y));
    }
}

TEST(ForcedRhs, UnforcedTrajectoryEquivalence)
{
    IntegratorConfig cfg;
    cfg.rtol = 1e-8;
    cfg.atol = 1e-8;
    std::vector<double> times;
    for (int k = 0; k <= 50; ++k) {
        times.push_back(k);
    }
    const Params p = default_params();
    const Trajectory a = integrate_at(make_rhs(p), reference_initial_condition(), times, cfg);
    const Trajectory b = integrate_at(forced_rhs(p, ForcingConfig::all_rates(0.0)),
                                      reference_initial_condition(), times, cfg);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double scale = a.states[k].max_abs();
        for (std::size_t i = 0; i < 12; ++i) {
            EXPECT_LE(std::abs(a.states[k][i] - b.states[k][i]), 10 * cfg.rtol * scale);
        }
    }
}

TEST(ForcedRhs, PositivityWithFullAmplitude)
{
    std::vector<double> times;
    for (int k = 0; k <= 100; ++k) {
        times.push_back(k);
    }
    const Trajectory traj = integrate_at(forced_rhs(default_params(), ForcingConfig::all_rates(1.0)),
                                         reference_initial_condition(), times);
    for (const auto& y : traj.states) {
        for (std::size_t i = 0; i < 12; ++i) {
            EXPECT_GE(y[i], -1e-9 * std::max(1.0, y.max_abs()));
        }
    }
}
