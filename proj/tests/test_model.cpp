#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rabies/equilibria.hpp"
#include "rabies/errors.hpp"
#include "rabies/model.hpp"

using namespace rabies;

namespace {

StateVector random_state(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    StateVector y;
    const std::array<double, 12> scale = {1e5, 100, 50, 100, 1e4, 50, 50, 1e4, 50, 50, 100, 10};
    for (std::size_t i = 0; i < 12; ++i) {
        y[i] = scale[i] * u(rng);
    }
    return y;
}

} // namespace

TEST(Saturation, Examples)
{
    EXPECT_EQ(environment_saturation(0.0, 0.003), 0.0);
    EXPECT_DOUBLE_EQ(environment_saturation(0.003, 0.003), 0.5);
    EXPECT_NEAR(environment_saturation(0.297, 0.003), 0.99, 1e-15);
    EXPECT_THROW(environment_saturation(-1e-9, 0.003), DomainError);
    EXPECT_THROW(environment_saturation(1.0, 0.0), DomainError);
    EXPECT_LT(environment_saturation(1e12, 0.003), 1.0);
}

TEST(ForceOfInfection, Human)
{
    Params p = default_params();
    StateVector y;
    y[Compartment::SH] = 1000.0;
    EXPECT_EQ(foi_human(y, p), 0.0);

    y = {};
    y[Compartment::IF] = 1.0;
    y[Compartment::SH] = 1.0;
    EXPECT_DOUBLE_EQ(foi_human(y, p), 0.0004);

    y = {};
    y[Compartment::IF] = 2.0;
    y[Compartment::ID] = 3.0;
    y[Compartment::M] = 0.003;
    y[Compartment::SH] = 10.0;
    EXPECT_NEAR(foi_human(y, p), 0.0215, 1e-15);
}

TEST(ForceOfInfection, FreeRange)
{
    Params p{};
    p.c = 0.003;
    StateVector y;
    y[Compartment::SF] = 10.0;
    EXPECT_EQ(foi_free_range(y, default_params()), 0.0);

    p.kappa1 = 0.00006;
    y = {};
    y[Compartment::IF] = 1.0;
    y[Compartment::SF] = 1.0;
    EXPECT_DOUBLE_EQ(foi_free_range(y, p), 0.00006);

    p = Params{};
    p.c = 0.003;
    p.kappa2 = 0.00005;
    p.kappa3 = 0.00001;
    y = {};
    y[Compartment::ID] = 1.0;
    y[Compartment::M] = 0.003;
    y[Compartment::SF] = 100.0;
    EXPECT_NEAR(foi_free_range(y, p), 0.0055, 1e-16);
}

TEST(ForceOfInfection, Domestic)
{
    Params p{};
    p.c = 0.003;
    p.psi1 = 0.0004;
    p.rho1 = 10.0;
    StateVector y;
    y[Compartment::IF] = 11.0;
    y[Compartment::SD] = 1.0;
    EXPECT_NEAR(foi_domestic(y, p), 0.0004, 1e-18);

    p = Params{};
    p.c = 0.003;
    p.psi2 = 0.0004;
    p.rho2 = 8.0;
    y = {};
    y[Compartment::ID] = 9.0;
    y[Compartment::SD] = 2.0;
    EXPECT_NEAR(foi_domestic(y, p), 0.0008, 1e-18);

    y = {};
    y[Compartment::SD] = 5.0;
    EXPECT_EQ(foi_domestic(y, default_params()), 0.0);
}

TEST(ForceOfInfection, HomogeneousInSusceptibles)
{
    std::mt19937_64 rng(11);
    const Params p = default_params();
    for (int k = 0; k < 50; ++k) {
        StateVector y = random_state(rng);
        StateVector scaled = y;
        const double s = 0.1 + 3.0 * std::uniform_real_distribution<double>(0, 1)(rng);
        scaled[Compartment::SH] *= s;
        scaled[Compartment::SF] *= s;
        scaled[Compartment::SD] *= s;
        EXPECT_NEAR(foi_human(scaled, p), s * foi_human(y, p), 1e-12 * s * foi_human(y, p));
        EXPECT_NEAR(foi_free_range(scaled, p), s * foi_free_range(y, p),
                    1e-12 * s * foi_free_range(y, p));
        EXPECT_NEAR(foi_domestic(scaled, p), s * foi_domestic(y, p),
                    1e-12 * s * foi_domestic(y, p));
    }
}

TEST(Rhs, ZeroStateKeepsOnlyRecruitment)
{
    const Params p = default_params();
    const StateVector dy = rhs(0.0, StateVector{}, p);
    StateVector expected;
    expected[Compartment::SH] = p.theta1;
    expected[Compartment::SF] = p.theta2;
    expected[Compartment::SD] = p.theta3;
    EXPECT_EQ(dy, expected);
}

TEST(Rhs, HumanBlockByHand)
{
    const Params p = default_params();
    StateVector y;
    y[Compartment::SH] = 1.0;
    y[Compartment::EH] = 1.0;
    const StateVector dy = rhs(0.0, y, p);
    EXPECT_DOUBLE_EQ(dy[Compartment::SH], p.theta1 - p.mu1);
    EXPECT_DOUBLE_EQ(dy[Compartment::EH], -(p.mu1 + p.beta1 + p.beta2));
    EXPECT_DOUBLE_EQ(dy[Compartment::IH], p.beta1);
    EXPECT_DOUBLE_EQ(dy[Compartment::RH], p.beta2);
}

TEST(Rhs, MatchesHandWrittenOracle)
{
    std::mt19937_64 rng(3);
    for (int k = 0; k < 200; ++k) {
        const Params p = oracle::random_params(rng);
        const StateVector y = random_state(rng);
        const StateVector dy = rhs(0.0, y, p);
        const auto expected = oracle::rhs_by_hand(y.values, p);
        for (std::size_t i = 0; i < 12; ++i) {
            EXPECT_NEAR(dy[i], expected[i], 1e-12 * (1.0 + std::abs(expected[i])));
        }
    }
}

TEST(Rhs, VanishesAtDiseaseFreeEquilibrium)
{
    std::mt19937_64 rng(5);
    for (int k = 0; k < 100; ++k) {
        const Params p = k == 0 ? default_params() : oracle::random_params(rng);
        const StateVector dfe = disease_free_equilibrium(p).state;
        EXPECT_LT(rhs(0.0, dfe, p).max_abs() / dfe.max_abs(), 1e-12);
    }
}

TEST(Rhs, BoundaryDerivativesAreNonNegative)
{
    std::mt19937_64 rng(17);
    for (int k = 0; k < 100; ++k) {
        const Params p = oracle::random_params(rng);
        const StateVector base = random_state(rng);
        for (std::size_t i = 0; i < 12; ++i) {
            StateVector y = base;
            y[i] = 0.0;
            EXPECT_GE(rhs(0.0, y, p)[i], 0.0) << kCompartmentNames[i];
        }
    }
}

TEST(Rhs, HumanTotalInequality)
{
    std::mt19937_64 rng(23);
    for (int k = 0; k < 100; ++k) {
        const Params p = oracle::random_params(rng);
        const StateVector y = random_state(rng);
        const StateVector dy = rhs(0.0, y, p);
        const double n_h = population_totals(y).n_h;
        const double dn = dy[Compartment::SH] + dy[Compartment::EH] + dy[Compartment::IH] +
                          dy[Compartment::RH];
        EXPECT_NEAR(dn, p.theta1 - p.mu1 * n_h - p.sigma1 * y.i_h(), 1e-9 * (1.0 + std::abs(dn)));
        EXPECT_LE(dn, p.theta1 - p.mu1 * n_h + 1e-9 * (1.0 + std::abs(dn)));
    }
}

TEST(PopulationTotals, Examples)
{
    EXPECT_EQ(population_totals(StateVector{}), (PopulationTotals{0, 0, 0}));
    const PopulationTotals t = population_totals(reference_initial_condition());
    EXPECT_EQ(t.n_h, 142040.0);
    EXPECT_EQ(t.n_f, 12520.0);
    EXPECT_EQ(t.n_d, 15025.0);

    for (std::size_t i = 0; i < 11; ++i) {
        StateVector y;
        y[i] = 1.0;
        const PopulationTotals u = population_totals(y);
        EXPECT_EQ(u.n_h + u.n_f + u.n_d, 1.0);
        EXPECT_EQ(u.n_h, i <= 3 ? 1.0 : 0.0);
        EXPECT_EQ(u.n_f, (i >= 4 && i <= 6) ? 1.0 : 0.0);
        EXPECT_EQ(u.n_d, (i >= 7 && i <= 10) ? 1.0 : 0.0);
    }
}

TEST(Params, DefaultsMatchReferenceValues)
{
    const Params p = default_params();
    EXPECT_EQ(p.tau3, 0.0003);
    EXPECT_EQ(p.beta2, 0.54);
    EXPECT_EQ(p.kappa3, 0.00001);
    EXPECT_EQ(p.theta1, 2000.0);
    EXPECT_EQ(p.mu2, 0.067);
    EXPECT_EQ(p.c, 0.003);
    EXPECT_NO_THROW(validate(p));
}

TEST(Params, ValidationRejectsBadValues)
{
    Params p = default_params();
    p.mu4 = 0.0;
    EXPECT_THROW(validate(p), DomainError);
    p = default_params();
    p.rho2 = -1.0;
    EXPECT_THROW(validate(p), DomainError);
    p = default_params();
    p.c = std::nan("");
    EXPECT_THROW(validate(p), DomainError);
}

TEST(Params, JsonRoundTripAndUnknownKeys)
{
    std::mt19937_64 rng(1);
    const Params p = oracle::random_params(rng);
    const auto doc = params_to_json(p);
    EXPECT_EQ(params_from_json(nlohmann::json::parse(doc.dump())), p);
    EXPECT_THROW(params_from_json(nlohmann::json{{"kapa1", 1.0}}), ConfigError);
    EXPECT_THROW(params_from_json(nlohmann::json{{"kappa1", "x"}}), ConfigError);
    const Params over = params_from_json(nlohmann::json{{"tau3", 0.01}});
    EXPECT_EQ(over.tau3, 0.01);
    EXPECT_EQ(over.tau1, default_params().tau1);
}
