// Acceptance run: one PASS/FAIL line per criterion, plus indented detail lines.
//
// Exit status is 0 when every criterion ran to a verdict, whatever the verdicts
// are; pass --strict to make any FAIL a non-zero exit as well.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rabies/equilibria.hpp"
#include "rabies/errors.hpp"
#include "rabies/estimation.hpp"
#include "rabies/forcing.hpp"
#include "rabies/integrator.hpp"
#include "rabies/ngm.hpp"

using namespace rabies;

namespace {

struct Outcome {
    bool pass = false;
    std::string summary;
    std::vector<std::string> details;
};

std::string fmt(const char* pattern, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

std::vector<double> grid(double t0, double t1, double step)
{
    std::vector<double> t;
    const auto n = static_cast<long>(std::llround((t1 - t0) / step));
    for (long k = 0; k <= n; ++k) {
        t.push_back(t0 + step * static_cast<double>(k));
    }
    return t;
}

double max_norm(const StateVector& y)
{
    return y.max_abs();
}

// --- 1 ---------------------------------------------------------------------

Outcome dfe_fixed_point()
{
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int k = 0; k <= 100; ++k) {
        const Params p = k == 0 ? default_params() : oracle::random_params(rng, 5.0);
        const StateVector dfe = disease_free_equilibrium(p).state;
        worst = std::max(worst, max_norm(rhs(0.0, dfe, p)) / max_norm(dfe));
    }
    return {worst < 1e-12, fmt("DFE is a fixed point (worst |rhs|/|DFE| %.2e over 101 draws)", worst),
            {}};
}

// --- 2 ---------------------------------------------------------------------

Outcome r0_cross_validation()
{
    std::mt19937_64 rng(102);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Params p = oracle::random_params(rng, 5.0);
        worst = std::max(worst, rel(r0_closed_form(p), next_generation_matrix(p).r0));
    }
    const double r0 = next_generation_matrix(default_params()).r0;
    const double target_err = rel(r0, oracle::kDefaultR0PaperLiteral);
    Outcome out;
    out.pass = worst < 1e-10 && target_err < 1e-10;
    out.summary = fmt("closed form vs spectral radius (worst rel %.2e over 100 draws)", worst);
    out.details.push_back(fmt("default R0 %.15g, frozen oracle %.15g, rel %.1e", r0,
                              oracle::kDefaultR0PaperLiteral, target_err));
    out.details.push_back(fmt("corrected-mode R0 at defaults %.15g (environment column included)",
                              next_generation_matrix(default_params(), FMode::Corrected).r0));
    return out;
}

// --- 3 ---------------------------------------------------------------------

Outcome sensitivity_signs()
{
    const Params p = default_params();
    const SensitivityReport analytic = sensitivity_table(p);
    const SensitivityReport fd = sensitivity_table(p, SensitivityMethod::CentralDifference);
    Outcome out;
    int matches = 0;
    double worst_gap = 0.0;
    std::string mismatched;
    for (const auto& ref : kReferenceSensitivity) {
        const double a = analytic.at(ref.name);
        const double f = fd.at(ref.name);
        const bool same_sign = (a > 0) == (ref.value > 0) && a != 0.0;
        matches += same_sign;
        worst_gap = std::max(worst_gap, std::abs(a - f));
        if (!same_sign) {
            mismatched += (mismatched.empty() ? "" : ", ") + std::string(ref.name);
        }
        out.details.push_back(fmt("%-7s analytic %+.6f  fd %+.6f  reference %+.6f  %s",
                                  std::string(ref.name).c_str(), a, f, ref.value,
                                  same_sign ? "sign ok" : "SIGN DIFFERS"));
    }
    // The closed form as printed, with its transcription slips, for comparison.
    auto printed_index = [&p](const char* name) {
        const double v = get_param(p, name);
        Params up = p;
        Params down = p;
        set_param(up, name, v * (1 + 1e-6));
        set_param(down, name, v * (1 - 1e-6));
        return (r0_closed_form_transcribed(up) - r0_closed_form_transcribed(down)) / (2e-6) /
               r0_closed_form_transcribed(p);
    };
    out.details.push_back(fmt("info: closed form as printed gives gamma1 %+.6f but kappa2 %+.6f",
                              printed_index("gamma1"), printed_index("kappa2")));

    out.pass = matches == 14 && worst_gap < 1e-3;
    out.summary = fmt("sensitivity signs %d/14 match the reference table, analytic vs FD max gap %.1e",
                      matches, worst_gap);
    if (!mismatched.empty()) {
        out.summary += "; differing: " + mismatched;
    }
    return out;
}

// --- 4 ---------------------------------------------------------------------

Outcome positivity_and_bounds()
{
    const Params p = default_params();
    const StateVector y0 = reference_initial_condition();
    IntegratorConfig cfg;
    cfg.rtol = 1e-8;
    cfg.atol = 1e-8;
    const Trajectory traj = integrate_adaptive(make_rhs(p), y0, 0.0, 100.0, cfg);

    std::array<double, 12> scale{};
    for (const auto& y : traj.states) {
        for (std::size_t i = 0; i < 12; ++i) {
            scale[i] = std::max(scale[i], std::abs(y[i]));
        }
    }
    double worst_negative = 0.0; // most negative y_i / scale_i
    for (const auto& y : traj.states) {
        for (std::size_t i = 0; i < 12; ++i) {
            if (scale[i] > 0.0) {
                worst_negative = std::min(worst_negative, y[i] / scale[i]);
            }
        }
    }
    const InvariantBounds b = invariant_bounds(p);
    const PopulationTotals n0 = population_totals(y0);
    const double cap_h = std::max(n0.n_h, b.n_h_max) * (1 + 1e-6);
    const double cap_f = std::max(n0.n_f, b.n_f_max) * (1 + 1e-6);
    const double cap_d = std::max(n0.n_d, b.n_d_max) * (1 + 1e-6);
    const double cap_m = b.m_max * (1 + 1e-6);
    double h = 0, f = 0, d = 0, m = 0;
    for (const auto& y : traj.states) {
        const PopulationTotals n = population_totals(y);
        h = std::max(h, n.n_h);
        f = std::max(f, n.n_f);
        d = std::max(d, n.n_d);
        m = std::max(m, y.m());
    }
    Outcome out;
    out.pass = worst_negative >= -1e-9 && h <= cap_h && f <= cap_f && d <= cap_d && m <= cap_m;
    out.summary = fmt("positivity and boundedness over %zu steps on [0, 100]", traj.size());
    out.details.push_back(fmt("min y_i/scale_i %.2e (limit -1e-9)", worst_negative));
    out.details.push_back(fmt("max N_H %.6g <= %.6g, N_F %.6g <= %.6g, N_D %.6g <= %.6g", h, cap_h,
                              f, cap_f, d, cap_d));
    out.details.push_back(fmt("max M %.6g <= %.6g", m, cap_m));
    return out;
}

// --- 5 ---------------------------------------------------------------------

Outcome integrator_order()
{
    auto decay = [](double, const StateVector& y) {
        StateVector dy;
        for (std::size_t i = 0; i < 12; ++i) {
            dy[i] = -y[i];
        }
        return dy;
    };
    StateVector y0;
    y0[0] = 1.0;
    std::vector<double> errors;
    for (long n : {10L, 20L, 40L, 80L}) {
        errors.push_back(std::abs(integrate_fixed(decay, y0, 0.0, 1.0, n)[0] - std::exp(-1.0)));
    }
    Outcome out;
    out.pass = true;
    std::string ratios;
    for (std::size_t k = 1; k < errors.size(); ++k) {
        const double r = errors[k - 1] / errors[k];
        out.pass = out.pass && r >= std::pow(2.0, 4.5) && r <= std::pow(2.0, 5.5);
        ratios += fmt("%s%.3f", k == 1 ? "" : ", ", r);
    }
    out.summary = "fixed-step error ratios under halving h: " + ratios + " (window [22.6, 45.3])";
    return out;
}

// --- 6 ---------------------------------------------------------------------

StateVector seeded_dfe(const Params& p)
{
    StateVector y = disease_free_equilibrium(p).state;
    for (Compartment c : kInfectedCompartments) {
        y[c] += 1e-3;
    }
    return y;
}

// Scale factor s with R0(s * contact rates) = target, by bisection on [0, hi].
double bisect_scale(const std::function<double(double)>& r0_of_scale, double target)
{
    double lo = 0.0;
    double hi = 1.0;
    while (r0_of_scale(hi) < target) {
        hi *= 2.0;
    }
    for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        (r0_of_scale(mid) < target ? lo : hi) = mid;
    }
    return lo;
}

double relative_distance_to_dfe(const Params& p, double horizon)
{
    const StateVector dfe = disease_free_equilibrium(p).state;
    const StateVector y = integrate_adaptive(make_rhs(p), seeded_dfe(p), 0.0, horizon).back();
    double d = 0.0;
    for (std::size_t i = 0; i < 12; ++i) {
        d = std::max(d, std::abs(y[i] - dfe[i]));
    }
    return d / max_norm(dfe);
}

Outcome threshold_behavior()
{
    constexpr double kTarget = 0.9;
    const Params base = default_params();
    Outcome out;

    const double s = bisect_scale(
        [&](double x) { return r0_closed_form(scale_contact_rates(base, x)); }, kTarget);
    const Params below = scale_contact_rates(base, s);
    const double dist = relative_distance_to_dfe(below, 500.0);
    const bool returns = dist < 1e-6;
    out.details.push_back(fmt("closed-form bisection: scale %.6g gives R0 %.6g; environment-inclusive R0 there %.6g",
                              s, r0_closed_form(below),
                              next_generation_matrix(below, FMode::Corrected).r0));
    out.details.push_back(fmt("  distance to DFE at t=500 %.3e (limit 1e-6): %s", dist,
                              returns ? "returns" : "does not return"));

    const Params& above = base;
    const StateVector y500 = integrate_adaptive(make_rhs(above), seeded_dfe(above), 0.0, 500.0).back();
    double infected_max = 0.0;
    for (Compartment c : kInfectedCompartments) {
        infected_max = std::max(infected_max, y500[c]);
    }
    const bool grows = infected_max > 1e-3;
    bool endemic_ok = false;
    try {
        const EquilibriumResult eq = find_endemic_equilibrium(above, y500);
        bool positive = true;
        for (Compartment c : kInfectedCompartments) {
            positive = positive && eq.state[c] > 0.0;
        }
        endemic_ok = eq.converged && eq.residual_norm < 1e-8 && positive;
        out.details.push_back(fmt("defaults (R0 %.6g): perturbation grows to %.4g; Newton residual %.2e, infected all positive: %s",
                                  r0_closed_form(above), infected_max, eq.residual_norm,
                                  positive ? "yes" : "no"));
    } catch (const Error& e) {
        out.details.push_back(std::string("defaults: endemic polish failed: ") + e.what());
    }

    // Same check with the threshold located on the environment-inclusive R0.
    const double sc = bisect_scale(
        [&](double x) { return next_generation_matrix(scale_contact_rates(base, x), FMode::Corrected).r0; },
        kTarget);
    const double dist_c = relative_distance_to_dfe(scale_contact_rates(base, sc), 500.0);
    out.details.push_back(fmt("info: bisection on the environment-inclusive R0 gives scale %.6g; distance to DFE at t=500 %.3e",
                              sc, dist_c));

    out.pass = returns && grows && endemic_ok;
    out.summary = fmt("threshold: R0<1 branch %s, R0>1 branch %s", returns ? "ok" : "FAILS",
                      grows && endemic_ok ? "ok" : "FAILS");
    return out;
}

// --- 7 ---------------------------------------------------------------------

Outcome stability_consistency()
{
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> exponent(-2.5, 0.5);
    int agree = 0;
    int below = 0;
    int quartic_ok = 0;
    const int draws = 50;
    for (int k = 0; k < draws; ++k) {
        const Params p =
            scale_contact_rates(oracle::random_params(rng), std::pow(10.0, exponent(rng)));
        const double r0 = next_generation_matrix(p).r0;
        const StabilityReport r = local_dfe_stability(p);
        agree += (r.classification == Classification::LocallyStable) == (r0 < 1.0);
        below += r0 < 1.0;
        quartic_ok += r.quartic_roots_in_spectrum;
    }
    Outcome out;
    out.pass = agree == draws && quartic_ok == draws && below > 0 && below < draws;
    out.summary = fmt("DFE verdict matches R0<1 in %d/%d draws (%d below threshold); quartic roots in spectrum %d/%d",
                      agree, draws, below, quartic_ok, draws);
    return out;
}

// --- 8 ---------------------------------------------------------------------

Outcome metzler()
{
    const MetzlerResult good = metzler_global_check(default_params());
    Params bad = default_params();
    bad.nu1 = -0.001;
    const MetzlerResult broken = metzler_global_check(bad);
    Outcome out;
    out.pass = good.g0_negative && good.g2_offdiag_nonnegative && good.verdict && !broken.verdict;
    out.summary = fmt("Metzler check: defaults G0 %s, G2 %s; nu1<0 verdict %s",
                      good.g0_negative ? "stable" : "NOT stable",
                      good.g2_offdiag_nonnegative ? "Metzler" : "NOT Metzler",
                      broken.verdict ? "TRUE" : "FALSE");
    std::string eigs;
    for (double e : good.g0_eigenvalues) {
        eigs += fmt(" %.6g", e);
    }
    out.details.push_back("G0 eigenvalues:" + eigs);
    return out;
}

// --- 9 ---------------------------------------------------------------------

Outcome estimation_round_trip()
{
    const Params truth = default_params();
    const StateVector y0 = reference_initial_condition();
    const std::vector<std::string> free = {"tau1", "kappa1", "psi1"};
    const std::vector<double> times = grid(0.0, 100.0, 1.0);
    Params init = truth;
    for (const auto& n : free) {
        set_param(init, n, 1.5 * get_param(truth, n));
    }

    Outcome out;
    const auto clean = generate_synthetic(truth, y0, times, 0.0, 0);
    const FitResult r = fit(clean, init, free, y0);
    double worst = 0.0;
    for (const auto& n : free) {
        worst = std::max(worst, rel(get_param(r.estimate, n), get_param(truth, n)));
    }
    const bool recovered = worst < 0.01;
    out.details.push_back(fmt("zero noise: worst relative error %.2e (limit 1e-2)", worst));

    std::vector<int> covered(free.size(), 0);
    int joint = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto noisy = generate_synthetic(truth, y0, times, 0.05, seed);
        const FitResult f = fit(noisy, init, free, y0);
        const auto ci = confidence_intervals(f, noisy, y0);
        bool all = true;
        for (std::size_t i = 0; i < free.size(); ++i) {
            const bool in = std::abs(get_param(f.estimate, free[i]) - get_param(truth, free[i])) <= ci[i];
            covered[i] += in;
            all = all && in;
        }
        joint += all;
    }
    bool coverage = true;
    std::string counts;
    for (std::size_t i = 0; i < free.size(); ++i) {
        coverage = coverage && covered[i] >= 18;
        counts += fmt("%s%s %d/20", i ? ", " : "", free[i].c_str(), covered[i]);
    }
    out.details.push_back("noise 0.05, per-parameter 95% coverage: " + counts);
    out.details.push_back(fmt("info: all three covered at once in %d/20 seeds", joint));
    out.pass = recovered && coverage;
    out.summary = fmt("estimation round trip: recovery %s, coverage %s", recovered ? "ok" : "FAILS",
                      coverage ? "ok" : "FAILS");
    return out;
}

// --- 10 --------------------------------------------------------------------

double peak_exposed(double amplitude)
{
    const auto times = grid(0.0, 20.0, 0.01);
    const Trajectory traj = integrate_at(forced_rhs(default_params(), ForcingConfig::all_rates(amplitude)),
                                         reference_initial_condition(), times);
    double peak = 0.0;
    for (const auto& y : traj.states) {
        peak = std::max(peak, y.e_h());
    }
    return peak;
}

Outcome forcing()
{
    Outcome out;
    const Params p = default_params();
    IntegratorConfig cfg;
    cfg.rtol = 1e-8;
    cfg.atol = 1e-8;
    const auto times = grid(0.0, 100.0, 1.0);
    const Trajectory a = integrate_at(make_rhs(p), reference_initial_condition(), times, cfg);
    const Trajectory b = integrate_at(forced_rhs(p, ForcingConfig::all_rates(0.0)),
                                      reference_initial_condition(), times, cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        double d = 0.0;
        for (std::size_t i = 0; i < 12; ++i) {
            d = std::max(d, std::abs(a.states[k][i] - b.states[k][i]));
        }
        worst = std::max(worst, d / (cfg.rtol * max_norm(a.states[k])));
    }
    const bool unforced = worst <= 10.0;
    out.details.push_back(fmt("A=0 vs unforced: worst deviation %.2g x rtol x scale (limit 10)", worst));

    bool periodic = true;
    const ForcingConfig fc = ForcingConfig::all_rates(0.5);
    for (int k = -640; k <= 6400; ++k) {
        const double t = k / 64.0;
        periodic = periodic && modulation_factor(fc, t) == modulation_factor(fc, t + fc.period);
    }
    out.details.push_back(std::string("modulation factor bit-identical at t and t+T on a 1/64-year grid: ") +
                          (periodic ? "yes" : "no"));

    const double p0 = peak_exposed(0.0);
    const double p1 = peak_exposed(0.25);
    const double p2 = peak_exposed(0.5);
    const bool monotone = p0 <= p1 && p1 <= p2;
    out.details.push_back(fmt("peak E_H on [0, 20] (T=10, phase 0, all rates): A=0 %.6g, A=0.25 %.6g, A=0.5 %.6g",
                              p0, p1, p2));

    out.pass = unforced && periodic && monotone;
    out.summary = fmt("forcing: A=0 equivalence %s, periodicity %s, peak monotone in A %s",
                      unforced ? "ok" : "FAILS", periodic ? "ok" : "FAILS", monotone ? "ok" : "FAILS");
    return out;
}

struct Criterion {
    int number;
    double time_limit;
    Outcome (*run)();
};

} // namespace

int main(int argc, char** argv)
{
    const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
    const Criterion criteria[] = {
        {1, 1.0, dfe_fixed_point},        {2, 1.0, r0_cross_validation},
        {3, 1.0, sensitivity_signs},      {4, 5.0, positivity_and_bounds},
        {5, 1.0, integrator_order},       {6, 10.0, threshold_behavior},
        {7, 5.0, stability_consistency},  {8, 1.0, metzler},
        {9, 120.0, estimation_round_trip}, {10, 30.0, forcing},
    };
    int passed = 0;
    bool crashed = false;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.summary = std::string("raised: ") + e.what();
            crashed = true;
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds < c.time_limit;
        const bool ok = o.pass && in_time;
        passed += ok;
        std::printf("criterion %2d %s  %s [%.2f s, limit %.0f s%s]\n", c.number, ok ? "PASS" : "FAIL",
                    o.summary.c_str(), seconds, c.time_limit, in_time ? "" : ", OVER");
        for (const auto& line : o.details) {
            std::printf("    %s\n", line.c_str());
        }
        std::fflush(stdout);
    }
    std::printf("%d/10 criteria pass\n", passed);
    if (crashed) {
        return 2;
    }
    return strict && passed != 10 ? 1 : 0;
}
