#include "rabies/report.hpp"

namespace rabies {

namespace {

template <typename M>
nlohmann::json matrix_json(const M& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json complex_list(const std::vector<std::complex<double>>& values)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& z : values) {
        out.push_back({{"re", z.real()}, {"im", z.imag()}});
    }
    return out;
}

nlohmann::json r_entries_json(const REntries& r)
{
    nlohmann::json out;
    const auto values = r.as_array();
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[std::string(REntries::names[i])] = values[i];
    }
    return out;
}

} // namespace

std::string provenance_line(std::uint64_t seed, FMode mode)
{
    return std::string("rabies-dyn ") + kVersion + " seed=" + std::to_string(seed) +
           " mode=" + std::string(to_string(mode));
}

nlohmann::json to_json(const NgmDecomposition& ngm)
{
    return {
        {"mode", to_string(ngm.mode)},
        {"f_matrix", matrix_json(ngm.f_matrix)},
        {"v_matrix", matrix_json(ngm.v_matrix)},
        {"v_inverse", matrix_json(ngm.v_inverse)},
        {"ngm", matrix_json(ngm.ngm)},
        {"r_entries", r_entries_json(ngm.r_entries)},
        {"transcribed_entries", r_entries_json(ngm.transcribed_entries)},
        {"discrepancies", ngm.discrepancies},
        {"r0", ngm.r0},
    };
}

nlohmann::json to_json(const SensitivityReport& report)
{
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"parameter", e.name}, {"index", e.index}});
    }
    return {{"method", to_string(report.method)}, {"entries", entries}};
}

nlohmann::json to_json(const EquilibriumResult& eq)
{
    nlohmann::json state;
    for (std::size_t i = 0; i < kNumCompartments; ++i) {
        state[std::string(kCompartmentNames[i])] = eq.state[i];
    }
    return {{"kind", to_string(eq.kind)},
            {"state", state},
            {"residual_norm", eq.residual_norm},
            {"converged", eq.converged},
            {"iterations", eq.iterations}};
}

nlohmann::json to_json(const MetzlerResult& result)
{
    return {{"g0", matrix_json(result.g0)},
            {"g1", matrix_json(result.g1)},
            {"g2", matrix_json(result.g2)},
            {"g0_eigenvalues", result.g0_eigenvalues},
            {"g0_negative", result.g0_negative},
            {"g2_offdiag_nonnegative", result.g2_offdiag_nonnegative},
            {"verdict", result.verdict}};
}

nlohmann::json to_json(const StabilityReport& report)
{
    const auto& q = report.rh_coefficients;
    const auto& rh = report.routh_hurwitz;
    return {
        {"mode", to_string(report.mode)},
        {"jacobian_eigenvalues", complex_list(report.jacobian_eigenvalues)},
        {"max_real_part", report.max_real_part},
        {"rh_coefficients", {{"C1", q.c1}, {"C2", q.c2}, {"C3", q.c3}, {"C", q.c0}}},
        {"routh_hurwitz",
         {{"satisfied", rh.satisfied},
          {"all_coefficients_positive", rh.all_coefficients_positive},
          {"hurwitz_margin", rh.hurwitz_margin}}},
        {"quartic_roots", complex_list(report.quartic_roots)},
        {"quartic_roots_in_spectrum", report.quartic_roots_in_spectrum},
        {"rh_consistent", report.rh_consistent},
        {"metzler", to_json(report.metzler)},
        {"classification", to_string(report.classification)},
    };
}

nlohmann::json to_json(const FitResult& fit)
{
    nlohmann::json estimates;
    for (std::size_t k = 0; k < fit.free_names.size(); ++k) {
        nlohmann::json e{{"estimate", get_param(fit.estimate, fit.free_names[k])}};
        if (k < fit.ci_half_widths.size()) {
            e["ci_half_width"] = fit.ci_half_widths[k];
        }
        estimates[fit.free_names[k]] = e;
    }
    return {{"free_names", fit.free_names},
            {"estimates", estimates},
            {"sse", fit.sse},
            {"initial_sse", fit.initial_sse},
            {"iterations", fit.iterations},
            {"converged", fit.converged}};
}

} // namespace rabies
