#pragma once

// File emission: CSV writers with a fixed column order and deterministic
// double formatting, plus JSON serialization of the diagnostics report.
// Repeated runs of the same configuration must produce byte-identical
// files, so nothing time- or environment-dependent is written.

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "collar/diagnostics.hpp"

namespace collar {

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
        width_ = columns.size();
    }
    void row(const std::vector<double>& values) {
        if (values.size() != width_) throw std::logic_error("CsvWriter: column count mismatch");
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << format_double(values[i]);
        out_ << "\n";
    }

  private:
    std::ofstream out_;
    std::size_t width_;
};

inline nlohmann::json to_json(const Verdict& v) {
    return {{"state", v.str()}, {"value", v.value}};
}

inline nlohmann::json to_json(const Tolerances& t) {
    return {{"quad_rel", t.quad_rel},
            {"ode_residual", t.ode_residual},
            {"monotonicity", t.monotonicity},
            {"penrose", t.penrose},
            {"refined", t.refined},
            {"dec", t.dec},
            {"horizon", t.horizon},
            {"rigidity_gap", t.rigidity_gap},
            {"step_rtol", t.step_rtol},
            {"step_cap", t.step_cap},
            {"barrier_slop", t.barrier_slop},
            {"compat", t.compat},
            {"volume_preservation", t.volume_preservation}};
}

inline nlohmann::json to_json(const DiagnosticsReport& rep) {
    nlohmann::json j;
    j["schema"] = kReportSchemaVersion;
    j["conventions"] = {{"nu_orientation", rep.nu_orientation}};
    j["n"] = rep.n;
    j["Lambda"] = rep.Lambda;
    j["hyperboloidal"] = rep.hyperboloidal;
    j["boundary_mode"] = rep.boundary_mode;
    j["energy_method"] = rep.energy_method;
    j["E_ADM"] = rep.E_ADM;
    j["E_tail_bound"] = rep.E_tail_bound;
    j["P"] = {rep.P[0], rep.P[1], rep.P[2]};
    j["P_converged"] = rep.P_converged;
    j["area_r0"] = rep.area_r0;
    j["penrose_gap"] = rep.penrose_gap;
    j["f_integral"] = rep.f_integral;
    j["refined_gap"] = rep.refined_gap;
    j["horizon_radii"] = rep.horizon_radii;
    j["conjecture1_lhs"] = rep.conjecture1_lhs;
    j["conjecture1_rhs"] = rep.conjecture1_rhs;
    j["verdicts"] = {{"dec", to_json(rep.dec_verdict)},
                     {"untrapped", to_json(rep.untrapped_verdict)},
                     {"monotonicity", to_json(rep.monotonicity)},
                     {"penrose", to_json(rep.penrose)}};
    for (const auto& [name, v] : rep.refined) j["verdicts"]["refined"][name] = to_json(v);
    for (const auto& [name, v] : rep.modified_mass_monotone)
        j["verdicts"]["modified_mass_monotone"][name] = to_json(v);
    j["rigidity"] = {{"evaluated", rep.rigidity.evaluated},
                     {"sigma_round", rep.rigidity.sigma_round},
                     {"N_angular_constant", rep.rigidity.N_angular_constant},
                     {"J0_small", rep.rigidity.J0_small},
                     {"sigma_deviation", rep.rigidity.sigma_deviation},
                     {"N_spread", rep.rigidity.N_spread},
                     {"J0_sup", rep.rigidity.J0_sup}};
    j["decay"] = {{"a_N", rep.decay.a_N},         {"a_drN", rep.decay.a_drN},
                  {"a_dIN", rep.decay.a_dIN},     {"b_p", rep.decay.b_p},
                  {"b_k", rep.decay.b_k},         {"b_dIp", rep.decay.b_dIp},
                  {"b_dIk", rep.decay.b_dIk},     {"tau_rate", rep.decay.tau_rate},
                  {"pass", rep.decay.pass}};
    if (rep.residuals.present)
        j["residuals"] = {{"mu_max", rep.residuals.mu_max},
                          {"mu_l2", rep.residuals.mu_l2},
                          {"j_max", rep.residuals.j_max},
                          {"j_l2", rep.residuals.j_l2},
                          {"convergence_order", rep.residuals.convergence_order},
                          {"block_formula_gap", rep.residuals.block_formula_gap}};
    j["tolerances"] = to_json(rep.tol);
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
}

inline void write_diagnostics_csv(const std::string& path, const DiagnosticsReport& rep) {
    std::vector<std::string> cols = {"r",
                                     "m_H",
                                     "m_H_AH",
                                     "theta_plus_min",
                                     "theta_plus_max",
                                     "theta_minus_min",
                                     "theta_minus_max",
                                     "untrapped",
                                     "dec_margin_min"};
    for (const auto& [name, _] : rep.per_radius.front().M_f) cols.push_back("M_f:" + name);
    CsvWriter csv(path, cols);
    for (const auto& row : rep.per_radius) {
        std::vector<double> vals = {row.r,
                                    row.m_H,
                                    row.m_H_AH,
                                    row.theta_plus_min,
                                    row.theta_plus_max,
                                    row.theta_minus_min,
                                    row.theta_minus_max,
                                    row.untrapped ? 1.0 : 0.0,
                                    row.dec_margin_min};
        for (const auto& [_, v] : row.M_f) vals.push_back(v);
        csv.row(vals);
    }
}

}  // namespace collar
