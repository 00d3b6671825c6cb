#pragma once

// Run configuration: a single JSON document with a fixed key set and strict
// validation (unknown keys are errors, threshold violations name the
// offending key). Reproducibility of the inequality verdicts depends on
// exact input capture, so the manifest echoes the parsed document.

#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "collar/diagnostics.hpp"
#include "collar/matter.hpp"
#include "collar/spherical.hpp"
#include "collar/tolerances.hpp"

namespace collar {

using json = nlohmann::json;

enum class RunMode { spherical, umbilic, diagnose_only };

struct FamilySpec {
    std::string kind = "round";  // round | exp_perturbed
    double lambda = 1.0;
    std::vector<std::pair<std::string, double>> generators;
    std::string table_path;  // alternative generator source
};

struct PhiSpec {
    std::string kind = "constant";  // constant | horizon
    double value = 1.0;
};

struct DiagnoseDataSpec {
    std::string kind = "flat";  // flat | schwarzschild | schwarzschild_ads | hyperboloidal
    double mass = 1.0;
    double ptilde = 0.0;
    double ptilde_exponent = 2.0;
};

struct RunConfig {
    RunMode mode = RunMode::spherical;
    int n = 3;
    double Lambda = 0.0;
    double r0 = 1.0;
    double r_max = 100.0;
    int radial_nodes = 256;
    int n_theta = 16, n_phi = 32;
    BoundarySpec boundary;
    FamilySpec family;
    AngularAmplitude mu_amp, j0_amp, k_amp;
    double decay_b = 2.0, decay_c = 4.0;
    PhiSpec phi;
    DiagnoseDataSpec data;
    std::vector<FChoice> f_choices{{FChoiceKind::zero}};
    Tolerances tol;
    std::string out_dir = "out";
    int oracle_stride = 0;  // 0: auto

    json echo;  // the validated document, for the manifest
};

namespace config_detail {

inline void check_keys(const json& j, const std::string& where,
                       std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw std::invalid_argument("config: unknown key '" + where + key + "'");
    }
}

inline AngularAmplitude parse_amplitude(const json& j, const std::string& where) {
    if (j.is_number()) return AngularAmplitude(j.get<double>());
    check_keys(j, where + ".", {"constant", "harmonics"});
    AngularAmplitude amp(j.value("constant", 0.0));
    if (j.contains("harmonics")) {
        for (const auto& t : j.at("harmonics")) {
            check_keys(t, where + ".harmonics.", {"harmonic", "coeff"});
            const std::string name = t.at("harmonic").get<std::string>();
            eval_harmonic(name, 0.3, 0.3);  // validates the name
            amp.terms.emplace_back(name, t.at("coeff").get<double>());
        }
    }
    return amp;
}

}  // namespace config_detail

inline RunConfig parse_config(const json& doc) {
    using config_detail::check_keys;
    using config_detail::parse_amplitude;
    check_keys(doc, "", {"mode", "n", "Lambda", "r0", "r_max", "radial_nodes", "sphere",
                         "boundary", "family", "matter", "phi", "data", "f_choices",
                         "tolerances", "out_dir", "oracle_stride"});
    RunConfig c;
    const std::string mode = doc.value("mode", "spherical");
    if (mode == "spherical") {
        c.mode = RunMode::spherical;
    } else if (mode == "umbilic") {
        c.mode = RunMode::umbilic;
    } else if (mode == "diagnose") {
        c.mode = RunMode::diagnose_only;
    } else {
        throw std::invalid_argument("config: unknown mode '" + mode + "'");
    }
    c.n = doc.value("n", 3);
    if (c.n < 3) throw std::invalid_argument("config: n must be >= 3");
    c.Lambda = doc.value("Lambda", 0.0);
    if (c.Lambda > 0.0) throw std::invalid_argument("config: Lambda must be <= 0");
    c.r0 = doc.value("r0", 1.0);
    c.r_max = doc.value("r_max", 100.0);
    if (!(c.r0 > 0.0) || !(c.r0 < c.r_max))
        throw std::invalid_argument("config: need 0 < r0 < r_max");
    c.radial_nodes = doc.value("radial_nodes", 256);
    if (c.radial_nodes < 16) throw std::invalid_argument("config: radial_nodes too small");
    c.oracle_stride = doc.value("oracle_stride", 0);

    if (doc.contains("sphere")) {
        check_keys(doc.at("sphere"), "sphere.", {"n_theta", "n_phi"});
        c.n_theta = doc.at("sphere").value("n_theta", 16);
        c.n_phi = doc.at("sphere").value("n_phi", 32);
    }

    if (doc.contains("boundary")) {
        check_keys(doc.at("boundary"), "boundary.", {"mode", "value"});
        const std::string b = doc.at("boundary").value("mode", "minimal");
        if (b == "minimal") {
            c.boundary.mode = BoundaryMode::minimal;
        } else if (b == "generalized_horizon") {
            c.boundary.mode = BoundaryMode::generalized_horizon;
        } else if (b == "prescribed") {
            c.boundary.mode = BoundaryMode::prescribed;
            c.boundary.value = doc.at("boundary").value("value", 1.0);
            if (c.boundary.value < 0.0)
                throw std::invalid_argument("config: boundary.value must be >= 0");
        } else {
            throw std::invalid_argument("config: unknown boundary.mode '" + b + "'");
        }
    }

    if (doc.contains("family")) {
        check_keys(doc.at("family"), "family.", {"kind", "lambda", "generators", "table"});
        c.family.kind = doc.at("family").value("kind", "round");
        if (c.family.kind != "round" && c.family.kind != "exp_perturbed")
            throw std::invalid_argument("config: unknown family.kind '" + c.family.kind + "'");
        c.family.lambda = doc.at("family").value("lambda", 1.0);
        if (c.family.kind == "exp_perturbed" && !(c.family.lambda > 0.0))
            throw std::invalid_argument("config: family.lambda must be > 0");
        if (doc.at("family").contains("generators"))
            for (const auto& t : doc.at("family").at("generators")) {
                check_keys(t, "family.generators.", {"harmonic", "coeff"});
                c.family.generators.emplace_back(t.at("harmonic").get<std::string>(),
                                                 t.at("coeff").get<double>());
            }
        c.family.table_path = doc.at("family").value("table", "");
    }

    if (doc.contains("matter")) {
        check_keys(doc.at("matter"), "matter.", {"mu", "j0", "k", "decay_b", "decay_c"});
        const json& m = doc.at("matter");
        if (m.contains("mu")) c.mu_amp = parse_amplitude(m.at("mu"), "matter.mu");
        if (m.contains("j0")) c.j0_amp = parse_amplitude(m.at("j0"), "matter.j0");
        if (m.contains("k")) c.k_amp = parse_amplitude(m.at("k"), "matter.k");
        c.decay_b = m.value("decay_b", 2.0);
        c.decay_c = m.value("decay_c", 4.0);
        if (!(c.decay_b > 0.5 * c.n))
            throw std::invalid_argument("config: matter.decay_b must exceed n/2");
        if (!(c.decay_c > 0.5 * (c.n + 2)))
            throw std::invalid_argument("config: matter.decay_c must exceed (n+2)/2");
    }

    if (doc.contains("phi")) {
        check_keys(doc.at("phi"), "phi.", {"kind", "value"});
        c.phi.kind = doc.at("phi").value("kind", "constant");
        if (c.phi.kind != "constant" && c.phi.kind != "horizon")
            throw std::invalid_argument("config: unknown phi.kind '" + c.phi.kind + "'");
        c.phi.value = doc.at("phi").value("value", 1.0);
    }

    if (doc.contains("data")) {
        check_keys(doc.at("data"), "data.", {"kind", "mass", "ptilde", "ptilde_exponent"});
        c.data.kind = doc.at("data").value("kind", "flat");
        if (c.data.kind != "flat" && c.data.kind != "schwarzschild" &&
            c.data.kind != "schwarzschild_ads" && c.data.kind != "hyperboloidal")
            throw std::invalid_argument("config: unknown data.kind '" + c.data.kind + "'");
        c.data.mass = doc.at("data").value("mass", 1.0);
        c.data.ptilde = doc.at("data").value("ptilde", 0.0);
        c.data.ptilde_exponent = doc.at("data").value("ptilde_exponent", 2.0);
    }

    if (doc.contains("f_choices")) {
        c.f_choices.clear();
        for (const auto& t : doc.at("f_choices")) {
            if (t.is_string()) {
                const std::string s = t.get<std::string>();
                if (s == "zero") {
                    c.f_choices.push_back({FChoiceKind::zero});
                } else if (s == "angular_ratio") {
                    c.f_choices.push_back({FChoiceKind::angular_ratio});
                } else {
                    throw std::invalid_argument("config: unknown f_choice '" + s + "'");
                }
            } else {
                check_keys(t, "f_choices.", {"eps_full"});
                const double eps = t.at("eps_full").get<double>();
                if (!(eps > 0.0 && eps <= 1.0))
                    throw std::invalid_argument("config: f_choices.eps_full must lie in (0,1]");
                c.f_choices.push_back({FChoiceKind::eps_full, eps});
            }
        }
    }

    if (doc.contains("tolerances")) {
        check_keys(doc.at("tolerances"), "tolerances.",
                   {"quad_rel", "ode_residual", "monotonicity", "penrose", "refined", "dec",
                    "horizon", "rigidity_gap", "step_rtol", "step_cap", "barrier_slop",
                    "compat", "volume_preservation"});
        const json& t = doc.at("tolerances");
        c.tol.quad_rel = t.value("quad_rel", c.tol.quad_rel);
        c.tol.ode_residual = t.value("ode_residual", c.tol.ode_residual);
        c.tol.monotonicity = t.value("monotonicity", c.tol.monotonicity);
        c.tol.penrose = t.value("penrose", c.tol.penrose);
        c.tol.refined = t.value("refined", c.tol.refined);
        c.tol.dec = t.value("dec", c.tol.dec);
        c.tol.horizon = t.value("horizon", c.tol.horizon);
        c.tol.rigidity_gap = t.value("rigidity_gap", c.tol.rigidity_gap);
        c.tol.step_rtol = t.value("step_rtol", c.tol.step_rtol);
        c.tol.step_cap = t.value("step_cap", c.tol.step_cap);
        c.tol.barrier_slop = t.value("barrier_slop", c.tol.barrier_slop);
        c.tol.compat = t.value("compat", c.tol.compat);
        c.tol.volume_preservation = t.value("volume_preservation", c.tol.volume_preservation);
    }

    c.out_dir = doc.value("out_dir", "out");
    c.echo = doc;
    return c;
}

inline RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: malformed document: ") + e.what());
    }
    return parse_config(doc);
}

// dotted-path override, value parsed as JSON with string fallback
inline void apply_override(json& doc, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override: expected KEY=VALUE, got '" + spec + "'");
    const std::string path = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);
    json* node = &doc;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot - pos);
        if (key.empty()) throw std::invalid_argument("override: empty key in '" + spec + "'");
        if (dot == std::string::npos) {
            json v;
            try {
                v = json::parse(value);
            } catch (const json::parse_error&) {
                v = value;
            }
            (*node)[key] = v;
            return;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

}  // namespace collar
