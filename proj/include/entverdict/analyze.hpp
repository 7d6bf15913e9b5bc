// analyze.hpp -- the full verdict pipeline: reconstruct (for counts input),
// fit the X family, run the Peres test and the closed-form condition, attempt
// the separable decomposition, and cross-check that the answers agree.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entverdict/entanglement.hpp"
#include "entverdict/errors.hpp"
#include "entverdict/io.hpp"
#include "entverdict/states.hpp"
#include "entverdict/tomography.hpp"

namespace entverdict {

// Two independent entanglement tests disagreed outside the tolerance band.
// This indicates a defect, never a property of the input.
class InternalInconsistency : public Error {
public:
    using Error::Error;
};

struct AnalyzeOptions {
    double noise_floor = 0.01;
    double boundary_tol = default_boundary_tol;
    std::vector<MeasurementSetting> required_settings = standard_settings_16();
    // Test hook: negates the closed-form margin so the cross-check must trip.
    bool inject_inconsistency = false;
};

struct XFitReport {
    XStateParams params;
    double residual = 0.0;
    bool accepted = false;

    bool operator==(const XFitReport&) const = default;
};

struct DecompositionReport {
    SeparableDecomposition decomposition;
    bool verified = false;
    double max_error = 0.0;
};

struct VerdictReport {
    std::string input_id;
    Verdict verdict = Verdict::Separable;
    double min_ppt_eigenvalue = 0.0;
    double negativity = 0.0;
    std::optional<double> concurrence;
    XFitReport x_fit;
    double condition_margin = 0.0;
    std::optional<DecompositionReport> decomposition;
    std::vector<std::string> flags;
};

inline VerdictReport analyze(const InputDocument& input, const AnalyzeOptions& options = {}) {
    if (options.noise_floor < 0.0) throw InvalidArgument("analyze: negative noise floor");
    if (options.boundary_tol < 0.0) throw InvalidArgument("analyze: negative boundary tolerance");

    VerdictReport report;
    auto id_it = input.metadata.find("input_id");
    report.input_id = id_it != input.metadata.end() ? id_it->second : "input";

    const DensityMatrix rho =
        input.kind() == InputDocument::Kind::Matrix
            ? validate_density(input.matrix(), default_density_tol)
            : project_to_physical(linear_reconstruct(input.counts(), options.required_settings));

    const XFit fit = fit_x_state_raw(rho);
    const bool accepted = fit.residual <= options.noise_floor;
    report.x_fit = {fit.params, fit.residual, accepted};

    const PptReport ppt = ppt_verdict(rho, options.boundary_tol);
    report.verdict = ppt.verdict;
    report.min_ppt_eigenvalue = ppt.min_eigenvalue;
    report.negativity = ppt.negativity;

    // The closed-form margin for the fitted family; computed without full
    // param validation because fits of borderline-PSD inputs may sit a hair
    // outside the corner invariant.
    double margin = fit.params.gamma - std::sqrt(std::max(0.0, fit.params.beta) *
                                                 std::max(0.0, fit.params.beta_prime));
    if (options.inject_inconsistency) margin = -margin;
    report.condition_margin = margin;
    if (accepted) report.concurrence = 2.0 * std::max(0.0, margin);

    if (std::abs(report.min_ppt_eigenvalue) <= options.boundary_tol)
        report.flags.push_back("boundary");
    if (!accepted) report.flags.push_back("fit-rejected");
    const double beta_asym = std::abs(fit.params.beta - fit.params.beta_prime);
    const double alpha_asym = std::abs(fit.params.alpha - fit.params.alpha_prime);
    if (accepted && beta_asym > 1e-9) report.flags.push_back("asymmetric-beta");
    if (accepted && alpha_asym > 1e-9) report.flags.push_back("asymmetric-alpha");

    // Eq.-style decomposition only applies to accepted, symmetric,
    // condition-separable fits.
    std::string absence_reason;
    if (!accepted) {
        absence_reason = "fit-rejected";
    } else if (margin > 0.0) {
        absence_reason = "weight-beta-minus-gamma-negative";
    } else if (beta_asym > 1e-9) {
        absence_reason = "asymmetric-beta";
    } else if (alpha_asym > 1e-9) {
        absence_reason = "asymmetric-alpha";
    } else {
        try {
            SeparableDecomposition d = separable_decomposition(fit.params);
            const DensityMatrix family = x_state_to_density(fit.params);
            const VerifyResult v = verify_decomposition(d, family, 1e-12);
            report.decomposition = DecompositionReport{std::move(d), v.ok, v.max_error};
        } catch (const NotSeparable& e) {
            absence_reason = e.weight_name == std::string("alpha - gamma")
                                 ? "weight-alpha-minus-gamma-negative"
                                 : "weight-beta-minus-gamma-negative";
        } catch (const Error&) {
            absence_reason = "invalid-fit-params";
        }
    }
    if (!report.decomposition) report.flags.push_back("no-decomposition:" + absence_reason);

    // Cross-checks: the Peres verdict, the closed-form condition, and
    // decomposition existence must tell one story away from the boundary.
    if (accepted && std::abs(margin) > options.boundary_tol &&
        std::abs(report.min_ppt_eigenvalue) >
            options.boundary_tol + 4.0 * report.x_fit.residual) {
        const bool condition_entangled = margin > 0.0;
        const bool ppt_entangled = report.verdict == Verdict::Entangled;
        if (condition_entangled != ppt_entangled) {
            std::ostringstream os;
            os << "internal inconsistency on " << report.input_id << ": PPT says "
               << to_string(report.verdict) << " (min eigenvalue " << report.min_ppt_eigenvalue
               << ") but the closed-form margin is " << margin;
            throw InternalInconsistency(os.str());
        }
    }
    if (report.decomposition && report.verdict == Verdict::Entangled) {
        std::ostringstream os;
        os << "internal inconsistency on " << report.input_id
           << ": a separable decomposition was built for a PPT-entangled state";
        throw InternalInconsistency(os.str());
    }

    return report;
}

// --- report serialization -------------------------------------------------

inline nlohmann::json report_to_json_value(const VerdictReport& r) {
    nlohmann::json j;
    j["input_id"] = r.input_id;
    j["verdict"] = to_string(r.verdict);
    j["min_ppt_eigenvalue"] = r.min_ppt_eigenvalue;
    j["negativity"] = r.negativity;
    j["concurrence"] = r.concurrence ? nlohmann::json(*r.concurrence) : nlohmann::json(nullptr);
    j["x_fit"] = {{"alpha", r.x_fit.params.alpha},
                  {"beta", r.x_fit.params.beta},
                  {"beta_prime", r.x_fit.params.beta_prime},
                  {"gamma", r.x_fit.params.gamma},
                  {"alpha_prime", r.x_fit.params.alpha_prime},
                  {"residual", r.x_fit.residual},
                  {"accepted", r.x_fit.accepted}};
    j["condition_margin"] = r.condition_margin;
    if (r.decomposition) {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& t : r.decomposition->decomposition.terms)
            terms.push_back({{"weight", t.weight},
                             {"n_a", {t.n_a.nx, t.n_a.ny, t.n_a.nz}},
                             {"n_b", {t.n_b.nx, t.n_b.ny, t.n_b.nz}}});
        j["decomposition"] = {{"terms", terms},
                              {"verified", r.decomposition->verified},
                              {"max_error", r.decomposition->max_error}};
    } else {
        j["decomposition"] = nullptr;
    }
    j["flags"] = r.flags;
    return j;
}

inline std::string report_to_json(const VerdictReport& r, bool pretty = false) {
    const nlohmann::json j = report_to_json_value(r);
    return pretty ? j.dump(2) : j.dump();
}

inline VerdictReport report_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report JSON does not parse: ") + e.what(),
                         "malformed-json");
    }
    try {
        VerdictReport r;
        r.input_id = j.at("input_id").get<std::string>();
        const std::string verdict = j.at("verdict").get<std::string>();
        if (verdict != "entangled" && verdict != "separable")
            throw ParseError("verdict must be entangled or separable", "wrong-shape");
        r.verdict = verdict == "entangled" ? Verdict::Entangled : Verdict::Separable;
        r.min_ppt_eigenvalue = j.at("min_ppt_eigenvalue").get<double>();
        r.negativity = j.at("negativity").get<double>();
        if (!j.at("concurrence").is_null()) r.concurrence = j.at("concurrence").get<double>();
        const auto& xf = j.at("x_fit");
        r.x_fit.params = {xf.at("alpha").get<double>(), xf.at("beta").get<double>(),
                          xf.at("beta_prime").get<double>(), xf.at("gamma").get<double>(),
                          xf.at("alpha_prime").get<double>()};
        r.x_fit.residual = xf.at("residual").get<double>();
        r.x_fit.accepted = xf.at("accepted").get<bool>();
        r.condition_margin = j.at("condition_margin").get<double>();
        if (!j.at("decomposition").is_null()) {
            const auto& dj = j.at("decomposition");
            DecompositionReport dr;
            for (const auto& tj : dj.at("terms")) {
                DecompositionTerm t;
                t.weight = tj.at("weight").get<double>();
                const auto& na = tj.at("n_a");
                const auto& nb = tj.at("n_b");
                if (na.size() != 3 || nb.size() != 3)
                    throw ParseError("decomposition vectors must have 3 components",
                                     "wrong-shape");
                t.n_a = {na[0].get<double>(), na[1].get<double>(), na[2].get<double>()};
                t.n_b = {nb[0].get<double>(), nb[1].get<double>(), nb[2].get<double>()};
                dr.decomposition.terms.push_back(t);
            }
            dr.verified = dj.at("verified").get<bool>();
            dr.max_error = dj.at("max_error").get<double>();
            r.decomposition = std::move(dr);
        }
        for (const auto& f : j.at("flags")) r.flags.push_back(f.get<std::string>());
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report JSON has wrong structure: ") + e.what(),
                         "wrong-shape");
    }
}

inline bool reports_equal(const VerdictReport& a, const VerdictReport& b) {
    return report_to_json_value(a) == report_to_json_value(b);
}

// Human-oriented rendering of the same report.
inline std::string report_to_text(const VerdictReport& r) {
    std::ostringstream os;
    os.precision(12);
    os << "input:       " << r.input_id << "\n";
    os << "verdict:     " << to_string(r.verdict) << "\n";
    os << "min PT eig:  " << r.min_ppt_eigenvalue << "\n";
    os << "negativity:  " << r.negativity << "\n";
    if (r.concurrence)
        os << "concurrence: " << *r.concurrence << "\n";
    else
        os << "concurrence: n/a (fit rejected)\n";
    const auto& p = r.x_fit.params;
    os << "x-fit:       alpha=" << p.alpha << " beta=" << p.beta << " beta'=" << p.beta_prime
       << " gamma=" << p.gamma << " alpha'=" << p.alpha_prime << "\n";
    os << "             residual=" << r.x_fit.residual
       << (r.x_fit.accepted ? " (accepted)" : " (rejected)") << "\n";
    os << "margin:      " << r.condition_margin << "\n";
    if (r.decomposition) {
        os << "decomposition: 8 terms, max error " << r.decomposition->max_error
           << (r.decomposition->verified ? " (verified)" : " (NOT verified)") << "\n";
        for (const auto& t : r.decomposition->decomposition.terms)
            os << "  w=" << t.weight << "  n_a=(" << t.n_a.nx << "," << t.n_a.ny << ","
               << t.n_a.nz << ")  n_b=(" << t.n_b.nx << "," << t.n_b.ny << "," << t.n_b.nz
               << ")\n";
    } else {
        os << "decomposition: none\n";
    }
    os << "flags:       ";
    if (r.flags.empty()) {
        os << "(none)";
    } else {
        for (std::size_t i = 0; i < r.flags.size(); ++i) os << (i ? " " : "") << r.flags[i];
    }
    os << "\n";
    return os.str();
}

}  // namespace entverdict
