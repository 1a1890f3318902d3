#pragma once

// Query dispatch: a named request against a parsed document/model, routed to
// the selected bounding method. Keeps the CLI thin and lets tests drive the
// whole pipeline in-process.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "credal/ascent.hpp"
#include "credal/inference.hpp"
#include "credal/lavine.hpp"
#include "credal/model_io.hpp"
#include "credal/natural_extension.hpp"
#include "credal/transform.hpp"

namespace credal {

enum class Method { enumeration, joint, gradient, qem, anneal, lavine, ne_lp };

inline Method method_from_string(const std::string& name) {
    if (name == "enum") return Method::enumeration;
    if (name == "joint") return Method::joint;
    if (name == "gradient") return Method::gradient;
    if (name == "qem") return Method::qem;
    if (name == "anneal") return Method::anneal;
    if (name == "lavine") return Method::lavine;
    if (name == "ne-lp") return Method::ne_lp;
    throw std::invalid_argument("unknown method " + name);
}

inline std::string to_string(Method m) {
    switch (m) {
        case Method::enumeration: return "enum";
        case Method::joint: return "joint";
        case Method::gradient: return "gradient";
        case Method::qem: return "qem";
        case Method::anneal: return "anneal";
        case Method::lavine: return "lavine";
        case Method::ne_lp: return "ne-lp";
    }
    return "?";
}

struct QueryRequest {
    std::string target;  // VAR or VAR=VALUE; ignored when utility is set
    std::string utility; // utility name for expectation/variance queries
    bool variance = false;
    std::map<std::string, std::string> evidence; // variable name -> value name
    Method method = Method::enumeration;
    double tol = 1e-6;
    std::uint64_t seed = 0;
    int restarts = 8;
    std::size_t cap = 1000000;
};

namespace detail {

inline int value_index_of(const NetworkDocument& doc, const std::string& var, const std::string& value) {
    const auto* v = doc.find_variable(var);
    if (!v) throw std::invalid_argument("unknown variable " + var);
    for (std::size_t k = 0; k < v->values.size(); ++k)
        if (v->values[k] == value) return static_cast<int>(k);
    throw std::invalid_argument("unknown value " + value + " for variable " + var);
}

} // namespace detail

inline Evidence evidence_from_names(const NetworkDocument& doc, const Model& model,
                                    const std::map<std::string, std::string>& names) {
    Evidence e;
    for (const auto& [var, val] : names) {
        int id = model.net.var_by_name(var);
        if (id < 0) throw std::invalid_argument("unknown evidence variable " + var);
        e[id] = detail::value_index_of(doc, var, val);
    }
    return e;
}

inline void validate_request(const QueryRequest& req) {
    if (req.utility.empty() && req.target.empty())
        throw std::invalid_argument("request needs a target or a utility");
    if (!req.utility.empty() && req.method != Method::enumeration)
        throw std::invalid_argument("utility queries support the enum method only");
    if (req.variance && req.utility.empty())
        throw std::invalid_argument("variance queries need a utility");
    if (req.method == Method::lavine && !(req.tol > 0.0))
        throw std::invalid_argument("lavine needs a positive tolerance");
    if (req.restarts < 1) throw std::invalid_argument("restarts must be at least 1");
}

inline BoundsResult run_bounds_method(const QueryRequest& req, const Model& model,
                                      const TransformedNetwork& t, int q, int a, const Evidence& e) {
    switch (req.method) {
        case Method::enumeration:
            return bounds_by_enumeration(t, q, a, e, req.cap);
        case Method::joint:
            return bounds_by_joint_max(t, q, a, e);
        case Method::anneal: {
            AnnealSchedule sched;
            sched.seed = req.seed;
            return anneal_search(t, q, a, e, sched);
        }
        case Method::gradient:
        case Method::qem: {
            AscentOptions ao;
            ao.seed = req.seed;
            ao.restarts = req.restarts;
            ao.maximize = false;
            auto lo = req.method == Method::qem ? qem_run(t, q, a, e, ao)
                                                : projected_gradient_ascent(t, q, a, e, ao);
            ao.maximize = true;
            ao.seed = req.seed + 1;
            auto hi = req.method == Method::qem ? qem_run(t, q, a, e, ao)
                                                : projected_gradient_ascent(t, q, a, e, ao);
            BoundsResult r;
            r.method = to_string(req.method);
            r.lower = lo.best_bound;
            r.upper = hi.best_bound;
            r.evaluations = lo.steps + hi.steps;
            return r;
        }
        case Method::lavine: {
            BracketState lo_state, hi_state;
            BoundsResult r;
            r.method = "lavine";
            r.lower = lavine_lower_bound(t, q, a, e, req.tol, &lo_state);
            r.upper = lavine_upper_bound(t, q, a, e, req.tol, &hi_state);
            r.evaluations = lo_state.evaluations + hi_state.evaluations;
            r.skipped_zero_mass = lo_state.zero_mass_skipped;
            return r;
        }
        case Method::ne_lp:
            return ne_bounds(model.net, model.specs, q, a, e);
    }
    throw std::logic_error("unreachable");
}

// Runs the request; one record per queried value (all values of the target
// variable when no =VALUE suffix was given).
inline std::vector<QueryRecord> run_query(const NetworkDocument& doc, const Model& model,
                                          const QueryRequest& req) {
    validate_request(req);
    Evidence e = evidence_from_names(doc, model, req.evidence);
    auto t = apply_ccm(model.net, model.specs);
    std::vector<QueryRecord> records;
    if (!req.utility.empty()) {
        auto it = model.utilities.find(req.utility);
        if (it == model.utilities.end()) throw std::invalid_argument("unknown utility " + req.utility);
        if (req.variance) {
            auto v = variance_bounds(t, it->second, e, req.cap);
            records.push_back({req.utility + " (variance)", v.bounds, 0.0, v.iterative_lower, v.iterative_upper});
        } else {
            records.push_back({req.utility, expectation_bounds(t, it->second, e, req.cap), 0.0, {}, {}});
        }
        return records;
    }
    auto eq = req.target.find('=');
    std::string var = eq == std::string::npos ? req.target : req.target.substr(0, eq);
    const auto* decl = doc.find_variable(var);
    if (!decl) throw std::invalid_argument("unknown target variable " + var);
    int q = model.net.var_by_name(var);
    std::vector<int> values;
    if (eq == std::string::npos) {
        for (std::size_t k = 0; k < decl->values.size(); ++k) values.push_back(static_cast<int>(k));
    } else {
        values.push_back(detail::value_index_of(doc, var, req.target.substr(eq + 1)));
    }
    for (int a : values) {
        auto r = run_bounds_method(req, model, t, q, a, e);
        records.push_back({var + "=" + decl->values[a], r, req.method == Method::lavine ? req.tol : 0.0,
                           {}, {}});
    }
    return records;
}

} // namespace credal
