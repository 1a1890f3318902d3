#pragma once

// Rewrites a network with credal nodes as a standard Bayesian network: each
// credal node gains parentless selector ("transparent") variables whose
// values pick a vertex of the local credal set. In separate-columns mode one
// selector is created per (node, parent configuration); in joint mode one
// selector spans the whole conditional table.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "credal/network.hpp"
#include "credal/polytope.hpp"

namespace credal {

struct TransparentVariable {
    int id = -1;            // variable id in the transformed net
    int source = -1;        // credal node it selects vertices for
    int arity = 0;          // number of selectable vertices
    int parent_config = -1; // governed configuration in separate mode, -1 in joint mode
};

struct TransformedNetwork {
    DiscreteNetwork net;      // transformed net; transparents carry uniform placeholder priors
    DiscreteNetwork original; // the input net, kept for instantiation
    std::vector<CredalSpec> specs;
    std::vector<TransparentVariable> transparents;
    std::map<int, int> origin; // transparent id -> source node id
    int original_count = 0;

    std::vector<int> transparent_ids() const {
        std::vector<int> ids;
        for (const auto& t : transparents) ids.push_back(t.id);
        return ids;
    }

    std::size_t assignment_count() const {
        std::size_t n = 1;
        for (const auto& t : transparents) n *= static_cast<std::size_t>(t.arity);
        return n;
    }
};

namespace detail {

inline void check_spec(const DiscreteNetwork& net, const CredalSpec& spec) {
    if (spec.node < 0 || spec.node >= net.num_vars())
        throw std::invalid_argument("credal spec targets an unknown node");
    const int card = net.variables[spec.node].cardinality;
    const int nconf = net.num_parent_configs(spec.node);
    if (spec.mode == ColumnsMode::separate) {
        if (static_cast<int>(spec.column_sets.size()) != nconf)
            throw std::invalid_argument("credal spec must give one polytope per parent configuration of " +
                                        net.variables[spec.node].name);
        for (const auto& poly : spec.column_sets) {
            if (poly.dim != card || poly.vertices.empty())
                throw std::invalid_argument("credal polytope dimension mismatch on node " +
                                            net.variables[spec.node].name);
        }
    } else {
        if (spec.table_vertices.empty())
            throw std::invalid_argument("joint-mode credal spec has no table vertices");
        for (const auto& tv : spec.table_vertices) {
            if (static_cast<int>(tv.size()) != card * nconf)
                throw std::invalid_argument("joint table vertex size mismatch on node " +
                                            net.variables[spec.node].name);
            for (int cfg = 0; cfg < nconf; ++cfg) {
                double s = 0.0;
                for (int v = 0; v < card; ++v) s += tv[cfg * card + v];
                if (std::abs(s - 1.0) > 1e-9)
                    throw std::invalid_argument("joint table vertex column not normalized on node " +
                                                net.variables[spec.node].name);
            }
        }
    }
}

} // namespace detail

inline TransformedNetwork apply_ccm(const DiscreteNetwork& net, const std::vector<CredalSpec>& specs) {
    TransformedNetwork out;
    out.original = net;
    out.net = net;
    out.specs = specs;
    out.original_count = net.num_vars();

    std::vector<bool> seen(net.num_vars(), false);
    for (const auto& spec : specs) {
        detail::check_spec(net, spec);
        if (seen[spec.node]) throw std::invalid_argument("two credal specs target the same node");
        seen[spec.node] = true;
    }

    // allocate transparents
    for (const auto& spec : specs) {
        const std::string base = net.variables[spec.node].name;
        if (spec.mode == ColumnsMode::separate) {
            const int nconf = net.num_parent_configs(spec.node);
            for (int cfg = 0; cfg < nconf; ++cfg) {
                TransparentVariable t;
                t.id = out.net.num_vars();
                t.source = spec.node;
                t.arity = static_cast<int>(spec.column_sets[cfg].vertices.size());
                t.parent_config = cfg;
                std::string name = base + "'";
                if (nconf > 1) name += "@" + std::to_string(cfg);
                out.net.variables.push_back({t.id, name, t.arity});
                out.net.parents.push_back({});
                out.net.cpts.push_back({});
                out.transparents.push_back(t);
                out.origin[t.id] = spec.node;
            }
        } else {
            TransparentVariable t;
            t.id = out.net.num_vars();
            t.source = spec.node;
            t.arity = static_cast<int>(spec.table_vertices.size());
            out.net.variables.push_back({t.id, base + "'", t.arity});
            out.net.parents.push_back({});
            out.net.cpts.push_back({});
            out.transparents.push_back(t);
            out.origin[t.id] = spec.node;
        }
    }

    // uniform placeholder priors; they are conditioned on or maximized over
    // downstream, so the placeholder never reaches a bound
    for (const auto& t : out.transparents) {
        std::vector<double> uni(t.arity, 1.0 / t.arity);
        out.net.cpts[t.id] = make_cpt(out.net, t.id, {uni});
    }

    // rebuild each credal node's CPT with its selectors as extra parents
    for (const auto& spec : specs) {
        const int node = spec.node;
        const int card = net.variables[node].cardinality;
        std::vector<int> sel; // transparent ids for this node, indexed by config (separate) or single (joint)
        for (const auto& t : out.transparents)
            if (t.source == node) sel.push_back(t.id);

        std::vector<int>& par = out.net.parents[node];
        for (int id : sel) par.push_back(id);

        std::vector<int> scope = out.net.sorted_parents(node);
        scope.insert(std::lower_bound(scope.begin(), scope.end(), node), node);
        std::vector<int> cards;
        for (int v : scope) cards.push_back(out.net.variables[v].cardinality);
        Factor f(scope, cards);

        std::vector<int> orig_sp = net.sorted_parents(node);
        std::vector<int> orig_pc = detail::parent_cards_of(net, node);
        std::vector<int> a(scope.size(), 0);
        std::size_t idx = 0;
        do {
            int v = 0;
            std::vector<int> pa(orig_sp.size());
            std::vector<int> selval(sel.size());
            for (std::size_t k = 0; k < scope.size(); ++k) {
                int var = scope[k];
                if (var == node) {
                    v = a[k];
                } else if (var >= out.original_count) {
                    for (std::size_t s = 0; s < sel.size(); ++s)
                        if (sel[s] == var) selval[s] = a[k];
                } else {
                    auto it = std::lower_bound(orig_sp.begin(), orig_sp.end(), var);
                    pa[it - orig_sp.begin()] = a[k];
                }
            }
            int cfg = static_cast<int>(detail::rank_of(pa, orig_pc));
            double val;
            if (spec.mode == ColumnsMode::separate) {
                val = spec.column_sets[cfg].vertices[selval[cfg]][v];
            } else {
                val = spec.table_vertices[selval[0]][cfg * card + v];
            }
            f.values[idx++] = val;
        } while (detail::next_assignment(a, cards));
        out.net.cpts[node] = f;
    }
    return out;
}

// Precise network on the original variables with the selected vertices
// installed; every non-credal CPT is the input table unchanged.
inline DiscreteNetwork instantiate_transparent(const TransformedNetwork& t, const std::vector<int>& assignment) {
    if (assignment.size() != t.transparents.size())
        throw std::invalid_argument("assignment must cover all transparent variables");
    for (std::size_t k = 0; k < assignment.size(); ++k)
        if (assignment[k] < 0 || assignment[k] >= t.transparents[k].arity)
            throw std::invalid_argument("transparent value out of range");
    DiscreteNetwork net = t.original;
    for (const auto& spec : t.specs) {
        const int node = spec.node;
        const int card = net.variables[node].cardinality;
        const int nconf = net.num_parent_configs(node);
        std::vector<int> sel;
        for (std::size_t k = 0; k < t.transparents.size(); ++k)
            if (t.transparents[k].source == node) sel.push_back(static_cast<int>(k));
        for (int cfg = 0; cfg < nconf; ++cfg) {
            std::vector<double> col(card);
            if (spec.mode == ColumnsMode::separate) {
                col = spec.column_sets[cfg].vertices[assignment[sel[cfg]]];
            } else {
                const auto& tv = spec.table_vertices[assignment[sel[0]]];
                for (int v = 0; v < card; ++v) col[v] = tv[cfg * card + v];
            }
            detail::set_cpt_column(net, node, cfg, col);
        }
    }
    return net;
}

// Transformed net with the placeholder priors replaced by the given weights
// (one vector per transparent, in transparents order). Weights need not be
// normalized; downstream ratios are scale-aware.
inline DiscreteNetwork net_with_priors(const TransformedNetwork& t,
                                       const std::vector<std::vector<double>>& weights) {
    if (weights.size() != t.transparents.size())
        throw std::invalid_argument("one weight vector per transparent variable required");
    DiscreteNetwork net = t.net;
    for (std::size_t k = 0; k < t.transparents.size(); ++k) {
        if (static_cast<int>(weights[k].size()) != t.transparents[k].arity)
            throw std::invalid_argument("weight arity mismatch");
        detail::set_cpt_column(net, t.transparents[k].id, 0, weights[k]);
    }
    return net;
}

} // namespace credal
