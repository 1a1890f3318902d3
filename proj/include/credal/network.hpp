#pragma once

// Discrete Bayesian networks: dense factors, variable elimination with a
// min-degree ordering, and a literal full-joint evaluator used as a slow
// reference path.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace credal {

struct Variable {
    int id = -1;
    std::string name;
    int cardinality = 0;
};

// Observed value index per variable id.
using Evidence = std::map<int, int>;

namespace detail {

inline std::size_t table_size(const std::vector<int>& cards) {
    std::size_t n = 1;
    for (int c : cards) n *= static_cast<std::size_t>(c);
    return n;
}

// Row-major index of an assignment aligned with a cards vector.
inline std::size_t rank_of(const std::vector<int>& assignment, const std::vector<int>& cards) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < cards.size(); ++k)
        idx = idx * static_cast<std::size_t>(cards[k]) + static_cast<std::size_t>(assignment[k]);
    return idx;
}

inline void unrank(std::size_t idx, const std::vector<int>& cards, std::vector<int>& out) {
    out.resize(cards.size());
    for (std::size_t k = cards.size(); k-- > 0;) {
        out[k] = static_cast<int>(idx % static_cast<std::size_t>(cards[k]));
        idx /= static_cast<std::size_t>(cards[k]);
    }
}

// Odometer step; returns false once the assignment wraps back to all zeros.
inline bool next_assignment(std::vector<int>& a, const std::vector<int>& cards) {
    for (std::size_t k = a.size(); k-- > 0;) {
        if (++a[k] < cards[k]) return true;
        a[k] = 0;
    }
    return false;
}

} // namespace detail

// Dense real table over an ascending-id scope, row-major in scope order.
struct Factor {
    std::vector<int> scope;   // variable ids, strictly ascending
    std::vector<int> cards;   // cardinalities aligned with scope
    std::vector<double> values;

    Factor() = default;
    Factor(std::vector<int> s, std::vector<int> c)
        : scope(std::move(s)), cards(std::move(c)), values(detail::table_size(cards), 0.0) {}

    bool has(int var) const { return std::binary_search(scope.begin(), scope.end(), var); }

    int position(int var) const {
        auto it = std::lower_bound(scope.begin(), scope.end(), var);
        if (it == scope.end() || *it != var) throw std::invalid_argument("variable not in factor scope");
        return static_cast<int>(it - scope.begin());
    }

    double& at(const std::vector<int>& assignment) { return values[detail::rank_of(assignment, cards)]; }
    double at(const std::vector<int>& assignment) const { return values[detail::rank_of(assignment, cards)]; }

    double sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }
};

// Entry-wise product over the union scope. Shared variables must agree on
// cardinality.
inline Factor factor_product(const Factor& f, const Factor& g) {
    std::vector<int> scope;
    std::vector<int> cards;
    std::size_t i = 0, j = 0;
    while (i < f.scope.size() || j < g.scope.size()) {
        if (j == g.scope.size() || (i < f.scope.size() && f.scope[i] < g.scope[j])) {
            scope.push_back(f.scope[i]);
            cards.push_back(f.cards[i]);
            ++i;
        } else if (i == f.scope.size() || g.scope[j] < f.scope[i]) {
            scope.push_back(g.scope[j]);
            cards.push_back(g.cards[j]);
            ++j;
        } else {
            if (f.cards[i] != g.cards[j])
                throw std::invalid_argument("cardinality mismatch on shared variable " + std::to_string(f.scope[i]));
            scope.push_back(f.scope[i]);
            cards.push_back(f.cards[i]);
            ++i;
            ++j;
        }
    }
    Factor out(scope, cards);
    // positions of each result variable inside f and g (-1 when absent)
    std::vector<int> fpos(scope.size(), -1), gpos(scope.size(), -1);
    for (std::size_t k = 0; k < scope.size(); ++k) {
        if (f.has(scope[k])) fpos[k] = f.position(scope[k]);
        if (g.has(scope[k])) gpos[k] = g.position(scope[k]);
    }
    std::vector<int> a(scope.size(), 0), fa(f.scope.size()), ga(g.scope.size());
    std::size_t idx = 0;
    if (out.values.empty()) return out;
    do {
        for (std::size_t k = 0; k < scope.size(); ++k) {
            if (fpos[k] >= 0) fa[fpos[k]] = a[k];
            if (gpos[k] >= 0) ga[gpos[k]] = a[k];
        }
        out.values[idx++] = f.at(fa) * g.at(ga);
    } while (detail::next_assignment(a, cards));
    return out;
}

// Sum out one variable.
inline Factor factor_marginalize(const Factor& f, int var) {
    int pos = f.position(var);
    std::vector<int> scope = f.scope, cards = f.cards;
    scope.erase(scope.begin() + pos);
    cards.erase(cards.begin() + pos);
    Factor out(scope, cards);
    std::vector<int> a(f.scope.size(), 0), sub(scope.size());
    std::size_t idx = 0;
    do {
        sub.clear();
        for (std::size_t k = 0; k < f.scope.size(); ++k)
            if (static_cast<int>(k) != pos) sub.push_back(a[k]);
        out.at(sub) += f.values[idx++];
    } while (detail::next_assignment(a, f.cards));
    return out;
}

// Drop entries inconsistent with the evidence; evidence variables leave the
// scope, consistent entries are preserved exactly.
inline Factor restrict_evidence(const Factor& f, const Evidence& e) {
    std::vector<int> scope, cards, fixedpos;
    for (std::size_t k = 0; k < f.scope.size(); ++k) {
        auto it = e.find(f.scope[k]);
        if (it == e.end()) {
            scope.push_back(f.scope[k]);
            cards.push_back(f.cards[k]);
        } else {
            if (it->second < 0 || it->second >= f.cards[k])
                throw std::invalid_argument("evidence value out of range for variable " + std::to_string(f.scope[k]));
            fixedpos.push_back(static_cast<int>(k));
        }
    }
    if (fixedpos.empty()) return f;
    Factor out(scope, cards);
    std::vector<int> a(scope.size(), 0), fa(f.scope.size());
    std::size_t idx = 0;
    do {
        std::size_t s = 0;
        for (std::size_t k = 0; k < f.scope.size(); ++k) {
            auto it = e.find(f.scope[k]);
            fa[k] = (it == e.end()) ? a[s++] : it->second;
        }
        out.values[idx++] = f.at(fa);
    } while (!scope.empty() && detail::next_assignment(a, cards));
    return out;
}

struct DiscreteNetwork {
    std::vector<Variable> variables;
    std::vector<std::vector<int>> parents; // per variable, ids
    std::vector<Factor> cpts;              // per variable, scope = sorted({i} + parents)

    int num_vars() const { return static_cast<int>(variables.size()); }

    int var_by_name(const std::string& name) const {
        for (const auto& v : variables)
            if (v.name == name) return v.id;
        return -1;
    }

    std::vector<int> sorted_parents(int node) const {
        std::vector<int> p = parents[node];
        std::sort(p.begin(), p.end());
        return p;
    }

    // Row-major index of a parent configuration over the sorted parent scope.
    int num_parent_configs(int node) const {
        int n = 1;
        for (int p : parents[node]) n *= variables[p].cardinality;
        return n;
    }
};

namespace detail {

// Factor index for (node value v, parent configuration cfg) inside a CPT
// whose scope is sorted({node} + parents). cfg is row-major over the sorted
// parent ids.
inline std::size_t cpt_cell(const Factor& f, int node, const std::vector<int>& sorted_parents,
                            const std::vector<int>& parent_cards, int v, int cfg) {
    std::vector<int> pa;
    unrank(static_cast<std::size_t>(cfg), parent_cards, pa);
    std::vector<int> fa(f.scope.size());
    for (std::size_t k = 0; k < f.scope.size(); ++k) {
        if (f.scope[k] == node) {
            fa[k] = v;
        } else {
            auto it = std::lower_bound(sorted_parents.begin(), sorted_parents.end(), f.scope[k]);
            fa[k] = pa[it - sorted_parents.begin()];
        }
    }
    return rank_of(fa, f.cards);
}

inline std::vector<int> parent_cards_of(const DiscreteNetwork& net, int node) {
    std::vector<int> sp = net.sorted_parents(node);
    std::vector<int> pc;
    for (int p : sp) pc.push_back(net.variables[p].cardinality);
    return pc;
}

// Distribution over a node's values for one parent configuration.
inline std::vector<double> cpt_column(const DiscreteNetwork& net, int node, int cfg) {
    const Factor& f = net.cpts[node];
    std::vector<int> sp = net.sorted_parents(node);
    std::vector<int> pc = parent_cards_of(net, node);
    int card = net.variables[node].cardinality;
    std::vector<double> col(card);
    for (int v = 0; v < card; ++v) col[v] = f.values[cpt_cell(f, node, sp, pc, v, cfg)];
    return col;
}

inline void set_cpt_column(DiscreteNetwork& net, int node, int cfg, const std::vector<double>& col) {
    Factor& f = net.cpts[node];
    std::vector<int> sp = net.sorted_parents(node);
    std::vector<int> pc = parent_cards_of(net, node);
    for (int v = 0; v < net.variables[node].cardinality; ++v)
        f.values[cpt_cell(f, node, sp, pc, v, cfg)] = col[v];
}

} // namespace detail

// Build a CPT factor from per-parent-configuration columns. columns[cfg] is
// the distribution over the node's values at the cfg-th configuration of the
// sorted parent scope (row-major).
inline Factor make_cpt(const DiscreteNetwork& net, int node, const std::vector<std::vector<double>>& columns) {
    std::vector<int> scope = net.sorted_parents(node);
    scope.insert(std::lower_bound(scope.begin(), scope.end(), node), node);
    std::vector<int> cards;
    for (int v : scope) cards.push_back(net.variables[v].cardinality);
    Factor f(scope, cards);
    std::vector<int> sp = net.sorted_parents(node);
    std::vector<int> pc = detail::parent_cards_of(net, node);
    int nconf = net.num_parent_configs(node);
    if (static_cast<int>(columns.size()) != nconf)
        throw std::invalid_argument("expected " + std::to_string(nconf) + " cpt columns for node " +
                                    net.variables[node].name);
    for (int cfg = 0; cfg < nconf; ++cfg) {
        if (static_cast<int>(columns[cfg].size()) != net.variables[node].cardinality)
            throw std::invalid_argument("cpt column arity mismatch for node " + net.variables[node].name);
        for (int v = 0; v < net.variables[node].cardinality; ++v)
            f.values[detail::cpt_cell(f, node, sp, pc, v, cfg)] = columns[cfg][v];
    }
    return f;
}

// Structural and numeric checks; violations are data, not faults.
inline std::vector<std::string> validate_network(const DiscreteNetwork& net) {
    std::vector<std::string> out;
    const int n = net.num_vars();
    std::set<std::string> names;
    for (int i = 0; i < n; ++i) {
        if (net.variables[i].id != i) out.push_back("variable id not dense at index " + std::to_string(i));
        if (net.variables[i].cardinality < 1)
            out.push_back("variable " + net.variables[i].name + " has empty value set");
        if (!names.insert(net.variables[i].name).second)
            out.push_back("duplicate variable name " + net.variables[i].name);
    }
    if (static_cast<int>(net.parents.size()) != n || static_cast<int>(net.cpts.size()) != n) {
        out.push_back("parents/cpts size mismatch");
        return out;
    }
    // acyclicity by Kahn's algorithm on the parent graph
    std::vector<int> indeg(n, 0);
    for (int i = 0; i < n; ++i)
        for (int p : net.parents[i]) {
            if (p < 0 || p >= n) {
                out.push_back("parent id out of range for " + net.variables[i].name);
                return out;
            }
            ++indeg[i];
        }
    std::vector<int> queue;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) queue.push_back(i);
    int seen = 0;
    while (!queue.empty()) {
        int u = queue.back();
        queue.pop_back();
        ++seen;
        for (int i = 0; i < n; ++i)
            for (int p : net.parents[i])
                if (p == u && --indeg[i] == 0) queue.push_back(i);
    }
    if (seen != n) out.push_back("cycle detected");

    for (int i = 0; i < n; ++i) {
        std::vector<int> expect = net.sorted_parents(i);
        expect.insert(std::lower_bound(expect.begin(), expect.end(), i), i);
        if (net.cpts[i].scope != expect) {
            out.push_back("cpt " + net.variables[i].name + " scope inconsistent");
            continue;
        }
        bool bad_entry = false;
        for (double v : net.cpts[i].values)
            if (!(v >= 0.0) || !std::isfinite(v)) bad_entry = true;
        if (bad_entry) {
            out.push_back("cpt " + net.variables[i].name + " has negative or non-finite entries");
            continue;
        }
        for (int cfg = 0; cfg < net.num_parent_configs(i); ++cfg) {
            std::vector<double> col = detail::cpt_column(net, i, cfg);
            double s = std::accumulate(col.begin(), col.end(), 0.0);
            if (std::abs(s - 1.0) > 1e-9)
                out.push_back("cpt " + net.variables[i].name + " not normalized at pa=" + std::to_string(cfg));
        }
    }
    return out;
}

// Unnormalized p(keep, e): multiply the evidence-restricted CPTs and sum out
// everything else. Default ordering is min-degree with lowest-id tie break;
// an explicit order (covering at least the variables to sum out) overrides
// it, mostly so order-invariance can be exercised directly.
inline Factor eliminate(const DiscreteNetwork& net, const std::vector<int>& keep, const Evidence& e,
                        const std::vector<int>& order = {}) {
    for (int k : keep)
        if (e.count(k)) throw std::invalid_argument("keep set intersects evidence");
    std::vector<Factor> pool;
    pool.reserve(net.cpts.size());
    for (const Factor& f : net.cpts) pool.push_back(restrict_evidence(f, e));

    std::set<int> keepset(keep.begin(), keep.end());
    std::set<int> remaining;
    for (const Factor& f : pool)
        for (int v : f.scope)
            if (!keepset.count(v)) remaining.insert(v);

    std::size_t fixed_pos = 0;
    while (!remaining.empty()) {
        int best = -1;
        if (!order.empty()) {
            while (fixed_pos < order.size() && !remaining.count(order[fixed_pos])) ++fixed_pos;
            if (fixed_pos == order.size())
                throw std::invalid_argument("elimination order misses a variable");
            best = order[fixed_pos];
        } else {
            // min-degree: fewest distinct neighbours across factors containing the var
            std::size_t best_deg = std::numeric_limits<std::size_t>::max();
            for (int v : remaining) {
                std::set<int> nb;
                for (const Factor& f : pool)
                    if (f.has(v))
                        for (int u : f.scope)
                            if (u != v) nb.insert(u);
                if (nb.size() < best_deg || (nb.size() == best_deg && v < best)) {
                    best_deg = nb.size();
                    best = v;
                }
            }
        }
        Factor prod;
        bool first = true;
        std::vector<Factor> next;
        for (Factor& f : pool) {
            if (f.has(best)) {
                prod = first ? std::move(f) : factor_product(prod, f);
                first = false;
            } else {
                next.push_back(std::move(f));
            }
        }
        next.push_back(factor_marginalize(prod, best));
        pool = std::move(next);
        remaining.erase(best);
    }
    Factor result({}, {});
    result.values = {1.0};
    for (const Factor& f : pool) result = factor_product(result, f);
    return result;
}

// p(e); 1 for empty evidence.
inline double joint_prob_of_evidence(const DiscreteNetwork& net, const Evidence& e) {
    Factor f = eliminate(net, {}, e);
    return f.values.empty() ? 0.0 : f.values[0];
}

// Normalized posterior over q. Fails explicitly on zero-probability evidence.
inline std::vector<double> posterior_marginal(const DiscreteNetwork& net, int q, const Evidence& e) {
    if (e.count(q)) throw std::invalid_argument("query variable is in evidence");
    Factor f = eliminate(net, {q}, e);
    double z = f.sum();
    if (z <= 0.0) throw std::domain_error("zero-probability evidence");
    std::vector<double> out(f.values);
    for (double& x : out) x /= z;
    return out;
}

// Literal product of all CPT entries over every joint assignment.
inline Factor brute_force_joint(const DiscreteNetwork& net, std::size_t cap = (std::size_t{1} << 22)) {
    std::vector<int> scope(net.num_vars()), cards(net.num_vars());
    std::size_t total = 1;
    for (int i = 0; i < net.num_vars(); ++i) {
        scope[i] = i;
        cards[i] = net.variables[i].cardinality;
        if (total > cap / static_cast<std::size_t>(cards[i]))
            throw std::length_error("joint table exceeds cap");
        total *= static_cast<std::size_t>(cards[i]);
    }
    Factor out(scope, cards);
    std::vector<int> a(scope.size(), 0);
    std::size_t idx = 0;
    std::vector<std::vector<int>> sub(net.num_vars());
    do {
        double p = 1.0;
        for (int i = 0; i < net.num_vars(); ++i) {
            const Factor& cpt = net.cpts[i];
            sub[i].resize(cpt.scope.size());
            for (std::size_t k = 0; k < cpt.scope.size(); ++k) sub[i][k] = a[cpt.scope[k]];
            p *= cpt.at(sub[i]);
        }
        out.values[idx++] = p;
    } while (detail::next_assignment(a, cards));
    return out;
}

} // namespace credal
