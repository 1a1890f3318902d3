#pragma once

// Network document format: a line-oriented text grammar plus a JSON mirror
// of the same document model, the bridge from documents to runnable
// networks/credal specs, and result serialization (plain, json, csv).
//
// Grammar sketch (entries inside braces are separated by ';' or newlines,
// '#' starts a comment):
//
//   version: 1
//   variable x { values: x0, x1 }
//   parents y: x
//   cpt x { 0.6, 0.4 }
//   cpt y { x=x0: 0.1, 0.9; x=x1: 0.8, 0.2 }
//   credal x { class: eps-contaminated; base: 0.75, 0.25; eps: 0.2 }
//   credal y { class: vertices; columns: joint; v1: 0.8,0.2,0,1; v2: ... }
//   credal y { class: vertices; columns: separate;
//              config x=x0 { v1: 0.9,0.1; v2: 0.7,0.3 }
//              config x=x1 { v1: 0.2,0.8 } }
//   utility gain { targets: x; values: 10, 0 }
//
// Credal classes: vertices | eps-contaminated | belief-function |
// density-bounded | total-variation | density-ratio. Class parameters:
// base/eps, mass <values>: m, lower/upper, center/eps, and
// lower-measure/upper-measure respectively.

#include <charconv>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "credal/inference.hpp"
#include "credal/network.hpp"
#include "credal/polytope.hpp"

namespace credal {

struct ParseError : std::runtime_error {
    enum class Kind { syntax, semantic };
    Kind kind;
    int line;
    int column;
    ParseError(Kind k, int l, int c, const std::string& msg)
        : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " +
                             (k == Kind::syntax ? "syntax error: " : "semantic error: ") + msg),
          kind(k),
          line(l),
          column(c) {}
};

// ---- document model --------------------------------------------------------

struct VariableDecl {
    std::string name;
    std::vector<std::string> values;
    bool operator==(const VariableDecl&) const = default;
};

struct CptDecl {
    std::string node;
    std::vector<std::vector<double>> columns; // canonical parent-config order
    bool operator==(const CptDecl&) const = default;
};

struct CredalParams {
    std::vector<std::vector<double>> vertices;
    std::vector<double> base;  // eps-contaminated base / total-variation center
    double eps = 0.0;
    std::vector<double> lower, upper; // density bounds, or the two ratio measures
    std::vector<std::pair<std::vector<std::string>, double>> masses;
    bool operator==(const CredalParams&) const = default;
};

struct CredalDecl {
    std::string node;
    std::string cls;
    ColumnsMode columns = ColumnsMode::separate;
    std::vector<CredalParams> per_config; // one entry for roots/joint mode
    bool operator==(const CredalDecl&) const = default;
};

struct UtilityDecl {
    std::string name;
    std::vector<std::string> targets;
    std::vector<double> values;
    bool operator==(const UtilityDecl&) const = default;
};

struct NetworkDocument {
    int version = 1;
    std::vector<VariableDecl> variables;
    std::map<std::string, std::vector<std::string>> parents;
    std::vector<CptDecl> cpts;
    std::vector<CredalDecl> credals;
    std::vector<UtilityDecl> utilities;
    bool operator==(const NetworkDocument&) const = default;

    const VariableDecl* find_variable(const std::string& name) const {
        for (const auto& v : variables)
            if (v.name == name) return &v;
        return nullptr;
    }
};

namespace detail {

struct Token {
    enum class Kind { word, punct, newline, end };
    Kind kind = Kind::end;
    std::string text;
    int line = 1;
    int column = 1;
};

inline std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto push = [&](Token::Kind k, std::string s, int l, int c) { out.push_back({k, std::move(s), l, c}); };
    while (i < text.size()) {
        char ch = text[i];
        if (ch == '\n') {
            push(Token::Kind::newline, "\n", line, col);
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (ch == '\r' || ch == ' ' || ch == '\t') {
            ++i;
            ++col;
            continue;
        }
        if (ch == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        if (ch == '{' || ch == '}' || ch == ':' || ch == ';' || ch == ',' || ch == '=') {
            push(Token::Kind::punct, std::string(1, ch), line, col);
            ++i;
            ++col;
            continue;
        }
        int start_col = col;
        std::string word;
        while (i < text.size()) {
            char c = text[i];
            if (c == '\n' || c == '\r' || c == ' ' || c == '\t' || c == '#' || c == '{' || c == '}' ||
                c == ':' || c == ';' || c == ',' || c == '=')
                break;
            word.push_back(c);
            ++i;
            ++col;
        }
        push(Token::Kind::word, std::move(word), line, start_col);
    }
    push(Token::Kind::end, "", line, col);
    return out;
}

inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

class DocParser {
public:
    explicit DocParser(const std::string& text) : toks_(tokenize(text)) {}

    NetworkDocument parse() {
        skip_newlines();
        while (!at(Token::Kind::end)) {
            statement();
            skip_separators();
        }
        if (doc_.variables.empty()) fail_semantic(1, 1, "no variables declared");
        run_semantic_checks();
        return doc_;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    NetworkDocument doc_;

    const Token& cur() const { return toks_[pos_]; }
    bool at(Token::Kind k) const { return cur().kind == k; }
    bool at_punct(char c) const { return cur().kind == Token::Kind::punct && cur().text[0] == c; }

    [[noreturn]] void fail_syntax(const std::string& msg) const {
        throw ParseError(ParseError::Kind::syntax, cur().line, cur().column, msg);
    }
    [[noreturn]] void fail_semantic(int line, int col, const std::string& msg) const {
        throw ParseError(ParseError::Kind::semantic, line, col, msg);
    }

    void skip_newlines() {
        while (at(Token::Kind::newline)) ++pos_;
    }
    void skip_separators() {
        while (at(Token::Kind::newline) || at_punct(';')) ++pos_;
    }

    std::string expect_word(const char* what) {
        if (!at(Token::Kind::word)) fail_syntax(std::string("expected ") + what);
        std::string w = cur().text;
        ++pos_;
        return w;
    }
    void expect_punct(char c) {
        if (!at_punct(c)) fail_syntax(std::string("expected '") + c + "'");
        ++pos_;
    }

    double expect_number() {
        if (!at(Token::Kind::word)) fail_syntax("expected number");
        const std::string& w = cur().text;
        char* end = nullptr;
        double v = std::strtod(w.c_str(), &end);
        if (end != w.c_str() + w.size()) fail_syntax("expected number, got '" + w + "'");
        ++pos_;
        return v;
    }

    std::vector<double> number_list() {
        std::vector<double> out;
        out.push_back(expect_number());
        while (at_punct(',')) {
            ++pos_;
            skip_newlines();
            out.push_back(expect_number());
        }
        return out;
    }

    std::vector<std::string> name_list() {
        std::vector<std::string> out;
        out.push_back(expect_word("name"));
        while (at_punct(',')) {
            ++pos_;
            skip_newlines();
            out.push_back(expect_word("name"));
        }
        return out;
    }

    // var=value pairs separated by commas
    std::vector<std::pair<std::string, std::string>> assignment_list() {
        std::vector<std::pair<std::string, std::string>> out;
        for (;;) {
            std::string var = expect_word("variable name");
            expect_punct('=');
            std::string val = expect_word("value name");
            out.push_back({var, val});
            if (!at_punct(',')) break;
            ++pos_;
            skip_newlines();
        }
        return out;
    }

    bool next_is_assignment() const {
        return cur().kind == Token::Kind::word && pos_ + 1 < toks_.size() &&
               toks_[pos_ + 1].kind == Token::Kind::punct && toks_[pos_ + 1].text[0] == '=';
    }

    void statement() {
        if (!at(Token::Kind::word)) fail_syntax("expected declaration");
        std::string kw = cur().text;
        if (kw == "version") {
            ++pos_;
            expect_punct(':');
            doc_.version = static_cast<int>(expect_number());
        } else if (kw == "variable") {
            ++pos_;
            variable_decl();
        } else if (kw == "parents") {
            ++pos_;
            parents_decl();
        } else if (kw == "cpt") {
            ++pos_;
            cpt_decl();
        } else if (kw == "credal") {
            ++pos_;
            credal_decl();
        } else if (kw == "utility") {
            ++pos_;
            utility_decl();
        } else {
            fail_syntax("unknown declaration '" + kw + "'");
        }
    }

    void variable_decl() {
        int line = cur().line, col = cur().column;
        VariableDecl v;
        v.name = expect_word("variable name");
        expect_punct('{');
        skip_separators();
        std::string key = expect_word("'values'");
        if (key != "values") fail_syntax("expected 'values'");
        expect_punct(':');
        v.values = name_list();
        skip_separators();
        expect_punct('}');
        if (v.values.size() < 2) fail_semantic(line, col, "variable " + v.name + " needs at least two values");
        if (doc_.find_variable(v.name)) fail_semantic(line, col, "duplicate variable " + v.name);
        doc_.variables.push_back(std::move(v));
    }

    void parents_decl() {
        int line = cur().line, col = cur().column;
        std::string node = expect_word("variable name");
        expect_punct(':');
        auto list = name_list();
        if (doc_.parents.count(node)) fail_semantic(line, col, "duplicate parents declaration for " + node);
        doc_.parents[node] = std::move(list);
    }

    void cpt_decl() {
        int line = cur().line, col = cur().column;
        CptDecl c;
        c.node = expect_word("variable name");
        expect_punct('{');
        skip_separators();
        const VariableDecl* var = doc_.find_variable(c.node);
        if (!var) fail_semantic(line, col, "cpt for unknown variable " + c.node);
        auto parent_names = doc_.parents.count(c.node) ? doc_.parents[c.node] : std::vector<std::string>{};
        if (parent_names.empty()) {
            c.columns.push_back(number_list());
        } else {
            // map named configurations onto canonical config indices
            std::vector<const VariableDecl*> pvars;
            for (const auto& p : parent_names) {
                const VariableDecl* pv = doc_.find_variable(p);
                if (!pv) fail_semantic(line, col, "cpt parent " + p + " is not declared");
                pvars.push_back(pv);
            }
            // sorted-by-declaration-index parent order drives the config rank
            std::vector<std::size_t> order(pvars.size());
            for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return var_index(pvars[a]->name) < var_index(pvars[b]->name);
            });
            int nconf = 1;
            for (const auto* pv : pvars) nconf *= static_cast<int>(pv->values.size());
            c.columns.assign(nconf, {});
            while (!at_punct('}')) {
                int eline = cur().line, ecol = cur().column;
                auto asg = assignment_list();
                expect_punct(':');
                auto probs = number_list();
                int cfg = 0;
                std::vector<bool> seen(pvars.size(), false);
                int rank = 0;
                // row-major over sorted parent ids
                for (std::size_t k = 0; k < order.size(); ++k) {
                    const auto* pv = pvars[order[k]];
                    int value = -1;
                    for (const auto& [an, av] : asg) {
                        if (an == pv->name) {
                            value = value_index(pv, av, eline, ecol);
                            seen[order[k]] = true;
                        }
                    }
                    if (value < 0) fail_semantic(eline, ecol, "configuration misses parent " + pv->name);
                    rank = rank * static_cast<int>(pv->values.size()) + value;
                }
                if (asg.size() != pvars.size())
                    fail_semantic(eline, ecol, "configuration must assign each parent exactly once");
                cfg = rank;
                if (!c.columns[cfg].empty()) fail_semantic(eline, ecol, "duplicate configuration");
                c.columns[cfg] = std::move(probs);
                skip_separators();
            }
            for (int k = 0; k < nconf; ++k)
                if (c.columns[k].empty()) fail_semantic(line, col, "cpt " + c.node + " misses a configuration");
        }
        skip_separators();
        expect_punct('}');
        for (const auto& colv : c.columns) {
            if (colv.size() != var->values.size())
                fail_semantic(line, col, "cpt " + c.node + " column arity mismatch");
            double s = 0.0;
            for (double x : colv) s += x;
            if (std::abs(s - 1.0) > 1e-9) fail_semantic(line, col, "cpt " + c.node + " column not normalized");
        }
        for (const auto& prev : doc_.cpts)
            if (prev.node == c.node) fail_semantic(line, col, "duplicate cpt for " + c.node);
        doc_.cpts.push_back(std::move(c));
    }

    void credal_decl() {
        int line = cur().line, col = cur().column;
        CredalDecl d;
        d.node = expect_word("variable name");
        if (!doc_.find_variable(d.node)) fail_semantic(line, col, "credal block for unknown variable " + d.node);
        expect_punct('{');
        skip_separators();
        bool has_config_blocks = false;
        CredalParams top;
        std::vector<std::pair<int, CredalParams>> configs; // (config index, params)
        while (!at_punct('}')) {
            std::string key = expect_word("credal entry");
            if (key == "class") {
                expect_punct(':');
                d.cls = expect_word("class tag");
            } else if (key == "columns") {
                expect_punct(':');
                std::string mode = expect_word("columns mode");
                if (mode == "joint")
                    d.columns = ColumnsMode::joint;
                else if (mode == "separate")
                    d.columns = ColumnsMode::separate;
                else
                    fail_semantic(line, col, "unknown columns mode " + mode);
            } else if (key == "config") {
                has_config_blocks = true;
                int eline = cur().line, ecol = cur().column;
                auto asg = assignment_list();
                int cfg = config_rank(d.node, asg, eline, ecol);
                expect_punct('{');
                skip_separators();
                CredalParams p;
                while (!at_punct('}')) {
                    credal_param_entry(p, line, col);
                    skip_separators();
                }
                expect_punct('}');
                configs.push_back({cfg, std::move(p)});
            } else {
                credal_param_entry_key(top, key, line, col);
            }
            skip_separators();
        }
        expect_punct('}');
        if (d.cls.empty()) fail_semantic(line, col, "credal block needs a class tag");
        if (d.cls != "vertices" && d.cls != "eps-contaminated" && d.cls != "belief-function" &&
            d.cls != "density-bounded" && d.cls != "total-variation" && d.cls != "density-ratio")
            fail_semantic(line, col, "unknown credal class " + d.cls);
        if (has_config_blocks) {
            auto parent_names = doc_.parents.count(d.node) ? doc_.parents[d.node] : std::vector<std::string>{};
            int nconf = 1;
            for (const auto& p : parent_names) nconf *= static_cast<int>(doc_.find_variable(p)->values.size());
            d.per_config.assign(nconf, {});
            std::vector<bool> seen(nconf, false);
            for (auto& [cfg, p] : configs) {
                if (seen[cfg]) fail_semantic(line, col, "duplicate config block");
                seen[cfg] = true;
                d.per_config[cfg] = std::move(p);
            }
            for (int k = 0; k < nconf; ++k)
                if (!seen[k]) fail_semantic(line, col, "credal " + d.node + " misses a configuration block");
        } else {
            d.per_config.push_back(std::move(top));
        }
        for (const auto& prev : doc_.credals)
            if (prev.node == d.node) fail_semantic(line, col, "duplicate credal block for " + d.node);
        doc_.credals.push_back(std::move(d));
    }

    void credal_param_entry(CredalParams& p, int line, int col) {
        std::string key = expect_word("credal entry");
        credal_param_entry_key(p, key, line, col);
    }

    void credal_param_entry_key(CredalParams& p, const std::string& key, int line, int col) {
        if (key == "base" || key == "center") {
            expect_punct(':');
            p.base = number_list();
        } else if (key == "eps") {
            expect_punct(':');
            p.eps = expect_number();
        } else if (key == "lower" || key == "lower-measure") {
            expect_punct(':');
            p.lower = number_list();
        } else if (key == "upper" || key == "upper-measure") {
            expect_punct(':');
            p.upper = number_list();
        } else if (key == "mass") {
            auto names = name_list();
            expect_punct(':');
            double m = expect_number();
            p.masses.push_back({std::move(names), m});
        } else if (!key.empty() && key[0] == 'v') {
            expect_punct(':');
            p.vertices.push_back(number_list());
        } else {
            fail_semantic(line, col, "unknown credal entry '" + key + "'");
        }
    }

    void utility_decl() {
        int line = cur().line, col = cur().column;
        UtilityDecl u;
        u.name = expect_word("utility name");
        expect_punct('{');
        skip_separators();
        while (!at_punct('}')) {
            std::string key = expect_word("utility entry");
            expect_punct(':');
            if (key == "targets")
                u.targets = name_list();
            else if (key == "values")
                u.values = number_list();
            else
                fail_semantic(line, col, "unknown utility entry '" + key + "'");
            skip_separators();
        }
        expect_punct('}');
        if (u.targets.empty()) fail_semantic(line, col, "utility " + u.name + " needs targets");
        std::size_t want = 1;
        for (const auto& tname : u.targets) {
            const VariableDecl* tv = doc_.find_variable(tname);
            if (!tv) fail_semantic(line, col, "utility target " + tname + " is not declared");
            want *= tv->values.size();
        }
        if (u.values.size() != want) fail_semantic(line, col, "utility " + u.name + " value table size mismatch");
        for (const auto& prev : doc_.utilities)
            if (prev.name == u.name) fail_semantic(line, col, "duplicate utility " + u.name);
        doc_.utilities.push_back(std::move(u));
    }

    int var_index(const std::string& name) const {
        for (std::size_t k = 0; k < doc_.variables.size(); ++k)
            if (doc_.variables[k].name == name) return static_cast<int>(k);
        return -1;
    }

    int value_index(const VariableDecl* v, const std::string& value, int line, int col) const {
        for (std::size_t k = 0; k < v->values.size(); ++k)
            if (v->values[k] == value) return static_cast<int>(k);
        fail_semantic(line, col, "unknown value " + value + " for variable " + v->name);
    }

    int config_rank(const std::string& node, const std::vector<std::pair<std::string, std::string>>& asg,
                    int line, int col) {
        auto parent_names = doc_.parents.count(node) ? doc_.parents[node] : std::vector<std::string>{};
        if (parent_names.empty()) fail_semantic(line, col, "config block on a root credal node");
        std::vector<const VariableDecl*> pvars;
        for (const auto& p : parent_names) pvars.push_back(doc_.find_variable(p));
        std::vector<std::size_t> order(pvars.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return var_index(pvars[a]->name) < var_index(pvars[b]->name);
        });
        int rank = 0;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const auto* pv = pvars[order[k]];
            int value = -1;
            for (const auto& [an, av] : asg)
                if (an == pv->name) value = value_index(pv, av, line, col);
            if (value < 0) fail_semantic(line, col, "config misses parent " + pv->name);
            rank = rank * static_cast<int>(pv->values.size()) + value;
        }
        if (asg.size() != pvars.size()) fail_semantic(line, col, "config must assign each parent exactly once");
        return rank;
    }

    void run_semantic_checks() {
        for (const auto& [node, plist] : doc_.parents) {
            if (!doc_.find_variable(node)) fail_semantic(1, 1, "parents for unknown variable " + node);
            for (const auto& p : plist)
                if (!doc_.find_variable(p)) fail_semantic(1, 1, "unknown parent " + p + " of " + node);
        }
        for (const auto& v : doc_.variables) {
            bool has_cpt = false, has_credal = false;
            for (const auto& c : doc_.cpts) has_cpt = has_cpt || c.node == v.name;
            for (const auto& c : doc_.credals) has_credal = has_credal || c.node == v.name;
            if (!has_cpt && !has_credal)
                fail_semantic(1, 1, "variable " + v.name + " has neither a cpt nor a credal block");
        }
    }
};

} // namespace detail

inline NetworkDocument parse_network_file(const std::string& text) {
    detail::DocParser p(text);
    return p.parse();
}

// ---- document -> runnable model --------------------------------------------

struct Model {
    DiscreteNetwork net;
    std::vector<CredalSpec> specs;
    std::map<std::string, UtilityFunction> utilities;
};

inline Model build_model(const NetworkDocument& doc) {
    Model m;
    std::map<std::string, int> index;
    for (std::size_t k = 0; k < doc.variables.size(); ++k) {
        const auto& v = doc.variables[k];
        index[v.name] = static_cast<int>(k);
        m.net.variables.push_back({static_cast<int>(k), v.name, static_cast<int>(v.values.size())});
    }
    m.net.parents.resize(doc.variables.size());
    for (const auto& [node, plist] : doc.parents)
        for (const auto& p : plist) m.net.parents[index.at(node)].push_back(index.at(p));
    m.net.cpts.resize(doc.variables.size());

    for (const auto& c : doc.cpts) m.net.cpts[index.at(c.node)] = make_cpt(m.net, index.at(c.node), c.columns);

    for (const auto& d : doc.credals) {
        const int node = index.at(d.node);
        const int card = m.net.variables[node].cardinality;
        const int nconf = m.net.num_parent_configs(node);
        CredalSpec spec;
        spec.node = node;
        spec.mode = d.columns;
        auto value_mask = [&](const std::vector<std::string>& names) {
            std::uint32_t mask = 0;
            const auto& vals = doc.variables[node].values;
            for (const auto& n : names) {
                bool found = false;
                for (std::size_t k = 0; k < vals.size(); ++k)
                    if (vals[k] == n) {
                        mask |= (1u << k);
                        found = true;
                    }
                if (!found) throw std::invalid_argument("unknown value " + n + " in belief mass for " + d.node);
            }
            return mask;
        };
        auto column_from_params = [&](const CredalParams& p) {
            if (d.cls == "vertices") {
                spec.column_sets.push_back(make_polytope(card, p.vertices));
                spec.column_constraints.push_back({});
            } else if (d.cls == "eps-contaminated") {
                spec.column_sets.push_back(vertices_from_eps_contamination(p.base, p.eps));
                spec.column_constraints.push_back({});
            } else if (d.cls == "belief-function") {
                std::map<std::uint32_t, double> masses;
                for (const auto& [names, mass] : p.masses) masses[value_mask(names)] += mass;
                spec.column_sets.push_back(vertices_from_belief_function(card, masses));
                spec.column_constraints.push_back({});
            } else if (d.cls == "density-bounded") {
                auto cs = constraints_from_density_bounds(p.lower, p.upper);
                spec.column_sets.push_back(enumerate_polytope_vertices(cs));
                spec.column_constraints.push_back(std::move(cs));
            } else if (d.cls == "total-variation") {
                auto cs = constraints_from_total_variation(p.base, p.eps);
                spec.column_sets.push_back(enumerate_polytope_vertices(cs));
                spec.column_constraints.push_back(std::move(cs));
            } else { // density-ratio
                auto cs = constraints_from_density_ratio(p.lower, p.upper);
                spec.column_sets.push_back(enumerate_polytope_vertices(cs));
                spec.column_constraints.push_back(std::move(cs));
            }
            if (spec.column_sets.back().vertices.empty())
                throw std::invalid_argument("credal set for " + d.node + " is empty");
        };
        if (d.columns == ColumnsMode::joint) {
            if (d.cls != "vertices")
                throw std::invalid_argument("joint columns require explicit vertices on " + d.node);
            spec.table_vertices = d.per_config.at(0).vertices;
        } else if (static_cast<int>(d.per_config.size()) == nconf) {
            for (const auto& p : d.per_config) column_from_params(p);
        } else if (d.per_config.size() == 1 && nconf == 1) {
            column_from_params(d.per_config[0]);
        } else {
            throw std::invalid_argument("credal " + d.node + " must specify every parent configuration");
        }
        // install a representative CPT so the bare network is a valid precise net
        if (m.net.cpts[node].values.empty()) {
            std::vector<std::vector<double>> cols;
            if (d.columns == ColumnsMode::joint) {
                for (int cfg = 0; cfg < nconf; ++cfg) {
                    std::vector<double> col(card);
                    for (int v = 0; v < card; ++v) col[v] = spec.table_vertices[0][cfg * card + v];
                    cols.push_back(std::move(col));
                }
            } else {
                for (int cfg = 0; cfg < nconf; ++cfg) cols.push_back(spec.column_sets[cfg].vertices[0]);
            }
            m.net.cpts[node] = make_cpt(m.net, node, cols);
        }
        m.specs.push_back(std::move(spec));
    }
    for (const auto& u : doc.utilities) {
        UtilityFunction f;
        for (const auto& tname : u.targets) f.targets.push_back(index.at(tname));
        f.values = u.values;
        m.utilities[u.name] = std::move(f);
    }
    return m;
}

// ---- canonical serialization ------------------------------------------------

inline std::string serialize_document(const NetworkDocument& doc) {
    std::ostringstream os;
    auto numbers = [&](const std::vector<double>& v) {
        std::string s;
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (k) s += ", ";
            s += detail::format_double(v[k]);
        }
        return s;
    };
    os << "version: " << doc.version << "\n";
    for (const auto& v : doc.variables) {
        os << "variable " << v.name << " { values: ";
        for (std::size_t k = 0; k < v.values.size(); ++k) os << (k ? ", " : "") << v.values[k];
        os << " }\n";
    }
    for (const auto& v : doc.variables) {
        auto it = doc.parents.find(v.name);
        if (it == doc.parents.end() || it->second.empty()) continue;
        os << "parents " << v.name << ": ";
        for (std::size_t k = 0; k < it->second.size(); ++k) os << (k ? ", " : "") << it->second[k];
        os << "\n";
    }
    auto config_label = [&](const std::string& node, int cfg) {
        // canonical labels follow the sorted-parent row-major rank
        auto it = doc.parents.find(node);
        std::vector<const VariableDecl*> pvars;
        for (const auto& p : it->second) pvars.push_back(doc.find_variable(p));
        std::sort(pvars.begin(), pvars.end(), [&](const VariableDecl* a, const VariableDecl* b) {
            auto pos = [&](const std::string& n) {
                for (std::size_t k = 0; k < doc.variables.size(); ++k)
                    if (doc.variables[k].name == n) return k;
                return std::size_t{0};
            };
            return pos(a->name) < pos(b->name);
        });
        std::vector<int> radii;
        for (const auto* pv : pvars) radii.push_back(static_cast<int>(pv->values.size()));
        std::string label;
        for (std::size_t k = pvars.size(); k-- > 0;) {
            int val = cfg % radii[k];
            cfg /= radii[k];
            std::string piece = pvars[k]->name + "=" + pvars[k]->values[val];
            label = piece + (label.empty() ? "" : ", " + label);
        }
        return label;
    };
    for (const auto& v : doc.variables) {
        const CptDecl* c = nullptr;
        for (const auto& cd : doc.cpts)
            if (cd.node == v.name) c = &cd;
        if (!c) continue;
        os << "cpt " << c->node << " { ";
        auto it = doc.parents.find(c->node);
        bool root = it == doc.parents.end() || it->second.empty();
        if (root) {
            os << numbers(c->columns[0]);
        } else {
            for (std::size_t cfg = 0; cfg < c->columns.size(); ++cfg) {
                if (cfg) os << "; ";
                os << config_label(c->node, static_cast<int>(cfg)) << ": " << numbers(c->columns[cfg]);
            }
        }
        os << " }\n";
    }
    for (const auto& d : doc.credals) {
        os << "credal " << d.node << " { class: " << d.cls;
        if (d.columns == ColumnsMode::joint) os << "; columns: joint";
        auto params = [&](std::ostream& out, const CredalParams& p) {
            if (d.cls == "vertices") {
                for (std::size_t k = 0; k < p.vertices.size(); ++k)
                    out << "; v" << (k + 1) << ": " << numbers(p.vertices[k]);
            } else if (d.cls == "eps-contaminated") {
                out << "; base: " << numbers(p.base) << "; eps: " << detail::format_double(p.eps);
            } else if (d.cls == "belief-function") {
                for (const auto& [names, mass] : p.masses) {
                    out << "; mass ";
                    for (std::size_t k = 0; k < names.size(); ++k) out << (k ? ", " : "") << names[k];
                    out << ": " << detail::format_double(mass);
                }
            } else if (d.cls == "density-bounded") {
                out << "; lower: " << numbers(p.lower) << "; upper: " << numbers(p.upper);
            } else if (d.cls == "total-variation") {
                out << "; center: " << numbers(p.base) << "; eps: " << detail::format_double(p.eps);
            } else {
                out << "; lower-measure: " << numbers(p.lower) << "; upper-measure: " << numbers(p.upper);
            }
        };
        auto it = doc.parents.find(d.node);
        bool root = it == doc.parents.end() || it->second.empty();
        if (d.columns == ColumnsMode::separate && !root && d.per_config.size() > 1) {
            for (std::size_t cfg = 0; cfg < d.per_config.size(); ++cfg) {
                std::ostringstream body;
                params(body, d.per_config[cfg]);
                std::string inner = body.str();
                if (inner.size() > 2 && inner[0] == ';') inner = inner.substr(2);
                os << "; config " << config_label(d.node, static_cast<int>(cfg)) << " { " << inner << " }";
            }
        } else {
            params(os, d.per_config[0]);
        }
        os << " }\n";
    }
    for (const auto& u : doc.utilities) {
        os << "utility " << u.name << " { targets: ";
        for (std::size_t k = 0; k < u.targets.size(); ++k) os << (k ? ", " : "") << u.targets[k];
        os << "; values: " << numbers(u.values) << " }\n";
    }
    return os.str();
}

// ---- JSON mirror ------------------------------------------------------------

inline nlohmann::json document_to_json(const NetworkDocument& doc) {
    nlohmann::json j;
    j["version"] = doc.version;
    j["variables"] = nlohmann::json::array();
    for (const auto& v : doc.variables) j["variables"].push_back({{"name", v.name}, {"values", v.values}});
    j["parents"] = nlohmann::json::object();
    for (const auto& [node, plist] : doc.parents)
        if (!plist.empty()) j["parents"][node] = plist;
    j["cpts"] = nlohmann::json::object();
    for (const auto& c : doc.cpts) j["cpts"][c.node] = c.columns;
    j["credals"] = nlohmann::json::array();
    for (const auto& d : doc.credals) {
        nlohmann::json jd;
        jd["node"] = d.node;
        jd["class"] = d.cls;
        jd["columns"] = d.columns == ColumnsMode::joint ? "joint" : "separate";
        jd["params"] = nlohmann::json::array();
        for (const auto& p : d.per_config) {
            nlohmann::json jp;
            if (!p.vertices.empty()) jp["vertices"] = p.vertices;
            if (!p.base.empty()) jp["base"] = p.base;
            if (p.eps != 0.0) jp["eps"] = p.eps;
            if (!p.lower.empty()) jp["lower"] = p.lower;
            if (!p.upper.empty()) jp["upper"] = p.upper;
            if (!p.masses.empty()) {
                jp["masses"] = nlohmann::json::array();
                for (const auto& [names, mass] : p.masses) jp["masses"].push_back({{"subset", names}, {"mass", mass}});
            }
            jd["params"].push_back(std::move(jp));
        }
        j["credals"].push_back(std::move(jd));
    }
    j["utilities"] = nlohmann::json::array();
    for (const auto& u : doc.utilities)
        j["utilities"].push_back({{"name", u.name}, {"targets", u.targets}, {"values", u.values}});
    return j;
}

inline NetworkDocument document_from_json(const nlohmann::json& j) {
    NetworkDocument doc;
    doc.version = j.value("version", 1);
    for (const auto& v : j.at("variables"))
        doc.variables.push_back({v.at("name").get<std::string>(), v.at("values").get<std::vector<std::string>>()});
    if (j.contains("parents"))
        for (auto it = j["parents"].begin(); it != j["parents"].end(); ++it)
            doc.parents[it.key()] = it.value().get<std::vector<std::string>>();
    if (j.contains("cpts"))
        for (auto it = j["cpts"].begin(); it != j["cpts"].end(); ++it)
            doc.cpts.push_back({it.key(), it.value().get<std::vector<std::vector<double>>>()});
    if (j.contains("credals"))
        for (const auto& jd : j["credals"]) {
            CredalDecl d;
            d.node = jd.at("node").get<std::string>();
            d.cls = jd.at("class").get<std::string>();
            d.columns = jd.value("columns", "separate") == "joint" ? ColumnsMode::joint : ColumnsMode::separate;
            for (const auto& jp : jd.at("params")) {
                CredalParams p;
                if (jp.contains("vertices")) p.vertices = jp["vertices"].get<std::vector<std::vector<double>>>();
                if (jp.contains("base")) p.base = jp["base"].get<std::vector<double>>();
                if (jp.contains("eps")) p.eps = jp["eps"].get<double>();
                if (jp.contains("lower")) p.lower = jp["lower"].get<std::vector<double>>();
                if (jp.contains("upper")) p.upper = jp["upper"].get<std::vector<double>>();
                if (jp.contains("masses"))
                    for (const auto& jm : jp["masses"])
                        p.masses.push_back({jm.at("subset").get<std::vector<std::string>>(), jm.at("mass").get<double>()});
                d.per_config.push_back(std::move(p));
            }
            doc.credals.push_back(std::move(d));
        }
    if (j.contains("utilities"))
        for (const auto& ju : j["utilities"])
            doc.utilities.push_back({ju.at("name").get<std::string>(), ju.at("targets").get<std::vector<std::string>>(),
                                     ju.at("values").get<std::vector<double>>()});
    // reuse the text path's semantic checks
    return parse_network_file(serialize_document(doc));
}

// ---- result serialization ---------------------------------------------------

enum class ResultFormat { plain, json, csv };

struct QueryRecord {
    std::string target; // "x=x0", or the utility name
    BoundsResult bounds;
    double tol = 0.0;
    // iterative variance cross-check, present for variance queries
    std::optional<double> iterative_lower, iterative_upper;
};

inline std::string serialize_results(const std::vector<QueryRecord>& records, ResultFormat fmt) {
    std::ostringstream os;
    if (fmt == ResultFormat::plain) {
        char buf[128];
        for (const auto& r : records) {
            os << r.target << " method=" << r.bounds.method << "\n";
            std::snprintf(buf, sizeof(buf), "lower=%.6f upper=%.6f", r.bounds.lower, r.bounds.upper);
            os << buf << "\n";
            if (r.bounds.skipped_zero_mass > 0)
                os << "zero-mass vertices skipped: " << r.bounds.skipped_zero_mass << "\n";
        }
        return os.str();
    }
    if (fmt == ResultFormat::csv) {
        os << "target,method,lower,upper,evaluations,skipped_zero_mass\n";
        for (const auto& r : records) {
            os << r.target << ',' << r.bounds.method << ',' << detail::format_double(r.bounds.lower) << ','
               << detail::format_double(r.bounds.upper) << ',' << r.bounds.evaluations << ','
               << r.bounds.skipped_zero_mass << "\n";
        }
        return os.str();
    }
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json e;
        e["target"] = r.target;
        e["method"] = r.bounds.method;
        e["lower"] = r.bounds.lower;
        e["upper"] = r.bounds.upper;
        e["argmin"] = r.bounds.argmin;
        e["argmax"] = r.bounds.argmax;
        e["evaluations"] = r.bounds.evaluations;
        e["skipped_zero_mass"] = r.bounds.skipped_zero_mass;
        if (r.tol > 0) e["tol"] = r.tol;
        if (r.iterative_lower) e["iterative_lower"] = *r.iterative_lower;
        if (r.iterative_upper) e["iterative_upper"] = *r.iterative_upper;
        j.push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

} // namespace credal
