// Command-line front end: query/validate/sweep/oracle over credal network
// documents. Exit codes: 0 success, 1 usage error, 2 input error,
// 3 computation error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "credal/credal.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInput = 2;
constexpr int kCompute = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string net_path;
    std::string target;
    std::string utility;
    bool variance = false;
    std::vector<std::string> evidence;
    std::string method = "enum";
    double tol = 1e-6;
    std::uint64_t seed = 0;
    int restarts = 8;
    std::string format = "plain";
    std::string dump_lp_path;
    // sweep
    std::string param;
    double from = 0.0, to = 0.0;
    int steps = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

credal::NetworkDocument load_document(const std::string& path) {
    std::string text = read_file(path);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
        return credal::document_from_json(nlohmann::json::parse(text));
    return credal::parse_network_file(text);
}

credal::QueryRequest request_from(const Options& opt) {
    credal::QueryRequest req;
    req.target = opt.target;
    req.utility = opt.utility;
    req.variance = opt.variance;
    req.method = credal::method_from_string(opt.method);
    req.tol = opt.tol;
    req.seed = opt.seed;
    req.restarts = opt.restarts;
    for (const auto& item : opt.evidence) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw InputError("evidence must look like VAR=VALUE: " + item);
        req.evidence[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return req;
}

credal::ResultFormat format_of(const std::string& name) {
    if (name == "plain") return credal::ResultFormat::plain;
    if (name == "json") return credal::ResultFormat::json;
    if (name == "csv") return credal::ResultFormat::csv;
    throw InputError("unknown format " + name);
}

void maybe_dump_lp(const Options& opt, const credal::NetworkDocument& doc, const credal::Model& model,
                   const credal::QueryRequest& req) {
    if (opt.dump_lp_path.empty() || req.method != credal::Method::ne_lp) return;
    auto eq = req.target.find('=');
    std::string var = eq == std::string::npos ? req.target : req.target.substr(0, eq);
    const auto* decl = doc.find_variable(var);
    if (!decl) return;
    int a = 0;
    if (eq != std::string::npos)
        for (std::size_t k = 0; k < decl->values.size(); ++k)
            if (decl->values[k] == req.target.substr(eq + 1)) a = static_cast<int>(k);
    auto e = credal::evidence_from_names(doc, model, req.evidence);
    auto fp = credal::build_ne_program(model.net, model.specs, model.net.var_by_name(var), a, e);
    std::ofstream out(opt.dump_lp_path);
    out << credal::dump_lp(credal::charnes_cooper(fp, false)) << "\n"
        << credal::dump_lp(credal::charnes_cooper(fp, true));
}

int cmd_query(const Options& opt) {
    auto doc = load_document(opt.net_path);
    auto model = credal::build_model(doc);
    auto violations = credal::validate_network(model.net);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "invalid network: " << v << "\n";
        return kInput;
    }
    auto req = request_from(opt);
    maybe_dump_lp(opt, doc, model, req);
    auto records = credal::run_query(doc, model, req);
    std::cout << credal::serialize_results(records, format_of(opt.format));
    return kOk;
}

int cmd_validate(const Options& opt) {
    credal::NetworkDocument doc;
    try {
        doc = load_document(opt.net_path);
    } catch (const credal::ParseError& e) {
        std::cerr << opt.net_path << ":" << e.what() << "\n";
        return kInput;
    }
    credal::Model model;
    try {
        model = credal::build_model(doc);
    } catch (const std::exception& e) {
        std::cerr << "invalid model: " << e.what() << "\n";
        return kInput;
    }
    auto violations = credal::validate_network(model.net);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << v << "\n";
        return kInput;
    }
    std::cout << "ok: " << model.net.num_vars() << " variables, " << model.specs.size()
              << " credal nodes\n";
    return kOk;
}

int cmd_sweep(const Options& opt) {
    auto doc = load_document(opt.net_path);
    auto dot = opt.param.find('.');
    if (dot == std::string::npos) throw InputError("--param must look like NODE.eps");
    std::string node = opt.param.substr(0, dot), key = opt.param.substr(dot + 1);
    if (key != "eps") throw InputError("only the eps parameter supports sweeps");
    credal::CredalDecl* decl = nullptr;
    for (auto& d : doc.credals)
        if (d.node == node) decl = &d;
    if (!decl) throw InputError("no credal block for node " + node);
    if (decl->cls != "eps-contaminated" && decl->cls != "total-variation")
        throw InputError("eps sweeps need an eps-contaminated or total-variation class on " + node);
    if (opt.steps < 1) throw InputError("--steps must be at least 1");

    std::ostringstream os;
    os << "param,target,method,lower,upper\n";
    for (int s = 0; s < opt.steps; ++s) {
        double eps = opt.steps == 1 ? opt.from : opt.from + (opt.to - opt.from) * s / (opt.steps - 1);
        for (auto& p : decl->per_config) p.eps = eps;
        auto model = credal::build_model(doc);
        auto records = credal::run_query(doc, model, request_from(opt));
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6g", eps);
        for (const auto& r : records)
            os << buf << ',' << r.target << ',' << r.bounds.method << ',' << r.bounds.lower << ','
               << r.bounds.upper << "\n";
    }
    std::cout << os.str();
    return kOk;
}

int cmd_oracle(const Options& opt) {
    auto doc = load_document(opt.net_path);
    auto model = credal::build_model(doc);
    auto req = request_from(opt);
    credal::QueryRequest exact_req = req;
    exact_req.method = credal::Method::enumeration;
    if (req.method == credal::Method::enumeration)
        req.method = credal::Method::joint; // cross-check the checker itself
    auto exact = credal::run_query(doc, model, exact_req);
    auto got = credal::run_query(doc, model, req);
    const double tol = 1e-6;
    bool ok = exact.size() == got.size();
    for (std::size_t k = 0; ok && k < exact.size(); ++k) {
        bool pass;
        if (req.method == credal::Method::ne_lp) {
            // the extension never tightens past the vertex-combination bounds
            pass = got[k].bounds.lower <= exact[k].bounds.lower + tol &&
                   got[k].bounds.upper >= exact[k].bounds.upper - tol;
        } else {
            pass = std::abs(got[k].bounds.lower - exact[k].bounds.lower) <= tol &&
                   std::abs(got[k].bounds.upper - exact[k].bounds.upper) <= tol;
        }
        std::cout << exact[k].target << " exact=[" << exact[k].bounds.lower << ", "
                  << exact[k].bounds.upper << "] " << opt.method << "=[" << got[k].bounds.lower << ", "
                  << got[k].bounds.upper << "] " << (pass ? "MATCH" : "MISMATCH") << "\n";
        ok = ok && pass;
    }
    return ok ? kOk : kCompute;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lower/upper posterior bounds for credal networks"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool needs_target) {
        sub->add_option("--net", opt.net_path, "network document (.cn text or .json)")->required();
        if (needs_target) {
            sub->add_option("--target", opt.target, "query variable, VAR or VAR=VALUE");
            sub->add_option("--evidence", opt.evidence, "observed VAR=VALUE (repeatable)");
            sub->add_option("--method", opt.method,
                            "enum | joint | gradient | qem | anneal | lavine | ne-lp");
            sub->add_option("--tol", opt.tol, "bisection tolerance for lavine");
            sub->add_option("--seed", opt.seed, "seed for randomized methods");
            sub->add_option("--restarts", opt.restarts, "restarts for gradient/qem");
        }
    };

    auto* query = app.add_subcommand("query", "compute posterior bounds");
    add_common(query, true);
    query->add_option("--utility", opt.utility, "expected-utility query by utility name");
    query->add_flag("--variance", opt.variance, "variance bounds for the utility");
    query->add_option("--format", opt.format, "plain | json | csv");
    query->add_option("--dump-lp", opt.dump_lp_path, "write the ne-lp programs to a file");

    auto* validate = app.add_subcommand("validate", "parse and validate a document");
    add_common(validate, false);

    auto* sweep = app.add_subcommand("sweep", "vary a credal parameter and emit csv");
    add_common(sweep, true);
    sweep->add_option("--param", opt.param, "parameter to vary, NODE.eps")->required();
    sweep->add_option("--from", opt.from, "first parameter value")->required();
    sweep->add_option("--to", opt.to, "last parameter value")->required();
    sweep->add_option("--steps", opt.steps, "number of sweep points")->required();

    auto* oracle = app.add_subcommand("oracle", "cross-check a method against enumeration");
    add_common(oracle, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (app.got_subcommand(query)) return cmd_query(opt);
        if (app.got_subcommand(validate)) return cmd_validate(opt);
        if (app.got_subcommand(sweep)) return cmd_sweep(opt);
        if (app.got_subcommand(oracle)) return cmd_oracle(opt);
        return kUsage;
    } catch (const credal::ParseError& e) {
        std::cerr << opt.net_path << ":" << e.what() << "\n";
        return kInput;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const std::domain_error& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return kCompute;
    } catch (const std::exception& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return kCompute;
    }
}
