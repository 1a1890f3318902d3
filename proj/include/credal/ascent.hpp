#pragma once

// Interior-point approximations to the vertex-combination bounds: the
// posterior ratio is treated as a likelihood in the selector weights and
// pushed uphill by projected gradient steps or an expectation-maximization
// loop, with combinatorial simulated annealing as a discrete baseline.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "credal/inference.hpp"
#include "credal/transform.hpp"

namespace credal {

// One weight distribution per selector variable, in transparents order.
struct ThetaVector {
    std::vector<std::vector<double>> theta;

    static ThetaVector uniform(const TransformedNetwork& t) {
        ThetaVector v;
        for (const auto& tv : t.transparents)
            v.theta.push_back(std::vector<double>(tv.arity, 1.0 / tv.arity));
        return v;
    }

    static ThetaVector random(const TransformedNetwork& t, std::mt19937_64& rng) {
        ThetaVector v;
        std::exponential_distribution<double> expd(1.0);
        for (const auto& tv : t.transparents) {
            std::vector<double> w(tv.arity);
            double s = 0.0;
            for (double& x : w) s += (x = expd(rng) + 1e-12);
            for (double& x : w) x /= s;
            v.theta.push_back(std::move(w));
        }
        return v;
    }
};

struct AscentOptions {
    bool maximize = true;
    int max_steps = 10000;   // gradient steps per run
    int max_outer = 500;     // EM iterations per run
    double tol = 1e-10;      // stop when the objective gain drops below this
    double interior_floor = 1e-9;
    int restarts = 8;        // first start is uniform, the rest are random
    std::uint64_t seed = 0;
};

struct AscentReport {
    ThetaVector final_theta;
    std::vector<double> trajectory; // objective at accepted steps of the best run
    bool converged = false;
    bool maximized = true;
    long steps = 0; // accepted steps across the best run
    double best_log = -std::numeric_limits<double>::infinity();
    double best_bound = 0.0; // exp of the best log-ratio
};

namespace detail {

inline void check_theta(const TransformedNetwork& t, const ThetaVector& th, double floor_min) {
    if (th.theta.size() != t.transparents.size())
        throw std::invalid_argument("theta must cover every selector variable");
    for (std::size_t k = 0; k < th.theta.size(); ++k) {
        if (static_cast<int>(th.theta[k].size()) != t.transparents[k].arity)
            throw std::invalid_argument("theta arity mismatch");
        for (double v : th.theta[k])
            // renormalizing after the floor clip may shave a relative epsilon off
            if (!(v >= floor_min * 0.5)) throw std::invalid_argument("theta is not strictly interior");
    }
}

// Euclidean projection onto the simplex, then an interior floor.
inline std::vector<double> project_simplex(std::vector<double> v, double floor_min) {
    std::vector<double> s = v;
    std::sort(s.begin(), s.end(), std::greater<double>());
    double cum = 0.0, tau = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        cum += s[k];
        double t = (cum - 1.0) / static_cast<double>(k + 1);
        if (s[k] - t > 0.0) tau = t;
    }
    for (double& x : v) x = std::max(0.0, x - tau);
    // re-open the interior so the ratio gradients stay defined
    double fsum = 0.0;
    for (double& x : v) fsum += (x = std::max(x, floor_min));
    for (double& x : v) x /= fsum;
    return v;
}

} // namespace detail

// log p(q=a, e) - log p(e) with the selector priors replaced by theta.
// A zero numerator yields -infinity; zero evidence mass is an error.
inline double log_posterior_likelihood(const TransformedNetwork& t, const ThetaVector& th, int q, int a,
                                       const Evidence& e) {
    if (th.theta.size() != t.transparents.size())
        throw std::invalid_argument("theta must cover every selector variable");
    auto net = net_with_priors(t, th.theta);
    auto m = detail::query_mass(net, q, a, e);
    if (m.den <= 0.0) throw std::domain_error("evidence has zero probability under theta");
    if (m.num <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(m.num) - std::log(m.den);
}

// Per-component derivative of the log posterior ratio:
// [p(z=j | q=a, e) - p(z=j | e)] / theta_ij.
inline std::vector<std::vector<double>> gradient_theta(const TransformedNetwork& t, const ThetaVector& th,
                                                       int q, int a, const Evidence& e,
                                                       double interior_floor = 1e-9) {
    detail::check_theta(t, th, interior_floor);
    auto net = net_with_priors(t, th.theta);
    Evidence ea = e;
    ea[q] = a;
    std::vector<std::vector<double>> grad(th.theta.size());
    for (std::size_t k = 0; k < t.transparents.size(); ++k) {
        int z = t.transparents[k].id;
        Factor fa = eliminate(net, {z}, ea);
        Factor fe = eliminate(net, {z}, e);
        double za = fa.sum(), ze = fe.sum();
        if (za <= 0.0) throw std::domain_error("numerator event has zero probability under theta");
        if (ze <= 0.0) throw std::domain_error("evidence has zero probability under theta");
        grad[k].resize(th.theta[k].size());
        for (std::size_t j = 0; j < grad[k].size(); ++j)
            grad[k][j] = (fa.values[j] / za - fe.values[j] / ze) / th.theta[k][j];
    }
    return grad;
}

namespace detail {

struct SignedEval {
    double raw = 0.0;    // L
    double signedv = 0.0; // L or -L depending on direction
};

} // namespace detail

// Projected gradient ascent on the log posterior ratio (descent when
// opts.maximize is false). Multi-start; the report describes the best run.
inline AscentReport projected_gradient_ascent(const TransformedNetwork& t, int q, int a, const Evidence& e,
                                              const AscentOptions& opts = {}) {
    const double dir = opts.maximize ? 1.0 : -1.0;
    AscentReport best;
    best.maximized = opts.maximize;
    double best_signed = -std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(opts.seed);
    for (int run = 0; run < std::max(1, opts.restarts); ++run) {
        ThetaVector th = run == 0 ? ThetaVector::uniform(t) : ThetaVector::random(t, rng);
        for (auto& block : th.theta) block = detail::project_simplex(block, opts.interior_floor);
        double L;
        try {
            L = log_posterior_likelihood(t, th, q, a, e);
        } catch (const std::domain_error&) {
            continue;
        }
        AscentReport rep;
        rep.maximized = opts.maximize;
        rep.trajectory.push_back(L);
        bool converged = false;
        long steps = 0;
        while (steps < opts.max_steps && std::isfinite(L)) {
            std::vector<std::vector<double>> g;
            try {
                g = gradient_theta(t, th, q, a, e, opts.interior_floor);
            } catch (const std::domain_error&) {
                break;
            }
            double gnorm = 0.0;
            for (const auto& block : g)
                for (double v : block) gnorm += v * v;
            if (gnorm == 0.0) {
                converged = true;
                break;
            }
            double step = 1.0;
            bool improved = false;
            ThetaVector cand;
            double Lc = 0.0;
            while (step >= 1e-12) {
                cand = th;
                for (std::size_t k = 0; k < cand.theta.size(); ++k) {
                    for (std::size_t j = 0; j < cand.theta[k].size(); ++j)
                        cand.theta[k][j] += dir * step * g[k][j];
                    cand.theta[k] = detail::project_simplex(cand.theta[k], opts.interior_floor);
                }
                try {
                    Lc = log_posterior_likelihood(t, cand, q, a, e);
                } catch (const std::domain_error&) {
                    step /= 2;
                    continue;
                }
                if (dir * (Lc - L) > 0.0) {
                    improved = true;
                    break;
                }
                step /= 2;
            }
            if (!improved) {
                converged = true;
                break;
            }
            ++steps;
            double gain = dir * (Lc - L);
            th = std::move(cand);
            L = Lc;
            rep.trajectory.push_back(L);
            if (gain < opts.tol) {
                converged = true;
                break;
            }
        }
        rep.converged = converged;
        rep.steps = steps;
        rep.best_log = L;
        rep.best_bound = std::exp(L);
        rep.final_theta = th;
        if (dir * L > best_signed) {
            best_signed = dir * L;
            best = rep;
        }
    }
    if (!std::isfinite(best_signed) && best.trajectory.empty())
        throw std::domain_error("evidence has zero probability at every start");
    return best;
}

// Expectation-maximization on the selector weights. Each outer iteration
// fixes the two selector posteriors, then pushes the surrogate
//   sum (post_a - post_e) log theta
// uphill from the current point, accepting only surrogate-improving steps
// that do not decrease the objective.
inline AscentReport qem_run(const TransformedNetwork& t, int q, int a, const Evidence& e,
                            const AscentOptions& opts = {}) {
    const double dir = opts.maximize ? 1.0 : -1.0;
    AscentReport best;
    best.maximized = opts.maximize;
    double best_signed = -std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(opts.seed);

    auto surrogate = [](const std::vector<std::vector<double>>& coef, const ThetaVector& th) {
        double s = 0.0;
        for (std::size_t k = 0; k < coef.size(); ++k)
            for (std::size_t j = 0; j < coef[k].size(); ++j) s += coef[k][j] * std::log(th.theta[k][j]);
        return s;
    };

    for (int run = 0; run < std::max(1, opts.restarts); ++run) {
        ThetaVector th = run == 0 ? ThetaVector::uniform(t) : ThetaVector::random(t, rng);
        for (auto& block : th.theta) block = detail::project_simplex(block, opts.interior_floor);
        double L;
        try {
            L = log_posterior_likelihood(t, th, q, a, e);
        } catch (const std::domain_error&) {
            continue;
        }
        AscentReport rep;
        rep.maximized = opts.maximize;
        rep.trajectory.push_back(L);
        bool converged = false;
        long outer = 0;
        while (outer < opts.max_outer && std::isfinite(L)) {
            // E-step: selector posteriors under the current weights
            auto net = net_with_priors(t, th.theta);
            Evidence ea = e;
            ea[q] = a;
            std::vector<std::vector<double>> coef(t.transparents.size());
            bool dead = false;
            for (std::size_t k = 0; k < t.transparents.size(); ++k) {
                int z = t.transparents[k].id;
                Factor fa = eliminate(net, {z}, ea);
                Factor fe = eliminate(net, {z}, e);
                double za = fa.sum(), ze = fe.sum();
                if (za <= 0.0 || ze <= 0.0) {
                    dead = true;
                    break;
                }
                coef[k].resize(th.theta[k].size());
                for (std::size_t j = 0; j < coef[k].size(); ++j)
                    coef[k][j] = dir * (fa.values[j] / za - fe.values[j] / ze);
            }
            if (dead) break;

            // M-step: inner projected gradient ascent on the surrogate
            double Q0 = surrogate(coef, th);
            ThetaVector m = th;
            double Qm = Q0;
            for (int inner = 0; inner < 200; ++inner) {
                ThetaVector cand = m;
                double step = 1.0;
                bool improved = false;
                double Qc = Qm;
                while (step >= 1e-12) {
                    cand = m;
                    for (std::size_t k = 0; k < cand.theta.size(); ++k) {
                        for (std::size_t j = 0; j < cand.theta[k].size(); ++j)
                            cand.theta[k][j] += step * coef[k][j] / m.theta[k][j];
                        cand.theta[k] = detail::project_simplex(cand.theta[k], opts.interior_floor);
                    }
                    Qc = surrogate(coef, cand);
                    if (Qc > Qm) {
                        improved = true;
                        break;
                    }
                    step /= 2;
                }
                if (!improved) break;
                m = std::move(cand);
                Qm = Qc;
            }
            if (!(Qm > Q0)) {
                converged = true; // no surrogate-improving step exists
                break;
            }
            // accept, backing off toward the current point if the objective
            // itself would decrease
            double Lm = -std::numeric_limits<double>::infinity();
            bool ok = false;
            for (int halve = 0; halve < 50; ++halve) {
                double Qblend;
                try {
                    Lm = log_posterior_likelihood(t, m, q, a, e);
                } catch (const std::domain_error&) {
                    Lm = -std::numeric_limits<double>::infinity();
                }
                Qblend = surrogate(coef, m);
                if (dir * (Lm - L) >= 0.0 && Qblend > Q0) {
                    ok = true;
                    break;
                }
                for (std::size_t k = 0; k < m.theta.size(); ++k) {
                    for (std::size_t j = 0; j < m.theta[k].size(); ++j)
                        m.theta[k][j] = 0.5 * (m.theta[k][j] + th.theta[k][j]);
                    m.theta[k] = detail::project_simplex(m.theta[k], opts.interior_floor);
                }
            }
            if (!ok) {
                converged = true;
                break;
            }
            double gain = dir * (Lm - L);
            th = std::move(m);
            L = Lm;
            rep.trajectory.push_back(L);
            ++outer;
            if (gain < opts.tol) {
                converged = true;
                break;
            }
        }
        rep.converged = converged;
        rep.steps = outer;
        rep.best_log = L;
        rep.best_bound = std::exp(L);
        rep.final_theta = th;
        if (dir * L > best_signed) {
            best_signed = dir * L;
            best = rep;
        }
    }
    if (!std::isfinite(best_signed) && best.trajectory.empty())
        throw std::domain_error("evidence has zero probability at every start");
    return best;
}

struct AnnealSchedule {
    double t0 = 1.0;
    double alpha = 0.995;
    int steps = 5000;
    std::uint64_t seed = 0;
};

// Simulated annealing over the discrete selector assignments: single-value
// flips, geometric cooling, two passes (one per bound). Every visited state
// is a true vertex, so the reported interval is an inner approximation.
inline BoundsResult anneal_search(const TransformedNetwork& t, int q, int a, const Evidence& e,
                                  const AnnealSchedule& schedule = {}) {
    std::vector<int> arity;
    for (const auto& tv : t.transparents) arity.push_back(tv.arity);
    BoundsResult r;
    r.method = "anneal";
    r.lower = std::numeric_limits<double>::infinity();
    r.upper = -std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(schedule.seed);

    auto ratio_of = [&](const std::vector<int>& asg, double& out) {
        auto net = instantiate_transparent(t, asg);
        auto m = detail::query_mass(net, q, a, e);
        ++r.evaluations;
        if (m.den <= 0.0) {
            ++r.skipped_zero_mass;
            return false;
        }
        out = m.num / m.den;
        return true;
    };
    auto track = [&](const std::vector<int>& asg, double ratio) {
        if (ratio < r.lower) {
            r.lower = ratio;
            r.argmin = asg;
        }
        if (ratio > r.upper) {
            r.upper = ratio;
            r.argmax = asg;
        }
    };

    for (int dir = 0; dir < 2; ++dir) {
        const double sgn = dir == 0 ? 1.0 : -1.0; // maximize first, then minimize
        std::vector<int> cur(arity.size(), 0);
        double curRatio = 0.0;
        bool started = false;
        for (int attempt = 0; attempt < 100 && !started; ++attempt) {
            for (std::size_t k = 0; k < cur.size(); ++k)
                cur[k] = static_cast<int>(rng() % static_cast<std::uint64_t>(arity[k]));
            started = ratio_of(cur, curRatio);
        }
        if (!started) continue;
        track(cur, curRatio);
        if (arity.empty()) break;
        bool flippable = false;
        for (int m : arity) flippable = flippable || m > 1;
        if (!flippable) continue;
        double temp = schedule.t0;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int step = 0; step < schedule.steps; ++step, temp *= schedule.alpha) {
            std::size_t k = rng() % arity.size();
            if (arity[k] == 1) continue;
            std::vector<int> cand = cur;
            int nv = static_cast<int>(rng() % static_cast<std::uint64_t>(arity[k] - 1));
            cand[k] = nv >= cur[k] ? nv + 1 : nv;
            double candRatio;
            if (!ratio_of(cand, candRatio)) continue;
            track(cand, candRatio);
            double delta = sgn * (candRatio - curRatio);
            if (delta >= 0.0 || unit(rng) < std::exp(delta / std::max(temp, 1e-300))) {
                cur = std::move(cand);
                curRatio = candRatio;
            }
        }
    }
    if (!std::isfinite(r.lower)) throw std::domain_error("evidence has zero probability at every sampled vertex");
    return r;
}

} // namespace credal
