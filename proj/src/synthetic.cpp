#include "prefopt/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prefopt/errors.hpp"
#include "prefopt/pareto.hpp"
#include "prefopt/rng.hpp"

namespace prefopt {

void SyntheticSpec::validate() const {
    const int d = dim();
    if (d < 1) throw ConfigError("synthetic: d must be >= 1");
    if (static_cast<int>(exponents.size()) != d)
        throw ConfigError("synthetic: exponents size mismatch");
    for (double w : weights)
        if (!std::isfinite(w) || w <= 0.0) throw ConfigError("synthetic: weights must be positive");
    for (double p : exponents)
        if (!std::isfinite(p) || p <= 0.0) throw ConfigError("synthetic: exponents must be positive");
    if (family == Family::Coupled) {
        if (static_cast<int>(interaction.size()) != d)
            throw ConfigError("synthetic: interaction must be d x d");
        for (int i = 0; i < d; ++i) {
            if (static_cast<int>(interaction[i].size()) != d)
                throw ConfigError("synthetic: interaction must be d x d");
            for (int j = 0; j < d; ++j) {
                double a = interaction[i][j];
                if (!std::isfinite(a) || a < 0.0)
                    throw ConfigError("synthetic: interaction entries must be nonnegative");
                if (std::abs(a - interaction[j][i]) > 1e-12)
                    throw ConfigError("synthetic: interaction must be symmetric");
            }
        }
    }
}

double SyntheticSpec::evaluate(const Strategy& x) const {
    const int d = dim();
    double num = 0.0, den = 0.0;
    for (int i = 0; i < d; ++i) {
        num += weights[i] * std::pow(x.values[i], exponents[i]);
        den += weights[i];
    }
    if (family == Family::Coupled) {
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                num += interaction[i][j] * x.values[i] * x.values[j];
                den += interaction[i][j];
            }
    }
    return num / den;
}

SyntheticSpec SyntheticSpec::random(std::uint64_t seed, Family family, int d) {
    Rng rng(derive_seed(seed, Stream::Objective, 0));
    SyntheticSpec s;
    s.family = family;
    s.seed = seed;
    s.weights.resize(d);
    s.exponents.resize(d);
    for (int i = 0; i < d; ++i) s.weights[i] = rng.uniform(0.5, 1.5);
    for (int i = 0; i < d; ++i) s.exponents[i] = rng.uniform(1.5, 3.0);
    if (family == Family::Coupled) {
        s.interaction.assign(d, std::vector<double>(d, 0.0));
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                s.interaction[i][j] = s.interaction[j][i] = rng.uniform(0.0, 2.0 / d);
    }
    s.validate();
    return s;
}

std::vector<long long> quantize_key(const Strategy& x) {
    std::vector<long long> key(x.values.size());
    for (size_t i = 0; i < x.values.size(); ++i)
        key[i] = std::llround(x.values[i] * 1e12);
    return key;
}

bool EvalLedger::cached(const Strategy& x) const { return cache.count(quantize_key(x)) > 0; }

double evaluate_true(const BlackBoxObjective& obj, const Strategy& x, EvalLedger& ledger) {
    auto key = quantize_key(x);
    auto it = ledger.cache.find(key);
    if (it != ledger.cache.end()) {
        ++ledger.cache_hits;
        return it->second;
    }
    double v = obj.evaluate(x);
    if (!std::isfinite(v))
        throw EvaluatorFault("evaluator returned a non-finite f2 value");
    ledger.cache.emplace(std::move(key), v);
    ++ledger.true_evaluations;
    return v;
}

namespace {

// minimal f2 for every total allocation on a shared grid; exact for the
// discretized problem because PowerSum is separable across coordinates
std::vector<OraclePoint> powersum_oracle(const SyntheticSpec& spec, int m) {
    const int d = spec.dim();
    const int steps = m - 1;
    const int budgets = d * steps + 1;
    const double inf = std::numeric_limits<double>::infinity();
    double den = 0.0;
    for (double w : spec.weights) den += w;

    std::vector<double> cost(budgets, inf), next(budgets, inf);
    std::vector<std::vector<int>> choice(d, std::vector<int>(budgets, -1));
    cost[0] = 0.0;
    for (int c = 0; c < d; ++c) {
        std::vector<double> level(m);
        for (int j = 0; j < m; ++j)
            level[j] = spec.weights[c] *
                       std::pow(static_cast<double>(j) / steps, spec.exponents[c]);
        std::fill(next.begin(), next.end(), inf);
        for (int b = 0; b <= c * steps; ++b) {
            if (cost[b] == inf) continue;
            for (int j = 0; j < m; ++j) {
                double v = cost[b] + level[j];
                if (v < next[b + j]) {
                    next[b + j] = v;
                    choice[c][b + j] = j;
                }
            }
        }
        std::swap(cost, next);
    }

    std::vector<std::pair<double, double>> front;
    front.reserve(budgets);
    for (int b = 0; b < budgets; ++b) {
        double f1 = 1.0 - (static_cast<double>(b) / steps) / d;
        front.emplace_back(f1, cost[b] / den);
    }
    auto keep = nondominated(front);

    std::vector<OraclePoint> out;
    out.reserve(keep.size());
    for (const auto& pt : keep) {
        int b = static_cast<int>(std::lround((1.0 - pt.first) * d * steps));
        Strategy x;
        x.values.assign(d, 0.0);
        for (int c = d - 1; c >= 0; --c) {
            int j = choice[c][b];
            x.values[c] = static_cast<double>(j) / steps;
            b -= j;
        }
        OraclePoint op;
        op.x = std::move(x);
        op.f = ObjectivePair{pt.first, pt.second, F2Source::True};
        out.push_back(std::move(op));
    }
    return out;
}

std::vector<OraclePoint> grid_oracle(const SyntheticSpec& spec, int m) {
    const int d = spec.dim();
    double total = 1.0;
    for (int i = 0; i < d; ++i) {
        total *= m;
        if (total > 1e7) throw BudgetExhausted("pareto_oracle: grid_resolution^d exceeds 1e7");
    }
    const int steps = m - 1;
    const long long n = static_cast<long long>(total);
    std::vector<std::pair<double, double>> pts(n);
    std::vector<Strategy> xs(n);
    Strategy x;
    x.values.assign(d, 0.0);
    std::vector<int> digit(d, 0);
    for (long long idx = 0; idx < n; ++idx) {
        int b = 0;
        for (int i = 0; i < d; ++i) {
            x.values[i] = static_cast<double>(digit[i]) / steps;
            b += digit[i];
        }
        // f1 from the integer budget so equal totals share one abscissa
        double f1 = 1.0 - (static_cast<double>(b) / steps) / d;
        pts[idx] = {f1, spec.evaluate(x)};
        xs[idx] = x;
        for (int i = 0; i < d; ++i) {
            if (++digit[i] < m) break;
            digit[i] = 0;
        }
    }
    std::vector<long long> order(n);
    for (long long i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](long long a, long long b) {
        if (pts[a].first != pts[b].first) return pts[a].first < pts[b].first;
        return pts[a].second < pts[b].second;
    });
    std::vector<OraclePoint> out;
    double best = std::numeric_limits<double>::infinity();
    for (long long i : order) {
        if (pts[i].second < best - 1e-15) {
            best = pts[i].second;
            out.push_back({xs[i], ObjectivePair{pts[i].first, pts[i].second, F2Source::True}});
        }
    }
    return out;
}

} // namespace

std::vector<OraclePoint> pareto_oracle(const SyntheticSpec& spec, int grid_resolution) {
    spec.validate();
    if (grid_resolution < 2) throw ConfigError("pareto_oracle: grid_resolution must be >= 2");
    if (spec.family == Family::PowerSum) return powersum_oracle(spec, grid_resolution);
    return grid_oracle(spec, grid_resolution);
}

} // namespace prefopt
