#include "prefopt/scalarize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "prefopt/errors.hpp"

namespace prefopt {

namespace {
constexpr double kTieTol = 1e-12;
}

ScalarizerKind ScalarizerKind::parse(const std::string& s) {
    ScalarizerKind k;
    if (s == "ws") {
        k.kind = Kind::WeightedSum;
        return k;
    }
    if (s == "tch") {
        k.kind = Kind::Tchebycheff;
        return k;
    }
    if (s.rfind("pbi:", 0) == 0) {
        k.kind = Kind::PBI;
        try {
            k.xi = std::stod(s.substr(4));
        } catch (const std::exception&) {
            throw ConfigError("scalarizer: bad pbi penalty in '" + s + "'");
        }
        if (!(k.xi > 0.0)) throw ConfigError("scalarizer: pbi penalty must be > 0");
        return k;
    }
    throw ConfigError("scalarizer: expected ws | tch | pbi:<xi>, got '" + s + "'");
}

std::string ScalarizerKind::str() const {
    switch (kind) {
        case Kind::WeightedSum: return "ws";
        case Kind::Tchebycheff: return "tch";
        default: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "pbi:%g", xi);
            return buf;
        }
    }
}

double weighted_sum(const ObjectivePair& f, const Request& lam) {
    return lam.lambda1 * f.f1 + lam.lambda2() * f.f2;
}

std::pair<double, BranchSelection> tchebycheff(const ObjectivePair& f, const Request& lam,
                                               const IdealPoint& z) {
    double t1 = lam.lambda1 * std::max(f.f1 - z.z1, 0.0);
    double t2 = lam.lambda2() * std::max(f.f2 - z.z2, 0.0);
    BranchSelection b;
    b.tie = std::abs(t1 - t2) <= kTieTol;
    b.active_index = (b.tie || t1 >= t2) ? 1 : 2;
    return {std::max(t1, t2), b};
}

double pbi(const ObjectivePair& f, const Request& lam, const IdealPoint& z, double xi) {
    if (!(xi > 0.0)) throw ConfigError("pbi: xi must be > 0");
    double l1 = lam.lambda1, l2 = lam.lambda2();
    double norm = std::sqrt(l1 * l1 + l2 * l2);
    double u = l1 * (z.z1 - f.f1) + l2 * (z.z2 - f.f2);
    double d1 = std::abs(u) / norm;
    double v1 = f.f1 - (z.z1 - d1 * l1);
    double v2 = f.f2 - (z.z2 - d1 * l2);
    double d2 = std::sqrt(v1 * v1 + v2 * v2);
    return d1 + xi * d2;
}

std::pair<double, double> tch_gradient_weights(double f1, double f2_hat, const Request& lam,
                                               const IdealPoint& z) {
    double t1 = lam.lambda1 * std::max(f1 - z.z1, 0.0);
    double t2 = lam.lambda2() * std::max(f2_hat - z.z2, 0.0);
    if (t1 >= t2 - kTieTol) return {lam.lambda1, 0.0};
    return {0.0, lam.lambda2()};
}

ScalarGrad scalarizer_grad(const ScalarizerKind& kind, double f1, double f2_hat,
                           const Request& lam, const IdealPoint& z) {
    ObjectivePair f{f1, f2_hat, F2Source::Surrogate};
    switch (kind.kind) {
        case ScalarizerKind::Kind::WeightedSum:
            return {weighted_sum(f, lam), lam.lambda1, lam.lambda2()};
        case ScalarizerKind::Kind::Tchebycheff: {
            auto [value, branch] = tchebycheff(f, lam, z);
            auto [w1, w2] = tch_gradient_weights(f1, f2_hat, lam, z);
            (void)branch;
            return {value, w1, w2};
        }
        default: {
            double l1 = lam.lambda1, l2 = lam.lambda2();
            double norm = std::sqrt(l1 * l1 + l2 * l2);
            double u = l1 * (z.z1 - f1) + l2 * (z.z2 - f2_hat);
            double s = (u > 0.0) - (u < 0.0);
            double d1 = std::abs(u) / norm;
            double v1 = f1 - (z.z1 - d1 * l1);
            double v2 = f2_hat - (z.z2 - d1 * l2);
            double d2 = std::sqrt(v1 * v1 + v2 * v2);
            double dd1_df1 = -s * l1 / norm;
            double dd1_df2 = -s * l2 / norm;
            double w1 = dd1_df1;
            double w2 = dd1_df2;
            if (d2 > 0.0) {
                double lv = l1 * v1 + l2 * v2;
                w1 += kind.xi * (v1 + lv * dd1_df1) / d2;
                w2 += kind.xi * (v2 + lv * dd1_df2) / d2;
            }
            return {d1 + kind.xi * d2, w1, w2};
        }
    }
}

} // namespace prefopt
