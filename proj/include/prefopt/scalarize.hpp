#pragma once
#include <string>
#include <utility>

#include "prefopt/domain.hpp"

namespace prefopt {

struct ScalarizerKind {
    enum class Kind { WeightedSum, Tchebycheff, PBI };
    Kind kind = Kind::Tchebycheff;
    double xi = 0.1; // PBI penalty

    static ScalarizerKind parse(const std::string& s); // "ws" | "tch" | "pbi:<xi>"
    std::string str() const;
};

struct BranchSelection {
    int active_index = 1; // 1 or 2
    bool tie = false;
};

double weighted_sum(const ObjectivePair& f, const Request& lam);

// value = max over the two clamped terms lam_i * max(f_i - z_i, 0);
// ties (within 1e-12) resolve to index 1, matching the subgradient choice
std::pair<double, BranchSelection> tchebycheff(const ObjectivePair& f, const Request& lam,
                                               const IdealPoint& z);

// boundary-intersection value d1 + xi*d2 with the printed (z - f) convention
double pbi(const ObjectivePair& f, const Request& lam, const IdealPoint& z, double xi);

// multipliers for grad f1 / grad f2_hat in the piecewise Tchebycheff gradient
std::pair<double, double> tch_gradient_weights(double f1, double f2_hat, const Request& lam,
                                               const IdealPoint& z);

// (value, w1, w2) for any scalarizer; w_i are the partials wrt (f1, f2_hat)
// that multiply the objective gradients in a strategy-network update
struct ScalarGrad {
    double value;
    double w1;
    double w2;
};
ScalarGrad scalarizer_grad(const ScalarizerKind& kind, double f1, double f2_hat,
                           const Request& lam, const IdealPoint& z);

} // namespace prefopt
