#pragma once
#include <vector>

#include "prefopt/rng.hpp"

namespace prefopt {

// sparsity vector x in [0,1]^d, one ratio per block
struct Strategy {
    std::vector<double> values;

    int dim() const { return static_cast<int>(values.size()); }
    void validate() const;
};

// preference on the 2-simplex; parameterized by lambda1, lambda2 derived
struct Request {
    double lambda1 = 0.5;

    double lambda2() const { return 1.0 - lambda1; }
    void validate() const;
};

enum class F2Source { True, Surrogate };

struct ObjectivePair {
    double f1 = 0.0;
    double f2 = 0.0;
    F2Source f2_source = F2Source::True;
};

// componentwise lower bounds of (f1, f2) for Tchebycheff/PBI
struct IdealPoint {
    double z1 = 0.0;
    double z2 = 0.0;
};

// f1(x) = 1 - (sum x_i)/d
double size_objective(const Strategy& x);

// d(f1)/d(x_i) = -1/d for every i
inline double size_objective_grad(int d) { return -1.0 / static_cast<double>(d); }

Request sample_request(Rng& rng);

enum class BinarizeMode { Threshold, TopK };

Strategy binarize(const Strategy& x, BinarizeMode mode, int k = 0);

} // namespace prefopt
