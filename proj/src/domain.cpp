#include "prefopt/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "prefopt/errors.hpp"

namespace prefopt {

void Strategy::validate() const {
    if (values.empty()) throw ConfigError("strategy: d must be >= 1");
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw ConfigError("strategy: element outside [0,1]");
    }
}

void Request::validate() const {
    if (!std::isfinite(lambda1) || lambda1 < 0.0 || lambda1 > 1.0 + 1e-9)
        throw ConfigError("request: lambda1 outside [0,1]");
}

double size_objective(const Strategy& x) {
    double s = std::accumulate(x.values.begin(), x.values.end(), 0.0);
    return 1.0 - s / static_cast<double>(x.dim());
}

Request sample_request(Rng& rng) {
    return Request{rng.uniform()};
}

Strategy binarize(const Strategy& x, BinarizeMode mode, int k) {
    const int d = x.dim();
    Strategy out;
    out.values.assign(d, 0.0);
    if (mode == BinarizeMode::Threshold) {
        for (int i = 0; i < d; ++i) out.values[i] = x.values[i] >= 0.5 ? 1.0 : 0.0;
        return out;
    }
    if (k < 0 || k > d) throw std::invalid_argument("binarize: TopK k outside [0,d]");
    std::vector<int> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    // k largest win; equal values resolved toward the lower index
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return x.values[a] > x.values[b]; });
    for (int i = 0; i < k; ++i) out.values[idx[i]] = 1.0;
    return out;
}

} // namespace prefopt
