#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <vector>

#include "prefopt/gp.hpp"
#include "prefopt/parallel.hpp"
#include "prefopt/pareto.hpp"
#include "prefopt/rng.hpp"

using namespace prefopt;
using clk = std::chrono::steady_clock;

namespace {

double ms_since(clk::time_point t0) {
    return std::chrono::duration<double, std::milli>(clk::now() - t0).count();
}

template <typename F> double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = clk::now();
        f();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

} // namespace

int main() {
    const int n = 512, d = 12, pool_n = 4096;
    Rng rng(12345);

    Eigen::MatrixXd X(n, d);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            X(i, j) = rng.uniform();
            s += X(i, j) * X(i, j);
        }
        y(i) = s / d;
    }

    SurrogateModel m;
    m.params.log_lengthscale = std::log(0.8);
    m.params.log_signal_variance = 0.0;
    m.params.log_noise_variance = std::log(1e-4);
    m.X = X;
    m.y_mean = y.mean();
    m.y_std = std::sqrt((y.array() - m.y_mean).square().mean());
    m.y = (y.array() - m.y_mean) / m.y_std;
    m.refresh();

    std::vector<Strategy> pool(pool_n);
    for (auto& s : pool) {
        s.values.resize(d);
        for (int j = 0; j < d; ++j) s.values[j] = rng.uniform();
    }

    std::vector<FrontPoint> front_pts;
    for (int i = 0; i < 256; ++i) {
        double f1 = rng.uniform();
        front_pts.emplace_back(f1, 1.0 - f1 + 0.05 * rng.uniform());
    }
    FrontSet existing;
    existing.points = nondominated(front_pts);
    std::vector<FrontPoint> cand(pool_n);
    for (auto& c : cand) c = {rng.uniform(), rng.uniform()};
    std::vector<char> taken(pool_n, 0);

    std::cout << "threads=" << thread_count() << "\n";

    {
        Eigen::MatrixXd dist(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) dist(i, j) = (X.row(i) - X.row(j)).norm();
        Eigen::MatrixXd Ks, Kp;
        double ts = time_best_of(5, [&] { Ks = kernel_matrix_serial(dist, m.params); });
        double tp = time_best_of(5, [&] { Kp = kernel_matrix_parallel(dist, m.params); });
        bool eq = Ks.rows() == Kp.rows() &&
                  std::memcmp(Ks.data(), Kp.data(), sizeof(double) * Ks.size()) == 0;
        std::cout << "kernel_matrix   n=" << n << "  serial " << ts << " ms  parallel " << tp
                  << " ms  speedup " << ts / tp << "x  bitwise_equal=" << eq << "\n";
    }

    {
        std::vector<double> vs, vp;
        AcquisitionConfig acq;
        double ts = time_best_of(3, [&] { vs = acquire_values_serial(m, pool, acq); });
        double tp = time_best_of(3, [&] { vp = acquire_values_parallel(m, pool, acq); });
        std::cout << "acquire_values  pool=" << pool_n << "  serial " << ts << " ms  parallel "
                  << tp << " ms  speedup " << ts / tp << "x  bitwise_equal=" << bitwise_equal(vs, vp)
                  << "\n";
    }

    {
        std::vector<double> hs(pool_n), hp(pool_n);
        double ts = time_best_of(5, [&] { marginal_hvi_serial(existing, cand, taken, hs); });
        double tp = time_best_of(5, [&] { marginal_hvi_parallel(existing, cand, taken, hp); });
        std::cout << "marginal_hvi    pool=" << pool_n << "  serial " << ts << " ms  parallel "
                  << tp << " ms  speedup " << ts / tp << "x  bitwise_equal=" << bitwise_equal(hs, hp)
                  << "\n";
    }

    return 0;
}
