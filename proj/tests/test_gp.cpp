#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "prefopt/gp.hpp"
#include "prefopt/rng.hpp"

using namespace prefopt;

namespace {

Strategy to_strategy(const Eigen::VectorXd& v) {
    Strategy s;
    s.values.assign(v.data(), v.data() + v.size());
    return s;
}

Eigen::MatrixXd random_inputs(int n, int d, Rng& rng) {
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) X(i, j) = rng.uniform();
    return X;
}

// fixed-hyperparameter model over random data, for prediction-side tests
SurrogateModel make_model(int n, int d, Rng& rng, double l = 0.7, double s2 = 1.3,
                          double sn2 = 1e-4) {
    SurrogateModel m;
    m.params.log_lengthscale = std::log(l);
    m.params.log_signal_variance = std::log(s2);
    m.params.log_noise_variance = std::log(sn2);
    m.X = random_inputs(n, d, rng);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = std::sin(3.0 * m.X.row(i).sum()) + 0.1 * rng.uniform();
    m.y_mean = y.mean();
    m.y_std = std::sqrt((y.array() - m.y_mean).square().mean());
    m.y = (y.array() - m.y_mean) / m.y_std;
    m.refresh();
    return m;
}

double rel_err(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
    return (got - want).norm() / std::max(want.norm(), 1e-12);
}

} // namespace

TEST_CASE("matern kernel closed-form values") {
    KernelParams p; // l=1, s2=1
    Eigen::VectorXd a(2), b(2);
    a << 0.25, 0.5;
    b << 0.25, 0.5;
    CHECK(kernel(a, b, p) == 1.0);
    b << 1.25, 0.5; // r = 1 exactly
    CHECK(kernel(a, b, p) == doctest::Approx(0.5239941088318203).epsilon(1e-14));
    CHECK(kernel(a, b, p) == kernel(b, a, p));
    p.log_signal_variance = std::log(2.5);
    CHECK(kernel(a, a, p) == 2.5);
    Eigen::VectorXd far(2);
    far << 100.0, 100.0;
    CHECK(kernel(a, far, p) > 0.0);
    CHECK(kernel(a, far, p) <= 2.5);
}

TEST_CASE("kernel matrix serial and parallel variants match bitwise") {
    Rng rng(5);
    Eigen::MatrixXd X = random_inputs(40, 3, rng);
    Eigen::MatrixXd D(40, 40);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) D(i, j) = (X.row(i) - X.row(j)).norm();
    KernelParams p;
    p.log_lengthscale = std::log(0.4);
    auto Ks = kernel_matrix_serial(D, p);
    auto Kp = kernel_matrix_parallel(D, p);
    CHECK((Ks.array() == Kp.array()).all());

    setenv("PREFOPT_THREADS", "3", 1);
    auto K3 = kernel_matrix_parallel(D, p);
    unsetenv("PREFOPT_THREADS");
    CHECK((Ks.array() == K3.array()).all());
}

TEST_CASE("fit interpolates duplicated constant data via jitter") {
    Eigen::MatrixXd X(2, 2);
    X << 0.5, 0.5, 0.5, 0.5;
    Eigen::VectorXd y(2);
    y << 0.7, 0.7;
    auto m = fit(X, y, 2, 123);
    Strategy q = to_strategy(X.row(0));
    CHECK(m.predict(q).mean == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("fit recovers a smooth function from noise-free samples") {
    Rng rng(77);
    const int n = 20, d = 4;
    Eigen::MatrixXd X = random_inputs(n, d, rng);
    Eigen::VectorXd y = X.rowwise().mean();
    auto m = fit(X, y, 4, 2024);

    for (int i = 0; i < n; ++i)
        CHECK(m.predict(to_strategy(X.row(i))).mean == doctest::Approx(y(i)).epsilon(1e-4));

    for (int t = 0; t < 30; ++t) {
        Eigen::VectorXd q(d);
        for (int j = 0; j < d; ++j) q(j) = rng.uniform();
        CHECK(std::abs(m.predict(to_strategy(q)).mean - q.mean()) < 1e-2);
    }
}

TEST_CASE("fitted likelihood dominates the default hyperparameters") {
    Rng rng(8);
    Eigen::MatrixXd X = random_inputs(16, 3, rng);
    Eigen::VectorXd y(16);
    for (int i = 0; i < 16; ++i) y(i) = std::cos(2.0 * X.row(i).sum());
    auto m = fit(X, y, 4, 55);

    SurrogateModel defaults;
    defaults.params = KernelParams{};
    defaults.X = X;
    defaults.y_mean = m.y_mean;
    defaults.y_std = m.y_std;
    defaults.y = m.y;
    defaults.refresh();
    CHECK(m.loglik >= defaults.loglik);
}

TEST_CASE("marginal likelihood ascent traces never decrease") {
    Rng rng(21);
    Eigen::MatrixXd X = random_inputs(14, 2, rng);
    Eigen::VectorXd y(14);
    for (int i = 0; i < 14; ++i) y(i) = X(i, 0) * X(i, 1);
    std::vector<std::vector<double>> traces;
    auto m = fit(X, y, 4, 99, &traces);
    REQUIRE(traces.size() == 4);
    double best_seen = -1e300;
    for (const auto& tr : traces) {
        REQUIRE(tr.size() == 201);
        for (size_t i = 1; i < tr.size(); ++i) CHECK(tr[i] >= tr[i - 1]);
        best_seen = std::max(best_seen, tr.back());
    }
    CHECK(m.loglik == doctest::Approx(best_seen).epsilon(1e-12));
}

TEST_CASE("fit is deterministic for a fixed seed") {
    Rng rng(31);
    Eigen::MatrixXd X = random_inputs(12, 3, rng);
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) y(i) = X.row(i).squaredNorm();
    auto a = fit(X, y, 4, 777);
    auto b = fit(X, y, 4, 777);
    CHECK(a.params.log_lengthscale == b.params.log_lengthscale);
    CHECK(a.params.log_signal_variance == b.params.log_signal_variance);
    CHECK(a.params.log_noise_variance == b.params.log_noise_variance);
    CHECK(a.loglik == b.loglik);
}

TEST_CASE("posterior mean gradient matches finite differences") {
    Rng rng(42);
    const double h = 1e-5;
    int pairs = 0;
    while (pairs < 100) {
        SurrogateModel m = make_model(10 + static_cast<int>(rng.below(8)), 3, rng,
                                      0.4 + rng.uniform(), 0.5 + rng.uniform());
        for (int t = 0; t < 5 && pairs < 100; ++t, ++pairs) {
            Eigen::VectorXd x(3);
            for (int j = 0; j < 3; ++j) x(j) = 0.05 + 0.9 * rng.uniform();
            Posterior post = m.predict(to_strategy(x));
            Eigen::VectorXd fd(3);
            for (int j = 0; j < 3; ++j) {
                Eigen::VectorXd xp = x, xm = x;
                xp(j) += h;
                xm(j) -= h;
                fd(j) = (m.predict(to_strategy(xp)).mean - m.predict(to_strategy(xm)).mean) /
                        (2 * h);
            }
            CHECK(rel_err(post.grad_mean, fd) < 1e-4);
        }
    }
}

TEST_CASE("posterior std gradient matches finite differences away from data") {
    Rng rng(43);
    const double h = 1e-5;
    int pairs = 0;
    while (pairs < 100) {
        SurrogateModel m = make_model(12, 3, rng);
        for (int t = 0; t < 8 && pairs < 100; ++t) {
            Eigen::VectorXd x(3);
            for (int j = 0; j < 3; ++j) x(j) = rng.uniform();
            Posterior post = m.predict(to_strategy(x));
            if (post.std / m.y_std <= 1e-3) continue; // too close to a training point
            Eigen::VectorXd fd(3);
            for (int j = 0; j < 3; ++j) {
                Eigen::VectorXd xp = x, xm = x;
                xp(j) += h;
                xm(j) -= h;
                fd(j) = (m.predict(to_strategy(xp)).std - m.predict(to_strategy(xm)).std) /
                        (2 * h);
            }
            CHECK(rel_err(post.grad_std, fd) < 1e-3);
            ++pairs;
        }
    }
}

TEST_CASE("acquisition value, algebra, and gradient") {
    Rng rng(44);
    SurrogateModel m = make_model(14, 3, rng);
    AcquisitionConfig zero{AcquisitionConfig::Kind::PaperLCB, 0.0};
    AcquisitionConfig lcb{AcquisitionConfig::Kind::PaperLCB, 0.8};
    AcquisitionConfig opt{AcquisitionConfig::Kind::Optimistic, 0.8};
    AcquisitionConfig mean_only{AcquisitionConfig::Kind::MeanOnly, 5.0};

    const double h = 1e-5;
    for (int t = 0; t < 40; ++t) {
        Eigen::VectorXd x(3);
        for (int j = 0; j < 3; ++j) x(j) = rng.uniform();
        Strategy s = to_strategy(x);
        Posterior post = m.predict(s);

        CHECK(m.acquire(s, zero).first == post.mean);
        CHECK(m.acquire(s, mean_only).first == post.mean);
        CHECK(m.acquire(s, lcb).first - m.acquire(s, opt).first ==
              doctest::Approx(2 * 0.8 * post.std).epsilon(1e-12));

        auto [value, grad] = m.acquire(s, lcb);
        (void)value;
        Eigen::VectorXd fd(3);
        for (int j = 0; j < 3; ++j) {
            Eigen::VectorXd xp = x, xm = x;
            xp(j) += h;
            xm(j) -= h;
            fd(j) = (m.acquire(to_strategy(xp), lcb).first -
                     m.acquire(to_strategy(xm), lcb).first) /
                    (2 * h);
        }
        CHECK(rel_err(grad, fd) < 1e-3);
    }
}

TEST_CASE("paperlcb value is nondecreasing in kappa") {
    Rng rng(45);
    SurrogateModel m = make_model(10, 2, rng);
    for (int t = 0; t < 200; ++t) {
        Eigen::VectorXd x(2);
        x << rng.uniform(), rng.uniform();
        Strategy s = to_strategy(x);
        double prev = -1e300;
        for (double kappa : {0.0, 0.1, 0.5, 1.0, 2.0}) {
            double v = m.acquire(s, AcquisitionConfig{AcquisitionConfig::Kind::PaperLCB, kappa})
                           .first;
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("posterior variance is bounded and shrinks with more data") {
    Rng rng(46);
    const int d = 3;
    SurrogateModel m = make_model(15, d, rng);
    double cap = std::sqrt(m.params.signal_variance() + m.params.noise_variance());
    for (int t = 0; t < 1000; ++t) {
        Eigen::VectorXd x(d);
        for (int j = 0; j < d; ++j) x(j) = rng.uniform(-0.2, 1.2);
        Posterior p = m.predict(to_strategy(x));
        double std_s = p.std / m.y_std;
        CHECK(std_s >= 0.0);
        CHECK(std_s <= cap + 1e-9);
    }

    // same hyperparameters, one extra observation: variance never grows
    SurrogateModel bigger = m;
    bigger.X.conservativeResize(m.n() + 1, d);
    bigger.X.row(m.n()) << 0.5, 0.5, 0.5;
    bigger.y.conservativeResize(m.n() + 1);
    bigger.y(m.n()) = 0.0;
    bigger.refresh();
    for (int t = 0; t < 200; ++t) {
        Eigen::VectorXd x(d);
        for (int j = 0; j < d; ++j) x(j) = rng.uniform();
        Strategy s = to_strategy(x);
        CHECK(bigger.predict(s).std <= m.predict(s).std + 1e-9);
    }
}

TEST_CASE("acquire over pools: serial equals parallel bitwise") {
    Rng rng(47);
    SurrogateModel m = make_model(12, 3, rng);
    std::vector<Strategy> pool(64);
    for (auto& s : pool) {
        s.values.resize(3);
        for (auto& v : s.values) v = rng.uniform();
    }
    AcquisitionConfig acq;
    auto vs = acquire_values_serial(m, pool, acq);
    auto vp = acquire_values_parallel(m, pool, acq);
    CHECK(vs == vp);
    setenv("PREFOPT_THREADS", "5", 1);
    auto v5 = acquire_values_parallel(m, pool, acq);
    unsetenv("PREFOPT_THREADS");
    CHECK(vs == v5);
}

TEST_CASE("prediction at training inputs nails noise-free targets") {
    Rng rng(48);
    Eigen::MatrixXd X = random_inputs(18, 4, rng);
    Eigen::VectorXd y(18);
    for (int i = 0; i < 18; ++i) y(i) = 0.3 * X(i, 0) + 0.7 * X(i, 3) * X(i, 3);
    auto m = fit(X, y, 4, 11);
    for (int i = 0; i < 18; ++i) {
        double mu = m.predict(to_strategy(X.row(i))).mean;
        CHECK(std::abs(mu - y(i)) < 1e-4);
    }
}
