#include "prefopt/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prefopt/errors.hpp"
#include "prefopt/parallel.hpp"
#include "prefopt/rng.hpp"

namespace prefopt {

namespace {

constexpr double kSqrt5 = 2.2360679774997896;
constexpr double kSigmaFloor = 1e-9;

double matern52(double r, double l, double s2) {
    double a = kSqrt5 * r / l;
    return s2 * (1.0 + a + a * a / 3.0) * std::exp(-a);
}

Eigen::MatrixXd distance_matrix(const Eigen::MatrixXd& X) {
    const int n = static_cast<int>(X.rows());
    Eigen::MatrixXd D(n, n);
    for (int i = 0; i < n; ++i) {
        D(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            double r = (X.row(i) - X.row(j)).norm();
            D(i, j) = r;
            D(j, i) = r;
        }
    }
    return D;
}

// Cholesky of K + sn2 I with multiplicative diagonal jitter escalation
Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd& Ky) {
    Eigen::LLT<Eigen::MatrixXd> llt(Ky);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    for (double jit = 1e-8; jit <= 1e-4 * 1.0000001; jit *= 10.0) {
        Eigen::MatrixXd Kj = Ky;
        Kj.diagonal() *= 1.0 + jit;
        llt.compute(Kj);
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    throw NumericalFailure("gp: Cholesky failed after jitter escalation to 1e-4");
}

struct Likelihood {
    double value;
    Eigen::MatrixXd L;
    Eigen::VectorXd alpha;
};

Likelihood log_marginal(const Eigen::MatrixXd& D, const Eigen::VectorXd& y,
                        const KernelParams& p) {
    const int n = static_cast<int>(y.size());
    Eigen::MatrixXd Ky = kernel_matrix_parallel(D, p);
    Ky.diagonal().array() += p.noise_variance();
    Likelihood out;
    out.L = robust_cholesky(Ky);
    out.alpha = out.L.transpose().triangularView<Eigen::Upper>().solve(
        out.L.triangularView<Eigen::Lower>().solve(y));
    out.value = -0.5 * y.dot(out.alpha) - out.L.diagonal().array().log().sum() -
                0.5 * n * std::log(2.0 * M_PI);
    return out;
}

Eigen::Vector3d log_marginal_grad(const Eigen::MatrixXd& D, const Eigen::VectorXd& y,
                                  const KernelParams& p, const Likelihood& lik) {
    const int n = static_cast<int>(y.size());
    const double l = p.lengthscale();
    const double s2 = p.signal_variance();
    const double sn2 = p.noise_variance();

    // M = alpha alpha^T - Ky^{-1}
    Eigen::MatrixXd Kinv = lik.L.transpose().triangularView<Eigen::Upper>().solve(
        lik.L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n)));
    Eigen::MatrixXd M = lik.alpha * lik.alpha.transpose() - Kinv;

    double g_l = 0.0, g_s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double r = D(i, j);
            double a = kSqrt5 * r / l;
            double e = std::exp(-a);
            double k = s2 * (1.0 + a + a * a / 3.0) * e;
            double dk_dlogl = s2 * (a * a / 3.0) * (1.0 + a) * e;
            g_l += M(i, j) * dk_dlogl;
            g_s2 += M(i, j) * k;
        }
    }
    double g_sn2 = sn2 * M.trace();
    return {0.5 * g_l, 0.5 * g_s2, 0.5 * g_sn2};
}

} // namespace

void KernelParams::clamp() {
    log_lengthscale = std::clamp(log_lengthscale, std::log(1e-3), std::log(1e3));
    log_signal_variance = std::clamp(log_signal_variance, std::log(1e-8), std::log(1e8));
    log_noise_variance = std::max(log_noise_variance, std::log(1e-8));
}

double kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const KernelParams& p) {
    return matern52((x - y).norm(), p.lengthscale(), p.signal_variance());
}

Eigen::MatrixXd kernel_matrix_serial(const Eigen::MatrixXd& dist, const KernelParams& p) {
    const int n = static_cast<int>(dist.rows());
    const double l = p.lengthscale(), s2 = p.signal_variance();
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K(i, j) = matern52(dist(i, j), l, s2);
    return K;
}

Eigen::MatrixXd kernel_matrix_parallel(const Eigen::MatrixXd& dist, const KernelParams& p) {
    const int n = static_cast<int>(dist.rows());
    const double l = p.lengthscale(), s2 = p.signal_variance();
    Eigen::MatrixXd K(n, n);
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K(i, j) = matern52(dist(i, j), l, s2);
    return K;
}

AcquisitionConfig::Kind acquisition_kind_from_string(const std::string& s) {
    if (s == "none" || s == "mean") return AcquisitionConfig::Kind::MeanOnly;
    if (s == "paperlcb") return AcquisitionConfig::Kind::PaperLCB;
    if (s == "optimistic") return AcquisitionConfig::Kind::Optimistic;
    throw ConfigError("unknown acquisition kind: " + s);
}

std::string to_string(AcquisitionConfig::Kind k) {
    switch (k) {
        case AcquisitionConfig::Kind::MeanOnly: return "none";
        case AcquisitionConfig::Kind::PaperLCB: return "paperlcb";
        default: return "optimistic";
    }
}

void SurrogateModel::refresh() {
    Eigen::MatrixXd D = distance_matrix(X);
    Likelihood lik = log_marginal(D, y, params);
    chol = lik.L;
    alpha = lik.alpha;
    loglik = lik.value;
}

Posterior SurrogateModel::predict(const Strategy& xs) const {
    const int nn = n();
    const int d = dim();
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xs.values.data(), d);
    const double l = params.lengthscale();
    const double s2 = params.signal_variance();

    Eigen::VectorXd kstar(nn);
    Eigen::MatrixXd J(nn, d); // row i = grad_x k(x, X_i)
    const double gscale = -5.0 * s2 / (3.0 * l * l);
    for (int i = 0; i < nn; ++i) {
        Eigen::VectorXd diff = x - X.row(i).transpose();
        double r = diff.norm();
        double a = kSqrt5 * r / l;
        double e = std::exp(-a);
        kstar(i) = s2 * (1.0 + a + a * a / 3.0) * e;
        J.row(i) = gscale * (1.0 + a) * e * diff.transpose();
    }

    Eigen::VectorXd v = chol.triangularView<Eigen::Lower>().solve(kstar);
    Eigen::VectorXd w = chol.transpose().triangularView<Eigen::Upper>().solve(v);

    double var_s = s2 - v.squaredNorm();
    double std_s = std::sqrt(std::max(var_s, 0.0));
    double std_div = std::max(std_s, kSigmaFloor); // keeps grad_std bounded at data points

    Posterior post;
    post.mean = y_mean + y_std * kstar.dot(alpha);
    post.std = std::max(y_std * std_div, kSigmaFloor);
    post.grad_mean = y_std * (J.transpose() * alpha);
    post.grad_std = y_std * (-(J.transpose() * w) / std_div);
    return post;
}

std::pair<double, Eigen::VectorXd> SurrogateModel::acquire(const Strategy& x,
                                                           const AcquisitionConfig& cfg) const {
    Posterior post = predict(x);
    double sign = 0.0;
    if (cfg.kind == AcquisitionConfig::Kind::PaperLCB) sign = 1.0;
    if (cfg.kind == AcquisitionConfig::Kind::Optimistic) sign = -1.0;
    double k = sign * cfg.kappa;
    return {post.mean + k * post.std, post.grad_mean + k * post.grad_std};
}

std::vector<double> acquire_values_serial(const SurrogateModel& m,
                                          const std::vector<Strategy>& pool,
                                          const AcquisitionConfig& cfg) {
    std::vector<double> out(pool.size());
    for (size_t i = 0; i < pool.size(); ++i) out[i] = m.acquire(pool[i], cfg).first;
    return out;
}

std::vector<double> acquire_values_parallel(const SurrogateModel& m,
                                            const std::vector<Strategy>& pool,
                                            const AcquisitionConfig& cfg) {
    std::vector<double> out(pool.size());
    const int n = static_cast<int>(pool.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (int i = 0; i < n; ++i) out[i] = m.acquire(pool[i], cfg).first;
    return out;
}

SurrogateModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_raw, int restarts,
                   std::uint64_t seed, std::vector<std::vector<double>>* ascent_traces) {
    const int n = static_cast<int>(X.rows());
    if (n < 2) throw ConfigError("gp fit: need at least 2 samples");

    double mean = y_raw.mean();
    double sd = std::sqrt((y_raw.array() - mean).square().mean());
    if (!(sd > 1e-12)) sd = 1.0;
    Eigen::VectorXd y = (y_raw.array() - mean) / sd;

    Eigen::MatrixXd D = distance_matrix(X);
    Rng rng(seed);

    KernelParams best_params;
    double best_value = -std::numeric_limits<double>::infinity();
    if (ascent_traces) ascent_traces->clear();

    for (int r = 0; r < restarts; ++r) {
        KernelParams p;
        if (r > 0) {
            p.log_lengthscale = rng.uniform(std::log(0.1), std::log(10.0));
            p.log_signal_variance = rng.uniform(std::log(0.1), std::log(10.0));
            p.log_noise_variance = rng.uniform(std::log(1e-6), std::log(1e-2));
        }
        p.clamp();
        Likelihood cur = log_marginal(D, y, p);
        std::vector<double> trace;
        trace.push_back(cur.value);
        for (int it = 0; it < 200; ++it) {
            Eigen::Vector3d g = log_marginal_grad(D, y, p, cur);
            double step = 0.05;
            for (int h = 0; h < 16; ++h) {
                KernelParams cand = p;
                cand.log_lengthscale += step * g(0);
                cand.log_signal_variance += step * g(1);
                cand.log_noise_variance += step * g(2);
                cand.clamp();
                Likelihood next = log_marginal(D, y, cand);
                if (next.value >= cur.value) {
                    p = cand;
                    cur = std::move(next);
                    break;
                }
                step *= 0.5;
            }
            trace.push_back(cur.value);
        }
        if (ascent_traces) ascent_traces->push_back(std::move(trace));
        if (cur.value > best_value) {
            best_value = cur.value;
            best_params = p;
        }
    }

    SurrogateModel model;
    model.params = best_params;
    model.X = X;
    model.y = y;
    model.y_mean = mean;
    model.y_std = sd;
    Likelihood lik = log_marginal(D, y, best_params);
    model.chol = lik.L;
    model.alpha = lik.alpha;
    model.loglik = lik.value;
    return model;
}

} // namespace prefopt
