#pragma once
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "prefopt/domain.hpp"

namespace prefopt {

// Matern 5/2 hyperparameters in log space; clamped to keep the fit stable
struct KernelParams {
    double log_lengthscale = 0.0;
    double log_signal_variance = 0.0;
    double log_noise_variance = std::log(1e-4);

    void clamp();
    double lengthscale() const { return std::exp(log_lengthscale); }
    double signal_variance() const { return std::exp(log_signal_variance); }
    double noise_variance() const { return std::exp(log_noise_variance); }
};

double kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const KernelParams& p);

// kernel matrix assembly from a precomputed distance matrix; the parallel
// variant fills row blocks and is bitwise identical to the serial one
Eigen::MatrixXd kernel_matrix_serial(const Eigen::MatrixXd& dist, const KernelParams& p);
Eigen::MatrixXd kernel_matrix_parallel(const Eigen::MatrixXd& dist, const KernelParams& p);

struct Posterior {
    double mean = 0.0;
    double std = 0.0;
    Eigen::VectorXd grad_mean;
    Eigen::VectorXd grad_std;
};

struct AcquisitionConfig {
    enum class Kind { MeanOnly, PaperLCB, Optimistic };
    Kind kind = Kind::PaperLCB;
    double kappa = 0.5;
};

AcquisitionConfig::Kind acquisition_kind_from_string(const std::string& s);
std::string to_string(AcquisitionConfig::Kind k);

class SurrogateModel {
  public:
    SurrogateModel() = default;

    // state sufficient to rebuild: hyperparameters, data, standardization
    KernelParams params;
    Eigen::MatrixXd X;      // n x d training strategies
    Eigen::VectorXd y;      // standardized targets
    double y_mean = 0.0;
    double y_std = 1.0;
    double loglik = 0.0;

    // derived factors; recomputed by refresh()
    Eigen::MatrixXd chol;   // lower-triangular L with L L^T = K + sn2 I
    Eigen::VectorXd alpha;  // (K + sn2 I)^{-1} y

    int n() const { return static_cast<int>(X.rows()); }
    int dim() const { return static_cast<int>(X.cols()); }

    // rebuild chol/alpha/loglik from params + data (used after deserializing)
    void refresh();

    Posterior predict(const Strategy& x) const;

    // acquisition value f2_hat and its input gradient; this value is what
    // every downstream consumer treats as the performance estimate
    std::pair<double, Eigen::VectorXd> acquire(const Strategy& x,
                                               const AcquisitionConfig& cfg) const;
};

// acquisition values over a pool of strategies (kernel used per epoch);
// parallel variant writes one slot per strategy, bitwise equal to serial
std::vector<double> acquire_values_serial(const SurrogateModel& m,
                                          const std::vector<Strategy>& pool,
                                          const AcquisitionConfig& cfg);
std::vector<double> acquire_values_parallel(const SurrogateModel& m,
                                            const std::vector<Strategy>& pool,
                                            const AcquisitionConfig& cfg);

// marginal-likelihood gradient ascent (200 steps, backtracking so the
// objective never decreases) from `restarts` starts; returns the best model.
// ascent_traces, when given, receives the per-step likelihood of each restart.
SurrogateModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_raw, int restarts,
                   std::uint64_t seed, std::vector<std::vector<double>>* ascent_traces = nullptr);

} // namespace prefopt
