#pragma once
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "prefopt/domain.hpp"
#include "prefopt/gp.hpp"
#include "prefopt/scalarize.hpp"

namespace prefopt {

// activations cached by forward for the matching backward call
struct NetTape {
    double lambda1 = 0.0;
    Eigen::VectorXd a1; // tanh(W1*l + b1)
    Eigen::VectorXd a2; // tanh(W2*a1 + b2)
    Eigen::VectorXd x;  // sigmoid(W3*a2 + b3)
};

struct NetGrads {
    Eigen::VectorXd W1, b1;
    Eigen::MatrixXd W2;
    Eigen::VectorXd b2;
    Eigen::MatrixXd W3;
    Eigen::VectorXd b3;

    bool all_finite() const;
    NetGrads& operator+=(const NetGrads& o);
};

// the request-to-strategy MLP: scalar lambda1 -> 64 tanh -> 64 tanh ->
// d sigmoid, trained with Adam on scalarized surrogate gradients
class StratNet {
  public:
    static constexpr int kHidden = 64;

    StratNet() = default;
    StratNet(int d, std::uint64_t seed, double lr);

    int dim() const { return d_; }
    double lr() const { return lr_; }
    std::uint64_t seed() const { return seed_; }
    long long step_count() const { return t_; }
    int parameter_count() const { return kHidden + kHidden + kHidden * kHidden + kHidden + d_ * kHidden + d_; }

    Strategy forward(const Request& lam, NetTape* tape = nullptr) const;

    // gradient of (upstream . x) wrt all parameters
    NetGrads backward(const NetTape& tape, const Eigen::VectorXd& upstream) const;

    void adam_update(const NetGrads& g);

    // one update: K sampled requests, summed parameter gradients through the
    // scalarizer branch weights and the GP acquisition; returns the mean
    // scalarized loss over the K samples
    double training_step(const SurrogateModel& model, const AcquisitionConfig& acq,
                         const ScalarizerKind& scal, const IdealPoint& z, int K, Rng& rng);

    // flattened parameter/bookkeeping access for checkpoints (row-major
    // W1,b1,W2,b2,W3,b3 order)
    std::vector<double> flatten_params() const;
    std::vector<double> flatten_moment1() const;
    std::vector<double> flatten_moment2() const;
    void restore(const std::vector<double>& params, const std::vector<double>& m1,
                 const std::vector<double>& m2, long long step);

    Eigen::VectorXd W1, b1;
    Eigen::MatrixXd W2;
    Eigen::VectorXd b2;
    Eigen::MatrixXd W3;
    Eigen::VectorXd b3;

  private:
    int d_ = 0;
    double lr_ = 1e-3;
    std::uint64_t seed_ = 0;
    long long t_ = 0;
    NetGrads m_, v_; // Adam first/second moments
};

} // namespace prefopt
