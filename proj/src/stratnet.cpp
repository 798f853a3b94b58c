#include "prefopt/stratnet.hpp"

#include <cmath>
#include <stdexcept>

#include "prefopt/errors.hpp"

namespace prefopt {

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

template <typename M>
void adam_piece(M& p, M& m, M& v, const M& g, double lr, double bc1, double bc2) {
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = (kBeta2 * v.array() + (1.0 - kBeta2) * g.array().square()).matrix();
    p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + kEps);
}
} // namespace

bool NetGrads::all_finite() const {
    return W1.allFinite() && b1.allFinite() && W2.allFinite() && b2.allFinite() &&
           W3.allFinite() && b3.allFinite();
}

NetGrads& NetGrads::operator+=(const NetGrads& o) {
    W1 += o.W1;
    b1 += o.b1;
    W2 += o.W2;
    b2 += o.b2;
    W3 += o.W3;
    b3 += o.b3;
    return *this;
}

StratNet::StratNet(int d, std::uint64_t seed, double lr) : d_(d), lr_(lr), seed_(seed) {
    Rng rng(seed);
    auto glorot = [&](int fan_in, int fan_out) {
        return std::sqrt(6.0 / (fan_in + fan_out));
    };
    double lim1 = glorot(1, kHidden), lim2 = glorot(kHidden, kHidden), lim3 = glorot(kHidden, d);
    W1.resize(kHidden);
    for (int i = 0; i < kHidden; ++i) W1(i) = rng.uniform(-lim1, lim1);
    W2.resize(kHidden, kHidden);
    for (int i = 0; i < kHidden; ++i)
        for (int j = 0; j < kHidden; ++j) W2(i, j) = rng.uniform(-lim2, lim2);
    W3.resize(d, kHidden);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < kHidden; ++j) W3(i, j) = rng.uniform(-lim3, lim3);
    b1 = Eigen::VectorXd::Zero(kHidden);
    b2 = Eigen::VectorXd::Zero(kHidden);
    b3 = Eigen::VectorXd::Zero(d);

    auto zeros_like = [&](NetGrads& g) {
        g.W1 = Eigen::VectorXd::Zero(kHidden);
        g.b1 = Eigen::VectorXd::Zero(kHidden);
        g.W2 = Eigen::MatrixXd::Zero(kHidden, kHidden);
        g.b2 = Eigen::VectorXd::Zero(kHidden);
        g.W3 = Eigen::MatrixXd::Zero(d, kHidden);
        g.b3 = Eigen::VectorXd::Zero(d);
    };
    zeros_like(m_);
    zeros_like(v_);
}

Strategy StratNet::forward(const Request& lam, NetTape* tape) const {
    Eigen::VectorXd a1 = (W1 * lam.lambda1 + b1).array().tanh();
    Eigen::VectorXd a2 = (W2 * a1 + b2).array().tanh();
    Eigen::VectorXd z3 = W3 * a2 + b3;
    Eigen::VectorXd x = (1.0 / (1.0 + (-z3.array()).exp()));
    if (tape) {
        tape->lambda1 = lam.lambda1;
        tape->a1 = a1;
        tape->a2 = a2;
        tape->x = x;
    }
    Strategy s;
    s.values.assign(x.data(), x.data() + d_);
    return s;
}

NetGrads StratNet::backward(const NetTape& tape, const Eigen::VectorXd& upstream) const {
    if (upstream.size() != d_) throw std::invalid_argument("backward: upstream size mismatch");
    NetGrads g;
    Eigen::VectorXd dz3 =
        upstream.array() * tape.x.array() * (1.0 - tape.x.array()); // sigmoid'
    g.W3 = dz3 * tape.a2.transpose();
    g.b3 = dz3;
    Eigen::VectorXd da2 = W3.transpose() * dz3;
    Eigen::VectorXd dz2 = da2.array() * (1.0 - tape.a2.array().square()); // tanh'
    g.W2 = dz2 * tape.a1.transpose();
    g.b2 = dz2;
    Eigen::VectorXd da1 = W2.transpose() * dz2;
    Eigen::VectorXd dz1 = da1.array() * (1.0 - tape.a1.array().square());
    g.W1 = dz1 * tape.lambda1;
    g.b1 = dz1;
    return g;
}

void StratNet::adam_update(const NetGrads& g) {
    ++t_;
    double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    adam_piece(W1, m_.W1, v_.W1, g.W1, lr_, bc1, bc2);
    adam_piece(b1, m_.b1, v_.b1, g.b1, lr_, bc1, bc2);
    adam_piece(W2, m_.W2, v_.W2, g.W2, lr_, bc1, bc2);
    adam_piece(b2, m_.b2, v_.b2, g.b2, lr_, bc1, bc2);
    adam_piece(W3, m_.W3, v_.W3, g.W3, lr_, bc1, bc2);
    adam_piece(b3, m_.b3, v_.b3, g.b3, lr_, bc1, bc2);
}

double StratNet::training_step(const SurrogateModel& model, const AcquisitionConfig& acq,
                               const ScalarizerKind& scal, const IdealPoint& z, int K,
                               Rng& rng) {
    NetGrads sum;
    double loss = 0.0;
    for (int k = 0; k < K; ++k) {
        Request lam = sample_request(rng);
        NetTape tape;
        Strategy x = forward(lam, &tape);
        double f1 = size_objective(x);
        auto [f2_hat, grad_f2] = model.acquire(x, acq);
        ScalarGrad sg = scalarizer_grad(scal, f1, f2_hat, lam, z);
        Eigen::VectorXd upstream =
            Eigen::VectorXd::Constant(d_, sg.w1 * size_objective_grad(d_)) + sg.w2 * grad_f2;
        NetGrads g = backward(tape, upstream);
        if (!g.all_finite())
            throw NumericalFailure("training_step: non-finite gradient at lambda1=" +
                                   std::to_string(lam.lambda1));
        loss += sg.value;
        if (k == 0)
            sum = std::move(g);
        else
            sum += g;
    }
    adam_update(sum);
    return loss / K;
}

std::vector<double> StratNet::flatten_params() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    auto push_vec = [&](const Eigen::VectorXd& v) {
        out.insert(out.end(), v.data(), v.data() + v.size());
    };
    auto push_mat = [&](const Eigen::MatrixXd& m) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    };
    push_vec(W1);
    push_vec(b1);
    push_mat(W2);
    push_vec(b2);
    push_mat(W3);
    push_vec(b3);
    return out;
}

namespace {
std::vector<double> flatten_grads(const NetGrads& g) {
    std::vector<double> out;
    auto push_vec = [&](const Eigen::VectorXd& v) {
        out.insert(out.end(), v.data(), v.data() + v.size());
    };
    auto push_mat = [&](const Eigen::MatrixXd& m) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    };
    push_vec(g.W1);
    push_vec(g.b1);
    push_mat(g.W2);
    push_vec(g.b2);
    push_mat(g.W3);
    push_vec(g.b3);
    return out;
}

void unflatten(const std::vector<double>& flat, int d, Eigen::VectorXd& W1, Eigen::VectorXd& b1,
               Eigen::MatrixXd& W2, Eigen::VectorXd& b2, Eigen::MatrixXd& W3,
               Eigen::VectorXd& b3) {
    const int H = StratNet::kHidden;
    size_t expect = static_cast<size_t>(H + H + H * H + H + d * H + d);
    if (flat.size() != expect) throw ConfigError("stratnet restore: parameter count mismatch");
    size_t at = 0;
    W1.resize(H);
    for (int i = 0; i < H; ++i) W1(i) = flat[at++];
    b1.resize(H);
    for (int i = 0; i < H; ++i) b1(i) = flat[at++];
    W2.resize(H, H);
    for (int i = 0; i < H; ++i)
        for (int j = 0; j < H; ++j) W2(i, j) = flat[at++];
    b2.resize(H);
    for (int i = 0; i < H; ++i) b2(i) = flat[at++];
    W3.resize(d, H);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < H; ++j) W3(i, j) = flat[at++];
    b3.resize(d);
    for (int i = 0; i < d; ++i) b3(i) = flat[at++];
}
} // namespace

std::vector<double> StratNet::flatten_moment1() const { return flatten_grads(m_); }
std::vector<double> StratNet::flatten_moment2() const { return flatten_grads(v_); }

void StratNet::restore(const std::vector<double>& params, const std::vector<double>& m1,
                       const std::vector<double>& m2, long long step) {
    unflatten(params, d_, W1, b1, W2, b2, W3, b3);
    unflatten(m1, d_, m_.W1, m_.b1, m_.W2, m_.b2, m_.W3, m_.b3);
    unflatten(m2, d_, v_.W1, v_.b1, v_.W2, v_.b2, v_.W3, v_.b3);
    t_ = step;
}

} // namespace prefopt
