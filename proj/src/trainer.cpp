#include "prefopt/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "prefopt/checkpoint.hpp"
#include "prefopt/errors.hpp"
#include "prefopt/pareto.hpp"

namespace prefopt {

void RunConfig::validate() const {
    std::string errs;
    auto bad = [&](const std::string& m) {
        if (!errs.empty()) errs += "; ";
        errs += m;
    };
    if (d < 1) bad("d must be >= 1");
    if (T < 1) bad("T must be >= 1");
    if (I < 1) bad("I must be >= 1");
    if (K < 1) bad("K must be >= 1");
    if (N_init < 2) bad("N_init must be >= 2");
    if (C_pool < 1) bad("C_pool must be >= 1");
    if (batch < 1) bad("batch must be >= 1");
    if (!(lr > 0.0)) bad("lr must be > 0");
    if (acquisition.kappa < 0.0) bad("acquisition.kappa must be >= 0");
    if (eval_budget && *eval_budget < N_init) bad("eval_budget must cover N_init");
    if (objective.dim() != d) bad("objective dimension must equal d");
    if (!errs.empty()) throw ConfigError("config: " + errs);
    objective.validate();
}

std::vector<Strategy> latin_hypercube(int n, int d, Rng& rng) {
    std::vector<Strategy> out(n);
    for (auto& s : out) s.values.assign(d, 0.0);
    for (int j = 0; j < d; ++j) {
        auto perm = rng.permutation(n);
        for (int i = 0; i < n; ++i)
            out[i].values[j] = (perm[i] + rng.uniform()) / n;
    }
    return out;
}

IdealPoint current_ideal(const TrainingDataset& data) {
    double min_f2 = std::numeric_limits<double>::infinity();
    for (const auto& f : data.F) min_f2 = std::min(min_f2, f.f2);
    return IdealPoint{-1e-3, min_f2 - 1e-3};
}

namespace {

Eigen::MatrixXd dataset_matrix(const TrainingDataset& data) {
    const int n = static_cast<int>(data.X.size());
    const int d = n > 0 ? data.X[0].dim() : 0;
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) X(i, j) = data.X[i].values[j];
    return X;
}

Eigen::VectorXd dataset_targets(const TrainingDataset& data) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(data.F.size()));
    for (size_t i = 0; i < data.F.size(); ++i) y(static_cast<Eigen::Index>(i)) = data.F[i].f2;
    return y;
}

double true_front_hv(const TrainingDataset& data) {
    FrontSet fs;
    fs.reference = {kMetricsRef, kMetricsRef};
    fs.points.reserve(data.F.size());
    for (const auto& f : data.F) fs.points.emplace_back(f.f1, f.f2);
    return hypervolume(fs);
}

void refit_gp(TrainedBundle& st, int epoch) {
    st.gp = fit(dataset_matrix(st.data), dataset_targets(st.data), 4,
                derive_seed(st.cfg.seed, Stream::GpFit, epoch));
}

} // namespace

TrainedBundle initialize(const RunConfig& cfg) {
    cfg.validate();
    TrainedBundle st;
    st.cfg = cfg;

    Rng lhs_rng(derive_seed(cfg.seed, Stream::Lhs, 0));
    SyntheticObjective obj(cfg.objective);
    auto init = latin_hypercube(cfg.N_init, cfg.d, lhs_rng);
    for (auto& x : init) {
        double f2 = evaluate_true(obj, x, st.ledger);
        st.data.X.push_back(x);
        st.data.F.push_back(ObjectivePair{size_objective(x), f2, F2Source::True});
    }
    refit_gp(st, 0);
    st.net = StratNet(cfg.d, derive_seed(cfg.seed, Stream::NetInit, 0), cfg.lr);

    MetricsRow row;
    row.epoch = 0;
    row.dataset_size = static_cast<long long>(st.data.X.size());
    row.true_evals = st.ledger.true_evaluations;
    row.hv_true_front = true_front_hv(st.data);
    row.mean_g_tch = 0.0;
    row.gp_loglik = st.gp.loglik;
    st.data.history.push_back(row);
    return st;
}

void run_epoch(TrainedBundle& st, int epoch) {
    const RunConfig& cfg = st.cfg;
    if (!cfg.freeze_gp_after_init) refit_gp(st, epoch);

    const IdealPoint z = current_ideal(st.data);

    Rng step_rng(derive_seed(cfg.seed, Stream::NetSteps, epoch));
    double loss_sum = 0.0;
    for (int i = 0; i < cfg.I; ++i)
        loss_sum += st.net.training_step(st.gp, cfg.acquisition, cfg.scalarizer, z, cfg.K,
                                         step_rng);

    // candidate pool: jittered lambda grid through the frozen network
    Rng pool_rng(derive_seed(cfg.seed, Stream::Pool, epoch));
    std::vector<Strategy> pool(cfg.C_pool);
    std::vector<double> pf1(cfg.C_pool);
    for (int i = 0; i < cfg.C_pool; ++i) {
        Request lam{(i + pool_rng.uniform()) / cfg.C_pool};
        pool[i] = st.net.forward(lam);
        pf1[i] = size_objective(pool[i]);
    }
    std::vector<double> pf2 = acquire_values_parallel(st.gp, pool, cfg.acquisition);

    // min-max normalize by the observed true ranges so HVI scales stay put
    double lo1 = std::numeric_limits<double>::infinity(), lo2 = lo1;
    double hi1 = -lo1, hi2 = -lo1;
    for (const auto& f : st.data.F) {
        lo1 = std::min(lo1, f.f1);
        hi1 = std::max(hi1, f.f1);
        lo2 = std::min(lo2, f.f2);
        hi2 = std::max(hi2, f.f2);
    }
    double span1 = std::max(hi1 - lo1, 1e-12), span2 = std::max(hi2 - lo2, 1e-12);
    auto norm = [&](double f1, double f2) {
        return FrontPoint{(f1 - lo1) / span1, (f2 - lo2) / span2};
    };

    FrontSet existing;
    existing.reference = {1.1, 1.1};
    for (const auto& f : st.data.F) existing.points.push_back(norm(f.f1, f.f2));
    std::vector<FrontPoint> cand(cfg.C_pool);
    for (int i = 0; i < cfg.C_pool; ++i) cand[i] = norm(pf1[i], pf2[i]);

    std::vector<int> picked = select_batch(existing, cand, cfg.batch);

    SyntheticObjective obj(cfg.objective);
    for (int idx : picked) {
        if (cfg.eval_budget && st.ledger.true_evaluations >= *cfg.eval_budget) {
            st.partial = true;
            break;
        }
        double f2 = evaluate_true(obj, pool[idx], st.ledger);
        st.data.X.push_back(pool[idx]);
        st.data.F.push_back(ObjectivePair{pf1[idx], f2, F2Source::True});
    }
    st.last_pool = std::move(pool);

    MetricsRow row;
    row.epoch = epoch;
    row.dataset_size = static_cast<long long>(st.data.X.size());
    row.true_evals = st.ledger.true_evaluations;
    row.hv_true_front = true_front_hv(st.data);
    row.mean_g_tch = loss_sum / cfg.I;
    row.gp_loglik = st.gp.loglik;
    st.data.history.push_back(row);
    st.epochs_done = epoch;
}

TrainedBundle run(const RunConfig& cfg, const std::string& out_dir,
                  const std::string& resume_path) {
    namespace fs = std::filesystem;
    const bool writing = !out_dir.empty();
    if (writing) fs::create_directories(out_dir);
    auto emit = [&](const TrainedBundle& st, const std::string& name) {
        if (writing) save_bundle(st, out_dir + "/" + name);
    };

    TrainedBundle st;
    if (resume_path.empty()) {
        st = initialize(cfg);
        emit(st, "checkpoint_0.json");
    } else {
        st = load_bundle(resume_path);
    }

    for (int epoch = st.epochs_done + 1; epoch <= st.cfg.T && !st.partial; ++epoch) {
        run_epoch(st, epoch);
        emit(st, "checkpoint_" + std::to_string(epoch) + ".json");
    }

    if (writing) {
        write_metrics_csv(st.data.history, out_dir + "/metrics.csv");
        save_bundle(st, out_dir + "/bundle.json");
    }
    return st;
}

std::vector<Answer> answer_requests(const TrainedBundle& bundle,
                                    const std::vector<Request>& requests,
                                    std::optional<BinarizeMode> binarize_mode, int topk) {
    std::vector<Answer> out;
    out.reserve(requests.size());
    for (const Request& lam : requests) {
        Answer a;
        a.request = lam;
        a.x = bundle.net.forward(lam);
        if (binarize_mode) a.x = binarize(a.x, *binarize_mode, topk);
        a.f1 = size_objective(a.x);
        a.f2_surrogate = bundle.gp.acquire(a.x, bundle.cfg.acquisition).first;
        out.push_back(std::move(a));
    }
    return out;
}

} // namespace prefopt
