#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prefopt/domain.hpp"
#include "prefopt/gp.hpp"
#include "prefopt/scalarize.hpp"
#include "prefopt/stratnet.hpp"
#include "prefopt/synthetic.hpp"

namespace prefopt {

struct RunConfig {
    int d = 0;
    SyntheticSpec objective;
    int T = 50;
    int I = 1000;
    int K = 8;
    int N_init = 32;
    int C_pool = 2240;
    int batch = 10;
    AcquisitionConfig acquisition;
    ScalarizerKind scalarizer;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    std::optional<long long> eval_budget;
    bool freeze_gp_after_init = false;

    void validate() const;
};

struct MetricsRow {
    int epoch = 0;
    long long dataset_size = 0;
    long long true_evals = 0;
    double hv_true_front = 0.0;
    double mean_g_tch = 0.0;
    double gp_loglik = 0.0;
    double wall_ms = 0.0; // kept at 0 so metrics files are reproducible byte-for-byte
};

struct TrainingDataset {
    std::vector<Strategy> X;
    std::vector<ObjectivePair> F; // true evaluations only
    std::vector<MetricsRow> history;
};

struct TrainedBundle {
    RunConfig cfg;
    TrainingDataset data;
    SurrogateModel gp;
    StratNet net;
    EvalLedger ledger;
    int epochs_done = 0;
    bool partial = false; // eval budget ran out before T epochs

    std::vector<Strategy> last_pool; // provenance of the latest appended batch
};

// fixed raw-space reference for the metrics HV column; synthetic objectives
// keep both f1 and f2 in [0,1] so this dominates the whole reachable box
inline constexpr double kMetricsRef = 1.1;

// Latin hypercube over [0,1]^d: one sample per stratum in every coordinate
std::vector<Strategy> latin_hypercube(int n, int d, Rng& rng);

// ideal point for the scalarizers: f1's bound is analytic (f1 >= 0 by
// construction), f2's is the running minimum of observed true values
IdealPoint current_ideal(const TrainingDataset& data);

TrainedBundle initialize(const RunConfig& cfg);

// one epoch: GP refit, I network updates, pool construction, greedy HVI
// selection, true evaluation of the batch, metrics row
void run_epoch(TrainedBundle& st, int epoch);

// full run; writes checkpoint_<epoch>.json, metrics.csv and bundle.json into
// out_dir when it is nonempty; resume_path restarts from a saved checkpoint
TrainedBundle run(const RunConfig& cfg, const std::string& out_dir = "",
                  const std::string& resume_path = "");

struct Answer {
    Request request;
    Strategy x;
    double f1 = 0.0;
    double f2_surrogate = 0.0;
};

// pure forward passes through the trained bundle; never touches the ledger
std::vector<Answer> answer_requests(const TrainedBundle& bundle,
                                    const std::vector<Request>& requests,
                                    std::optional<BinarizeMode> binarize_mode = std::nullopt,
                                    int topk = 0);

} // namespace prefopt
