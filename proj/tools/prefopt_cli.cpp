#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prefopt/checkpoint.hpp"
#include "prefopt/errors.hpp"
#include "prefopt/pareto.hpp"
#include "prefopt/trainer.hpp"

namespace {
using namespace prefopt;

std::vector<Request> grid_requests(int n) {
    if (n < 2) throw ConfigError("grid must be >= 2");
    std::vector<Request> out(n);
    for (int i = 0; i < n; ++i) out[i].lambda1 = static_cast<double>(i) / (n - 1);
    return out;
}

void chomp(std::string& line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
        line.pop_back();
}

std::vector<Request> read_requests_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open requests file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("requests file is empty: " + path);
    chomp(line);
    if (line != "lambda1")
        throw ConfigError("requests file must start with a 'lambda1' header, got: " + line);
    std::vector<Request> out;
    while (std::getline(in, line)) {
        chomp(line);
        if (line.empty()) continue;
        Request r;
        try {
            r.lambda1 = std::stod(line);
        } catch (const std::exception&) {
            throw ConfigError("requests file: bad lambda1 value '" + line + "'");
        }
        r.validate();
        out.push_back(r);
    }
    return out;
}

std::optional<BinarizeMode> parse_binarize(const std::string& s, int& k) {
    if (s.empty()) return std::nullopt;
    if (s == "threshold") return BinarizeMode::Threshold;
    if (s.rfind("topk:", 0) == 0) {
        try {
            k = std::stoi(s.substr(5));
        } catch (const std::exception&) {
            throw ConfigError("bad binarize mode: " + s);
        }
        return BinarizeMode::TopK;
    }
    throw ConfigError("bad binarize mode: " + s + " (expected threshold | topk:<k>)");
}

double oracle_hv(const SyntheticSpec& spec, int resolution) {
    FrontSet fs;
    for (const auto& p : pareto_oracle(spec, resolution)) fs.points.emplace_back(p.f.f1, p.f.f2);
    fs.reference = {kMetricsRef, kMetricsRef};
    return hypervolume(fs);
}

// true-evaluates answers in order until `budget` fresh (uncached) calls are
// spent; returns the values it managed to produce
std::vector<double> true_eval_prefix(TrainedBundle& b, const std::vector<Answer>& answers,
                                     long long budget) {
    SyntheticObjective obj(b.cfg.objective);
    std::vector<double> out;
    long long added = 0;
    for (const auto& a : answers) {
        bool fresh = !b.ledger.cached(a.x);
        if (fresh && added >= budget) break;
        out.push_back(evaluate_true(obj, a.x, b.ledger));
        if (fresh) ++added;
    }
    return out;
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              const std::string& resume_path) {
    RunConfig cfg;
    if (resume_path.empty()) cfg = load_run_config(config_path);
    TrainedBundle b = run(cfg, out_dir, resume_path);
    const MetricsRow& last = b.data.history.back();
    std::cout << "train: epochs=" << b.epochs_done << " true_evals=" << b.ledger.true_evaluations
              << " hv=" << format_double(last.hv_true_front) << " partial=" << (b.partial ? 1 : 0)
              << "\n";
    return b.partial ? BudgetExhausted::exit_code : 0;
}

int cmd_answer(const std::string& bundle_path, const std::string& requests_path, int grid,
               const std::string& binarize_str, const std::string& out_path, bool true_eval,
               long long eval_budget) {
    TrainedBundle b = load_bundle(bundle_path);
    if (requests_path.empty() == (grid == 0))
        throw ConfigError("answer needs exactly one of a requests file or --grid N");
    if (true_eval && eval_budget < 0)
        throw ConfigError("--true-eval requires --eval-budget");
    int topk = 0;
    auto mode = parse_binarize(binarize_str, topk);

    auto requests = requests_path.empty() ? grid_requests(grid) : read_requests_csv(requests_path);
    auto answers = answer_requests(b, requests, mode, topk);
    std::vector<double> f2_true;
    if (true_eval) f2_true = true_eval_prefix(b, answers, eval_budget);
    size_t rows = true_eval ? f2_true.size() : answers.size();

    const int d = b.cfg.d;
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write: " + out_path);
    out << "lambda1,f1,f2_surrogate";
    if (true_eval) out << ",f2_true";
    for (int j = 0; j < d; ++j) out << ",x" << j;
    out << "\n";
    for (size_t i = 0; i < rows; ++i) {
        const Answer& a = answers[i];
        out << format_double(a.request.lambda1) << ',' << format_double(a.f1) << ','
            << format_double(a.f2_surrogate);
        if (true_eval) out << ',' << format_double(f2_true[i]);
        for (int j = 0; j < d; ++j) out << ',' << format_double(a.x.values[j]);
        out << "\n";
    }
    std::cout << "answer: rows=" << rows << " true_evals=" << b.ledger.true_evaluations << "\n";
    return rows == answers.size() ? 0 : BudgetExhausted::exit_code;
}

int cmd_sweep(const std::string& bundle_path, int grid, const std::string& out_path,
              bool true_eval, long long eval_budget) {
    TrainedBundle b = load_bundle(bundle_path);
    if (true_eval && eval_budget < 0)
        throw ConfigError("--true-eval requires --eval-budget");

    auto answers = answer_requests(b, grid_requests(grid));
    std::vector<double> f2_true;
    if (true_eval) f2_true = true_eval_prefix(b, answers, eval_budget);
    size_t rows = true_eval ? f2_true.size() : answers.size();

    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write: " + out_path);
    out << "lambda1,f1,f2_surrogate";
    if (true_eval) out << ",f2_true";
    out << "\n";
    bool f1_noninc = true;
    for (size_t i = 0; i < rows; ++i) {
        const Answer& a = answers[i];
        if (i > 0 && a.f1 > answers[i - 1].f1 + 1e-12) f1_noninc = false;
        out << format_double(a.request.lambda1) << ',' << format_double(a.f1) << ','
            << format_double(a.f2_surrogate);
        if (true_eval) out << ',' << format_double(f2_true[i]);
        out << "\n";
    }
    std::cout << "sweep: rows=" << rows << " true_evals=" << b.ledger.true_evaluations
              << " f1_nonincreasing=" << (f1_noninc ? 1 : 0) << "\n";
    return rows == answers.size() ? 0 : BudgetExhausted::exit_code;
}

int cmd_compare(const std::string& config_path, const std::vector<std::string>& variants,
                const std::string& out_path, int resolution) {
    static const std::set<std::string> known = {"ws",       "tch",          "pbi:0.1",
                                                "pbi:5",    "acq:none",     "acq:paperlcb",
                                                "acq:optimistic"};
    for (const auto& v : variants)
        if (!known.count(v)) throw ConfigError("unknown variant: " + v);

    RunConfig base = load_run_config(config_path);
    double ohv = oracle_hv(base.objective, resolution);
    if (!(ohv > 0.0)) throw NumericalFailure("oracle hypervolume is not positive");

    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write: " + out_path);
    out << "variant,final_hv,hv_ratio\n";
    for (const auto& v : variants) {
        RunConfig cfg = base; // same master seed for every variant
        if (v.rfind("acq:", 0) == 0)
            cfg.acquisition.kind = acquisition_kind_from_string(v.substr(4));
        else
            cfg.scalarizer = ScalarizerKind::parse(v);
        TrainedBundle b = run(cfg);
        double hv = b.data.history.back().hv_true_front;
        out << v << ',' << format_double(hv) << ',' << format_double(hv / ohv) << "\n";
    }
    std::cout << "compare: variants=" << variants.size() << " oracle_hv=" << format_double(ohv)
              << "\n";
    return 0;
}

int cmd_oracle(const std::string& config_path, int resolution, const std::string& out_path) {
    RunConfig cfg = load_run_config(config_path);
    auto front = pareto_oracle(cfg.objective, resolution);
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write: " + out_path);
    out << "f1,f2,source\n";
    FrontSet fs;
    fs.reference = {kMetricsRef, kMetricsRef};
    for (const auto& p : front) {
        out << format_double(p.f.f1) << ',' << format_double(p.f.f2) << ",true\n";
        fs.points.emplace_back(p.f.f1, p.f.f2);
    }
    std::cout << "oracle: points=" << front.size() << " hv=" << format_double(hypervolume(fs))
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"preference-conditioned strategy optimizer"};
    app.require_subcommand(1);

    std::string tr_config, tr_out = "out", tr_resume;
    auto* tr = app.add_subcommand("train", "run the optimization loop from a config");
    tr->add_option("config", tr_config, "config JSON path");
    tr->add_option("--out", tr_out, "output directory (metrics.csv, checkpoints, bundle.json)");
    tr->add_option("--resume", tr_resume, "checkpoint JSON to resume from");

    std::string an_bundle, an_requests, an_binarize, an_out = "answers.csv";
    int an_grid = 0;
    bool an_true = false;
    long long an_budget = -1;
    auto* an = app.add_subcommand("answer", "map requests to strategies with a trained bundle");
    an->add_option("bundle", an_bundle, "bundle JSON path")->required();
    an->add_option("requests", an_requests, "CSV of requests with header lambda1");
    an->add_option("--grid", an_grid, "use N evenly spaced requests instead of a file");
    an->add_option("--binarize", an_binarize, "threshold | topk:<k>");
    an->add_option("--out", an_out, "output CSV path");
    an->add_flag("--true-eval", an_true, "also evaluate the true objective per answer");
    an->add_option("--eval-budget", an_budget, "cap on fresh true evaluations");

    std::string sw_bundle, sw_out = "front.csv";
    int sw_grid = 101;
    bool sw_true = false;
    long long sw_budget = -1;
    auto* sw = app.add_subcommand("sweep", "trace the trained front over a lambda grid");
    sw->add_option("bundle", sw_bundle, "bundle JSON path")->required();
    sw->add_option("--grid", sw_grid, "number of lambda grid points");
    sw->add_flag("--true-eval", sw_true, "add an f2_true column");
    sw->add_option("--eval-budget", sw_budget, "cap on fresh true evaluations");
    sw->add_option("--out", sw_out, "output CSV path");

    std::string cp_config, cp_out = "compare.csv";
    std::vector<std::string> cp_variants;
    int cp_res = 101;
    auto* cp = app.add_subcommand("compare", "train once per variant with a shared seed");
    cp->add_option("config", cp_config, "config JSON path")->required();
    cp->add_option("variants", cp_variants,
                   "ws | tch | pbi:0.1 | pbi:5 | acq:none | acq:paperlcb | acq:optimistic")
        ->required();
    cp->add_option("--out", cp_out, "output CSV path");
    cp->add_option("--resolution", cp_res, "oracle grid resolution");

    std::string orc_config, orc_out = "oracle.csv";
    int orc_res = 101;
    auto* orc = app.add_subcommand("oracle", "ground-truth front of a config's objective");
    orc->add_option("config", orc_config, "config JSON path")->required();
    orc->add_option("--resolution", orc_res, "per-coordinate grid resolution");
    orc->add_option("--out", orc_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : prefopt::ConfigError::exit_code;
    }

    try {
        if (*tr) {
            if (tr_config.empty() && tr_resume.empty())
                throw prefopt::ConfigError("train needs a config path or --resume");
            return cmd_train(tr_config, tr_out, tr_resume);
        }
        if (*an)
            return cmd_answer(an_bundle, an_requests, an_grid, an_binarize, an_out, an_true,
                              an_budget);
        if (*sw) return cmd_sweep(sw_bundle, sw_grid, sw_out, sw_true, sw_budget);
        if (*cp) return cmd_compare(cp_config, cp_variants, cp_out, cp_res);
        if (*orc) return cmd_oracle(orc_config, orc_res, orc_out);
    } catch (const prefopt::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return prefopt::ConfigError::exit_code;
    } catch (const prefopt::NumericalFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return prefopt::NumericalFailure::exit_code;
    } catch (const prefopt::EvaluatorFault& e) {
        std::cerr << "error: " << e.what() << "\n";
        return prefopt::EvaluatorFault::exit_code;
    } catch (const prefopt::BudgetExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return prefopt::BudgetExhausted::exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return prefopt::ConfigError::exit_code;
    }
    return 0;
}
