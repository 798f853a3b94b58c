#include "prefopt/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "prefopt/errors.hpp"

namespace prefopt {

namespace {
constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}
} // namespace

std::string base64_encode_doubles(const std::vector<double>& v) {
    std::vector<unsigned char> bytes(v.size() * 8);
    for (size_t i = 0; i < v.size(); ++i) {
        std::uint64_t u;
        std::memcpy(&u, &v[i], 8);
        for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = (u >> (8 * b)) & 0xFF; // little-endian
    }
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (size_t i = 0; i < bytes.size(); i += 3) {
        unsigned int chunk = bytes[i] << 16;
        int have = 1;
        if (i + 1 < bytes.size()) {
            chunk |= bytes[i + 1] << 8;
            have = 2;
        }
        if (i + 2 < bytes.size()) {
            chunk |= bytes[i + 2];
            have = 3;
        }
        out.push_back(kB64[(chunk >> 18) & 63]);
        out.push_back(kB64[(chunk >> 12) & 63]);
        out.push_back(have >= 2 ? kB64[(chunk >> 6) & 63] : '=');
        out.push_back(have >= 3 ? kB64[chunk & 63] : '=');
    }
    return out;
}

std::vector<double> base64_decode_doubles(const std::string& s) {
    std::vector<unsigned char> bytes;
    bytes.reserve(s.size() / 4 * 3);
    unsigned int chunk = 0;
    int have = 0;
    for (char c : s) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        int v = b64_value(c);
        if (v < 0) throw ConfigError("checkpoint: invalid base64 payload");
        chunk = (chunk << 6) | static_cast<unsigned int>(v);
        if (++have == 4) {
            bytes.push_back((chunk >> 16) & 0xFF);
            bytes.push_back((chunk >> 8) & 0xFF);
            bytes.push_back(chunk & 0xFF);
            have = 0;
            chunk = 0;
        }
    }
    if (have == 2)
        bytes.push_back((chunk >> 4) & 0xFF);
    else if (have == 3) {
        bytes.push_back((chunk >> 10) & 0xFF);
        bytes.push_back((chunk >> 2) & 0xFF);
    } else if (have != 0) {
        throw ConfigError("checkpoint: truncated base64 payload");
    }
    if (bytes.size() % 8 != 0) throw ConfigError("checkpoint: base64 length not a float64 array");
    std::vector<double> out(bytes.size() / 8);
    for (size_t i = 0; i < out.size(); ++i) {
        std::uint64_t u = 0;
        for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
        std::memcpy(&out[i], &u, 8);
    }
    return out;
}

namespace {

std::string family_name(Family f) { return f == Family::PowerSum ? "powersum" : "coupled"; }

Family family_from(const std::string& s, std::vector<std::string>& errs) {
    if (s == "powersum") return Family::PowerSum;
    if (s == "coupled") return Family::Coupled;
    errs.push_back("objective.family must be 'powersum' or 'coupled'");
    return Family::PowerSum;
}

nlohmann::json spec_to_json(const SyntheticSpec& s) {
    nlohmann::json j;
    j["family"] = family_name(s.family);
    j["weights"] = s.weights;
    j["exponents"] = s.exponents;
    j["interaction"] = s.interaction;
    j["seed"] = s.seed;
    return j;
}

} // namespace

nlohmann::json run_config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["d"] = cfg.d;
    j["objective"] = spec_to_json(cfg.objective);
    j["T"] = cfg.T;
    j["I"] = cfg.I;
    j["K"] = cfg.K;
    j["N_init"] = cfg.N_init;
    j["C_pool"] = cfg.C_pool;
    j["batch"] = cfg.batch;
    j["acquisition"] = {{"kind", to_string(cfg.acquisition.kind)},
                        {"kappa", cfg.acquisition.kappa}};
    j["scalarizer"] = cfg.scalarizer.str();
    j["lr"] = cfg.lr;
    j["seed"] = cfg.seed;
    if (cfg.eval_budget) j["eval_budget"] = *cfg.eval_budget;
    j["freeze_gp_after_init"] = cfg.freeze_gp_after_init;
    return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    std::vector<std::string> errs;
    RunConfig cfg;

    auto need_int = [&](const char* key, int& slot) {
        if (!j.contains(key))
            errs.push_back(std::string("missing required field '") + key + "'");
        else if (!j[key].is_number_integer())
            errs.push_back(std::string("field '") + key + "' must be an integer");
        else
            slot = j[key].get<int>();
    };
    auto opt_int = [&](const char* key, int& slot) {
        if (!j.contains(key)) return;
        if (!j[key].is_number_integer())
            errs.push_back(std::string("field '") + key + "' must be an integer");
        else
            slot = j[key].get<int>();
    };

    need_int("d", cfg.d);
    need_int("T", cfg.T);
    if (!j.contains("seed"))
        errs.push_back("missing required field 'seed'");
    else if (!j["seed"].is_number())
        errs.push_back("field 'seed' must be a number");
    else
        cfg.seed = j["seed"].get<std::uint64_t>();

    opt_int("I", cfg.I);
    opt_int("K", cfg.K);
    opt_int("N_init", cfg.N_init);
    opt_int("C_pool", cfg.C_pool);
    opt_int("batch", cfg.batch);

    if (j.contains("lr")) {
        if (!j["lr"].is_number())
            errs.push_back("field 'lr' must be a number");
        else
            cfg.lr = j["lr"].get<double>();
    }
    if (j.contains("eval_budget")) {
        if (!j["eval_budget"].is_number_integer())
            errs.push_back("field 'eval_budget' must be an integer");
        else
            cfg.eval_budget = j["eval_budget"].get<long long>();
    }
    if (j.contains("freeze_gp_after_init")) {
        if (!j["freeze_gp_after_init"].is_boolean())
            errs.push_back("field 'freeze_gp_after_init' must be a boolean");
        else
            cfg.freeze_gp_after_init = j["freeze_gp_after_init"].get<bool>();
    }
    if (j.contains("scalarizer")) {
        if (!j["scalarizer"].is_string()) {
            errs.push_back("field 'scalarizer' must be a string (ws | tch | pbi:<xi>)");
        } else {
            try {
                cfg.scalarizer = ScalarizerKind::parse(j["scalarizer"].get<std::string>());
            } catch (const ConfigError& e) {
                errs.push_back(e.what());
            }
        }
    }
    if (j.contains("acquisition")) {
        const auto& a = j["acquisition"];
        if (!a.is_object()) {
            errs.push_back("field 'acquisition' must be an object");
        } else {
            if (a.contains("kind")) {
                try {
                    cfg.acquisition.kind =
                        acquisition_kind_from_string(a["kind"].get<std::string>());
                } catch (const std::exception& e) {
                    errs.push_back(e.what());
                }
            }
            if (a.contains("kappa")) {
                if (!a["kappa"].is_number())
                    errs.push_back("field 'acquisition.kappa' must be a number");
                else
                    cfg.acquisition.kappa = a["kappa"].get<double>();
            }
        }
    }

    if (!j.contains("objective")) {
        errs.push_back("missing required field 'objective'");
    } else if (!j["objective"].is_object()) {
        errs.push_back("field 'objective' must be an object");
    } else {
        const auto& o = j["objective"];
        Family fam = Family::PowerSum;
        if (!o.contains("family"))
            errs.push_back("missing required field 'objective.family'");
        else
            fam = family_from(o["family"].get<std::string>(), errs);
        std::uint64_t oseed = 0;
        bool have_seed = o.contains("seed");
        if (have_seed) oseed = o["seed"].get<std::uint64_t>();
        bool have_arrays = o.contains("weights") && o.contains("exponents");
        if (have_arrays) {
            cfg.objective.family = fam;
            cfg.objective.seed = oseed;
            cfg.objective.weights = o["weights"].get<std::vector<double>>();
            cfg.objective.exponents = o["exponents"].get<std::vector<double>>();
            if (o.contains("interaction") && !o["interaction"].empty())
                cfg.objective.interaction =
                    o["interaction"].get<std::vector<std::vector<double>>>();
        } else if (have_seed && cfg.d >= 1) {
            cfg.objective = SyntheticSpec::random(oseed, fam, cfg.d);
        } else if (!have_seed) {
            errs.push_back("objective needs either explicit 'weights'/'exponents' or a 'seed'");
        }
    }

    if (!errs.empty()) {
        std::string all = "config:";
        for (const auto& e : errs) all += " [" + e + "]";
        throw ConfigError(all);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return run_config_from_json(j);
}

nlohmann::json bundle_to_json(const TrainedBundle& b) {
    nlohmann::json j;
    j["format"] = "prefopt-bundle-v1";
    j["epoch"] = b.epochs_done;
    j["partial"] = b.partial;
    j["config"] = run_config_to_json(b.cfg);

    const int n = static_cast<int>(b.data.X.size());
    const int d = b.cfg.d;
    std::vector<double> xs(static_cast<size_t>(n) * d), f1(n), f2(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) xs[static_cast<size_t>(i) * d + k] = b.data.X[i].values[k];
        f1[i] = b.data.F[i].f1;
        f2[i] = b.data.F[i].f2;
    }
    j["dataset"] = {{"n", n},
                    {"d", d},
                    {"x", base64_encode_doubles(xs)},
                    {"f1", base64_encode_doubles(f1)},
                    {"f2", base64_encode_doubles(f2)}};

    // the surrogate is always conditioned on a prefix of the dataset (the
    // refit happens before each batch lands), so n is enough to rebuild it
    j["gp"] = {{"n", b.gp.n()},
               {"log_lengthscale", b.gp.params.log_lengthscale},
               {"log_signal_variance", b.gp.params.log_signal_variance},
               {"log_noise_variance", b.gp.params.log_noise_variance},
               {"y_mean", b.gp.y_mean},
               {"y_std", b.gp.y_std}};

    j["net"] = {{"hidden", StratNet::kHidden},
                {"seed", b.net.seed()},
                {"lr", b.net.lr()},
                {"step", b.net.step_count()},
                {"params", base64_encode_doubles(b.net.flatten_params())},
                {"m1", base64_encode_doubles(b.net.flatten_moment1())},
                {"m2", base64_encode_doubles(b.net.flatten_moment2())}};

    j["ledger"] = {{"true_evaluations", b.ledger.true_evaluations},
                   {"cache_hits", b.ledger.cache_hits}};

    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : b.data.history) {
        rows.push_back({{"epoch", r.epoch},
                        {"dataset_size", r.dataset_size},
                        {"true_evals", r.true_evals},
                        {"hv_true_front", r.hv_true_front},
                        {"mean_g_tch", r.mean_g_tch},
                        {"gp_loglik", r.gp_loglik},
                        {"wall_ms", r.wall_ms}});
    }
    j["metrics"] = rows;
    return j;
}

TrainedBundle bundle_from_json(const nlohmann::json& j) {
    if (!j.contains("format") || j["format"] != "prefopt-bundle-v1")
        throw ConfigError("bundle: unrecognized format tag");
    TrainedBundle b;
    b.cfg = run_config_from_json(j.at("config"));
    b.epochs_done = j.at("epoch").get<int>();
    b.partial = j.at("partial").get<bool>();

    const auto& ds = j.at("dataset");
    const int n = ds.at("n").get<int>();
    const int d = ds.at("d").get<int>();
    if (d != b.cfg.d) throw ConfigError("bundle: dataset dimension mismatch");
    auto xs = base64_decode_doubles(ds.at("x").get<std::string>());
    auto f1 = base64_decode_doubles(ds.at("f1").get<std::string>());
    auto f2 = base64_decode_doubles(ds.at("f2").get<std::string>());
    if (static_cast<int>(xs.size()) != n * d || static_cast<int>(f1.size()) != n ||
        static_cast<int>(f2.size()) != n)
        throw ConfigError("bundle: dataset payload size mismatch");
    for (int i = 0; i < n; ++i) {
        Strategy s;
        s.values.assign(xs.begin() + static_cast<long>(i) * d,
                        xs.begin() + static_cast<long>(i + 1) * d);
        b.data.X.push_back(std::move(s));
        b.data.F.push_back(ObjectivePair{f1[i], f2[i], F2Source::True});
    }

    const auto& g = j.at("gp");
    const int gn = g.at("n").get<int>();
    if (gn < 2 || gn > n) throw ConfigError("bundle: gp prefix length out of range");
    b.gp.params.log_lengthscale = g.at("log_lengthscale").get<double>();
    b.gp.params.log_signal_variance = g.at("log_signal_variance").get<double>();
    b.gp.params.log_noise_variance = g.at("log_noise_variance").get<double>();
    b.gp.y_mean = g.at("y_mean").get<double>();
    b.gp.y_std = g.at("y_std").get<double>();
    b.gp.X.resize(gn, d);
    b.gp.y.resize(gn);
    for (int i = 0; i < gn; ++i) {
        for (int k = 0; k < d; ++k) b.gp.X(i, k) = xs[static_cast<size_t>(i) * d + k];
        b.gp.y(i) = (f2[i] - b.gp.y_mean) / b.gp.y_std;
    }
    b.gp.refresh();

    const auto& nt = j.at("net");
    b.net = StratNet(b.cfg.d, nt.at("seed").get<std::uint64_t>(), nt.at("lr").get<double>());
    b.net.restore(base64_decode_doubles(nt.at("params").get<std::string>()),
                  base64_decode_doubles(nt.at("m1").get<std::string>()),
                  base64_decode_doubles(nt.at("m2").get<std::string>()),
                  nt.at("step").get<long long>());

    b.ledger.true_evaluations = j.at("ledger").at("true_evaluations").get<long long>();
    b.ledger.cache_hits = j.at("ledger").at("cache_hits").get<long long>();
    for (int i = 0; i < n; ++i)
        b.ledger.cache.emplace(quantize_key(b.data.X[i]), b.data.F[i].f2);

    for (const auto& r : j.at("metrics")) {
        MetricsRow row;
        row.epoch = r.at("epoch").get<int>();
        row.dataset_size = r.at("dataset_size").get<long long>();
        row.true_evals = r.at("true_evals").get<long long>();
        row.hv_true_front = r.at("hv_true_front").get<double>();
        row.mean_g_tch = r.at("mean_g_tch").get<double>();
        row.gp_loglik = r.at("gp_loglik").get<double>();
        row.wall_ms = r.at("wall_ms").get<double>();
        b.data.history.push_back(row);
    }
    return b;
}

void save_bundle(const TrainedBundle& b, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write: " + path);
    out << bundle_to_json(b).dump(1) << "\n";
}

TrainedBundle load_bundle(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open bundle: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bundle parse error: ") + e.what());
    }
    return bundle_from_json(j);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write: " + path);
    out << "epoch,dataset_size,true_evals,hv_true_front,mean_g_tch,gp_loglik,wall_ms\n";
    for (const auto& r : rows) {
        out << r.epoch << ',' << r.dataset_size << ',' << r.true_evals << ','
            << format_double(r.hv_true_front) << ',' << format_double(r.mean_g_tch) << ','
            << format_double(r.gp_loglik) << ',' << format_double(r.wall_ms) << "\n";
    }
}

} // namespace prefopt
