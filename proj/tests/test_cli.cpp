#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#ifndef PREFOPT_CLI_PATH
#error "PREFOPT_CLI_PATH must point at the built binary"
#endif

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

const fs::path& workdir() {
    static fs::path root = [] {
        fs::path p = fs::temp_directory_path() / "prefopt_test_cli";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path out_file = workdir() / ("stdout_" + std::to_string(counter) + ".txt");
    fs::path err_file = workdir() / ("stderr_" + std::to_string(counter) + ".txt");
    ++counter;
    std::string cmd = std::string(PREFOPT_CLI_PATH) + " " + args + " >" + out_file.string() +
                      " 2>" + err_file.string();
    int rc = std::system(cmd.c_str());
    CliResult r;
    if (rc != -1 && WIFEXITED(rc)) r.status = WEXITSTATUS(rc);
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

const std::string kTinyConfig = R"({
  "d": 3,
  "objective": {"family": "powersum", "seed": 5},
  "T": 2,
  "I": 25,
  "K": 4,
  "N_init": 8,
  "C_pool": 24,
  "batch": 4,
  "seed": 11
})";

fs::path tiny_config() {
    static fs::path p = [] {
        fs::path path = workdir() / "tiny.json";
        write_file(path, kTinyConfig);
        return path;
    }();
    return p;
}

// one shared trained bundle for the read-only subcommands
fs::path tiny_bundle() {
    static fs::path p = [] {
        fs::path dir = workdir() / "tiny_out";
        auto r = run_cli("train " + tiny_config().string() + " --out " + dir.string());
        REQUIRE(r.status == 0);
        return dir / "bundle.json";
    }();
    return p;
}

} // namespace

TEST_CASE("train rejects configs with missing fields and names them") {
    fs::path bad = workdir() / "bad.json";
    write_file(bad, R"({"d": 3})");
    auto r = run_cli("train " + bad.string() + " --out " + (workdir() / "never").string());
    CHECK(r.status == 2);
    CHECK(r.err.find("missing required field 'T'") != std::string::npos);
    CHECK(r.err.find("'seed'") != std::string::npos);
    CHECK(!fs::exists(workdir() / "never/metrics.csv"));
}

TEST_CASE("train writes a reproducible output directory") {
    fs::path a = workdir() / "train_a";
    fs::path b = workdir() / "train_b";
    auto ra = run_cli("train " + tiny_config().string() + " --out " + a.string());
    auto rb = run_cli("train " + tiny_config().string() + " --out " + b.string());
    CHECK(ra.status == 0);
    CHECK(rb.status == 0);
    CHECK(ra.out.rfind("train: epochs=2 true_evals=16 hv=", 0) == 0);
    CHECK(ra.out.find("partial=0") != std::string::npos);

    auto metrics = slurp(a / "metrics.csv");
    REQUIRE(!metrics.empty());
    CHECK(lines(metrics).size() == 4); // header + epochs 0..2
    CHECK(metrics == slurp(b / "metrics.csv"));
    CHECK(slurp(a / "bundle.json") == slurp(b / "bundle.json"));
    for (const char* name : {"checkpoint_0.json", "checkpoint_1.json", "checkpoint_2.json"})
        CHECK(fs::exists(a / name));
}

TEST_CASE("train resumes from a checkpoint into the same metrics bytes") {
    fs::path full = workdir() / "resume_full";
    fs::path cont = workdir() / "resume_cont";
    auto r1 = run_cli("train " + tiny_config().string() + " --out " + full.string());
    REQUIRE(r1.status == 0);
    auto r2 = run_cli("train --resume " + (full / "checkpoint_1.json").string() + " --out " +
                      cont.string());
    CHECK(r2.status == 0);
    CHECK(slurp(full / "metrics.csv") == slurp(cont / "metrics.csv"));
    CHECK(slurp(full / "bundle.json") == slurp(cont / "bundle.json"));
}

TEST_CASE("train stops at the evaluation budget with exit code 4") {
    fs::path cfg = workdir() / "budget.json";
    write_file(cfg, R"({
  "d": 3,
  "objective": {"family": "powersum", "seed": 5},
  "T": 5, "I": 25, "K": 4, "N_init": 8, "C_pool": 24, "batch": 4,
  "seed": 11, "eval_budget": 14
})");
    auto r = run_cli("train " + cfg.string() + " --out " + (workdir() / "budget_out").string());
    CHECK(r.status == 4);
    CHECK(r.out.find("true_evals=14") != std::string::npos);
    CHECK(r.out.find("partial=1") != std::string::npos);
}

TEST_CASE("sweep emits the lambda grid with a summary line") {
    fs::path front = workdir() / "front.csv";
    auto r = run_cli("sweep " + tiny_bundle().string() + " --grid 5 --out " + front.string());
    CHECK(r.status == 0);
    CHECK(r.out.rfind("sweep: rows=5 true_evals=16 f1_nonincreasing=", 0) == 0);

    auto rows = lines(slurp(front));
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == "lambda1,f1,f2_surrogate");
    const char* expect[] = {"0", "0.25", "0.5", "0.75", "1"};
    for (int i = 0; i < 5; ++i) CHECK(fields(rows[i + 1])[0] == expect[i]);

    auto tiny_grid = run_cli("sweep " + tiny_bundle().string() + " --grid 1 --out " +
                             (workdir() / "g1.csv").string());
    CHECK(tiny_grid.status == 2);
}

TEST_CASE("answer validates its request sources and flags") {
    std::string bundle = tiny_bundle().string();
    fs::path reqs = workdir() / "reqs.csv";
    write_file(reqs, "lambda1\n0.5\n");

    CHECK(run_cli("answer " + bundle + " " + reqs.string() + " --grid 4 --out " +
                  (workdir() / "x1.csv").string())
              .status == 2);
    CHECK(run_cli("answer " + bundle + " --out " + (workdir() / "x2.csv").string()).status == 2);
    CHECK(run_cli("answer " + bundle + " --grid 4 --binarize bogus --out " +
                  (workdir() / "x3.csv").string())
              .status == 2);
    CHECK(run_cli("answer " + bundle + " --grid 4 --true-eval --out " +
                  (workdir() / "x4.csv").string())
              .status == 2);

    fs::path bad_reqs = workdir() / "bad_reqs.csv";
    write_file(bad_reqs, "lambda1\n1.5\n");
    CHECK(run_cli("answer " + bundle + " " + bad_reqs.string() + " --out " +
                  (workdir() / "x5.csv").string())
              .status == 2);
}

TEST_CASE("answer maps a requests file, tolerating CRLF and duplicates") {
    fs::path reqs = workdir() / "requests.csv";
    write_file(reqs, "lambda1\r\n0\r\n0.5\r\n0.5\r\n1\r\n");
    fs::path out = workdir() / "answers.csv";
    auto r = run_cli("answer " + tiny_bundle().string() + " " + reqs.string() + " --out " +
                     out.string());
    CHECK(r.status == 0);
    CHECK(r.out.rfind("answer: rows=4 true_evals=16", 0) == 0);

    auto rows = lines(slurp(out));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "lambda1,f1,f2_surrogate,x0,x1,x2");
    CHECK(rows[2] == rows[3]); // identical requests give identical answers
    CHECK(fields(rows[1])[0] == "0");
    CHECK(fields(rows[4])[0] == "1");
}

TEST_CASE("answer binarizes strategies on request") {
    fs::path out = workdir() / "bin.csv";
    auto r = run_cli("answer " + tiny_bundle().string() + " --grid 3 --binarize topk:2 --out " +
                     out.string());
    CHECK(r.status == 0);
    auto rows = lines(slurp(out));
    REQUIRE(rows.size() == 4);
    for (size_t i = 1; i < rows.size(); ++i) {
        auto f = fields(rows[i]);
        REQUIRE(f.size() == 6);
        int ones = 0;
        for (int j = 3; j < 6; ++j) {
            CHECK((f[j] == "0" || f[j] == "1"));
            if (f[j] == "1") ++ones;
        }
        CHECK(ones == 2);
    }

    auto rt = run_cli("answer " + tiny_bundle().string() +
                      " --grid 3 --binarize threshold --out " + out.string());
    CHECK(rt.status == 0);
    auto trows = lines(slurp(out));
    for (size_t i = 1; i < trows.size(); ++i) {
        auto f = fields(trows[i]);
        for (int j = 3; j < 6; ++j) CHECK((f[j] == "0" || f[j] == "1"));
    }
}

TEST_CASE("answer true-eval spends the budget then exits 4") {
    fs::path out = workdir() / "true.csv";
    auto r = run_cli("answer " + tiny_bundle().string() +
                     " --grid 4 --true-eval --eval-budget 2 --out " + out.string());
    CHECK(r.status == 4);
    CHECK(r.out.rfind("answer: rows=2", 0) == 0);
    auto rows = lines(slurp(out));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "lambda1,f1,f2_surrogate,f2_true,x0,x1,x2");

    auto enough = run_cli("answer " + tiny_bundle().string() +
                          " --grid 4 --true-eval --eval-budget 100 --out " + out.string());
    CHECK(enough.status == 0);
    CHECK(lines(slurp(out)).size() == 5);
}

TEST_CASE("oracle emits the pinned front csv") {
    fs::path out = workdir() / "oracle.csv";
    auto r = run_cli("oracle " + tiny_config().string() + " --resolution 41 --out " +
                     out.string());
    CHECK(r.status == 0);
    CHECK(r.out.rfind("oracle: points=", 0) == 0);
    auto rows = lines(slurp(out));
    REQUIRE(rows.size() >= 3);
    CHECK(rows[0] == "f1,f2,source");
    for (size_t i = 1; i < rows.size(); ++i) {
        auto f = fields(rows[i]);
        REQUIRE(f.size() == 3);
        CHECK(f[2] == "true");
    }
}

TEST_CASE("compare rejects unknown variants and emits one row per variant") {
    CHECK(run_cli("compare " + tiny_config().string() + " bogus --out " +
                  (workdir() / "c0.csv").string())
              .status == 2);

    fs::path out = workdir() / "c1.csv";
    auto r = run_cli("compare " + tiny_config().string() + " tch --resolution 41 --out " +
                     out.string());
    CHECK(r.status == 0);
    auto rows = lines(slurp(out));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "variant,final_hv,hv_ratio");
    CHECK(fields(rows[1])[0] == "tch");
    double ratio = std::stod(fields(rows[1])[2]);
    CHECK(ratio > 0.0);
    CHECK(ratio < 1.05);
}

TEST_CASE("compare ranks tch above ws on a concave front") {
    fs::path cfg = workdir() / "concave.json";
    write_file(cfg, R"({
  "d": 2,
  "objective": {"family": "powersum", "weights": [1.0, 1.0], "exponents": [0.5, 0.5]},
  "T": 10, "I": 300, "K": 8, "N_init": 4, "C_pool": 64, "batch": 3,
  "lr": 0.02, "seed": 4
})");
    fs::path out = workdir() / "concave.csv";
    auto r = run_cli("compare " + cfg.string() + " ws tch --resolution 201 --out " +
                     out.string());
    CHECK(r.status == 0);
    auto rows = lines(slurp(out));
    REQUIRE(rows.size() == 3);
    REQUIRE(fields(rows[1])[0] == "ws");
    REQUIRE(fields(rows[2])[0] == "tch");
    double ws_ratio = std::stod(fields(rows[1])[2]);
    double tch_ratio = std::stod(fields(rows[2])[2]);
    CHECK(tch_ratio > ws_ratio);
}
