// Drives the installed binary end to end through temp files.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "leml/dataio.hpp"
#include "leml/metrics.hpp"
#include "test_util.hpp"

using namespace leml;
using namespace testutil;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() / ("leml_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

CliResult run_cli(const TempDir& tmp, const std::string& args) {
    static int counter = 0;
    const std::string out_path = tmp.file(".out" + std::to_string(counter));
    const std::string err_path = tmp.file(".err" + std::to_string(counter));
    counter++;
    const std::string cmd = std::string(LEML_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
    const int rc = std::system(cmd.c_str());
    CliResult res;
    res.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    res.out = slurp(out_path);
    res.err = slurp(err_path);
    return res;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

std::string write_tiny_full_dataset(const TempDir& tmp, const std::string& name, std::uint64_t seed,
                                    std::size_t n = 12, std::size_t d = 6, std::size_t L = 5) {
    Rng rng(seed);
    Dataset data;
    data.X = random_sparse(rng, n, d, 0.5, -2, 2);
    data.labels = Labels::full_labels(random_binary_labels(rng, n, L, 0.35));
    const std::string path = tmp.file(name);
    write_multilabel(data, path);
    return path;
}

} // namespace

TEST_CASE("train writes a model and a non-increasing trace") {
    TempDir tmp;
    const std::string data = write_tiny_full_dataset(tmp, "train.txt", 1);
    const std::string model_path = tmp.file("model.txt");
    const std::string trace_path = tmp.file("trace.txt");
    CliResult r = run_cli(tmp, "train --data " + data + " --rank 2 --lambda 0.1 --loss squared --out " +
                                   model_path + " --trace " + trace_path);
    CHECK(r.code == 0);
    CHECK(fs::exists(model_path));
    CHECK(r.err.find("subcommand=train") != std::string::npos);
    CHECK(r.err.find("rank=2") != std::string::npos);

    // trace: `step objective seconds inner_iters`, objective non-increasing
    std::vector<std::string> tl = lines_of(slurp(trace_path));
    REQUIRE(tl.size() == 20); // default 10 outer rounds, two half-steps each
    double prev = 1e300;
    for (const std::string& line : tl) {
        std::istringstream ls(line);
        std::string step;
        double obj, secs;
        std::size_t inner;
        REQUIRE((ls >> step >> obj >> secs >> inner));
        CHECK((step[0] == 'W' || step[0] == 'H'));
        CHECK(obj <= prev + 1e-8 * std::max(1.0, prev));
        prev = obj;
    }

    FactorModel model = read_model(model_path);
    CHECK(model.rank() == 2);
}

TEST_CASE("train rejects an oversized rank with exit 1") {
    TempDir tmp;
    const std::string data = write_tiny_full_dataset(tmp, "train.txt", 2);
    CliResult r = run_cli(tmp, "train --data " + data + " --rank 99 --out " + tmp.file("m.txt"));
    CHECK(r.code == 1);
}

TEST_CASE("identical flags and seed produce identical model files") {
    TempDir tmp;
    const std::string data = write_tiny_full_dataset(tmp, "train.txt", 3);
    const std::string m1 = tmp.file("m1.txt"), m2 = tmp.file("m2.txt");
    const std::string flags = "train --data " + data + " --rank 2 --seed 7 --loss logistic --iters 4 ";
    CHECK(run_cli(tmp, flags + "--out " + m1).code == 0);
    CHECK(run_cli(tmp, flags + "--out " + m2).code == 0);
    CHECK(slurp(m1) == slurp(m2));
    CHECK(!slurp(m1).empty());
}

TEST_CASE("unknown flags are rejected") {
    TempDir tmp;
    CliResult r = run_cli(tmp, "train --bogus 1");
    CHECK(r.code == 1);
    CHECK(run_cli(tmp, "frobnicate").code == 1);
    CHECK(run_cli(tmp, "--help").code == 0);
}

TEST_CASE("predict writes dense scores and top-k lists") {
    TempDir tmp;
    // hand model: d = L = k = 1, W = 3, H = 4
    const std::string model_path = tmp.file("hand.txt");
    {
        std::ofstream m(model_path);
        m << "LEML 1 1 1 1 squared 0\n3\n4\n";
    }
    const std::string data_path = tmp.file("x.txt");
    {
        std::ofstream d(data_path);
        d << "1 1 1\n 0:2.0\n"; // one instance, x = 2, no labels
    }
    const std::string scores_path = tmp.file("scores.txt");
    CliResult r = run_cli(tmp, "predict --model " + model_path + " --data " + data_path +
                                   " --scores-out " + scores_path);
    CHECK(r.code == 0);
    std::vector<std::string> sl = lines_of(slurp(scores_path));
    REQUIRE(sl.size() == 1);
    CHECK(std::stod(sl[0]) == doctest::Approx(24.0));

    // zero model: all-zero scores
    const std::string zero_path = tmp.file("zero.txt");
    {
        std::ofstream m(zero_path);
        m << "LEML 1 1 1 1 squared 0\n0\n0\n";
    }
    CliResult rz = run_cli(tmp, "predict --model " + zero_path + " --data " + data_path +
                                    " --scores-out " + scores_path);
    CHECK(rz.code == 0);
    CHECK(std::stod(lines_of(slurp(scores_path))[0]) == 0.0);

    // top-k output: one line per instance
    const std::string data5 = write_tiny_full_dataset(tmp, "five.txt", 9, 7, 6, 5);
    const std::string model5 = tmp.file("m5.txt");
    CHECK(run_cli(tmp, "train --data " + data5 + " --rank 2 --out " + model5).code == 0);
    const std::string topk_path = tmp.file("topk.txt");
    CliResult rt = run_cli(tmp, "predict --model " + model5 + " --data " + data5 + " --topk 3 --scores-out " +
                                    topk_path);
    CHECK(rt.code == 0);
    std::vector<std::string> tl = lines_of(slurp(topk_path));
    CHECK(tl.size() == 7);
    for (const std::string& line : tl) {
        CHECK(std::count(line.begin(), line.end(), ',') == 2); // three indices
    }
}

TEST_CASE("predict rejects dimension mismatches with exit 1") {
    TempDir tmp;
    const std::string model_path = tmp.file("hand.txt");
    {
        std::ofstream m(model_path);
        m << "LEML 1 2 1 1 squared 0\n1\n1\n5\n"; // d = 2
    }
    const std::string data_path = tmp.file("x.txt");
    {
        std::ofstream d(data_path);
        d << "1 1 1\n 0:2.0\n"; // d = 1
    }
    CliResult r = run_cli(tmp, "predict --model " + model_path + " --data " + data_path +
                                   " --scores-out " + tmp.file("s.txt"));
    CHECK(r.code == 1);
}

TEST_CASE("eval reports perfect metrics for a perfect model") {
    TempDir tmp;
    // identity model on one-hot rows: scores reproduce Y exactly
    const std::string model_path = tmp.file("ident.txt");
    {
        std::ofstream m(model_path);
        m << "LEML 1 3 3 3 squared 0\n";
        m << "1 0 0\n0 1 0\n0 0 1\n"; // W = I
        m << "1 0 0\n0 1 0\n0 0 1\n"; // H = I
    }
    const std::string data_path = tmp.file("d.txt");
    {
        std::ofstream d(data_path);
        d << "3 3 3\n0 0:1\n1 1:1\n2 2:1\n";
    }
    CliResult r = run_cli(tmp, "eval --model " + model_path + " --data " + data_path +
                                   " --metrics top1,hamming,auc");
    CHECK(r.code == 0);
    std::vector<std::string> ol = lines_of(r.out);
    REQUIRE(ol.size() == 3);
    std::istringstream l0(ol[0]), l1(ol[1]), l2(ol[2]);
    std::string name;
    double value;
    l0 >> name >> value;
    CHECK(name == "top1");
    CHECK(value == 1.0);
    l1 >> name >> value;
    CHECK(name == "hamming");
    CHECK(value == 0.0);
    l2 >> name >> value;
    CHECK(name == "auc");
    CHECK(value == 1.0);
}

TEST_CASE("eval of random scores gives auc near one half") {
    TempDir tmp;
    Rng rng(1009);
    // random model, labels independent of it
    const std::size_t n = 400, d = 10, L = 20;
    Dataset data;
    data.X = random_sparse(rng, n, d, 0.5, -1, 1);
    data.labels = Labels::full_labels(random_binary_labels(rng, n, L, 0.3));
    const std::string data_path = tmp.file("rand.txt");
    write_multilabel(data, data_path);

    FactorModel model;
    model.W = random_dense(rng, d, 3);
    model.H = random_dense(rng, L, 3);
    const std::string model_path = tmp.file("rand_model.txt");
    write_model(model, model_path);

    CliResult r = run_cli(tmp, "eval --model " + model_path + " --data " + data_path + " --metrics auc");
    CHECK(r.code == 0);
    std::istringstream l(lines_of(r.out)[0]);
    std::string name;
    double auc;
    l >> name >> auc;
    CHECK(auc == doctest::Approx(0.5).epsilon(0.1)); // 0.5 +/- 0.05
}

TEST_CASE("eval needs fully observed labels") {
    TempDir tmp;
    const std::string full = write_tiny_full_dataset(tmp, "f.txt", 11);
    const std::string model_path = tmp.file("m.txt");
    CHECK(run_cli(tmp, "train --data " + full + " --rank 2 --out " + model_path).code == 0);
    const std::string masked = tmp.file("masked.txt");
    CHECK(run_cli(tmp, "mask --data " + full + " --ratio 0.5 --out " + masked).code == 0);
    CliResult r = run_cli(tmp, "eval --model " + model_path + " --data " + masked);
    CHECK(r.code == 1);
    // unknown metric name
    CliResult r2 = run_cli(tmp, "eval --model " + model_path + " --data " + full + " --metrics top1,bogus");
    CHECK(r2.code == 1);
}

TEST_CASE("mask samples the requested entry count and round trips") {
    TempDir tmp;
    const std::string full = write_tiny_full_dataset(tmp, "f.txt", 13, 10, 6, 5); // 50 cells
    const std::string masked = tmp.file("masked.txt");
    CliResult r = run_cli(tmp, "mask --data " + full + " --ratio 0.2 --seed 4 --out " + masked);
    CHECK(r.code == 0);
    Dataset m = read_multilabel(masked);
    REQUIRE(!m.labels.full);
    CHECK(m.labels.omega.size() == 10); // round(0.2 * 50)

    // ratio 1.0 reproduces the full grid with Y's values
    const std::string all = tmp.file("all.txt");
    CHECK(run_cli(tmp, "mask --data " + full + " --ratio 1.0 --out " + all).code == 0);
    Dataset ma = read_multilabel(all);
    Dataset orig = read_multilabel(full);
    ObservationSet want = ObservationSet::full_grid(orig.labels.Y);
    CHECK(ma.labels.omega.value == want.value);
    CHECK(ma.labels.omega.label == want.label);

    // masked file trains end to end
    CHECK(run_cli(tmp, "train --data " + masked + " --rank 2 --out " + tmp.file("mm.txt")).code == 0);
}

TEST_CASE("closed-form solves the identity-design case and matches cplst") {
    TempDir tmp;
    Rng rng(1013);
    const std::size_t n = 6;
    Dataset data;
    data.X = SparseRowMatrix::identity(n);
    data.labels = Labels::full_labels(random_binary_labels(rng, n, 4, 0.5));
    const std::string data_path = tmp.file("cf.txt");
    write_multilabel(data, data_path);

    const std::string out_path = tmp.file("cf_model.txt");
    CliResult r = run_cli(tmp, "closed-form --data " + data_path + " --rank 2 --compare-cplst --out " +
                                   out_path);
    CHECK(r.code == 0);
    // printed gap is tiny
    std::istringstream l(lines_of(r.out)[0]);
    std::string name;
    double gap;
    l >> name >> gap;
    CHECK(name == "cplst_frobenius_gap");
    CHECK(gap <= 1e-8);

    // stored model applies Z directly (H = I)
    FactorModel model = read_model(out_path);
    CHECK(model.H.rows == 4);
    CHECK(model.rank() == 4);
    DenseMatrix scores = predict_scores(model, data.X);
    // X = I: scores = Z = rank-2 truncation of Y; spot check the residual dominates nothing
    CHECK(scores.rows == n);
}

TEST_CASE("closed-form refuses oversized problems") {
    TempDir tmp;
    const std::string big = tmp.file("big.txt");
    {
        std::ofstream f(big);
        f << "4000 3000 2\n";
        for (int i = 0; i < 4000; i++) f << "\n";
    }
    CliResult r = run_cli(tmp, "closed-form --data " + big + " --rank 1 --out " + tmp.file("z.txt"));
    CHECK(r.code == 1);
    CHECK(r.err.find("desk-scale") != std::string::npos);
}

TEST_CASE("stderr echo is key=value parseable") {
    TempDir tmp;
    const std::string data = write_tiny_full_dataset(tmp, "echo.txt", 17);
    CliResult r = run_cli(tmp, "mask --data " + data + " --ratio 0.4 --out " + tmp.file("o.txt"));
    CHECK(r.code == 0);
    for (const std::string& line : lines_of(r.err)) {
        if (line.rfind("warning:", 0) == 0 || line.rfind("note:", 0) == 0) continue;
        CHECK(line.find('=') != std::string::npos);
    }
    CHECK(r.err.find("ratio=0.4") != std::string::npos);
    CHECK(r.err.find("threads=1") != std::string::npos);
}

TEST_CASE("threads flag and env fallback run the parallel mode") {
    TempDir tmp;
    const std::string data = write_tiny_full_dataset(tmp, "t.txt", 19);
    const std::string m1 = tmp.file("m1.txt");
    CliResult r = run_cli(tmp, "--threads 2 train --data " + data + " --rank 2 --out " + m1);
    CHECK(r.code == 0);
    CHECK(r.err.find("threads=2") != std::string::npos);

    const std::string m2 = tmp.file("m2.txt");
    const std::string cmd = std::string("LEML_THREADS=3 ") + LEML_CLI_PATH + " train --data " + data +
                            " --rank 2 --out " + m2 + " 2>" + tmp.file("env_err");
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(slurp(tmp.file("env_err")).find("threads=3") != std::string::npos);
}
