/*
 * Copyright 2026 LEML Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Batch front end: train / predict / eval / mask / closed-form.
// Exit codes: 0 success, 1 usage or input error, 2 numerical failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "leml/closed_form.hpp"
#include "leml/dataio.hpp"
#include "leml/error.hpp"
#include "leml/metrics.hpp"
#include "leml/threading.hpp"
#include "leml/trainer.hpp"

namespace {

void echo_kv(const std::string& key, const std::string& value) {
    std::cerr << key << "=" << value << "\n";
}

void echo_kv(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    echo_kv(key, std::string(buf));
}

void echo_kv(const std::string& key, std::size_t value) {
    echo_kv(key, std::to_string(value));
}

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("LEML_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

struct TrainArgs {
    std::string data, out, trace;
    std::size_t rank = 1;
    double lambda = 0.1;
    std::string loss = "squared";
    std::size_t iters = 10;
    std::uint64_t seed = 0;
    std::string mode = "auto";
    double cg_tol = 1e-4;
    double tron_tol = 1e-3;
    std::size_t inner_iters = 25;
    double init_scale = -1.0;
    int index_base = 0;
};

int run_train(const TrainArgs& a, int threads) {
    echo_kv("subcommand", std::string("train"));
    echo_kv("data", a.data);
    echo_kv("rank", a.rank);
    echo_kv("lambda", a.lambda);
    echo_kv("loss", a.loss);
    echo_kv("iters", a.iters);
    echo_kv("seed", std::to_string(a.seed));
    echo_kv("mode", a.mode);
    echo_kv("cg_tol", a.cg_tol);
    echo_kv("tron_tol", a.tron_tol);
    echo_kv("inner_iters", a.inner_iters);
    echo_kv("init_scale", a.init_scale);
    echo_kv("index_base", std::to_string(a.index_base));
    echo_kv("out", a.out);
    echo_kv("trace", a.trace.empty() ? "(none)" : a.trace);
    echo_kv("threads", std::to_string(threads));

    leml::Dataset data = leml::read_multilabel(a.data, a.index_base);
    leml::TrainConfig cfg;
    cfg.k = a.rank;
    cfg.lambda = a.lambda;
    cfg.outer_iters = a.iters;
    cfg.loss = leml::loss_from_name(a.loss);
    cfg.cg_tol = a.cg_tol;
    cfg.tron_tol = a.tron_tol;
    cfg.inner_max_iter = a.inner_iters;
    cfg.seed = a.seed;
    cfg.init_scale = a.init_scale;
    cfg.mode = a.mode == "full"      ? leml::TrainMode::full
               : a.mode == "missing" ? leml::TrainMode::missing
                                     : leml::TrainMode::auto_detect;

    auto [model, trace] = leml::train(cfg, data.X, data.labels);
    if (trace.degenerate_init) {
        std::cerr << "warning: init_scale=0 starts from H=0; the model will collapse to zero\n";
    }
    if (trace.labels_without_observations > 0) {
        std::cerr << "warning: " << trace.labels_without_observations
                  << " label(s) have no observations; their factors are zero\n";
    }
    leml::write_model(model, a.out);
    if (!a.trace.empty()) {
        std::ofstream ts(a.trace);
        if (!ts) throw leml::ParseError(a.trace + ": cannot open file for writing");
        std::size_t round = 0;
        for (const auto& s : trace.steps) {
            if (s.phase == 'W') round++;
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%c%zu %.17g %.6f %zu\n", s.phase, round, s.objective,
                          s.seconds, s.inner_iterations);
            ts << buf;
        }
    }
    return 0;
}

struct PredictArgs {
    std::string model, data, scores_out;
    std::size_t topk = 0; // 0 = dense scores
    int index_base = 0;
};

int run_predict(const PredictArgs& a, int threads) {
    echo_kv("subcommand", std::string("predict"));
    echo_kv("model", a.model);
    echo_kv("data", a.data);
    echo_kv("topk", a.topk == 0 ? std::string("(dense)") : std::to_string(a.topk));
    echo_kv("scores_out", a.scores_out);
    echo_kv("index_base", std::to_string(a.index_base));
    echo_kv("threads", std::to_string(threads));

    leml::FactorModel model = leml::read_model(a.model);
    leml::Dataset data = leml::read_multilabel(a.data, a.index_base);
    std::ofstream out(a.scores_out);
    if (!out) throw leml::ParseError(a.scores_out + ": cannot open file for writing");
    if (a.topk > 0) {
        auto top = leml::predict_topk(model, data.X, a.topk);
        for (const auto& row : top) {
            for (std::size_t t = 0; t < row.size(); t++) {
                if (t > 0) out << ',';
                out << row[t];
            }
            out << '\n';
        }
    } else {
        leml::DenseMatrix scores = leml::predict_scores(model, data.X);
        char buf[64];
        for (std::size_t i = 0; i < scores.rows; i++) {
            for (std::size_t j = 0; j < scores.cols; j++) {
                if (j > 0) out << '\t';
                std::snprintf(buf, sizeof(buf), "%.17g", scores.at(i, j));
                out << buf;
            }
            out << '\n';
        }
    }
    return 0;
}

struct EvalArgs {
    std::string model, data;
    std::string metrics = "top1,top3,top5,hamming,auc";
    bool metrics_explicit = false;
    double threshold = std::nan("");
    int index_base = 0;
};

int run_eval(const EvalArgs& a, int threads) {
    leml::FactorModel model = leml::read_model(a.model);
    const double threshold =
        std::isnan(a.threshold) ? (model.kind == leml::LossKind::squared ? 0.5 : 0.0) : a.threshold;

    echo_kv("subcommand", std::string("eval"));
    echo_kv("model", a.model);
    echo_kv("data", a.data);
    echo_kv("metrics", a.metrics);
    echo_kv("threshold", threshold);
    echo_kv("index_base", std::to_string(a.index_base));
    echo_kv("threads", std::to_string(threads));

    leml::Dataset data = leml::read_multilabel(a.data, a.index_base);
    if (!data.labels.full) {
        std::cerr << "error: eval needs fully observed ground-truth labels\n";
        return 1;
    }
    leml::DenseMatrix scores = leml::predict_scores(model, data.X);
    const leml::SparseRowMatrix& Y = data.labels.Y;

    std::string item;
    std::istringstream ms(a.metrics);
    char buf[64];
    while (std::getline(ms, item, ',')) {
        double value = 0;
        if (item == "top1" || item == "top3" || item == "top5") {
            const std::size_t K = item == "top1" ? 1 : item == "top3" ? 3 : 5;
            if (K > Y.cols && !a.metrics_explicit) {
                std::cerr << "note: skipping " << item << " (dataset has only " << Y.cols << " labels)\n";
                continue;
            }
            value = leml::top_k_accuracy(scores, Y, K);
        } else if (item == "hamming") {
            value = leml::hamming_loss(scores, Y, threshold);
        } else if (item == "auc") {
            auto [auc, skipped] = leml::average_auc(scores, Y);
            if (skipped > 0) {
                std::cerr << "note: " << skipped << " instance(s) lacked both classes; skipped for auc\n";
            }
            value = auc;
        } else {
            std::cerr << "error: unknown metric `" << item << "`\n";
            return 1;
        }
        std::snprintf(buf, sizeof(buf), "%s\t%.10g\n", item.c_str(), value);
        std::cout << buf;
    }
    return 0;
}

struct MaskArgs {
    std::string data, out;
    double ratio = 0.2;
    std::uint64_t seed = 0;
    int index_base = 0;
};

int run_mask(const MaskArgs& a, int threads) {
    echo_kv("subcommand", std::string("mask"));
    echo_kv("data", a.data);
    echo_kv("ratio", a.ratio);
    echo_kv("seed", std::to_string(a.seed));
    echo_kv("out", a.out);
    echo_kv("index_base", std::to_string(a.index_base));
    echo_kv("threads", std::to_string(threads));

    leml::Dataset data = leml::read_multilabel(a.data, a.index_base);
    if (!data.labels.full) {
        std::cerr << "error: mask needs a fully labeled dataset\n";
        return 1;
    }
    leml::Dataset masked;
    masked.X = data.X;
    masked.labels = leml::Labels::observed(leml::make_mask(data.labels.Y, a.ratio, a.seed));
    leml::write_multilabel(masked, a.out);
    return 0;
}

struct ClosedFormArgs {
    std::string data, out;
    std::size_t rank = 1;
    bool compare_cplst = false;
    int index_base = 0;
};

int run_closed_form(const ClosedFormArgs& a, int threads) {
    echo_kv("subcommand", std::string("closed-form"));
    echo_kv("data", a.data);
    echo_kv("rank", a.rank);
    echo_kv("compare_cplst", std::string(a.compare_cplst ? "true" : "false"));
    echo_kv("out", a.out);
    echo_kv("index_base", std::to_string(a.index_base));
    echo_kv("threads", std::to_string(threads));

    leml::Dataset data = leml::read_multilabel(a.data, a.index_base);
    if (!data.labels.full) {
        std::cerr << "error: closed-form needs a fully labeled dataset\n";
        return 1;
    }
    if (data.instances() * data.features() > 10'000'000ULL) {
        std::cerr << "error: closed-form is desk-scale only (n*d must be <= 1e7)\n";
        return 1;
    }
    bool tie = false;
    leml::DenseMatrix Z = leml::closed_form_squared_full(data.X, data.labels.Y, a.rank, &tie);
    if (tie) {
        std::cerr << "note: truncation hit a tied singular value; the minimizer is not unique\n";
    }

    if (a.compare_cplst) {
        leml::DenseMatrix Zc = leml::cplst_solution(data.X, data.labels.Y, a.rank);
        double diff = 0, norm = 0;
        for (std::size_t t = 0; t < Z.size(); t++) {
            const double dd = Z.values[t] - Zc.values[t];
            diff += dd * dd;
            norm += Z.values[t] * Z.values[t];
        }
        const double gap = std::sqrt(diff) / std::max(1.0, std::sqrt(norm));
        char buf[64];
        std::snprintf(buf, sizeof(buf), "cplst_frobenius_gap\t%.6e\n", gap);
        std::cout << buf;
    }

    // Stored as W = Z with H = I_L so predict applies X Z directly.
    leml::FactorModel model;
    model.W = std::move(Z);
    model.H = leml::DenseMatrix::identity(data.label_count());
    model.kind = leml::LossKind::squared;
    model.lambda = 0.0;
    leml::write_model(model, a.out,
                      "closed-form solution: W holds Z (d x L), H is the L x L identity");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"low-rank multi-label classification toolkit"};
    app.require_subcommand(1);
    int threads_flag = 0;
    app.add_option("--threads", threads_flag,
                   "worker threads; omit (or LEML_THREADS unset) for deterministic reference mode");

    TrainArgs train_args;
    CLI::App* tr = app.add_subcommand("train", "alternating-minimization training");
    tr->add_option("--data", train_args.data, "training data file")->required();
    tr->add_option("--rank", train_args.rank, "factorization rank k")->required();
    tr->add_option("--lambda", train_args.lambda, "regularization weight")->capture_default_str();
    tr->add_option("--loss", train_args.loss, "loss function")->capture_default_str()
        ->check(CLI::IsMember({"squared", "logistic", "l2hinge"}));
    tr->add_option("--iters", train_args.iters, "outer alternating iterations")->capture_default_str();
    tr->add_option("--seed", train_args.seed, "random seed")->capture_default_str();
    tr->add_option("--mode", train_args.mode, "label handling")->capture_default_str()
        ->check(CLI::IsMember({"auto", "missing", "full"}));
    tr->add_option("--cg-tol", train_args.cg_tol, "inner CG relative tolerance")->capture_default_str();
    tr->add_option("--tron-tol", train_args.tron_tol, "inner TRON relative tolerance")->capture_default_str();
    tr->add_option("--inner-iters", train_args.inner_iters, "inner iteration cap per half-step")->capture_default_str();
    tr->add_option("--init-scale", train_args.init_scale, "H init range (< 0 selects 1/sqrt(k))")->capture_default_str();
    tr->add_option("--index-base", train_args.index_base, "index base of the data file")->capture_default_str();
    tr->add_option("--out", train_args.out, "model output path")->required();
    tr->add_option("--trace", train_args.trace, "objective trace output path");

    PredictArgs predict_args;
    CLI::App* pr = app.add_subcommand("predict", "score test instances");
    pr->add_option("--model", predict_args.model, "model file")->required();
    pr->add_option("--data", predict_args.data, "data file")->required();
    pr->add_option("--topk", predict_args.topk, "write top-K label indices instead of dense scores");
    pr->add_option("--index-base", predict_args.index_base, "index base of the data file")->capture_default_str();
    pr->add_option("--scores-out", predict_args.scores_out, "output path")->required();

    EvalArgs eval_args;
    CLI::App* ev = app.add_subcommand("eval", "evaluate a model on labeled data");
    ev->add_option("--model", eval_args.model, "model file")->required();
    ev->add_option("--data", eval_args.data, "fully labeled data file")->required();
    CLI::Option* metrics_opt =
        ev->add_option("--metrics", eval_args.metrics, "comma list from top1,top3,top5,hamming,auc")
            ->capture_default_str();
    ev->add_option("--threshold", eval_args.threshold,
                   "hamming threshold (default 0.5 for squared, 0 otherwise)");
    ev->add_option("--index-base", eval_args.index_base, "index base of the data file")->capture_default_str();

    MaskArgs mask_args;
    CLI::App* mk = app.add_subcommand("mask", "sample an observed-entry subset of a full label matrix");
    mk->add_option("--data", mask_args.data, "fully labeled data file")->required();
    mk->add_option("--ratio", mask_args.ratio, "observed ratio in (0,1]")->capture_default_str();
    mk->add_option("--seed", mask_args.seed, "random seed")->capture_default_str();
    mk->add_option("--index-base", mask_args.index_base, "index base of the data file")->capture_default_str();
    mk->add_option("--out", mask_args.out, "masked data output path")->required();

    ClosedFormArgs cf_args;
    CLI::App* cf = app.add_subcommand("closed-form", "exact SVD solution (squared loss, full labels)");
    cf->add_option("--data", cf_args.data, "fully labeled data file")->required();
    cf->add_option("--rank", cf_args.rank, "rank k")->required();
    cf->add_flag("--compare-cplst", cf_args.compare_cplst, "print the gap to the label-compression formula");
    cf->add_option("--index-base", cf_args.index_base, "index base of the data file")->capture_default_str();
    cf->add_option("--out", cf_args.out, "model output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    eval_args.metrics_explicit = metrics_opt->count() > 0;
    const int threads = resolve_threads(threads_flag);
    leml::set_num_threads(threads);

    try {
        if (app.got_subcommand(tr)) return run_train(train_args, threads);
        if (app.got_subcommand(pr)) return run_predict(predict_args, threads);
        if (app.got_subcommand(ev)) return run_eval(eval_args, threads);
        if (app.got_subcommand(mk)) return run_mask(mask_args, threads);
        if (app.got_subcommand(cf)) return run_closed_form(cf_args, threads);
    } catch (const leml::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
