#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zloss/csv.hpp"
#include "zloss/cutoff.hpp"
#include "zloss/sweep.hpp"
#include "zloss/train.hpp"
#include "zloss/version.hpp"

namespace zloss::cli {

using json = nlohmann::ordered_json;

enum exit_code : int { ok = 0, runtime_failure = 1, usage_failure = 2 };

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 42;
    std::string out;
    bool quiet = false;
    std::string replay;
};

struct Io {
    std::ostream& out;
    std::ostream& err;
    const Globals& g;

    void status(const std::string& msg) const {
        if (!g.quiet) out << msg << '\n';
    }
};

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline json make_manifest(const std::string& subcommand, const Globals& g, json params) {
    json m;
    m["subcommand"] = subcommand;
    m["parameters"] = std::move(params);
    m["seed"] = g.seed;
    m["out"] = g.out;
    m["tool_version"] = std::string(version);
    m["started_at"] = utc_timestamp();
    return m;
}

/// CSV goes to --out (with a manifest sidecar) or, when allowed, to stdout.
inline void emit(const Io& io, const csv::Writer& table, const json& manifest, bool stdout_allowed) {
    if (io.g.out.empty()) {
        if (!stdout_allowed) throw usage_error(manifest["subcommand"].get<std::string>() + ": --out is required");
        io.out << table.str();
        return;
    }
    csv::write_file(io.g.out, table.str());
    csv::write_file(io.g.out + ".manifest.json", manifest.dump(2) + "\n");
    io.status("wrote " + std::to_string(table.data_rows()) + " rows to " + io.g.out);
}

inline std::string num(double v) { return csv::format_number(v); }

template <class T>
std::string num(T v) requires std::is_integral_v<T> {
    return std::to_string(v);
}

inline std::string join_lines(const std::vector<std::size_t>& lines) {
    std::string s;
    const std::size_t shown = std::min<std::size_t>(lines.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) s += (i ? ", " : "") + std::to_string(lines[i]);
    if (lines.size() > shown) s += ", ... (" + std::to_string(lines.size()) + " total)";
    return s;
}

inline std::size_t require_column(const csv::Table& t, const char* name, const std::string& path) {
    const auto c = t.column(name);
    if (!c) throw usage_error(path + ": missing required column '" + name + "'");
    return *c;
}

// ---------------------------------------------------------------- sweep

struct SweepFlags {
    std::string task = "regression";
    std::size_t n = 2000;
    std::size_t d = 1;
    double outlier_frac = 0.1;
    double margin = 6.0;
    double noise_std = 1.0;
    double sigma = 1.5;
    std::vector<std::size_t> batch_sizes{16, 32, 64, 96, 128, 256, 512};
    int trials = 10;
    unsigned threads = 0;
    std::string svg;
};

inline void add_sweep(CLI::App& app, SweepFlags& f) {
    app.add_option("--task", f.task, "regression or classification")->check(CLI::IsMember({"regression", "classification"}));
    app.add_option("--n", f.n, "samples per dataset");
    app.add_option("--d", f.d, "feature dimension");
    app.add_option("--outlier-frac", f.outlier_frac, "planted outlier fraction");
    app.add_option("--margin", f.margin, "regression outlier margin, or cluster separation for classification");
    app.add_option("--noise-std", f.noise_std, "regression inlier noise");
    app.add_option("--sigma", f.sigma, "z-score threshold");
    app.add_option("--batch-sizes", f.batch_sizes, "comma separated batch sizes")->delimiter(',');
    app.add_option("--trials", f.trials, "datasets per configuration");
    app.add_option("--threads", f.threads, "worker threads (0: all cores)");
    app.add_option("--svg", f.svg, "also render mean F1 against batch size");
}

inline json params_of(const SweepFlags& f) {
    return json{{"task", f.task},     {"n", f.n},           {"d", f.d},           {"outlier-frac", f.outlier_frac},
                {"margin", f.margin}, {"noise-std", f.noise_std}, {"sigma", f.sigma}, {"batch-sizes", f.batch_sizes},
                {"trials", f.trials}, {"threads", f.threads}, {"svg", f.svg}};
}

/// Mean F1 per batch size (batch method) and the full-dataset mean as a
/// dashed reference line.
inline std::string sweep_svg(const std::vector<SweepRow>& rows, const SweepConfig& cfg) {
    std::map<std::size_t, std::pair<double, int>> batch;
    double full_sum = 0.0;
    int full_n = 0;
    for (const auto& r : rows) {
        if (r.report.method == DetectionMethod::full) {
            full_sum += r.report.f1;
            ++full_n;
        } else {
            auto& acc = batch[r.report.batch_size];
            acc.first += r.report.f1;
            ++acc.second;
        }
    }
    const double W = 640, H = 400, L = 60, R = 20, T = 30, B = 50;
    const double lo = std::log2(static_cast<double>(batch.begin()->first));
    const double hi = std::max(lo + 1.0, std::log2(static_cast<double>(batch.rbegin()->first)));
    auto px = [&](double bs) { return L + (std::log2(bs) - lo) / (hi - lo) * (W - L - R); };
    auto py = [&](double f1) { return H - B - f1 * (H - T - B); };
    auto f = [](double v) { return csv::format_number(v, 6); };

    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    s += "<text x=\"" + f(L) + "\" y=\"18\">" + std::string(to_string(cfg.task)) + ", sigma " + f(cfg.sigma) +
         ", mean F1 over " + std::to_string(cfg.trials) + " trials</text>\n";
    s += "<line x1=\"" + f(L) + "\" y1=\"" + f(py(0)) + "\" x2=\"" + f(W - R) + "\" y2=\"" + f(py(0)) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + f(L) + "\" y1=\"" + f(py(0)) + "\" x2=\"" + f(L) + "\" y2=\"" + f(py(1)) + "\" stroke=\"black\"/>\n";
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        s += "<text x=\"" + f(L - 8) + "\" y=\"" + f(py(t) + 4) + "\" text-anchor=\"end\">" + f(t) + "</text>\n";
    }
    std::string pts;
    for (const auto& [bs, acc] : batch) {
        const double x = px(static_cast<double>(bs)), y = py(acc.first / acc.second);
        pts += f(x) + "," + f(y) + " ";
        s += "<circle cx=\"" + f(x) + "\" cy=\"" + f(y) + "\" r=\"3\" fill=\"steelblue\"/>\n";
        s += "<text x=\"" + f(x) + "\" y=\"" + f(H - B + 18) + "\" text-anchor=\"middle\">" + std::to_string(bs) + "</text>\n";
    }
    s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    if (full_n > 0) {
        const double y = py(full_sum / full_n);
        s += "<line x1=\"" + f(L) + "\" y1=\"" + f(y) + "\" x2=\"" + f(W - R) + "\" y2=\"" + f(y) +
             "\" stroke=\"darkorange\" stroke-dasharray=\"6,4\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + f(W - R) + "\" y=\"" + f(y - 6) + "\" text-anchor=\"end\" fill=\"darkorange\">full dataset</text>\n";
    }
    s += "<text x=\"" + f((L + W - R) / 2) + "\" y=\"" + f(H - 12) + "\" text-anchor=\"middle\">batch size</text>\n";
    s += "</svg>\n";
    return s;
}

inline int cmd_sweep(const Io& io, const SweepFlags& f) {
    if (io.g.out.empty()) throw usage_error("sweep: --out is required");
    SweepConfig cfg;
    cfg.task = f.task == "regression" ? Task::regression : Task::classification;
    cfg.n = f.n;
    cfg.d = f.d;
    cfg.outlier_frac = f.outlier_frac;
    cfg.margin = f.margin;
    cfg.noise_std = f.noise_std;
    cfg.sigma = f.sigma;
    cfg.batch_sizes = f.batch_sizes;
    cfg.trials = f.trials;
    cfg.seed = io.g.seed;
    cfg.threads = f.threads;
    const auto rows = run_sweep(cfg);

    csv::Writer w({"task", "method", "batch_size", "trial", "sigma", "n", "outlier_frac", "tp", "fp", "fn", "tn",
                   "precision", "recall", "f1"});
    for (const auto& r : rows) {
        const auto& d = r.report;
        w.row({std::string(to_string(r.task)), std::string(to_string(d.method)), num(d.batch_size), num(r.trial),
               num(d.threshold), num(r.n), num(r.outlier_frac), num(d.tp), num(d.fp), num(d.fn), num(d.tn),
               num(d.precision), num(d.recall), num(d.f1)});
    }
    emit(io, w, make_manifest("sweep", io.g, params_of(f)), false);
    if (!f.svg.empty()) {
        csv::write_file(f.svg, sweep_svg(rows, cfg));
        io.status("wrote " + f.svg);
    }
    return ok;
}

// ---------------------------------------------------------------- train-demo

struct TrainFlags {
    std::string task = "regression";
    std::string loss;  // default depends on task
    std::string model; // default depends on task
    std::string mask_mode = "target";
    int epochs = 100;
    std::size_t batch_size = 64;
    double lr = 0.05;
    double sigma = 2.0;
    std::string anneal;
    int anneal_epochs = 0;
    std::size_t mlp_width = 16;
    std::size_t n = 2000;
    std::size_t d = 1;
    double outlier_frac = 0.1;
    double margin = 6.0;
    double noise_std = 1.0;
};

inline void add_train(CLI::App& app, TrainFlags& f) {
    app.add_option("--task", f.task)->check(CLI::IsMember({"regression", "classification"}));
    app.add_option("--loss", f.loss, "zmse, mse, zbce or bce")->check(CLI::IsMember({"zmse", "mse", "zbce", "bce"}));
    app.add_option("--model", f.model, "linear, logistic or mlp")->check(CLI::IsMember({"linear", "logistic", "mlp"}));
    app.add_option("--mask-mode", f.mask_mode, "regression mask statistic")->check(CLI::IsMember({"target", "error"}));
    app.add_option("--epochs", f.epochs);
    app.add_option("--batch-size", f.batch_size);
    app.add_option("--lr", f.lr, "learning rate");
    app.add_option("--sigma", f.sigma, "fixed threshold when not annealing");
    app.add_option("--anneal", f.anneal, "START:END linear sigma schedule");
    app.add_option("--anneal-epochs", f.anneal_epochs, "epochs to reach END (default: all)");
    app.add_option("--mlp-width", f.mlp_width);
    app.add_option("--n", f.n);
    app.add_option("--d", f.d);
    app.add_option("--outlier-frac", f.outlier_frac);
    app.add_option("--margin", f.margin, "regression outlier margin, or cluster separation for classification");
    app.add_option("--noise-std", f.noise_std);
}

inline std::pair<double, double> parse_anneal(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw usage_error("--anneal expects START:END, got '" + text + "'");
    const auto a = csv::parse_double(std::string_view(text).substr(0, colon));
    const auto b = csv::parse_double(std::string_view(text).substr(colon + 1));
    if (!a || !b) throw usage_error("--anneal expects START:END, got '" + text + "'");
    return {*a, *b};
}

inline int cmd_train_demo(const Io& io, TrainFlags f) {
    const bool regression = f.task == "regression";
    if (f.loss.empty()) f.loss = regression ? "zmse" : "zbce";
    if (f.model.empty()) f.model = regression ? "linear" : "logistic";
    const bool regression_loss = f.loss == "zmse" || f.loss == "mse";
    if (regression != regression_loss) throw usage_error("train-demo: --loss " + f.loss + " does not fit --task " + f.task);
    if ((regression && f.model == "logistic") || (!regression && f.model == "linear"))
        throw usage_error("train-demo: --model " + f.model + " does not fit --task " + f.task);

    TrainConfig cfg;
    cfg.epochs = f.epochs;
    cfg.batch_size = f.batch_size;
    cfg.learning_rate = f.lr;
    cfg.loss = f.loss == "zmse" ? LossKind::zmse : f.loss == "mse" ? LossKind::mse : f.loss == "zbce" ? LossKind::zbce : LossKind::bce;
    cfg.model = f.model == "linear" ? ModelKind::linear : f.model == "logistic" ? ModelKind::logistic : ModelKind::mlp;
    cfg.mask_mode = f.mask_mode == "error" ? MaskMode::error_z : MaskMode::target_z;
    cfg.mlp_width = f.mlp_width;
    cfg.seed = io.g.seed;
    if (f.anneal.empty()) {
        cfg.schedule = SigmaSchedule::fixed(f.sigma);
    } else {
        const auto [start, end] = parse_anneal(f.anneal);
        const SigmaSchedule s{start, end, 1};
        cfg.schedule = f.anneal_epochs > 0 ? SigmaSchedule{start, end, f.anneal_epochs} : s.spanning(f.epochs);
    }
    cfg.validate();

    json params{{"task", f.task},       {"loss", f.loss},           {"model", f.model},
                {"mask-mode", f.mask_mode}, {"epochs", f.epochs},   {"batch-size", f.batch_size},
                {"lr", f.lr},           {"sigma", f.sigma},         {"anneal", f.anneal},
                {"anneal-epochs", f.anneal_epochs}, {"mlp-width", f.mlp_width}, {"n", f.n},
                {"d", f.d},             {"outlier-frac", f.outlier_frac}, {"margin", f.margin},
                {"noise-std", f.noise_std}};

    const TrainResult result = regression
        ? train(gen_regression(f.n, f.d, f.outlier_frac, f.margin, f.noise_std, derive_seed(io.g.seed, 1)), cfg)
        : train(gen_classification(f.n, f.d, f.outlier_frac, f.margin, derive_seed(io.g.seed, 1)), cfg);

    csv::Writer w({"epoch", "sigma", "train_loss", "masked_out_count", "model_metric"});
    for (const auto& e : result.history)
        w.row({num(e.epoch), num(e.sigma), num(e.train_loss), num(e.masked_out_count), num(e.model_metric)});
    emit(io, w, make_manifest("train-demo", io.g, std::move(params)), true);
    return ok;
}

// ---------------------------------------------------------------- cutoff

struct CutoffFlags {
    std::string input;
    std::string method = "gaussian";
    double z_threshold = 2.0;
};

inline void add_cutoff(CLI::App& app, CutoffFlags& f) {
    app.add_option("input,--input", f.input, "CSV with columns logit,label")->required();
    app.add_option("--method", f.method)->check(CLI::IsMember({"gaussian", "skewnorm"}));
    app.add_option("--z-threshold", f.z_threshold, "per-class inlier threshold");
}

inline int cmd_cutoff(const Io& io, const CutoffFlags& f) {
    if (!(f.z_threshold > 0.0)) throw usage_error("cutoff: --z-threshold must be positive");
    const auto table = csv::parse(csv::read_file(f.input));
    const std::size_t lc = require_column(table, "logit", f.input);
    const std::size_t yc = require_column(table, "label", f.input);
    std::vector<double> logits;
    std::vector<int> labels;
    std::vector<std::size_t> bad;
    for (const auto& r : table.rows) {
        const auto x = r.fields.size() == table.header.size() ? csv::parse_double(r.fields[lc]) : std::nullopt;
        const auto y = r.fields.size() == table.header.size() ? csv::parse_label(r.fields[yc]) : std::nullopt;
        if (!x || !y) {
            bad.push_back(r.line);
            continue;
        }
        logits.push_back(*x);
        labels.push_back(*y);
    }
    if (!bad.empty()) throw usage_error(f.input + ": malformed rows on lines " + join_lines(bad));
    if (logits.empty()) throw usage_error(f.input + ": no data rows");

    const bool gaussian = f.method == "gaussian";
    const CutoffResult r = gaussian ? optimal_logit_cutoff(logits, labels, f.z_threshold)
                                    : optimal_prob_cutoff_skewnorm(logits, labels, f.z_threshold);
    if (gaussian) io.out << "logit_cutoff: " << num(*r.logit_cutoff) << '\n';
    io.out << "prob_cutoff: " << num(r.prob_cutoff) << '\n';
    if (!io.g.quiet) {
        io.out << "inliers: class 0 " << r.inlier_counts[0] << ", class 1 " << r.inlier_counts[1] << '\n';
        if (r.fallback) io.out << "no density crossing in range, using the midpoint of the class means\n";
    }
    if (!io.g.out.empty()) {
        csv::Writer w({"method", "z_threshold", "logit_cutoff", "prob_cutoff", "class0_inliers", "class1_inliers", "fallback"});
        w.row({f.method, num(f.z_threshold), r.logit_cutoff ? num(*r.logit_cutoff) : "", num(r.prob_cutoff),
               num(r.inlier_counts[0]), num(r.inlier_counts[1]), r.fallback ? "true" : "false"});
        emit(io, w, make_manifest("cutoff", io.g, json{{"input", f.input}, {"method", f.method}, {"z-threshold", f.z_threshold}}), false);
    }
    return ok;
}

// ---------------------------------------------------------------- clean

struct CleanFlags {
    std::string input;
    std::string task = "regression";
    std::string mode = "target";
    double sigma = 2.0;
};

inline void add_clean(CLI::App& app, CleanFlags& f) {
    app.add_option("input,--input", f.input, "CSV: id,target | id,prediction,target | id,logit,label")->required();
    app.add_option("--task", f.task)->check(CLI::IsMember({"regression", "classification"}));
    app.add_option("--mode", f.mode, "regression statistic: target or error")->check(CLI::IsMember({"target", "error"}));
    app.add_option("--sigma", f.sigma, "z-score threshold");
}

inline int cmd_clean(const Io& io, const CleanFlags& f) {
    if (io.g.out.empty()) throw usage_error("clean: --out is required");
    if (!(f.sigma > 0.0)) throw usage_error("clean: --sigma must be positive");
    const auto table = csv::parse(csv::read_file(f.input));
    const bool regression = f.task == "regression";
    const bool on_errors = regression && f.mode == "error";

    std::size_t value_col = 0, other_col = 0;
    if (regression) {
        value_col = require_column(table, "target", f.input);
        if (on_errors) other_col = require_column(table, "prediction", f.input);
    } else {
        value_col = require_column(table, "logit", f.input);
        other_col = require_column(table, "label", f.input);
    }

    std::vector<double> values;
    std::vector<int> labels;
    std::vector<std::size_t> bad;
    for (const auto& r : table.rows) {
        if (r.fields.size() != table.header.size()) {
            bad.push_back(r.line);
            continue;
        }
        const auto v = csv::parse_double(r.fields[value_col]);
        if (!v) {
            bad.push_back(r.line);
            continue;
        }
        if (on_errors) {
            const auto p = csv::parse_double(r.fields[other_col]);
            if (!p) {
                bad.push_back(r.line);
                continue;
            }
            values.push_back((*p - *v) * (*p - *v));
        } else if (!regression) {
            const auto y = csv::parse_label(r.fields[other_col]);
            if (!y) {
                bad.push_back(r.line);
                continue;
            }
            values.push_back(*v);
            labels.push_back(*y);
        } else {
            values.push_back(*v);
        }
    }
    if (!bad.empty()) throw usage_error(f.input + ": malformed rows on lines " + join_lines(bad));
    if (values.empty()) throw usage_error(f.input + ": no data rows");

    const auto z = regression ? batch_z_scores(values) : class_z_scores(values, labels);
    const Mask inlier = regression ? threshold_mask(z, f.sigma) : class_threshold_mask(z, labels, f.sigma, f.sigma);

    auto header = table.header;
    header.push_back("z_score");
    header.push_back("inlier");
    csv::Writer w(header);
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        auto fields = table.rows[i].fields;
        fields.push_back(num(z[i]));
        fields.push_back(inlier[i] ? "true" : "false");
        w.row(fields);
        if (!inlier[i]) ++flagged;
    }
    emit(io, w,
         make_manifest("clean", io.g, json{{"input", f.input}, {"task", f.task}, {"mode", f.mode}, {"sigma", f.sigma}}),
         false);
    io.status("flagged " + std::to_string(flagged) + " of " + std::to_string(values.size()) + " rows");
    return ok;
}

// ---------------------------------------------------------------- anneal-table

struct AnnealFlags {
    int epochs = 100;
    double start = 100.0;
    double end = 2.0;
};

inline void add_anneal(CLI::App& app, AnnealFlags& f) {
    app.add_option("--epochs", f.epochs, "last epoch of the schedule")->check(CLI::Range(1, 1000000));
    app.add_option("--start", f.start, "sigma at epoch 0");
    app.add_option("--end", f.end, "sigma at the last epoch");
}

inline int cmd_anneal_table(const Io& io, const AnnealFlags& f) {
    const SigmaSchedule s{f.start, f.end, f.epochs};
    try {
        s.validate();
    } catch (const error& e) {
        throw usage_error(std::string("anneal-table: ") + e.what());
    }
    csv::Writer w({"epoch", "sigma"});
    for (int e = 0; e <= f.epochs; ++e) w.row({num(e), num(s.at(e))});
    emit(io, w, make_manifest("anneal-table", io.g, json{{"epochs", f.epochs}, {"start", f.start}, {"end", f.end}}), true);
    return ok;
}

// ---------------------------------------------------------------- driver

/// Rebuilds the command line recorded in a manifest. Floats are written in
/// shortest round-trip form so the re-run parses the same doubles.
inline std::vector<std::string> replay_args(const json& m, const Globals& g) {
    if (!m.is_object() || !m.contains("subcommand") || !m.contains("parameters"))
        throw usage_error("--replay: not a zloss manifest");
    std::vector<std::string> args{m.at("subcommand").get<std::string>()};
    for (const auto& [key, value] : m.at("parameters").items()) {
        std::string text;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back("--" + key);
            continue;
        }
        if (value.is_number_float()) {
            text = csv::format_roundtrip(value.get<double>());
        } else if (value.is_number_unsigned()) {
            text = std::to_string(value.get<std::uint64_t>());
        } else if (value.is_number_integer()) {
            text = std::to_string(value.get<std::int64_t>());
        } else if (value.is_array()) {
            for (const auto& v : value) text += (text.empty() ? "" : ",") + v.dump();
        } else if (value.is_string()) {
            text = value.get<std::string>();
            if (text.empty()) continue;
        } else {
            continue;
        }
        args.push_back("--" + key);
        args.push_back(text);
    }
    args.push_back("--seed");
    args.push_back(std::to_string(m.value("seed", std::uint64_t{42})));
    const std::string out = g.out.empty() ? m.value("out", std::string{}) : g.out;
    if (!out.empty()) {
        args.push_back("--out");
        args.push_back(out);
    }
    if (g.quiet) args.push_back("--quiet");
    return args;
}

inline int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err);

inline int execute(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app("Z-score outlier masking toolkit: detection sweeps, robust training demos, "
                 "decision cutoffs and data cleaning.",
                 "zloss");
    app.set_version_flag("--version", std::string(version));
    Globals g;
    app.add_option("--seed", g.seed, "base random seed")->capture_default_str();
    app.add_option("--out", g.out, "output CSV (manifest written to <out>.manifest.json)");
    app.add_flag("--quiet", g.quiet, "suppress status messages");
    app.add_option("--replay", g.replay, "re-run the command recorded in a manifest");
    app.require_subcommand(0, 1);

    SweepFlags sweep;
    TrainFlags train_flags;
    CutoffFlags cutoff;
    CleanFlags clean;
    AnnealFlags anneal;
    auto* s_sweep = app.add_subcommand("sweep", "batch vs full-dataset detection scores over batch sizes");
    auto* s_train = app.add_subcommand("train-demo", "train on synthetic data and log per-epoch statistics");
    auto* s_cutoff = app.add_subcommand("cutoff", "decision cutoff from class-conditional logit fits");
    auto* s_clean = app.add_subcommand("clean", "flag outlier rows of a CSV file");
    auto* s_anneal = app.add_subcommand("anneal-table", "print the linear sigma schedule");
    for (auto* s : {s_sweep, s_train, s_cutoff, s_clean, s_anneal}) s->fallthrough();
    add_sweep(*s_sweep, sweep);
    add_train(*s_train, train_flags);
    add_cutoff(*s_cutoff, cutoff);
    add_clean(*s_clean, clean);
    add_anneal(*s_anneal, anneal);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_failure;
    }

    const Io io{out, err, g};
    if (!g.replay.empty()) {
        if (!app.get_subcommands().empty()) throw usage_error("--replay cannot be combined with a subcommand");
        json m;
        try {
            m = json::parse(csv::read_file(g.replay));
        } catch (const json::exception& e) {
            throw usage_error("--replay: " + std::string(e.what()));
        }
        return dispatch(replay_args(m, g), out, err);
    }
    if (s_sweep->parsed()) return cmd_sweep(io, sweep);
    if (s_train->parsed()) return cmd_train_demo(io, train_flags);
    if (s_cutoff->parsed()) return cmd_cutoff(io, cutoff);
    if (s_clean->parsed()) return cmd_clean(io, clean);
    if (s_anneal->parsed()) return cmd_anneal_table(io, anneal);
    err << app.help();
    return usage_failure;
}

/// Exit codes: 0 success, 1 runtime or data failure, 2 usage error (bad
/// flags, malformed input files, invalid parameters).
inline int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    try {
        return execute(std::move(args), out, err);
    } catch (const usage_error& e) {
        err << "error: " << e.what() << '\n';
        return usage_failure;
    } catch (const error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == errc::invalid_input ? usage_failure : runtime_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return runtime_failure;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return dispatch(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

} // namespace zloss::cli
