#include "textclust/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "textclust/config.hpp"
#include "textclust/embed.hpp"
#include "textclust/report.hpp"
#include "textclust/selftest.hpp"
#include "textclust/trainer.hpp"

namespace textclust {

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_seed) {
    cmd->add_option("--config", opts.config_path, "TOML-style config file");
    cmd->add_option("--set", opts.overrides, "Override a config key, e.g. --set train.lr=1e-4")->take_all();
    if (with_seed) cmd->add_option("--seed", opts.seed, "Training seed (overrides train.seed)");
}

RunConfig resolve_config(const CommonOptions& opts) {
    RunConfig config = opts.config_path.empty() ? RunConfig{} : load_config(opts.config_path);
    for (const auto& o : opts.overrides) apply_override(config, o);
    if (opts.seed) config.train.seed = *opts.seed;
    return config;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path);
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
    } else {
        write_text(path, text);
    }
}

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> values;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
            throw ConfigError("bad sweep value '" + item + "'");
        values.push_back(v);
    }
    if (values.empty()) throw ConfigError("--values needs at least one number");
    return values;
}

std::vector<HeadKind> parse_heads(const std::string& list) {
    std::vector<HeadKind> heads;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            heads.push_back(parse_head(item));
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(ex.what());
        }
    }
    if (heads.empty()) throw ConfigError("--heads needs at least one head");
    return heads;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"textclust: deep embedded text clustering", "textclust"};
    app.require_subcommand(1);

    CommonOptions pre_opts, embed_opts, train_opts, sweep_opts;

    std::string pre_output;
    auto* pre = app.add_subcommand("preprocess", "Clean and deduplicate a text corpus");
    add_common(pre, pre_opts, false);
    pre->add_option("--output", pre_output, "Cleaned corpus file")->required();

    std::string embed_output, embed_labels;
    bool embed_no_ids = false;
    auto* embed = app.add_subcommand("embed", "Write hashed bag-of-words vectors of a corpus as EMB1");
    add_common(embed, embed_opts, false);
    embed->add_option("--output", embed_output, "EMB1 file")->required();
    embed->add_option("--labels-out", embed_labels, "Also write the corpus labels, one per line");
    embed->add_flag("--no-ids", embed_no_ids, "Omit the trailing id block");

    std::string train_output, train_labels, train_embeddings;
    auto* trn = app.add_subcommand("train", "Train one configuration and report ACC/NMI");
    add_common(trn, train_opts, true);
    trn->add_option("--output", train_output, "RunResult JSON (stdout when omitted)");
    trn->add_option("--labels-out", train_labels, "Predicted labels, one per line");
    trn->add_option("--embeddings-out", train_embeddings, "Final representations as EMB1");

    std::string sweep_axis, sweep_values, sweep_heads = "som,somr,kmeans,kmeansr", sweep_output;
    std::size_t sweep_jobs = 1;
    auto* swp = app.add_subcommand("sweep", "Sweep lr, lr_scale or tau over the clustering heads");
    add_common(swp, sweep_opts, true);
    swp->add_option("--axis", sweep_axis, "lr, lr_scale or tau")->required();
    swp->add_option("--values", sweep_values, "Comma-separated axis values")->required();
    swp->add_option("--heads", sweep_heads, "Comma-separated heads")->capture_default_str();
    swp->add_option("--jobs", sweep_jobs, "Runs executed in parallel")->capture_default_str()->check(CLI::PositiveNumber);
    swp->add_option("--output", sweep_output, "CSV table (stdout when omitted)");

    std::string eval_pred, eval_truth, eval_output;
    auto* evl = app.add_subcommand("evaluate", "Score predicted labels against ground truth");
    evl->add_option("--pred", eval_pred, "Predicted labels, one per line")->required();
    evl->add_option("--truth", eval_truth, "True labels, one per line")->required();
    evl->add_option("--output", eval_output, "EvalReport JSON (stdout when omitted)");

    auto* self = app.add_subcommand("selftest", "Run the built-in invariant checks");

    CLI::App* active = &app;
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitOk;
    } catch (const CLI::ParseError& ex) {
        if (!app.get_subcommands().empty()) active = app.get_subcommands().front();
        err << "error: " << ex.what() << "\n\n" << active->help();
        return kExitUsage;
    }
    active = app.get_subcommands().front();

    try {
        if (active == pre) {
            RunConfig config = resolve_config(pre_opts);
            config.data.preprocess = false;
            const Corpus raw = load_text_corpus(config);
            const Corpus cleaned = dedup(preprocess_corpus(raw, config.preprocess));
            save_corpus(cleaned, pre_output);
            out << "kept " << cleaned.size() << " of " << raw.size() << " documents\n";
        } else if (active == embed) {
            const RunConfig config = resolve_config(embed_opts);
            const Corpus corpus = load_text_corpus(config);
            const auto set = embed_corpus_hashed(corpus, config.train.encoder.model_dim, config.train.hash_seed);
            save_embeddings(set, embed_output, !embed_no_ids);
            if (!embed_labels.empty()) {
                if (!corpus.has_labels()) throw std::runtime_error("corpus has no labels to write");
                save_label_file(corpus.labels(), embed_labels);
            }
            out << "wrote " << set.n << "x" << set.d << " embeddings\n";
        } else if (active == trn) {
            const RunConfig config = resolve_config(train_opts);
            const TrainData data = load_data(config);
            Matrix reps;
            const auto run = train(config.train, data, train_embeddings.empty() ? nullptr : &reps);
            emit(train_output, dump_json(run_to_json(run, config_to_json(config))), out);
            if (!train_labels.empty()) save_label_file(run.labels.labels, train_labels);
            if (!train_embeddings.empty()) save_embeddings(EmbeddingSet::from_matrix(reps), train_embeddings);
        } else if (active == swp) {
            const RunConfig config = resolve_config(sweep_opts);
            SweepAxis axis{};
            try {
                axis = parse_axis(sweep_axis);
            } catch (const std::invalid_argument& ex) {
                throw ConfigError(ex.what());
            }
            const auto values = parse_values(sweep_values);
            const auto heads = parse_heads(sweep_heads);
            const TrainData data = load_data(config);
            const auto table = sweep(config.train, axis, values, data, heads, sweep_jobs);
            emit(sweep_output, sweep_to_csv(table), out);
        } else if (active == evl) {
            const auto pred = load_label_file(eval_pred);
            const auto truth = load_label_file(eval_truth);
            emit(eval_output, dump_json(report_to_json(evaluate(pred, truth))), out);
        } else if (active == self) {
            return run_selftest(out) == 0 ? kExitOk : kExitRuntime;
        }
    } catch (const ConfigError& ex) {
        err << "error: " << ex.what() << "\n\n" << active->help();
        return kExitUsage;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace textclust
