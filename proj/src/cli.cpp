#include "eerm/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace eerm::cli {

namespace {

std::string command_name(Command c) {
    switch (c) {
        case Command::fit_linear: return "fit-linear";
        case Command::curve_linear: return "curve-linear";
        case Command::curve_dual: return "curve-dual";
        case Command::fit_tree: return "fit-tree";
        case Command::evaluate: return "evaluate";
        case Command::synth: return "synth";
    }
    return "?";
}

std::filesystem::path resolve_output(const std::string& path) {
    if (path.empty()) throw ConfigError("cli: missing output path");
    const char* dir = std::getenv("EERM_OUTPUT_DIR");
    const std::filesystem::path p(path);
    if (dir != nullptr && *dir != '\0') return std::filesystem::path(dir) / p.filename();
    return p;
}

std::string canonical_moments(const moments::GaussianMoments& m) {
    std::ostringstream s;
    s << "mu_x=" << format_g17(m.mu_x) << ";mu_y=" << format_g17(m.mu_y)
      << ";mu_u=" << format_g17(m.mu_u) << ";var_x=" << format_g17(m.var_x)
      << ";var_y=" << format_g17(m.var_y) << ";var_u=" << format_g17(m.var_u)
      << ";cov_xy=" << format_g17(m.cov_xy) << ";cov_xu=" << format_g17(m.cov_xu)
      << ";cov_yu=" << format_g17(m.cov_yu);
    return s.str();
}

std::string canonical_config(const RunConfig& c) {
    std::ostringstream s;
    s << "command=" << command_name(c.command);
    s << ";input=" << c.input_csv << ";corpus=" << c.corpus_path << ";labels=" << c.labels_path;
    s << ";model=" << c.model_path;
    s << ";features=";
    for (const std::string& f : c.schema.feature_columns) s << f << ',';
    s << ";label=" << c.schema.label_column;
    s << ";signal=" << (c.schema.signal_column ? *c.schema.signal_column : "");
    s << ";label_kind=" << (c.schema.label_kind == ValueKind::binary ? "binary" : "numeric");
    s << ";signal_kind=" << (c.schema.signal_kind == ValueKind::binary ? "binary" : "numeric");
    s << ";moments=" << (c.moments_given ? canonical_moments(c.moments) : "");
    s << ";lambda_grid=";
    for (double v : c.lambda_grid) s << format_g17(v) << ',';
    s << ";eta_grid=";
    for (double v : c.eta_grid) s << format_g17(v) << ',';
    s << ";lambda=" << format_g17(c.lambda) << ";eta=" << format_g17(c.eta);
    s << ";seed=" << c.seed << ";noise_std=" << format_g17(c.noise_std);
    s << ";k=" << c.keyword_count << ";test_fraction=" << format_g17(c.test_fraction);
    s << ";max_features=" << c.max_features << ";m=" << c.sample_count;
    return s.str();
}

Provenance make_provenance(const RunConfig& c) {
    Provenance p;
    p.seed = c.seed;
    p.config_hash = fnv1a_hex(canonical_config(c));
    std::string agg;
    if (!c.model_path.empty()) agg += fingerprint_file(c.model_path);
    if (!c.input_csv.empty()) agg += fingerprint_file(c.input_csv);
    if (!c.corpus_path.empty()) agg += fingerprint_file(c.corpus_path);
    if (!c.labels_path.empty()) agg += fingerprint_file(c.labels_path);
    if (c.moments_given) agg += canonical_moments(c.moments);
    p.input_fingerprint = fnv1a_hex(agg);
    return p;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cli: cannot write " + path.string());
    out << content;
}

std::string provenance_comment(const RunConfig& c, const Provenance& p, const char* file_kind) {
    std::ostringstream s;
    s << "# eerm-" << file_kind << " v1\n";
    s << "# command = " << command_name(c.command) << '\n';
    s << "# seed = " << p.seed << '\n';
    s << "# config_hash = " << p.config_hash << '\n';
    s << "# input_fingerprint = " << p.input_fingerprint << '\n';
    return s.str();
}

void write_curve_csv(const RunConfig& c, const Provenance& p,
                     const std::vector<linreg::TradeoffPoint>& curve) {
    std::ostringstream s;
    s << provenance_comment(c, p, "curve");
    s << "control,risk,entropy,w1,w0\n";
    for (const linreg::TradeoffPoint& t : curve) {
        if (!std::isfinite(t.risk) || !std::isfinite(t.entropy) || !std::isfinite(t.w1) ||
            !std::isfinite(t.w0))
            throw std::runtime_error("cli: non-finite tradeoff point at control " +
                                     format_g17(t.control));
        s << format_g17(t.control) << ',' << format_g17(t.risk) << ',' << format_g17(t.entropy)
          << ',' << format_g17(t.w1) << ',' << format_g17(t.w0) << '\n';
    }
    write_text_file(resolve_output(c.out_path), s.str());
}

// ---- dataset assembly -------------------------------------------------

Dataset load_tabular(const RunConfig& c, bool signal_required) {
    if (c.input_csv.empty()) throw ConfigError("cli: --input CSV path required");
    if (c.schema.feature_columns.empty()) throw ConfigError("cli: --features required");
    if (c.schema.label_column.empty()) throw ConfigError("cli: --label required");
    if (c.noise_std >= 0.0 && c.schema.signal_column)
        throw ConfigError("cli: give either --signal or --noise-std, not both");
    if (signal_required && c.noise_std < 0.0 && !c.schema.signal_column)
        throw ConfigError("cli: a user signal is required: pass --signal or --noise-std");

    Dataset d = ingest::load_csv(c.input_csv, c.schema);
    if (c.noise_std >= 0.0) d = ingest::weather_signal(d, c.noise_std, c.seed);
    return d;
}

moments::GaussianMoments resolve_moments(const RunConfig& c) {
    if (c.moments_given) {
        c.moments.validate();
        return c.moments;
    }
    if (c.input_csv.empty())
        throw ConfigError("cli: provide moment flags (--var-x ...) or --input data");
    const Dataset d = load_tabular(c, /*signal_required=*/true);
    if (d.feature_dim() != 1)
        throw ConfigError("cli: moment estimation requires exactly one feature column");
    return moments::estimate_moments(d);
}

int majority_label_of(const std::vector<int>& labels) {
    long c1 = 0;
    for (int l : labels) c1 += l;
    return 2 * c1 > static_cast<long>(labels.size()) ? 1 : 0;
}

// ---- commands ----------------------------------------------------------

void run_fit_linear(const RunConfig& c, const Provenance& prov) {
    const Dataset d = load_tabular(c, /*signal_required=*/true);
    if (c.lambda < 0.0) throw ConfigError("cli: --lambda must be >= 0");
    const linreg::PrimalSolution sol = linreg::fit_primal(d, c.lambda);

    ModelArtifact artifact{LinearModel{sol.hypothesis, d.feature_dim()}, prov};
    serialize_model(artifact, resolve_output(c.out_path));

    std::ostringstream s;
    s << provenance_comment(c, prov, "metrics");
    s << "risk,entropy,alpha,lambda,objective\n";
    s << format_g17(sol.empirical_risk) << ',' << format_g17(sol.entropy_estimate) << ','
      << format_g17(sol.hypothesis.alpha) << ',' << format_g17(sol.lambda) << ','
      << format_g17(sol.objective_value) << '\n';
    const std::string metrics =
        c.metrics_path.empty() ? c.out_path + ".metrics.csv" : c.metrics_path;
    write_text_file(resolve_output(metrics), s.str());
}

void run_curve_linear(const RunConfig& c, const Provenance& prov) {
    if (c.lambda_grid.empty()) throw ConfigError("cli: --lambda-grid required");
    if (!std::is_sorted(c.lambda_grid.begin(), c.lambda_grid.end()) || c.lambda_grid.front() < 0)
        throw ConfigError("cli: --lambda-grid must be sorted ascending and nonnegative");
    const Dataset d = load_tabular(c, /*signal_required=*/true);
    write_curve_csv(c, prov, linreg::tradeoff_curve_primal(d, c.lambda_grid));
}

void run_curve_dual(const RunConfig& c, const Provenance& prov) {
    if (c.eta_grid.empty()) throw ConfigError("cli: --eta-grid required");
    if (!std::is_sorted(c.eta_grid.begin(), c.eta_grid.end()))
        throw ConfigError("cli: --eta-grid must be sorted ascending");
    const moments::GaussianMoments m = resolve_moments(c);
    write_curve_csv(c, prov, linreg::tradeoff_curve_dual(m, c.eta_grid));
}

void run_synth(const RunConfig& c, const Provenance& prov) {
    if (!c.moments_given) throw ConfigError("cli: synth requires moment flags (--var-x ...)");
    if (c.sample_count == 0) throw ConfigError("cli: --m must be positive");
    const Dataset d = ingest::synth_gaussian(c.moments, c.sample_count, c.seed);

    std::ostringstream s;
    s << provenance_comment(c, prov, "dataset");
    s << "x,y,u\n";
    for (const LabeledPoint& p : d)
        s << format_g17(p.features[0]) << ',' << format_g17(p.label) << ','
          << format_g17(p.user_signal) << '\n';
    write_text_file(resolve_output(c.out_path), s.str());
}

struct TreeFitReport {
    int depth_u0 = 0;
    int depth_u1 = 0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double majority_baseline = 0.0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
};

void write_tree_outputs(const RunConfig& c, const Provenance& prov,
                        const dtree::CompositeTree& tree,
                        std::optional<TextFeaturizer> featurizer, const TreeFitReport& r) {
    {
        TreeModel model;
        model.tree.tree_u0 = dtree::clone_tree(tree.tree_u0);
        model.tree.tree_u1 = dtree::clone_tree(tree.tree_u1);
        model.tree.max_depth = tree.max_depth;
        model.tree.fallback_label = tree.fallback_label;
        model.tree.feature_dim = tree.feature_dim;
        model.featurizer = std::move(featurizer);
        serialize_model(ModelArtifact{std::move(model), prov}, resolve_output(c.out_path));
    }
    std::ostringstream s;
    s << provenance_comment(c, prov, "report");
    s << "eta = " << format_g17(c.eta) << '\n';
    s << "depth_bound = " << tree.max_depth << '\n';
    s << "root_test = user_signal\n";
    s << "depth_u0 = " << r.depth_u0 << '\n';
    s << "depth_u1 = " << r.depth_u1 << '\n';
    s << "fallback_label = "
      << (tree.fallback_label ? std::to_string(*tree.fallback_label) : "none") << '\n';
    s << "train_size = " << r.train_size << '\n';
    s << "test_size = " << r.test_size << '\n';
    s << "train_accuracy = " << format_g17(r.train_accuracy) << '\n';
    s << "test_accuracy = " << format_g17(r.test_accuracy) << '\n';
    s << "majority_baseline = " << format_g17(r.majority_baseline) << '\n';
    const std::string report = c.report_path.empty() ? c.out_path + ".report.txt" : c.report_path;
    write_text_file(resolve_output(report), s.str());
}

double composite_accuracy(const dtree::CompositeTree& tree, const Dataset& d) {
    return accuracy(d, [&](const LabeledPoint& p) {
        return dtree::predict_composite(tree, p.features, static_cast<int>(p.user_signal));
    });
}

void run_fit_tree_text(const RunConfig& c, const Provenance& prov) {
    const ingest::TextCorpus corpus = ingest::load_corpus(c.corpus_path, c.labels_path);
    const ingest::IndexSplit split =
        ingest::split_indices(corpus.documents.size(), c.test_fraction, c.seed);

    ingest::TextCorpus train, test;
    for (std::size_t i : split.train) {
        train.documents.push_back(corpus.documents[i]);
        train.labels.push_back(corpus.labels[i]);
    }
    for (std::size_t i : split.test) {
        test.documents.push_back(corpus.documents[i]);
        test.labels.push_back(corpus.labels[i]);
    }

    // Vocabulary and keywords come from the training split only; the test
    // split is featurized through the frozen model.
    ingest::TfidfResult tfidf = ingest::build_tfidf(train, c.max_features);
    const ingest::KeywordSignal keywords =
        ingest::derive_keyword_signal(train, c.keyword_count);

    auto to_dataset = [](std::vector<std::vector<double>> rows, const std::vector<int>& labels,
                         const std::vector<int>& signals) {
        std::vector<LabeledPoint> pts;
        pts.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            pts.push_back({std::move(rows[i]), static_cast<double>(labels[i]),
                           static_cast<double>(signals[i])});
        return Dataset(std::move(pts), ValueKind::binary, ValueKind::binary);
    };

    const Dataset train_ds = to_dataset(std::move(tfidf.matrix), train.labels, keywords.signals);
    const dtree::CompositeTree tree = dtree::fit_eerm_tree(train_ds, c.eta);

    std::vector<std::vector<double>> test_rows;
    std::vector<int> test_signals;
    for (const std::string& doc : test.documents) {
        test_rows.push_back(ingest::tfidf_transform(tfidf.model, doc));
        test_signals.push_back(ingest::signal_from_keywords(keywords.keywords, doc));
    }
    const Dataset test_ds = to_dataset(std::move(test_rows), test.labels, test_signals);

    TreeFitReport r;
    r.depth_u0 = dtree::tree_depth(tree.tree_u0);
    r.depth_u1 = dtree::tree_depth(tree.tree_u1);
    r.train_size = train_ds.size();
    r.test_size = test_ds.size();
    r.train_accuracy = composite_accuracy(tree, train_ds);
    r.test_accuracy = composite_accuracy(tree, test_ds);
    const int majority = majority_label_of(train.labels);
    std::size_t hits = 0;
    for (int l : test.labels) hits += (l == majority);
    r.majority_baseline = static_cast<double>(hits) / static_cast<double>(test.labels.size());

    write_tree_outputs(c, prov, tree, TextFeaturizer{tfidf.model, keywords.keywords}, r);
}

void run_fit_tree_tabular(const RunConfig& c, const Provenance& prov) {
    const Dataset d = load_tabular(c, /*signal_required=*/true);
    if (d.label_kind() != ValueKind::binary || d.signal_kind() != ValueKind::binary)
        throw ConfigError("cli: fit-tree on CSV needs --label-kind binary --signal-kind binary");
    const ingest::SplitResult split = ingest::train_test_split(d, c.test_fraction, c.seed);
    const dtree::CompositeTree tree = dtree::fit_eerm_tree(split.train, c.eta);

    TreeFitReport r;
    r.depth_u0 = dtree::tree_depth(tree.tree_u0);
    r.depth_u1 = dtree::tree_depth(tree.tree_u1);
    r.train_size = split.train.size();
    r.test_size = split.test.size();
    r.train_accuracy = composite_accuracy(tree, split.train);
    r.test_accuracy = composite_accuracy(tree, split.test);
    std::vector<int> train_labels;
    for (const LabeledPoint& p : split.train) train_labels.push_back(static_cast<int>(p.label));
    const int majority = majority_label_of(train_labels);
    std::size_t hits = 0;
    for (const LabeledPoint& p : split.test) hits += (static_cast<int>(p.label) == majority);
    r.majority_baseline = static_cast<double>(hits) / static_cast<double>(split.test.size());

    write_tree_outputs(c, prov, tree, std::nullopt, r);
}

void run_fit_tree(const RunConfig& c, const Provenance& prov) {
    if (!(c.eta >= 0.0)) throw ConfigError("cli: --eta must be >= 0");
    if (!c.corpus_path.empty() != !c.labels_path.empty())
        throw ConfigError("cli: --corpus and --labels go together");
    if (!c.corpus_path.empty() && !c.input_csv.empty())
        throw ConfigError("cli: give either --corpus/--labels or --input, not both");
    if (!c.corpus_path.empty())
        run_fit_tree_text(c, prov);
    else
        run_fit_tree_tabular(c, prov);
}

void run_evaluate(const RunConfig& c, const Provenance& prov) {
    if (c.model_path.empty()) throw ConfigError("cli: --model required");
    if (!c.corpus_path.empty() != !c.labels_path.empty())
        throw ConfigError("cli: --corpus and --labels go together");
    const ModelArtifact artifact = deserialize_model(c.model_path);

    std::ostringstream s;
    s << provenance_comment(c, prov, "evaluate");
    if (const auto* linear = std::get_if<LinearModel>(&artifact.model)) {
        const Dataset d = load_tabular(c, /*signal_required=*/false);
        if (d.feature_dim() != linear->feature_dim)
            throw std::runtime_error("cli: dataset has " + std::to_string(d.feature_dim()) +
                                     " features, model expects " +
                                     std::to_string(linear->feature_dim));
        s << "kind = linear\n";
        s << "points = " << d.size() << '\n';
        s << "risk = " << format_g17(empirical_risk(d, linear->hypothesis)) << '\n';
    } else {
        const auto& model = std::get<TreeModel>(artifact.model);
        Dataset d = [&] {
            if (!c.corpus_path.empty()) {
                if (!model.featurizer)
                    throw std::runtime_error(
                        "cli: model has no text featurizer; evaluate it on tabular input");
                const ingest::TextCorpus corpus =
                    ingest::load_corpus(c.corpus_path, c.labels_path);
                std::vector<LabeledPoint> pts;
                for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
                    const std::string& doc = corpus.documents[i];
                    pts.push_back(
                        {ingest::tfidf_transform(model.featurizer->tfidf, doc),
                         static_cast<double>(corpus.labels[i]),
                         static_cast<double>(
                             ingest::signal_from_keywords(model.featurizer->keywords, doc))});
                }
                return Dataset(std::move(pts), ValueKind::binary, ValueKind::binary);
            }
            return load_tabular(c, /*signal_required=*/true);
        }();
        if (d.label_kind() != ValueKind::binary || d.signal_kind() != ValueKind::binary)
            throw ConfigError("cli: evaluating a tree model needs binary label and signal");
        s << "kind = composite-tree\n";
        s << "points = " << d.size() << '\n';
        s << "accuracy = " << format_g17(composite_accuracy(model.tree, d)) << '\n';
    }
    write_text_file(resolve_output(c.out_path), s.str());
}

// ---- argv parsing ------------------------------------------------------

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    const auto parse_one = [](const std::string& tok) {
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("cli: cannot parse grid value '" + tok + "'");
        }
    };
    const auto colons = std::count(text.begin(), text.end(), ':');
    if (colons == 2) {
        const std::size_t a = text.find(':');
        const std::size_t b = text.find(':', a + 1);
        const double start = parse_one(text.substr(0, a));
        const double step = parse_one(text.substr(a + 1, b - a - 1));
        const double stop = parse_one(text.substr(b + 1));
        if (!(step > 0.0)) throw ConfigError("cli: grid step must be positive");
        const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count < 1) throw ConfigError("cli: empty grid range");
        for (long long i = 0; i < count; ++i) grid.push_back(start + step * static_cast<double>(i));
        return grid;
    }
    std::stringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) grid.push_back(parse_one(tok));
    if (grid.empty()) throw ConfigError("cli: empty grid");
    return grid;
}

ValueKind parse_kind(const std::string& text) {
    if (text == "numeric") return ValueKind::numeric;
    if (text == "binary") return ValueKind::binary;
    throw ConfigError("cli: value kind must be 'numeric' or 'binary', got '" + text + "'");
}

}  // namespace

void run(const RunConfig& config) {
    if (config.out_path.empty()) throw ConfigError("cli: --out required");
    for (const std::string* path :
         {&config.input_csv, &config.corpus_path, &config.labels_path, &config.model_path})
        if (!path->empty() && !std::filesystem::exists(*path))
            throw ConfigError("cli: input file not found: " + *path);
    const Provenance prov = make_provenance(config);
    switch (config.command) {
        case Command::fit_linear: return run_fit_linear(config, prov);
        case Command::curve_linear: return run_curve_linear(config, prov);
        case Command::curve_dual: return run_curve_dual(config, prov);
        case Command::fit_tree: return run_fit_tree(config, prov);
        case Command::evaluate: return run_evaluate(config, prov);
        case Command::synth: return run_synth(config, prov);
    }
    throw ConfigError("cli: unknown command");
}

int run_main(int argc, const char* const* argv) {
    CLI::App app{"entropy-regularized risk minimization with user-signal explainability"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string features_csv, signal_column, label_kind = "numeric", signal_kind = "numeric";
    std::string lambda_grid_text, eta_grid_text;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", cfg.seed, "RNG seed recorded in every output");
        sub->add_option("--out", cfg.out_path, "output path")->required();
    };
    const auto add_schema = [&](CLI::App* sub) {
        sub->add_option("--input", cfg.input_csv, "CSV dataset path");
        sub->add_option("--features", features_csv, "comma-separated feature column names");
        sub->add_option("--label", cfg.schema.label_column, "label column name");
        sub->add_option("--signal", signal_column, "user-signal column name");
        sub->add_option("--label-kind", label_kind, "numeric|binary");
        sub->add_option("--signal-kind", signal_kind, "numeric|binary");
        sub->add_option("--noise-std", cfg.noise_std,
                        "derive the signal as label + Gaussian noise with this std");
    };
    const auto add_moments = [&](CLI::App* sub) {
        sub->add_option("--mu-x", cfg.moments.mu_x);
        sub->add_option("--mu-y", cfg.moments.mu_y);
        sub->add_option("--mu-u", cfg.moments.mu_u);
        sub->add_option("--var-x", cfg.moments.var_x);
        sub->add_option("--var-y", cfg.moments.var_y);
        sub->add_option("--var-u", cfg.moments.var_u);
        sub->add_option("--cov-xy", cfg.moments.cov_xy);
        sub->add_option("--cov-xu", cfg.moments.cov_xu);
        sub->add_option("--cov-yu", cfg.moments.cov_yu);
    };

    CLI::App* fit_linear = app.add_subcommand("fit-linear", "fit the penalized linear model");
    add_common(fit_linear);
    add_schema(fit_linear);
    fit_linear->add_option("--lambda", cfg.lambda, "explainability penalty weight");
    fit_linear->add_option("--metrics", cfg.metrics_path, "metrics CSV path");

    CLI::App* curve_linear =
        app.add_subcommand("curve-linear", "sweep lambda and emit a tradeoff curve");
    add_common(curve_linear);
    add_schema(curve_linear);
    curve_linear->add_option("--lambda-grid", lambda_grid_text,
                             "comma list or start:step:stop, sorted ascending");

    CLI::App* curve_dual =
        app.add_subcommand("curve-dual", "closed-form dual curve from moments or data");
    add_common(curve_dual);
    add_schema(curve_dual);
    add_moments(curve_dual);
    curve_dual->add_option("--eta-grid", eta_grid_text,
                           "comma list or start:step:stop, sorted ascending");

    CLI::App* fit_tree =
        app.add_subcommand("fit-tree", "fit the signal-routed depth-limited tree pair");
    add_common(fit_tree);
    add_schema(fit_tree);
    fit_tree->add_option("--corpus", cfg.corpus_path, "text corpus, one document per line");
    fit_tree->add_option("--labels", cfg.labels_path, "labels file, one 0/1 per line");
    fit_tree->add_option("--eta", cfg.eta, "entropy budget; tree depth bound is ceil(eta)");
    fit_tree->add_option("--k", cfg.keyword_count, "number of keywords for the user signal");
    fit_tree->add_option("--test-fraction", cfg.test_fraction, "held-out fraction in (0,1)");
    fit_tree->add_option("--max-features", cfg.max_features,
                         "cap the tf-idf vocabulary size (0 = unlimited)");
    fit_tree->add_option("--report", cfg.report_path, "report file path");

    CLI::App* evaluate = app.add_subcommand("evaluate", "score a saved model on a dataset");
    add_common(evaluate);
    add_schema(evaluate);
    evaluate->add_option("--model", cfg.model_path, "model file to load")->required();
    evaluate->add_option("--corpus", cfg.corpus_path, "text corpus, one document per line");
    evaluate->add_option("--labels", cfg.labels_path, "labels file, one 0/1 per line");

    CLI::App* synth = app.add_subcommand("synth", "sample a synthetic Gaussian dataset");
    add_common(synth);
    add_moments(synth);
    synth->add_option("--m", cfg.sample_count, "number of samples");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (fit_linear->parsed()) cfg.command = Command::fit_linear;
        if (curve_linear->parsed()) cfg.command = Command::curve_linear;
        if (curve_dual->parsed()) cfg.command = Command::curve_dual;
        if (fit_tree->parsed()) cfg.command = Command::fit_tree;
        if (evaluate->parsed()) cfg.command = Command::evaluate;
        if (synth->parsed()) cfg.command = Command::synth;

        if (!features_csv.empty()) {
            std::stringstream in(features_csv);
            std::string tok;
            while (std::getline(in, tok, ',')) cfg.schema.feature_columns.push_back(tok);
        }
        if (!signal_column.empty()) cfg.schema.signal_column = signal_column;
        cfg.schema.label_kind = parse_kind(label_kind);
        cfg.schema.signal_kind = parse_kind(signal_kind);
        if (!lambda_grid_text.empty()) cfg.lambda_grid = parse_grid(lambda_grid_text);
        if (!eta_grid_text.empty()) cfg.eta_grid = parse_grid(eta_grid_text);

        const CLI::App* moments_sub = curve_dual->parsed() ? curve_dual : synth;
        for (const char* flag : {"--mu-x", "--mu-y", "--mu-u", "--var-x", "--var-y", "--var-u",
                                 "--cov-xy", "--cov-xu", "--cov-yu"})
            if (moments_sub->count(flag) > 0) cfg.moments_given = true;

        run(cfg);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "eerm: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "eerm: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace eerm::cli
