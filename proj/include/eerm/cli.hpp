#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eerm/core.hpp"
#include "eerm/dtree.hpp"
#include "eerm/ingest.hpp"
#include "eerm/linreg.hpp"
#include "eerm/moments.hpp"

namespace eerm::cli {

/// Invalid configuration (exit status 2); computation failures keep their
/// own exception types (exit status 1).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Command { fit_linear, curve_linear, curve_dual, fit_tree, evaluate, synth };

struct RunConfig {
    Command command = Command::synth;

    // Inputs: tabular, text, or explicit moments.
    std::string input_csv;
    std::string corpus_path;
    std::string labels_path;
    ingest::CsvSchema schema;
    bool moments_given = false;
    moments::GaussianMoments moments;

    // Controls.
    std::vector<double> lambda_grid;
    std::vector<double> eta_grid;
    double lambda = 0.0;
    double eta = 0.0;
    std::uint64_t seed = 0;
    double noise_std = -1.0;  // < 0: no derived signal requested
    std::size_t keyword_count = 5;
    double test_fraction = 0.1;
    std::size_t max_features = 0;  // 0: unlimited vocabulary
    std::size_t sample_count = 0;  // synth

    // Outputs. `out_path` is the primary artifact; metrics/report default to
    // out_path + ".metrics.csv" / ".report.txt" when empty.
    std::string out_path;
    std::string metrics_path;
    std::string report_path;
    std::string model_path;  // evaluate: model to load
};

/// Seed and content fingerprints embedded in every output file.
struct Provenance {
    std::uint64_t seed = 0;
    std::string config_hash;        // 16 hex digits
    std::string input_fingerprint;  // 16 hex digits
};

struct TextFeaturizer {
    ingest::TfidfModel tfidf;
    std::vector<std::string> keywords;
};

struct LinearModel {
    LinearHypothesis hypothesis;
    std::size_t feature_dim = 0;
};

struct TreeModel {
    dtree::CompositeTree tree;
    std::optional<TextFeaturizer> featurizer;  // present when trained on text
};

struct ModelArtifact {
    std::variant<LinearModel, TreeModel> model;
    Provenance provenance;
};

void serialize_model(const ModelArtifact& artifact, const std::filesystem::path& path);
ModelArtifact deserialize_model(const std::filesystem::path& path);

/// Executes one command; throws ConfigError on bad configuration and
/// std::runtime_error (and friends) on computation failures.
void run(const RunConfig& config);

/// Full command-line entry point: parses argv, runs, maps errors to exit
/// statuses (0 ok, 2 config, 1 computation).
int run_main(int argc, const char* const* argv);

// Provenance helpers, also used by the test suites.
std::uint64_t fnv1a(std::string_view bytes);
std::string fnv1a_hex(std::string_view bytes);
std::string fingerprint_file(const std::filesystem::path& path);
std::string format_g17(double v);

}  // namespace eerm::cli
