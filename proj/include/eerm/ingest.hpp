#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eerm/core.hpp"
#include "eerm/moments.hpp"

namespace eerm::ingest {

/// Column mapping for tabular CSV input. Columns not named here are ignored.
struct CsvSchema {
    std::vector<std::string> feature_columns;
    std::string label_column;
    std::optional<std::string> signal_column;  // absent: user_signal filled with 0
    ValueKind label_kind = ValueKind::numeric;
    ValueKind signal_kind = ValueKind::numeric;
};

/// Reads a UTF-8, comma-separated file with a header row and decimal-point
/// numerals. Lines starting with '#' are treated as comments.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Returns a copy of d whose user signal is the label plus seeded i.i.d.
/// zero-mean Gaussian noise with standard deviation noise_std.
Dataset weather_signal(const Dataset& d, double noise_std, std::uint64_t seed);

struct TextCorpus {
    std::vector<std::string> documents;
    std::vector<int> labels;  // {0,1}, parallel to documents
};

/// One document per line in `documents_path`; one 0/1 label per line in
/// `labels_path`.
TextCorpus load_corpus(const std::filesystem::path& documents_path,
                       const std::filesystem::path& labels_path);

/// Lowercases, splits on any non-alphanumeric byte, and drops tokens
/// shorter than 2 characters.
std::vector<std::string> tokenize(std::string_view text);

struct TfidfModel {
    struct Term {
        std::string token;
        int doc_frequency = 0;
    };
    std::vector<Term> vocabulary;  // sorted by token
    int num_documents = 0;
};

struct TfidfResult {
    TfidfModel model;
    std::vector<std::vector<double>> matrix;  // one L2-normalized row per document
};

/// tf = term count / document token count; idf = ln((1+N)/(1+df)) + 1; rows
/// L2-normalized (all-zero rows stay zero). With max_features > 0 the
/// vocabulary keeps only the tokens with the highest total count across the
/// corpus (ties lexicographic).
TfidfResult build_tfidf(const TextCorpus& corpus, std::size_t max_features = 0);

std::vector<double> tfidf_transform(const TfidfModel& model, std::string_view document);

struct KeywordSignal {
    std::vector<std::string> keywords;
    std::vector<int> signals;  // u_i = 1 iff document i contains >= 1 keyword
    bool truncated = false;    // fewer than k tokens existed in the positive class
};

/// Top-k tokens by total count over label-1 documents (ties lexicographic),
/// plus the presence signal they induce over the whole corpus.
KeywordSignal derive_keyword_signal(const TextCorpus& corpus, std::size_t k);

int signal_from_keywords(std::span<const std::string> keywords, std::string_view document);

/// m i.i.d. draws of (x, y, u) from the Gaussian given by mom, via the
/// symmetric square root of the covariance matrix and the pinned
/// RandomStream generator.
Dataset synth_gaussian(const moments::GaussianMoments& mom, std::size_t count,
                       std::uint64_t seed);

struct IndexSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Seeded shuffle of 0..m-1 followed by a split; the test side gets
/// round(m * test_fraction) indices, clamped so both sides are nonempty.
IndexSplit split_indices(std::size_t m, double test_fraction, std::uint64_t seed);

struct SplitResult {
    Dataset train;
    Dataset test;
};

/// split_indices applied to the points of d.
SplitResult train_test_split(const Dataset& d, double test_fraction, std::uint64_t seed);

}  // namespace eerm::ingest
