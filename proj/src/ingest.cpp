#include "eerm/ingest.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "eerm/rng.hpp"

namespace eerm::ingest {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("ingest: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (line.ends_with('\r')) line.remove_suffix(1);
        lines.push_back(line);
        if (end == text.size()) break;
        start = end + 1;
    }
    return lines;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv_row(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

double parse_cell(std::string_view cell, std::size_t line_no, const std::string& column) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value))
        throw std::runtime_error("ingest: line " + std::to_string(line_no) +
                                 ": cannot parse value '" + std::string(cell) + "' in column '" +
                                 column + "'");
    return value;
}

void check_binary_cell(double value, std::size_t line_no, const std::string& column) {
    if (value != 0.0 && value != 1.0)
        throw std::runtime_error("ingest: line " + std::to_string(line_no) + ": column '" +
                                 column + "' declared binary but value is not 0 or 1");
}

void validate_corpus(const TextCorpus& corpus) {
    if (corpus.documents.empty()) throw std::invalid_argument("ingest: empty corpus");
    if (corpus.documents.size() != corpus.labels.size())
        throw std::invalid_argument("ingest: corpus has " +
                                    std::to_string(corpus.documents.size()) + " documents but " +
                                    std::to_string(corpus.labels.size()) + " labels");
    for (int l : corpus.labels)
        if (l != 0 && l != 1) throw std::invalid_argument("ingest: corpus labels must be 0 or 1");
}

double idf_of(int df, int num_documents) {
    return std::log((1.0 + num_documents) / (1.0 + df)) + 1.0;
}

std::vector<double> vectorize(const TfidfModel& model,
                              const std::vector<std::string>& tokens) {
    std::vector<double> row(model.vocabulary.size(), 0.0);
    if (tokens.empty()) return row;
    for (const std::string& t : tokens) {
        const auto it = std::lower_bound(
            model.vocabulary.begin(), model.vocabulary.end(), t,
            [](const TfidfModel::Term& term, const std::string& tok) { return term.token < tok; });
        if (it != model.vocabulary.end() && it->token == t)
            row[static_cast<std::size_t>(it - model.vocabulary.begin())] += 1.0;
    }
    const double doc_len = static_cast<double>(tokens.size());
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        row[j] = row[j] / doc_len * idf_of(model.vocabulary[j].doc_frequency,
                                           model.num_documents);
        norm_sq += row[j] * row[j];
    }
    if (norm_sq > 0.0) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (double& v : row) v *= inv;
    }
    return row;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    if (schema.feature_columns.empty())
        throw std::invalid_argument("ingest: schema needs at least one feature column");
    {
        std::unordered_set<std::string> names(schema.feature_columns.begin(),
                                              schema.feature_columns.end());
        names.insert(schema.label_column);
        if (schema.signal_column) names.insert(*schema.signal_column);
        if (names.size() != schema.feature_columns.size() + 1 + (schema.signal_column ? 1 : 0))
            throw std::invalid_argument("ingest: schema column names must be distinct");
    }

    const std::string text = read_file(path);
    const auto lines = split_lines(text);

    std::size_t line_no = 0;
    std::vector<std::string_view> header;
    for (; line_no < lines.size(); ++line_no) {
        const std::string_view line = lines[line_no];
        if (line.empty() || line.starts_with('#')) continue;
        header = split_csv_row(line);
        ++line_no;
        break;
    }
    if (header.empty()) throw std::runtime_error("ingest: " + path.string() + " has no header row");

    auto column_index = [&](const std::string& name) {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return j;
        throw std::runtime_error("ingest: missing column '" + name + "' in " + path.string());
    };
    std::vector<std::size_t> feature_idx;
    for (const std::string& c : schema.feature_columns) feature_idx.push_back(column_index(c));
    const std::size_t label_idx = column_index(schema.label_column);
    const std::size_t signal_idx =
        schema.signal_column ? column_index(*schema.signal_column) : std::size_t{0};

    std::vector<LabeledPoint> points;
    for (; line_no < lines.size(); ++line_no) {
        const std::string_view line = lines[line_no];
        if (line.empty() || line.starts_with('#')) continue;
        const auto cells = split_csv_row(line);
        if (cells.size() != header.size())
            throw std::runtime_error("ingest: line " + std::to_string(line_no + 1) + ": expected " +
                                     std::to_string(header.size()) + " cells, got " +
                                     std::to_string(cells.size()));
        LabeledPoint p;
        for (std::size_t j = 0; j < feature_idx.size(); ++j)
            p.features.push_back(
                parse_cell(cells[feature_idx[j]], line_no + 1, schema.feature_columns[j]));
        p.label = parse_cell(cells[label_idx], line_no + 1, schema.label_column);
        if (schema.label_kind == ValueKind::binary)
            check_binary_cell(p.label, line_no + 1, schema.label_column);
        if (schema.signal_column) {
            p.user_signal = parse_cell(cells[signal_idx], line_no + 1, *schema.signal_column);
            if (schema.signal_kind == ValueKind::binary)
                check_binary_cell(p.user_signal, line_no + 1, *schema.signal_column);
        }
        points.push_back(std::move(p));
    }
    if (points.empty()) throw std::runtime_error("ingest: " + path.string() + " has no data rows");
    return Dataset(std::move(points), schema.label_kind, schema.signal_kind);
}

Dataset weather_signal(const Dataset& d, double noise_std, std::uint64_t seed) {
    if (!(noise_std >= 0.0)) throw std::invalid_argument("ingest: noise_std must be >= 0");
    RandomStream rng(seed);
    std::vector<LabeledPoint> points = d.points();
    for (LabeledPoint& p : points) p.user_signal = p.label + noise_std * rng.normal();
    return Dataset(std::move(points), d.label_kind(), ValueKind::numeric);
}

TextCorpus load_corpus(const std::filesystem::path& documents_path,
                       const std::filesystem::path& labels_path) {
    TextCorpus corpus;
    const std::string documents_text = read_file(documents_path);
    for (std::string_view line : split_lines(documents_text))
        corpus.documents.emplace_back(line);
    // A trailing newline yields one empty last line; drop it.
    if (!corpus.documents.empty() && corpus.documents.back().empty()) corpus.documents.pop_back();

    const std::string labels_text = read_file(labels_path);
    std::size_t line_no = 0;
    for (std::string_view line : split_lines(labels_text)) {
        ++line_no;
        const std::string_view t = trim(line);
        if (t.empty()) continue;
        if (t == "0")
            corpus.labels.push_back(0);
        else if (t == "1")
            corpus.labels.push_back(1);
        else
            throw std::runtime_error("ingest: " + labels_path.string() + " line " +
                                     std::to_string(line_no) + ": label must be 0 or 1");
    }
    validate_corpus(corpus);
    return corpus;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2) tokens.push_back(current);
        current.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c))
            current.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    return tokens;
}

TfidfResult build_tfidf(const TextCorpus& corpus, std::size_t max_features) {
    validate_corpus(corpus);
    std::vector<std::vector<std::string>> docs;
    docs.reserve(corpus.documents.size());
    bool any_token = false;
    for (const std::string& d : corpus.documents) {
        docs.push_back(tokenize(d));
        any_token = any_token || !docs.back().empty();
    }
    if (!any_token)
        throw std::invalid_argument("ingest: all documents are empty after tokenization");

    std::unordered_map<std::string, int> total_count;
    std::unordered_map<std::string, int> doc_frequency;
    for (const auto& tokens : docs) {
        std::unordered_set<std::string_view> seen;
        for (const std::string& t : tokens) {
            ++total_count[t];
            if (seen.insert(t).second) ++doc_frequency[t];
        }
    }

    TfidfResult result;
    result.model.num_documents = static_cast<int>(corpus.documents.size());
    std::vector<std::string> selected;
    selected.reserve(total_count.size());
    for (const auto& [token, count] : total_count) selected.push_back(token);
    if (max_features > 0 && selected.size() > max_features) {
        std::sort(selected.begin(), selected.end(), [&](const std::string& a, const std::string& b) {
            const int ca = total_count.at(a), cb = total_count.at(b);
            return ca != cb ? ca > cb : a < b;
        });
        selected.resize(max_features);
    }
    std::sort(selected.begin(), selected.end());
    for (std::string& token : selected) {
        const int df = doc_frequency.at(token);
        result.model.vocabulary.push_back({std::move(token), df});
    }

    result.matrix.reserve(docs.size());
    for (const auto& tokens : docs) result.matrix.push_back(vectorize(result.model, tokens));
    return result;
}

std::vector<double> tfidf_transform(const TfidfModel& model, std::string_view document) {
    return vectorize(model, tokenize(document));
}

KeywordSignal derive_keyword_signal(const TextCorpus& corpus, std::size_t k) {
    validate_corpus(corpus);
    if (k == 0) throw std::invalid_argument("ingest: keyword count must be positive");

    std::unordered_map<std::string, long> positive_count;
    bool any_positive = false;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        if (corpus.labels[i] != 1) continue;
        any_positive = true;
        for (const std::string& t : tokenize(corpus.documents[i])) ++positive_count[t];
    }
    if (!any_positive) throw std::invalid_argument("ingest: no documents with label 1");

    std::vector<std::string> ranked;
    ranked.reserve(positive_count.size());
    for (const auto& [token, count] : positive_count) ranked.push_back(token);
    std::sort(ranked.begin(), ranked.end(), [&](const std::string& a, const std::string& b) {
        const long ca = positive_count.at(a), cb = positive_count.at(b);
        return ca != cb ? ca > cb : a < b;
    });

    KeywordSignal result;
    result.truncated = ranked.size() < k;
    ranked.resize(std::min(ranked.size(), k));
    result.keywords = std::move(ranked);
    result.signals.reserve(corpus.documents.size());
    for (const std::string& doc : corpus.documents)
        result.signals.push_back(signal_from_keywords(result.keywords, doc));
    return result;
}

int signal_from_keywords(std::span<const std::string> keywords, std::string_view document) {
    const std::vector<std::string> tokens = tokenize(document);
    const std::unordered_set<std::string_view> present(tokens.begin(), tokens.end());
    for (const std::string& k : keywords)
        if (present.contains(k)) return 1;
    return 0;
}

Dataset synth_gaussian(const moments::GaussianMoments& mom, std::size_t count,
                       std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("ingest: sample count must be positive");
    mom.validate();  // variances and 2x2 minors
    Eigen::Matrix3d cov;
    cov << mom.var_x, mom.cov_xy, mom.cov_xu,  //
        mom.cov_xy, mom.var_y, mom.cov_yu,     //
        mom.cov_xu, mom.cov_yu, mom.var_u;
    const double det = cov.determinant();
    if (det < -1e-9 * std::max(1.0, cov.cwiseAbs().maxCoeff()))
        throw std::invalid_argument(
            "ingest: covariance minor (x,y,u) is negative: det = " + std::to_string(det));

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Eigen::Vector3d clamped = eig.eigenvalues().cwiseMax(0.0);
    const Eigen::Matrix3d root =
        eig.eigenvectors() * clamped.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();

    RandomStream rng(seed);
    const Eigen::Vector3d mean(mom.mu_x, mom.mu_y, mom.mu_u);
    std::vector<LabeledPoint> points;
    points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Eigen::Vector3d z(rng.normal(), rng.normal(), rng.normal());
        const Eigen::Vector3d v = mean + root * z;
        points.push_back({{v[0]}, v[1], v[2]});
    }
    return Dataset(std::move(points), ValueKind::numeric, ValueKind::numeric);
}

IndexSplit split_indices(std::size_t m, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("ingest: test_fraction must be in (0, 1)");
    if (m < 2) throw std::invalid_argument("ingest: need at least 2 points to split");

    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    RandomStream rng(seed);
    rng.shuffle(order);

    auto n_test =
        static_cast<std::size_t>(std::llround(static_cast<double>(m) * test_fraction));
    n_test = std::clamp<std::size_t>(n_test, 1, m - 1);

    IndexSplit split;
    split.train.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_test));
    split.test.assign(order.end() - static_cast<std::ptrdiff_t>(n_test), order.end());
    return split;
}

SplitResult train_test_split(const Dataset& d, double test_fraction, std::uint64_t seed) {
    const IndexSplit split = split_indices(d.size(), test_fraction, seed);
    std::vector<LabeledPoint> train_points, test_points;
    train_points.reserve(split.train.size());
    test_points.reserve(split.test.size());
    for (std::size_t i : split.train) train_points.push_back(d[i]);
    for (std::size_t i : split.test) test_points.push_back(d[i]);
    return {Dataset(std::move(train_points), d.label_kind(), d.signal_kind()),
            Dataset(std::move(test_points), d.label_kind(), d.signal_kind())};
}

}  // namespace eerm::ingest
