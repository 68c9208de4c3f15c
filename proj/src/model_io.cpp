#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eerm/cli.hpp"

namespace eerm::cli {

namespace {

constexpr std::string_view kModelHeader = "eerm-model v1";

void write_node(std::ostream& out, const dtree::TreeNode& node, int indent) {
    for (int i = 0; i < indent; ++i) out << "  ";
    if (node.is_leaf()) {
        const dtree::Leaf& leaf = node.leaf();
        out << "leaf " << leaf.predicted_label << ' ' << leaf.class_counts[0] << ' '
            << leaf.class_counts[1] << '\n';
    } else {
        const dtree::Split& split = node.split();
        out << "split " << split.feature_index << ' ' << format_g17(split.threshold) << '\n';
        write_node(out, *split.left, indent + 1);
        write_node(out, *split.right, indent + 1);
    }
}

// Strict line-oriented reader: fields appear in a fixed order and every
// parse failure names the field it was looking for.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::optional<std::string> peek() {
        while (!peeked_) {
            std::string line;
            if (!std::getline(in_, line)) return std::nullopt;
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) peeked_ = std::move(line);
        }
        return peeked_;
    }

    std::string next(const std::string& field) {
        auto line = peek();
        if (!line)
            throw std::runtime_error("model file: truncated, missing field '" + field + "'");
        peeked_.reset();
        return *line;
    }

    std::string value(const std::string& field) {
        const std::string line = next(field);
        if (line == field + " =") return "";
        const std::string prefix = field + " = ";
        if (!line.starts_with(prefix))
            throw std::runtime_error("model file: line " + std::to_string(line_no_) +
                                     ": expected field '" + field + "'");
        return line.substr(prefix.size());
    }

private:
    std::istream& in_;
    std::optional<std::string> peeked_;
    std::size_t line_no_ = 0;
};

double parse_double_field(const std::string& text, const std::string& field) {
    double v = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end)
        throw std::runtime_error("model file: invalid value for field '" + field + "'");
    return v;
}

long long parse_int_field(const std::string& text, const std::string& field) {
    long long v = 0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end)
        throw std::runtime_error("model file: invalid value for field '" + field + "'");
    return v;
}

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

dtree::TreeNode read_node(LineReader& reader) {
    std::string line = reader.next("tree node");
    // Indentation is cosmetic.
    const std::size_t pos = line.find_first_not_of(' ');
    line.erase(0, pos == std::string::npos ? line.size() : pos);
    const std::vector<std::string> tok = split_tokens(line);
    if (tok.size() == 4 && tok[0] == "leaf") {
        dtree::Leaf leaf;
        leaf.predicted_label = static_cast<int>(parse_int_field(tok[1], "leaf label"));
        if (leaf.predicted_label != 0 && leaf.predicted_label != 1)
            throw std::runtime_error("model file: invalid value for field 'leaf label'");
        leaf.class_counts[0] = parse_int_field(tok[2], "leaf counts");
        leaf.class_counts[1] = parse_int_field(tok[3], "leaf counts");
        return dtree::TreeNode{leaf};
    }
    if (tok.size() == 3 && tok[0] == "split") {
        dtree::Split split;
        split.feature_index = static_cast<int>(parse_int_field(tok[1], "split feature"));
        split.threshold = parse_double_field(tok[2], "split threshold");
        split.left = std::make_unique<dtree::TreeNode>(read_node(reader));
        split.right = std::make_unique<dtree::TreeNode>(read_node(reader));
        return dtree::TreeNode{std::move(split)};
    }
    throw std::runtime_error("model file: invalid value for field 'tree node'");
}

Provenance read_provenance(LineReader& reader) {
    Provenance p;
    p.seed = static_cast<std::uint64_t>(parse_int_field(reader.value("seed"), "seed"));
    p.config_hash = reader.value("config_hash");
    p.input_fingerprint = reader.value("input_fingerprint");
    return p;
}

void write_provenance(std::ostream& out, const Provenance& p) {
    out << "seed = " << p.seed << '\n';
    out << "config_hash = " << p.config_hash << '\n';
    out << "input_fingerprint = " << p.input_fingerprint << '\n';
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
    return buf;
}

std::string fingerprint_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cli: cannot open " + path.string() + " for fingerprint");
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a_hex(buf.str());
}

std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void serialize_model(const ModelArtifact& artifact, const std::filesystem::path& path) {
    std::ostringstream out;
    out << kModelHeader << '\n';
    if (const auto* linear = std::get_if<LinearModel>(&artifact.model)) {
        out << "kind = linear\n";
        write_provenance(out, artifact.provenance);
        out << "feature_dim = " << linear->feature_dim << '\n';
        out << "alpha = " << format_g17(linear->hypothesis.alpha) << '\n';
        out << "weights =";
        for (double w : linear->hypothesis.weights) out << ' ' << format_g17(w);
        out << '\n';
    } else {
        const auto& tree = std::get<TreeModel>(artifact.model);
        out << "kind = composite-tree\n";
        write_provenance(out, artifact.provenance);
        out << "feature_dim = " << tree.tree.feature_dim << '\n';
        out << "max_depth = " << tree.tree.max_depth << '\n';
        out << "fallback_label = "
            << (tree.tree.fallback_label ? std::to_string(*tree.tree.fallback_label) : "none")
            << '\n';
        out << "tree_u0 =\n";
        write_node(out, tree.tree.tree_u0, 1);
        out << "tree_u1 =\n";
        write_node(out, tree.tree.tree_u1, 1);
        if (tree.featurizer) {
            out << "featurizer = tfidf\n";
            out << "num_documents = " << tree.featurizer->tfidf.num_documents << '\n';
            out << "vocab_size = " << tree.featurizer->tfidf.vocabulary.size() << '\n';
            for (const auto& term : tree.featurizer->tfidf.vocabulary)
                out << "term = " << term.token << ' ' << term.doc_frequency << '\n';
            out << "keywords =";
            for (const auto& k : tree.featurizer->keywords) out << ' ' << k;
            out << '\n';
        }
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cli: cannot write " + path.string());
    file << out.str();
}

ModelArtifact deserialize_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cli: cannot open model file " + path.string());
    LineReader reader(in);

    if (reader.next("version") != kModelHeader)
        throw std::runtime_error("model file: unsupported version line, expected '" +
                                 std::string(kModelHeader) + "'");
    const std::string kind = reader.value("kind");
    if (kind == "linear") {
        LinearModel model;
        const Provenance provenance = read_provenance(reader);
        model.feature_dim =
            static_cast<std::size_t>(parse_int_field(reader.value("feature_dim"), "feature_dim"));
        model.hypothesis.alpha = parse_double_field(reader.value("alpha"), "alpha");
        for (const std::string& w : split_tokens(reader.value("weights")))
            model.hypothesis.weights.push_back(parse_double_field(w, "weights"));
        if (model.hypothesis.weights.size() != model.feature_dim + 1)
            throw std::runtime_error("model file: invalid value for field 'weights'");
        return {std::move(model), provenance};
    }
    if (kind == "composite-tree") {
        TreeModel model;
        const Provenance provenance = read_provenance(reader);
        model.tree.feature_dim =
            static_cast<std::size_t>(parse_int_field(reader.value("feature_dim"), "feature_dim"));
        model.tree.max_depth =
            static_cast<int>(parse_int_field(reader.value("max_depth"), "max_depth"));
        const std::string fallback = reader.value("fallback_label");
        if (fallback == "0" || fallback == "1")
            model.tree.fallback_label = fallback == "1" ? 1 : 0;
        else if (fallback != "none")
            throw std::runtime_error("model file: invalid value for field 'fallback_label'");
        if (!reader.value("tree_u0").empty())
            throw std::runtime_error("model file: invalid value for field 'tree_u0'");
        model.tree.tree_u0 = read_node(reader);
        if (!reader.value("tree_u1").empty())
            throw std::runtime_error("model file: invalid value for field 'tree_u1'");
        model.tree.tree_u1 = read_node(reader);
        if (reader.peek()) {
            if (reader.value("featurizer") != "tfidf")
                throw std::runtime_error("model file: invalid value for field 'featurizer'");
            TextFeaturizer featurizer;
            featurizer.tfidf.num_documents = static_cast<int>(
                parse_int_field(reader.value("num_documents"), "num_documents"));
            const long long vocab_size =
                parse_int_field(reader.value("vocab_size"), "vocab_size");
            for (long long i = 0; i < vocab_size; ++i) {
                const std::vector<std::string> tok = split_tokens(reader.value("term"));
                if (tok.size() != 2)
                    throw std::runtime_error("model file: invalid value for field 'term'");
                featurizer.tfidf.vocabulary.push_back(
                    {tok[0], static_cast<int>(parse_int_field(tok[1], "term"))});
            }
            featurizer.keywords = split_tokens(reader.value("keywords"));
            model.featurizer = std::move(featurizer);
        }
        return {std::move(model), provenance};
    }
    throw std::runtime_error("model file: invalid value for field 'kind'");
}

}  // namespace eerm::cli
