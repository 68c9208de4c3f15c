#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "eerm/ingest.hpp"
#include "test_util.hpp"

using namespace eerm;
using namespace eerm::ingest;
using eerm::moments::GaussianMoments;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("load_csv") {
    CsvSchema schema;
    schema.feature_columns = {"min_temp"};
    schema.label_column = "max_temp";

    SUBCASE("rows load in file order, ignoring unmapped columns") {
        const auto path = write_temp("eerm_test_weather.csv",
                                     "date,min_temp,max_temp\n"
                                     "2020-01-01,-3.5,1.25\n"
                                     "2020-01-02,-7,0.5\n");
        const Dataset d = load_csv(path, schema);
        REQUIRE(d.size() == 2);
        CHECK(d[0].features[0] == -3.5);
        CHECK(d[0].label == 1.25);
        CHECK(d[1].features[0] == -7.0);
        CHECK(d[1].label == 0.5);
    }
    SUBCASE("header-only file reports no data rows") {
        const auto path = write_temp("eerm_test_empty.csv", "min_temp,max_temp\n");
        CHECK_THROWS_WITH_AS(load_csv(path, schema), doctest::Contains("no data rows"),
                             std::runtime_error);
    }
    SUBCASE("empty file reports missing header") {
        const auto path = write_temp("eerm_test_blank.csv", "");
        CHECK_THROWS_AS(load_csv(path, schema), std::runtime_error);
    }
    SUBCASE("missing column is named") {
        const auto path = write_temp("eerm_test_cols.csv", "a,b\n1,2\n");
        CHECK_THROWS_WITH_AS(load_csv(path, schema), doctest::Contains("min_temp"),
                             std::runtime_error);
    }
    SUBCASE("unparseable cell names the line") {
        const auto path = write_temp("eerm_test_badcell.csv",
                                     "min_temp,max_temp\n1,2\nx,3\n");
        CHECK_THROWS_WITH_AS(load_csv(path, schema), doctest::Contains("line 3"),
                             std::runtime_error);
    }
    SUBCASE("binary kinds are enforced with row context") {
        CsvSchema b = schema;
        b.label_kind = ValueKind::binary;
        const auto path = write_temp("eerm_test_binary.csv", "min_temp,max_temp\n1,0.5\n");
        CHECK_THROWS_WITH_AS(load_csv(path, b), doctest::Contains("binary"), std::runtime_error);
    }
    SUBCASE("signal column and comment lines") {
        CsvSchema s = schema;
        s.signal_column = "u";
        const auto path = write_temp("eerm_test_signal.csv",
                                     "# provenance comment\nmin_temp,max_temp,u\n1,2,3\n");
        const Dataset d = load_csv(path, s);
        CHECK(d[0].user_signal == 3.0);
    }
}

TEST_CASE("weather_signal") {
    std::mt19937_64 rng(15);
    const Dataset d = testutil::random_dataset(rng, 50, 1);

    SUBCASE("zero noise copies the label exactly") {
        const Dataset out = weather_signal(d, 0.0, 3);
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].user_signal == out[i].label);
    }
    SUBCASE("same seed gives identical signals") {
        const Dataset a = weather_signal(d, 1.5, 42);
        const Dataset b = weather_signal(d, 1.5, 42);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i].user_signal == b[i].user_signal);
    }
    SUBCASE("sample deviation matches the requested std") {
        const GaussianMoments big = testutil::fixture_moments();
        const Dataset base = synth_gaussian(big, 100000, 5);
        const Dataset noisy = weather_signal(base, 2.0, 6);
        double ss = 0.0;
        for (std::size_t i = 0; i < noisy.size(); ++i) {
            const double e = noisy[i].user_signal - noisy[i].label;
            ss += e * e;
        }
        CHECK(std::sqrt(ss / static_cast<double>(noisy.size())) ==
              doctest::Approx(2.0).epsilon(0.02));
    }
    SUBCASE("negative std is rejected") {
        CHECK_THROWS_AS(weather_signal(d, -1.0, 0), std::invalid_argument);
    }
}

TEST_CASE("tokenize") {
    CHECK(tokenize("Hello, world!") == std::vector<std::string>{"hello", "world"});
    CHECK(tokenize("a bb   c-c 42") == std::vector<std::string>{"bb", "42"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("@#$%").empty());
}

TEST_CASE("build_tfidf") {
    SUBCASE("single document hand computation") {
        const TextCorpus corpus{{"aa aa bb"}, {0}};
        const TfidfResult r = build_tfidf(corpus);
        REQUIRE(r.model.vocabulary.size() == 2);
        CHECK(r.model.vocabulary[0].token == "aa");
        CHECK(r.model.vocabulary[1].token == "bb");
        // tf (2/3, 1/3), equal idf, so the normalized vector is (2,1)/sqrt(5).
        CHECK(r.matrix[0][0] == doctest::Approx(2.0 / std::sqrt(5.0)));
        CHECK(r.matrix[0][1] == doctest::Approx(1.0 / std::sqrt(5.0)));
    }
    SUBCASE("token in every document has idf exactly 1") {
        const TextCorpus corpus{{"common alpha", "common beta"}, {0, 1}};
        const TfidfResult r = build_tfidf(corpus);
        // idf = ln((1+N)/(1+df)) + 1 with df = N.
        const auto it = std::find_if(r.model.vocabulary.begin(), r.model.vocabulary.end(),
                                     [](const auto& t) { return t.token == "common"; });
        REQUIRE(it != r.model.vocabulary.end());
        CHECK(it->doc_frequency == 2);
        CHECK(std::log((1.0 + 2.0) / (1.0 + 2.0)) + 1.0 == 1.0);
    }
    SUBCASE("transform of out-of-vocabulary text is the zero vector") {
        const TextCorpus corpus{{"alpha beta", "beta gamma"}, {0, 1}};
        const TfidfResult r = build_tfidf(corpus);
        const std::vector<double> v = tfidf_transform(r.model, "zz qq");
        for (double x : v) CHECK(x == 0.0);
    }
    SUBCASE("all-empty corpus is rejected") {
        const TextCorpus corpus{{"!!", "??"}, {0, 1}};
        CHECK_THROWS_WITH_AS(build_tfidf(corpus), doctest::Contains("empty"),
                             std::invalid_argument);
    }
    SUBCASE("rows have unit or zero norm and nonnegative entries") {
        const TextCorpus corpus{
            {"alpha beta gamma", "beta beta delta", "??", "gamma gamma gamma alpha"},
            {0, 1, 0, 1}};
        const TfidfResult r = build_tfidf(corpus);
        for (const auto& row : r.matrix) {
            double norm = 0.0;
            for (double x : row) {
                CHECK(x >= 0.0);
                norm += x * x;
            }
            if (norm > 0.0) CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("max_features keeps the highest-count tokens") {
        const TextCorpus corpus{{"aa aa aa bb bb cc", "aa bb dd"}, {0, 1}};
        const TfidfResult r = build_tfidf(corpus, 2);
        REQUIRE(r.model.vocabulary.size() == 2);
        CHECK(r.model.vocabulary[0].token == "aa");
        CHECK(r.model.vocabulary[1].token == "bb");
    }
}

TEST_CASE("derive_keyword_signal") {
    SUBCASE("dominant positive token becomes the keyword") {
        const TextCorpus corpus{{"bad bad day", "bad service bad", "nice day", "ok fine"},
                                {1, 1, 0, 0}};
        const KeywordSignal s = derive_keyword_signal(corpus, 1);
        REQUIRE(s.keywords.size() == 1);
        CHECK(s.keywords[0] == "bad");
        CHECK(s.signals == std::vector<int>{1, 1, 0, 0});
        CHECK_FALSE(s.truncated);
    }
    SUBCASE("presence, not count") {
        const TextCorpus corpus{{"aa bb cc", "dd"}, {1, 0}};
        const KeywordSignal s = derive_keyword_signal(corpus, 5);
        // Document 0 contains 3 of the keywords; its signal is simply 1.
        CHECK(s.signals[0] == 1);
        CHECK(s.signals[1] == 0);
        CHECK(s.truncated);  // only 3 tokens exist in the positive class
    }
    SUBCASE("six-document corpus matches a brute-force count") {
        const TextCorpus corpus{{"red red blue", "blue green red", "red green",
                                 "yellow yellow", "pink", "blue blue blue"},
                                {1, 1, 1, 0, 0, 0}};
        // Counts over label-1 docs: red 4, blue 2, green 2 -> ties lexicographic.
        const KeywordSignal s = derive_keyword_signal(corpus, 2);
        CHECK(s.keywords == std::vector<std::string>{"red", "blue"});
        CHECK(s.signals == std::vector<int>{1, 1, 1, 0, 0, 1});
    }
    SUBCASE("no positive documents is an error") {
        const TextCorpus corpus{{"aa", "bb"}, {0, 0}};
        CHECK_THROWS_AS(derive_keyword_signal(corpus, 1), std::invalid_argument);
    }
    SUBCASE("document order only permutes the signals") {
        const TextCorpus a{{"bad worst", "nice", "bad bad"}, {1, 0, 1}};
        const TextCorpus b{{"bad bad", "bad worst", "nice"}, {1, 1, 0}};
        const KeywordSignal sa = derive_keyword_signal(a, 2);
        const KeywordSignal sb = derive_keyword_signal(b, 2);
        CHECK(sa.keywords == sb.keywords);
        CHECK(sa.signals == std::vector<int>{1, 0, 1});
        CHECK(sb.signals == std::vector<int>{1, 1, 0});
    }
}

TEST_CASE("synth_gaussian") {
    SUBCASE("zero covariance pins every sample at the mean") {
        GaussianMoments m;
        m.mu_x = 1.0;
        m.mu_y = -2.0;
        m.mu_u = 0.5;
        const Dataset d = synth_gaussian(m, 10, 4);
        for (const LabeledPoint& p : d) {
            CHECK(p.features[0] == 1.0);
            CHECK(p.label == -2.0);
            CHECK(p.user_signal == 0.5);
        }
    }
    SUBCASE("same seed is bit-identical") {
        const GaussianMoments m = testutil::fixture_moments();
        const Dataset a = synth_gaussian(m, 100, 9);
        const Dataset b = synth_gaussian(m, 100, 9);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].features[0] == b[i].features[0]);
            CHECK(a[i].label == b[i].label);
            CHECK(a[i].user_signal == b[i].user_signal);
        }
    }
    SUBCASE("sample covariance converges over 10 seeds") {
        const GaussianMoments m = testutil::fixture_moments();
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const Dataset d = synth_gaussian(m, 100000, seed);
            const GaussianMoments est = moments::estimate_moments(d);
            double num = 0.0, den = 0.0;
            const double target[3][3] = {{m.var_x, m.cov_xy, m.cov_xu},
                                         {m.cov_xy, m.var_y, m.cov_yu},
                                         {m.cov_xu, m.cov_yu, m.var_u}};
            const double got[3][3] = {{est.var_x, est.cov_xy, est.cov_xu},
                                      {est.cov_xy, est.var_y, est.cov_yu},
                                      {est.cov_xu, est.cov_yu, est.var_u}};
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) {
                    num += (got[r][c] - target[r][c]) * (got[r][c] - target[r][c]);
                    den += target[r][c] * target[r][c];
                }
            CHECK(std::sqrt(num / den) < 0.05);
        }
    }
    SUBCASE("non-PSD covariance names the offending minor") {
        GaussianMoments m;
        m.var_x = 1.0;
        m.var_y = 1.0;
        m.var_u = 1.0;
        m.cov_xy = 0.9;
        m.cov_xu = 0.9;
        m.cov_yu = -0.9;  // 2x2 minors fine, 3x3 determinant negative
        CHECK_THROWS_WITH_AS(synth_gaussian(m, 10, 0), doctest::Contains("(x,y,u)"),
                             std::invalid_argument);
    }
}

TEST_CASE("train_test_split") {
    std::mt19937_64 rng(1);
    const Dataset d = testutil::random_dataset(rng, 10, 1);

    SUBCASE("10 points at fraction 0.1 give 9 train and 1 test") {
        const SplitResult s = train_test_split(d, 0.1, 3);
        CHECK(s.train.size() == 9);
        CHECK(s.test.size() == 1);
    }
    SUBCASE("same seed gives an identical partition") {
        const SplitResult a = train_test_split(d, 0.3, 8);
        const SplitResult b = train_test_split(d, 0.3, 8);
        for (std::size_t i = 0; i < a.test.size(); ++i)
            CHECK(a.test[i].features[0] == b.test[i].features[0]);
    }
    SUBCASE("partitions are disjoint and exhaustive") {
        const SplitResult s = train_test_split(d, 0.4, 5);
        std::multiset<double> original, recombined;
        for (const LabeledPoint& p : d) original.insert(p.features[0]);
        for (const LabeledPoint& p : s.train) recombined.insert(p.features[0]);
        for (const LabeledPoint& p : s.test) recombined.insert(p.features[0]);
        CHECK(original == recombined);
        CHECK(s.train.size() + s.test.size() == d.size());
    }
    SUBCASE("both sides stay nonempty at extreme fractions") {
        const SplitResult s = train_test_split(d, 0.01, 2);
        CHECK(s.test.size() == 1);
    }
    SUBCASE("fraction bounds are enforced") {
        CHECK_THROWS_AS(train_test_split(d, 0.0, 0), std::invalid_argument);
        CHECK_THROWS_AS(train_test_split(d, 1.0, 0), std::invalid_argument);
    }
}
