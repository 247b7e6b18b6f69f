#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mailclass/error.hpp"
#include "mailclass/features.hpp"
#include "mailclass/rng.hpp"
#include "oracles.hpp"

using namespace mailclass;

namespace {

Vocabulary vocab_of(std::vector<Vocabulary::Entry> entries) { return Vocabulary(std::move(entries)); }

DocTermMatrix dense_matrix(const std::vector<std::vector<double>>& rows, Weighting mode = Weighting::Count) {
    const std::size_t cols = rows.empty() ? 0 : rows[0].size();
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    DocTermMatrix m;
    m.values = SparseMatrix::from_dense(rows.size(), cols, flat);
    m.mode = mode;
    for (std::size_t j = 0; j < cols; ++j) m.feature_words.push_back("w" + std::to_string(j));
    return m;
}

LabelMatrix labels_of(const std::vector<int>& y, int classes) {
    std::vector<std::size_t> idx(y.begin(), y.end());
    std::vector<std::string> names;
    for (int c = 0; c < classes; ++c) names.push_back("c" + std::to_string(c));
    return LabelMatrix(idx, names);
}

std::vector<double> scores_of(const std::vector<FeatureScore>& scores) {
    std::vector<double> out;
    for (const auto& s : scores) out.push_back(s.score);
    return out;
}

}  // namespace

TEST_CASE("vectorize examples") {
    const auto vocab = vocab_of({{"refund", 2}, {"late", 1}});
    const std::vector<Tokens> doc{{"refund", "refund"}};
    SUBCASE("count") {
        const auto m = vectorize(doc, vocab, Weighting::Count);
        CHECK(m.values.dense() == std::vector<double>{2, 0});
        CHECK(m.feature_words == std::vector<std::string>{"refund", "late"});
    }
    SUBCASE("binary") { CHECK(vectorize(doc, vocab, Weighting::Binary).values.dense() == std::vector<double>{1, 0}); }
    SUBCASE("freq") {
        const std::vector<Tokens> docs{{"refund", "late", "late", "unknown"}, {}};
        const auto m = vectorize(docs, vocab, Weighting::Freq);
        CHECK(m.values.at(0, 0) == doctest::Approx(1.0 / 3));
        CHECK(m.values.at(0, 1) == doctest::Approx(2.0 / 3));
        CHECK(m.values.row(1).empty());
    }
    SUBCASE("tfidf") {
        const auto ab = vocab_of({{"a", 2}, {"b", 1}});
        const std::vector<Tokens> docs{{"a", "b"}, {"a"}};
        const auto m = vectorize(docs, ab, Weighting::Tfidf);
        CHECK(m.values.at(1, 0) == 0.0);
        CHECK(m.values.at(1, 1) == 0.0);
        CHECK(m.values.at(0, 1) == doctest::Approx(std::log(3.0 / 2.0)));
        const auto idf = inverse_document_frequency(docs, ab);
        CHECK(idf[0] == 0.0);
    }
}

TEST_CASE("weighting invariants") {
    Rng rng(21);
    const auto vocab = vocab_of({{"a", 5}, {"b", 4}, {"c", 3}, {"d", 2}});
    const std::vector<std::string> pool{"a", "b", "c", "d", "zz"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Tokens> docs(1 + rng.below(5));
        for (auto& d : docs)
            for (auto n = rng.below(8); n > 0; --n) d.push_back(pool[rng.below(pool.size())]);

        const auto binary = vectorize(docs, vocab, Weighting::Binary);
        auto duplicated = docs;
        for (auto& d : duplicated)
            if (!d.empty()) d.push_back(d[rng.below(d.size())]);
        CHECK(vectorize(duplicated, vocab, Weighting::Binary).values == binary.values);

        for (std::size_t i = 0; i < binary.rows(); ++i)
            for (const auto& e : binary.values.row(i)) CHECK(e.value == 1.0);

        const auto freq = vectorize(docs, vocab, Weighting::Freq);
        for (std::size_t i = 0; i < freq.rows(); ++i) {
            double sum = 0.0;
            for (const auto& e : freq.values.row(i)) sum += e.value;
            if (freq.values.row(i).empty())
                CHECK(sum == 0.0);
            else
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
        for (auto mode : {Weighting::Count, Weighting::Tfidf}) {
            const auto m = vectorize(docs, vocab, mode);
            for (double v : m.values.dense()) CHECK((std::isfinite(v) && v >= 0.0));
        }
    }
}

TEST_CASE("one_hot") {
    const std::vector<std::string> ab{"A", "B"};
    const std::vector<std::string> labels{"B", "A"};
    const auto y = one_hot(labels, ab);
    CHECK(y.at(0, 1) == 1.0);
    CHECK(y.at(0, 0) == 0.0);
    CHECK(y.at(1, 0) == 1.0);

    const std::vector<std::string> single{"only"};
    const std::vector<std::string> three_same{"only", "only", "only"};
    const auto s = one_hot(three_same, single);
    for (std::size_t i = 0; i < 3; ++i) CHECK(s.at(i, 0) == 1.0);

    const std::vector<std::string> abc{"A", "B", "C"};
    const auto id = one_hot(abc, abc);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t c = 0; c < 3; ++c) CHECK(id.at(i, c) == (i == c ? 1.0 : 0.0));

    const std::vector<std::string> unknown{"Z"};
    try {
        one_hot(unknown, ab);
        FAIL("expected UnknownLabel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownLabel);
    }
}

TEST_CASE("chi2_scores examples") {
    const auto x = dense_matrix({{1, 0}, {1, 0}, {0, 1}, {0, 1}}, Weighting::Binary);
    const auto y = labels_of({0, 0, 1, 1}, 2);
    const auto scores = chi2_scores(x, y);
    REQUIRE(scores.size() == 2);
    CHECK(scores[0].score == doctest::Approx(2.0));
    CHECK(scores[1].score == doctest::Approx(2.0));
    CHECK(scores[0].word == "w0");

    CHECK(chi2_scores(dense_matrix({{1}, {1}, {1}, {1}}), y)[0].score == 0.0);
    CHECK(chi2_scores(dense_matrix({{0}, {0}, {0}, {0}}), y)[0].score == 0.0);
}

TEST_CASE("chi2_scores errors") {
    const auto y = labels_of({0, 1}, 2);
    try {
        chi2_scores(dense_matrix({{1}, {1}, {1}}), y);
        FAIL("expected Shape");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Shape);
    }
    try {
        chi2_scores(dense_matrix({{1}, {-1}}), y);
        FAIL("expected Domain");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Domain);
    }
}

TEST_CASE("chi2_scores matches the contingency-loop oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const auto rows = 1 + rng.below(20);
        const auto cols = 1 + rng.below(10);
        const int classes = 1 + static_cast<int>(rng.below(4));
        std::vector<std::vector<double>> x(rows, std::vector<double>(cols, 0.0));
        std::vector<int> y(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            y[i] = static_cast<int>(rng.below(classes));
            for (auto& v : x[i])
                if (rng.below(3) == 0) v = static_cast<double>(rng.below(5)) + rng.uniform();
        }
        const auto got = scores_of(chi2_scores(dense_matrix(x), labels_of(y, classes)));
        const auto want = oracle::chi2(x, y, classes);
        REQUIRE(got.size() == want.size());
        for (std::size_t j = 0; j < got.size(); ++j) {
            CAPTURE(trial);
            CHECK(std::abs(got[j] - want[j]) <= 1e-9 * std::max(1.0, std::abs(want[j])));
        }
    }
}

TEST_CASE("chi2 score scales linearly with its column") {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const auto rows = 2 + rng.below(15);
        const auto cols = 1 + rng.below(6);
        std::vector<std::vector<double>> x(rows, std::vector<double>(cols));
        std::vector<int> y(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            y[i] = static_cast<int>(rng.below(3));
            for (auto& v : x[i]) v = static_cast<double>(rng.below(4));
        }
        const auto labels = labels_of(y, 3);
        const auto base = scores_of(chi2_scores(dense_matrix(x), labels));
        const double s = rng.uniform(0.1, 10.0);
        const auto j = rng.below(cols);
        auto scaled = x;
        for (auto& r : scaled) r[j] *= s;
        const auto after = scores_of(chi2_scores(dense_matrix(scaled), labels));
        for (std::size_t c = 0; c < cols; ++c) {
            const double expected = c == j ? s * base[c] : base[c];
            CHECK(after[c] == doctest::Approx(expected).epsilon(1e-9));
        }

        // Uniform scaling of every column keeps the selected set.
        auto all = x;
        for (auto& r : all)
            for (auto& v : r) v *= s;
        const auto k = 1 + rng.below(cols);
        const auto m = dense_matrix(x);
        const auto chosen = select_k_best(m, chi2_scores(m, labels), k).columns;
        const auto ms = dense_matrix(all);
        const auto chosen_scaled = select_k_best(ms, chi2_scores(ms, labels), k).columns;
        // Scores may tie after rounding; compare score multisets when sets differ.
        if (chosen != chosen_scaled) {
            std::vector<double> a;
            std::vector<double> b;
            for (auto c : chosen) a.push_back(base[c]);
            for (auto c : chosen_scaled) b.push_back(base[c]);
            std::ranges::sort(a);
            std::ranges::sort(b);
            for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("select_k_best") {
    const auto x = dense_matrix({{1, 2, 3}, {4, 5, 6}});
    auto scored = [](std::vector<double> values) {
        std::vector<FeatureScore> out;
        for (std::size_t j = 0; j < values.size(); ++j) out.push_back({"w" + std::to_string(j), values[j]});
        return out;
    };
    const auto two = select_k_best(x, scored({2.0, 0.5, 2.0}), 2);
    CHECK(two.columns == std::vector<std::size_t>{0, 2});
    CHECK(two.matrix.values.dense() == std::vector<double>{1, 3, 4, 6});
    CHECK(two.matrix.feature_words == std::vector<std::string>{"w0", "w2"});

    const auto all = select_k_best(x, scored({1, 1, 1}), 3);
    CHECK(all.matrix.values == x.values);
    CHECK(select_k_best(x, scored({1, 1, 1}), 10).matrix.values == x.values);

    CHECK(select_k_best(x, scored({0, 5, 1}), 1).columns == std::vector<std::size_t>{1});
    CHECK(select_k_best(x, scored({1, 1, 1}), 1).columns == std::vector<std::size_t>{0});

    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> values(3);
        for (auto& v : values) v = static_cast<double>(rng.below(3));
        const auto cols = select_k_best(x, scored(values), 1 + rng.below(3)).columns;
        CHECK(std::ranges::is_sorted(cols));
        CHECK(std::ranges::adjacent_find(cols) == cols.end());
    }
}

TEST_CASE("best_words_report") {
    const std::vector<FeatureScore> scores{{"a", 2}, {"b", 5}};
    const auto report = best_words_report(scores, 2);
    REQUIRE(report.size() == 2);
    CHECK(report[0].word == "b");
    CHECK(report[1].word == "a");
    CHECK(best_words_report(scores, 0).empty());

    const std::vector<FeatureScore> tied{{"y", 1}, {"x", 1}};
    const auto t = best_words_report(tied, 5);
    CHECK(t[0].word == "x");
    CHECK(t[1].word == "y");

    CHECK(best_words_csv(report) == "rank,word,score\n1,b,5.000000\n2,a,2.000000\n");
    const auto svg = best_words_svg(report);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("viewBox=\"0 0 800 500\"") != std::string::npos);
}

TEST_CASE("sparse matrix helpers") {
    auto m = SparseMatrix::from_dense(2, 3, std::vector<double>{0, 1, 0, 2, 0, 3});
    CHECK(m.nonzeros() == 3);
    CHECK(m.at(1, 2) == 3.0);
    const std::vector<std::size_t> rows{1};
    CHECK(m.select_rows(rows).dense() == std::vector<double>{2, 0, 3});
    const std::vector<std::size_t> cols{0, 2};
    CHECK(m.select_columns(cols).dense() == std::vector<double>{0, 0, 2, 3});
    const std::vector<SparseMatrix::Entry> bad{{2, 1.0}, {1, 1.0}};
    CHECK_THROWS_AS(m.append_row(bad), Error);
}
