#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "mailclass/error.hpp"
#include "mailclass/ingest.hpp"
#include "mailclass/rng.hpp"
#include "mailclass/util.hpp"

using namespace mailclass;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("mailclass_test_ingest_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<EmailDocument> docs_with_counts(const std::vector<std::pair<std::string, int>>& counts) {
    std::vector<EmailDocument> docs;
    for (const auto& [label, n] : counts)
        for (int i = 0; i < n; ++i) docs.push_back({label + ":" + std::to_string(i), "text", label});
    return docs;
}

// Label counts of a 608-email Gmail export.
LabeledCorpus gmail_table() {
    return LabeledCorpus(docs_with_counts({{"bvp_", 102}, {"corprova2011", 238}, {"deepak@gmail.com", 73}, {"Inbox", 47},
                                           {"gupta@live.com", 21}, {"Imagic", 91}, {"Placement", 8}, {"Friends", 17},
                                           {"Jobs", 11}}));
}

void expect_code(ErrorCode code, auto&& fn) {
    try {
        fn();
        FAIL("no exception thrown");
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

}  // namespace

TEST_CASE("directory source maps subdirectories to labels") {
    const auto root = scratch("dir");
    fs::create_directories(root / "Refunds");
    fs::create_directories(root / "Shipping");
    write_file(root / "Refunds" / "a.eml", "Subject: one\n\nrefund please");
    write_file(root / "Refunds" / "b.txt", "Subject: two\n\nmoney back");
    write_file(root / "Shipping" / "c.eml", "Subject: three\n\nwhere is it");
    write_file(root / "Shipping" / "notes.md", "ignored");
    const auto result = load_corpus({CorpusSource::Kind::Directory, root});
    CHECK(result.corpus.size() == 3);
    CHECK(result.corpus.labels() == std::vector<std::string>{"Refunds", "Shipping"});
    CHECK(result.skipped_files == 1);
    CHECK(result.corpus.documents()[0].id == "Refunds/a.eml");
    CHECK(result.corpus.documents()[0].text == "one refund please");
    fs::remove_all(root);
}

TEST_CASE("mbox label selection drops system labels") {
    CHECK(choose_gmail_label("Inbox,Jobs") == "Jobs");
    CHECK(choose_gmail_label("Unread, Zeta ,Alpha,Starred") == "Alpha");
    CHECK_FALSE(choose_gmail_label("Inbox,Sent,Important").has_value());
    CHECK_FALSE(choose_gmail_label("").has_value());

    const auto root = scratch("mbox");
    write_file(root / "a.mbox",
               "From x\nX-Gmail-Labels: Inbox,Jobs\nSubject: hi\n\nbody\n\n"
               "From y\nX-Gmail-Labels: Inbox\nSubject: skip\n\nbody\n");
    const auto result = load_corpus(CorpusSource::detect(root / "a.mbox"));
    REQUIRE(result.corpus.size() == 1);
    CHECK(result.corpus.documents()[0].label == "Jobs");
    CHECK(result.skipped_unlabeled == 1);
    fs::remove_all(root);
}

TEST_CASE("CSV source keeps row order") {
    const auto root = scratch("csv");
    write_file(root / "c.csv", "label,text\nA,one\nB,\"two, quoted\"\nA,three\nC,four\nB,\"five \"\"x\"\"\"\n");
    const auto source = CorpusSource::detect(root / "c.csv");
    CHECK(source.kind == CorpusSource::Kind::Csv);
    const auto result = load_corpus(source);
    REQUIRE(result.corpus.size() == 5);
    CHECK(result.corpus.documents()[1].text == "two, quoted");
    CHECK(result.corpus.documents()[4].text == "five \"x\"");
    CHECK(result.corpus.documents()[3].label == "C");
    CHECK(result.corpus.documents()[0].id == "csv:1");

    write_file(root / "bad.csv", "body,label\nx,A\n");
    expect_code(ErrorCode::Schema, [&] { load_corpus(CorpusSource::detect(root / "bad.csv")); });
    fs::remove_all(root);
}

TEST_CASE("load_corpus error paths") {
    const auto root = scratch("errors");
    expect_code(ErrorCode::Io, [&] { load_corpus({CorpusSource::Kind::Mbox, root / "missing.mbox"}); });
    expect_code(ErrorCode::EmptyCorpus, [&] { load_corpus({CorpusSource::Kind::Directory, root}); });
    fs::remove_all(root);
}

TEST_CASE("fixture corpora match the manifest") {
    const fs::path fixtures = MAILCLASS_FIXTURES;
    const auto mbox = load_corpus(CorpusSource::detect(fixtures / "gmail.mbox"));
    CHECK(mbox.corpus.size() == 7);
    CHECK(mbox.skipped_unlabeled == 1);
    CHECK(mbox.corpus.labels() == std::vector<std::string>{"Billing", "Refunds", "Shipping"});
    CHECK(mbox.corpus.documents()[0].text == "Refund request Please refund my order 1234.");

    const auto dir = load_corpus(CorpusSource::detect(fixtures / "labeled"));
    CHECK(dir.corpus.size() == 4);
    CHECK(dir.corpus.labels() == std::vector<std::string>{"Billing", "Support"});
    const auto stats = corpus_stats(dir.corpus, StopWordList::english());
    CHECK(stats.total_emails == 4);
    CHECK(stats.total_words == 17);
    CHECK(stats.per_label_word_count.at("Billing") == 10);
    CHECK(stats.per_label_word_count.at("Support") == 7);
}

TEST_CASE("load_corpus is deterministic regardless of creation order") {
    const auto a = scratch("order_a");
    const auto b = scratch("order_b");
    const std::vector<std::string> names{"z.eml", "a.eml", "m.txt", "b.eml"};
    for (const auto& n : names) {
        fs::create_directories(a / "L");
        write_file(a / "L" / n, "Subject: " + n + "\n\nbody " + n);
    }
    for (auto it = names.rbegin(); it != names.rend(); ++it) {
        fs::create_directories(b / "L");
        write_file(b / "L" / *it, "Subject: " + *it + "\n\nbody " + *it);
    }
    const auto ca = load_corpus({CorpusSource::Kind::Directory, a}).corpus;
    const auto cb = load_corpus({CorpusSource::Kind::Directory, b}).corpus;
    CHECK(ca == cb);
    CHECK(ca.documents().front().id == "L/a.eml");
    CHECK(ca.documents().back().id == "L/z.eml");
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("filter_labels") {
    const auto table = gmail_table();
    REQUIRE(table.size() == 608);

    SUBCASE("threshold removes Placement") {
        const auto kept = filter_labels(table, 10, {});
        CHECK(kept.size() == 600);
        CHECK(std::ranges::find(kept.labels(), "Placement") == kept.labels().end());
        CHECK(kept.labels().size() == 8);
    }
    SUBCASE("min_count 1 is the identity") { CHECK(filter_labels(table, 1, {}) == table); }
    SUBCASE("drop list") { CHECK(filter_labels(table, 1, {"Inbox"}).size() == 561); }
    SUBCASE("document order is preserved") {
        const auto kept = filter_labels(table, 20, {});
        std::vector<EmailDocument> expected;
        for (const auto& d : table.documents())
            if (d.label != "Placement" && d.label != "Friends" && d.label != "Jobs") expected.push_back(d);
        CHECK(kept.documents() == expected);
    }
    SUBCASE("empty result") { expect_code(ErrorCode::EmptyCorpus, [&] { filter_labels(table, 1000, {}); }); }
}

TEST_CASE("filter_labels is idempotent on random corpora") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::pair<std::string, int>> counts;
        const auto labels = 1 + rng.below(6);
        for (std::uint64_t l = 0; l < labels; ++l)
            counts.emplace_back("L" + std::to_string(l), 1 + static_cast<int>(rng.below(15)));
        const LabeledCorpus corpus(docs_with_counts(counts));
        const auto min_count = 1 + rng.below(8);
        const std::set<std::string> drop{"L" + std::to_string(rng.below(8))};
        try {
            const auto once = filter_labels(corpus, min_count, drop);
            CHECK(filter_labels(once, min_count, drop) == once);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EmptyCorpus);
        }
    }
}

TEST_CASE("corpus_stats") {
    const std::vector<std::string> words{"what", "of", "the"};
    const StopWordList stop(words);

    SUBCASE("empty corpus") {
        const auto stats = corpus_stats(LabeledCorpus{}, stop);
        CHECK(stats.total_emails == 0);
        CHECK(stats.total_words == 0);
        CHECK(stats.per_label_email_count.empty());
    }
    SUBCASE("hand counted") {
        const LabeledCorpus corpus({{"1", "refund refund", "A"}, {"2", "late", "B"}});
        const auto stats = corpus_stats(corpus, stop);
        CHECK(stats.per_label_email_count == std::map<std::string, std::uint64_t>{{"A", 1}, {"B", 1}});
        CHECK(stats.per_label_word_count == std::map<std::string, std::uint64_t>{{"A", 2}, {"B", 1}});
        CHECK(stats.total_words == 3);
        CHECK(stats.to_csv() == "label,emails,words\nA,1,2\nB,1,1\nTOTAL,2,3\n");
    }
    SUBCASE("stop words only") {
        const auto stats = corpus_stats(LabeledCorpus({{"1", "What of the", "A"}}), stop);
        CHECK(stats.per_label_email_count.at("A") == 1);
        CHECK(stats.per_label_word_count.at("A") == 0);
    }
}

TEST_CASE("corpus_stats totals equal per-label sums") {
    Rng rng(5);
    const std::vector<std::string> pool{"refund", "and", "late", "the", "parcel", "x", "order", "of", "99"};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<EmailDocument> docs(rng.below(30));
        for (auto& d : docs) {
            d.label = "L" + std::to_string(rng.below(4));
            for (std::uint64_t w = rng.below(12); w > 0; --w) d.text += pool[rng.below(pool.size())] + " ";
        }
        const auto stats = corpus_stats(LabeledCorpus(docs), StopWordList::english());
        std::uint64_t emails = 0;
        std::uint64_t words = 0;
        for (const auto& [_, n] : stats.per_label_email_count) emails += n;
        for (const auto& [_, n] : stats.per_label_word_count) words += n;
        CHECK(stats.total_emails == emails);
        CHECK(stats.total_words == words);
        CHECK(stats.total_emails == docs.size());
    }
}

TEST_CASE("labeled corpus rejects empty labels") {
    expect_code(ErrorCode::Schema, [] { LabeledCorpus({{"1", "x", ""}}); });
}
