#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "test_util.hpp"
#include "textclust/corpus.hpp"

using namespace textclust;
using testutil::TempDir;
using testutil::write_file;

namespace {

Document doc(std::uint64_t id, std::string text) { return Document{id, std::move(text), std::nullopt, std::nullopt}; }

}  // namespace

TEST(AgNews, QuotedRowIsRemappedToZeroBasedTitle) {
    TempDir dir;
    write_file(dir.file("a.csv"), "\"3\",\"Wall St. Bears\",\"Short-sellers, Wall Street's dwindling band\"\n");
    const auto c = load_agnews(dir.file("a.csv"));
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c.documents[0].text, "Wall St. Bears");
    EXPECT_EQ(c.documents[0].label, 2);
    EXPECT_EQ(c.documents[0].class_name, "Business");
    EXPECT_EQ(c.num_classes, 4);
}

TEST(AgNews, EmptyFileGivesEmptyCorpus) {
    TempDir dir;
    write_file(dir.file("e.csv"), "");
    const auto c = load_agnews(dir.file("e.csv"));
    EXPECT_EQ(c.size(), 0u);
    EXPECT_EQ(c.num_classes, 4);
}

TEST(AgNews, LimitTakesPrefixWithSequentialIds) {
    TempDir dir;
    std::string csv;
    for (int i = 0; i < 100; ++i) csv += "\"" + std::to_string(1 + i % 4) + "\",\"title " + std::to_string(i) + "\",\"d\"\n";
    write_file(dir.file("a.csv"), csv);
    const auto c = load_agnews(dir.file("a.csv"), 10);
    ASSERT_EQ(c.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(c.documents[i].id, i);
        EXPECT_EQ(c.documents[i].text, "title " + std::to_string(i));
    }
}

TEST(AgNews, MultilineQuotedFieldAndEscapedQuotes) {
    TempDir dir;
    write_file(dir.file("a.csv"), "\"1\",\"He said \"\"hi\"\"\",\"line one\nline two\"\n\"2\",\"Next\",\"x\"\n");
    const auto c = load_agnews(dir.file("a.csv"));
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c.documents[0].text, "He said \"hi\"");
    EXPECT_EQ(c.documents[1].label, 1);
}

TEST(AgNews, ClassOutsideRangeNamesLine) {
    TempDir dir;
    write_file(dir.file("a.csv"), "\"1\",\"ok\",\"x\"\n\"5\",\"bad\",\"x\"\n");
    try {
        load_agnews(dir.file("a.csv"));
        FAIL() << "expected an error";
    } catch (const std::exception& ex) {
        EXPECT_NE(std::string(ex.what()).find("line 2"), std::string::npos) << ex.what();
    }
}

TEST(AgNews, MalformedRowNamesLine) {
    TempDir dir;
    write_file(dir.file("a.csv"), "\"1\",\"ok\",\"x\"\n\"2\",\"only two\"\n");
    try {
        load_agnews(dir.file("a.csv"));
        FAIL() << "expected an error";
    } catch (const std::exception& ex) {
        EXPECT_NE(std::string(ex.what()).find("line 2"), std::string::npos) << ex.what();
    }
}

TEST(AgNews, MissingFileMentionsPath) {
    try {
        load_agnews("/definitely/not/here.csv");
        FAIL();
    } catch (const std::exception& ex) {
        EXPECT_NE(std::string(ex.what()).find("/definitely/not/here.csv"), std::string::npos);
    }
}

TEST(StackOverflow, TsvRowMapsDirectly) {
    TempDir dir;
    write_file(dir.file("s.tsv"), "7\tHow to parse JSON\n0\tWhat is a pointer\n");
    const auto c = load_stackoverflow(dir.file("s.tsv"));
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c.documents[0].label, 7);
    EXPECT_EQ(c.documents[0].text, "How to parse JSON");
    EXPECT_EQ(c.num_classes, 20);
}

TEST(StackOverflow, PairedFilesCountMismatch) {
    TempDir dir;
    write_file(dir.file("t.txt"), "a\nb\nc\n");
    write_file(dir.file("l.txt"), "1\n2\n");
    try {
        load_stackoverflow(dir.file("t.txt"), dir.file("l.txt"));
        FAIL();
    } catch (const std::exception& ex) {
        EXPECT_NE(std::string(ex.what()).find("count mismatch 3 vs 2"), std::string::npos) << ex.what();
    }
}

TEST(StackOverflow, PairedFilesShiftLabelsAndKeepAll) {
    TempDir dir;
    std::string titles, labels;
    for (int i = 0; i < 20000; ++i) {
        titles += "question " + std::to_string(i) + "\n";
        labels += std::to_string(1 + i % 20) + "\n";
    }
    write_file(dir.file("t.txt"), titles);
    write_file(dir.file("l.txt"), labels);
    const auto c = load_stackoverflow(dir.file("t.txt"), dir.file("l.txt"));
    ASSERT_EQ(c.size(), 20000u);
    EXPECT_EQ(c.num_classes, 20);
    std::set<int> seen;
    for (const auto& d : c.documents) seen.insert(*d.label);
    EXPECT_EQ(seen.size(), 20u);
    EXPECT_EQ(*seen.begin(), 0);
    EXPECT_EQ(*seen.rbegin(), 19);
}

TEST(Preprocess, LowercaseAndStripPunctuation) {
    const auto out = preprocess(doc(0, "Generative AI!"), PreprocessRules{});
    ASSERT_TRUE(out);
    EXPECT_EQ(out->text, "generative ai");
}

TEST(Preprocess, AllRulesOffIsIdentity) {
    for (const std::string text : {"Generative AI!", "  spaced\tout  ", "MiXeD, Case."}) {
        const auto out = preprocess(doc(0, text), PreprocessRules::none());
        ASSERT_TRUE(out);
        EXPECT_EQ(out->text, text);
    }
}

TEST(Preprocess, KeywordFilterDropsUnrelatedText) {
    PreprocessRules rules;
    rules.relevance_keywords = {"ai"};
    EXPECT_FALSE(preprocess(doc(0, "hands-on activities"), rules));
    EXPECT_TRUE(preprocess(doc(0, "Generative AI is here"), rules));
}

TEST(Preprocess, MultiWordKeywordMatchesTokenRun) {
    PreprocessRules rules;
    rules.relevance_keywords = {"Generative AI"};
    EXPECT_TRUE(preprocess(doc(0, "new generative ai tools"), rules));
    EXPECT_FALSE(preprocess(doc(0, "ai that is generative"), rules));
}

TEST(Preprocess, MinTokensFilters) {
    PreprocessRules rules;
    rules.min_tokens = 3;
    EXPECT_FALSE(preprocess(doc(0, "two words"), rules));
    EXPECT_TRUE(preprocess(doc(0, "now three words"), rules));
    EXPECT_FALSE(preprocess(doc(0, "!!! ???"), PreprocessRules{}));
}

TEST(Preprocess, IsIdempotentForEveryRuleCombination) {
    const std::vector<std::string> texts = {"Generative AI!", "Hello,   World", "hands-on activities", "A.I. & ML",
                                            "  tabs\tand\nnewlines  ", "UPPER lower"};
    for (int mask = 0; mask < 8; ++mask) {
        PreprocessRules rules;
        rules.lowercase = mask & 1;
        rules.strip_punctuation = mask & 2;
        if (mask & 4) rules.relevance_keywords = {"ai", "world"};
        rules.min_tokens = 0;
        for (const auto& t : texts) {
            const auto once = preprocess(doc(0, t), rules);
            if (!once) continue;
            const auto twice = preprocess(*once, rules);
            ASSERT_TRUE(twice) << t;
            EXPECT_EQ(*twice, *once) << t << " mask " << mask;
        }
    }
}

TEST(Dedup, RepeatedTextKeepsFirst) {
    Corpus c;
    c.documents = {doc(0, "same tweet"), doc(1, "same tweet"), doc(2, "other"), doc(3, "same tweet")};
    const auto d = dedup(c);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d.documents[0].id, 0u);
    EXPECT_EQ(d.documents[1].id, 2u);
}

TEST(Dedup, DistinctCorpusUnchanged) {
    Corpus c;
    c.documents = {doc(0, "a"), doc(1, "b"), doc(2, "c")};
    EXPECT_EQ(dedup(c), c);
}

TEST(Dedup, CaseVariantsCollapseAfterLowercasing) {
    Corpus c;
    const std::vector<std::string> texts = {"Hello World", "hello world", "HELLO WORLD", "Goodbye", "goodbye!", "x"};
    for (std::size_t i = 0; i < texts.size(); ++i) c.documents.push_back(doc(i, texts[i]));
    const auto cleaned = preprocess_corpus(c, PreprocessRules{});

    std::vector<std::string> normalized;
    for (const auto& d : cleaned.documents) normalized.push_back(d.text);
    std::sort(normalized.begin(), normalized.end());
    const auto uniques = static_cast<std::size_t>(std::unique(normalized.begin(), normalized.end()) - normalized.begin());

    const auto d = dedup(cleaned);
    EXPECT_EQ(d.size(), uniques);
    EXPECT_EQ(d.size(), 3u);
    EXPECT_EQ(dedup(d), d);
}

TEST(CorpusFile, RoundTripAndDeterministicLoad) {
    TempDir dir;
    write_file(dir.file("a.csv"), "\"1\",\"First\ttab\",\"x\"\n\"4\",\"Second\",\"y\"\n");
    const auto a = load_agnews(dir.file("a.csv"));
    const auto b = load_agnews(dir.file("a.csv"));
    EXPECT_EQ(serialize_corpus(a), serialize_corpus(b));

    save_corpus(a, dir.file("c.tsv"));
    const auto back = load_corpus(dir.file("c.tsv"));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back.documents[1].label, 3);
    EXPECT_EQ(back.num_classes, 4);
    EXPECT_EQ(serialize_corpus(back), serialize_corpus(load_corpus(dir.file("c.tsv"))));
}

TEST(CorpusValidate, RejectsOutOfRangeLabel) {
    Corpus c;
    c.num_classes = 2;
    c.documents = {Document{0, "a", 5, std::nullopt}};
    EXPECT_THROW(c.validate(), std::invalid_argument);
}
