#include <gtest/gtest.h>

#include "test_util.hpp"
#include "textclust/config.hpp"
#include "textclust/embed.hpp"

using namespace textclust;

namespace {

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& ex) {
        return ex.what();
    }
    return {};
}

RunConfig customized() {
    RunConfig c;
    c.data.source = SourceKind::agnews;
    c.data.path = "data/train \"v2\".csv";
    c.data.limit = 500;
    c.data.preprocess = true;
    c.preprocess.relevance_keywords = {"ai", "machine learning"};
    c.preprocess.min_tokens = 3;
    c.blobs.sigma = 0.125;
    c.train.tau = 0.9;
    c.train.lr = 1e-7;
    c.train.lr_scale = 250;
    c.train.head = HeadKind::somr;
    c.train.som.rows = 3;
    c.train.som.cols = 2;
    c.train.k = 6;
    c.train.provider = ProviderKind::encoder;
    c.train.optimizer = OptimizerKind::adam;
    c.train.seed = 123456789012345ull;
    c.train.augment.span_mask_prob = 0.3;
    return c;
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) { EXPECT_EQ(parse_config("# nothing\n\n"), RunConfig{}); }

TEST(Config, ParsesSections) {
    const auto c = parse_config(R"(
# blob run
[data]
source = "blobs"   # trailing comment

[train]
epochs = 3
tau = 0.9
head = "somr"
lr = 1e-3

[preprocess]
keywords = ["ai", "deep learning"]
lowercase = false
)");
    EXPECT_EQ(c.train.epochs, 3u);
    EXPECT_EQ(c.train.tau, 0.9);
    EXPECT_EQ(c.train.lr, 1e-3);
    EXPECT_EQ(c.train.head, HeadKind::somr);
    EXPECT_EQ(c.preprocess.relevance_keywords, (std::vector<std::string>{"ai", "deep learning"}));
    EXPECT_FALSE(c.preprocess.lowercase);
}

TEST(Config, TomlRoundTrip) {
    EXPECT_EQ(parse_config(to_toml(RunConfig{})), RunConfig{});
    const auto c = customized();
    EXPECT_EQ(parse_config(to_toml(c)), c);
}

TEST(Config, JsonRoundTrip) {
    const auto c = customized();
    const auto j = config_to_json(c);
    EXPECT_EQ(j["train"]["head"], "somr");
    EXPECT_EQ(j["data"]["limit"], 500);
    EXPECT_EQ(config_from_json(j), c);
    EXPECT_TRUE(config_to_json(RunConfig{})["data"]["limit"].is_null());
    EXPECT_EQ(config_from_json(nlohmann::json::parse(config_to_json(c).dump())), c);
}

TEST(Config, EveryKeyIsKnownToTheParser) {
    const auto keys = config_keys();
    EXPECT_GE(keys.size(), 40u);
    const auto toml = to_toml(customized());
    for (const auto& key : keys) {
        const auto dot = key.find('.');
        if (key == "data.limit") continue;
        EXPECT_NE(toml.find("\n" + key.substr(dot + 1) + " = "), std::string::npos) << key;
    }
}

TEST(Config, UnknownKeyIsAnError) {
    EXPECT_EQ(error_of([] { parse_config("[train]\nepochs = 2\nmomentum = 0.9\n"); }),
              "line 3: unknown config key 'train.momentum'");
    EXPECT_THROW(parse_config("[nosuch]\nx = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("epochs = 1\n"), ConfigError);
}

TEST(Config, MalformedText) {
    EXPECT_NE(error_of([] { parse_config("[train]\nepochs = 1\nepochs = 2\n"); }).find("line 3: duplicate key"),
              std::string::npos);
    EXPECT_NE(error_of([] { parse_config("[train\n"); }).find("line 1"), std::string::npos);
    EXPECT_NE(error_of([] { parse_config("[train]\nepochs 4\n"); }).find("expected 'key = value'"), std::string::npos);
    EXPECT_NE(error_of([] { parse_config("[train]\nepochs = -4\n"); }).find("bad value for 'train.epochs'"),
              std::string::npos);
    EXPECT_THROW(parse_config("[train]\ntau = nan\n"), ConfigError);
    EXPECT_THROW(parse_config("[train]\nhead = \"dbscan\"\n"), ConfigError);
    EXPECT_THROW(parse_config("[data]\npreprocess = yes\n"), ConfigError);
    EXPECT_THROW(parse_config("[preprocess]\nkeywords = [ai]\n"), ConfigError);
    EXPECT_THROW(parse_config("[data]\nlimit = 0\n"), ConfigError);
}

TEST(Config, Overrides) {
    RunConfig c;
    apply_override(c, "train.tau=0.4");
    apply_override(c, "train.head=som");
    apply_override(c, "data.path = \"corpus file.txt\"");
    EXPECT_THROW(apply_override(c, "data.path=corpus file.txt"), ConfigError);
    apply_override(c, "data.limit=7");
    EXPECT_EQ(c.data.limit, 7u);
    apply_override(c, "preprocess.keywords=[\"x\"]");
    EXPECT_EQ(c.train.tau, 0.4);
    EXPECT_EQ(c.train.head, HeadKind::som);
    EXPECT_EQ(c.data.path, "corpus file.txt");
    EXPECT_EQ(c.preprocess.relevance_keywords, std::vector<std::string>{"x"});
    EXPECT_THROW(apply_override(c, "train.tau"), ConfigError);
    EXPECT_THROW(apply_override(c, "train.nothing=1"), ConfigError);
    EXPECT_THROW(apply_override(c, "train.epochs="), ConfigError);
}

TEST(Config, LoadFromFile) {
    testutil::TempDir dir;
    testutil::write_file(dir.file("c.toml"), "[train]\nseed = 9\n");
    EXPECT_EQ(load_config(dir.file("c.toml")).train.seed, 9u);
    const auto missing = dir.file("absent.toml");
    EXPECT_NE(error_of([&] { load_config(missing); }).find(missing.string()), std::string::npos);
    testutil::write_file(dir.file("bad.toml"), "[train]\nwat = 1\n");
    EXPECT_NE(error_of([&] { load_config(dir.file("bad.toml")); }).find("bad.toml: line 2"), std::string::npos);
}

TEST(LoadData, Blobs) {
    RunConfig c;
    c.blobs.points = 40;
    const auto data = load_data(c);
    EXPECT_EQ(data.size(), 40u);
    EXPECT_EQ(data.labels.size(), 40u);
    c.train.provider = ProviderKind::hashed;
    EXPECT_THROW(load_data(c), ConfigError);
}

TEST(LoadData, EmbeddingsWithLabelsAndLimit) {
    testutil::TempDir dir;
    Matrix m(5, 3);
    for (std::size_t i = 0; i < 15; ++i) m.data()[i] = static_cast<double>(i) + 1.0;
    save_embeddings(EmbeddingSet::from_matrix(m, {0, 1, 2, 3, 4}), dir.file("vecs.emb"));
    save_label_file({0, 1, 0, 1, 1}, dir.file("labels.txt"));

    RunConfig c;
    c.data.source = SourceKind::embeddings;
    c.data.path = dir.file("vecs.emb").string();
    c.data.labels_path = dir.file("labels.txt").string();
    c.data.limit = 3;
    const auto data = load_data(c);
    EXPECT_EQ(data.name, "vecs");
    EXPECT_EQ(data.embeddings->rows(), 3u);
    EXPECT_EQ(data.labels, (std::vector<int>{0, 1, 0}));
    EXPECT_EQ(load_label_file(dir.file("labels.txt")), (std::vector<int>{0, 1, 0, 1, 1}));
}

TEST(LoadData, TextSources) {
    testutil::TempDir dir;
    testutil::write_file(dir.file("so.tsv"), "1\tHow to parse JSON!\n2\thow to parse json\n3\tSegfault in C++\n");
    RunConfig c;
    c.data.source = SourceKind::stackoverflow;
    c.data.path = dir.file("so.tsv").string();
    c.train.provider = ProviderKind::hashed;
    EXPECT_EQ(load_data(c).texts.size(), 3u);
    c.data.preprocess = true;
    const auto cleaned = load_data(c);
    EXPECT_EQ(cleaned.texts.size(), 2u);
    EXPECT_EQ(cleaned.texts[0], "how to parse json");
    c.train.provider = ProviderKind::fixed;
    EXPECT_THROW(load_data(c), ConfigError);
    c.train.provider = ProviderKind::hashed;
    c.data.path.clear();
    EXPECT_THROW(load_data(c), ConfigError);
}

TEST(LabelFile, Errors) {
    testutil::TempDir dir;
    testutil::write_file(dir.file("l.txt"), "0\n1\nx\n");
    EXPECT_NE(error_of([&] { load_label_file(dir.file("l.txt")); }).find("line 3"), std::string::npos);
    EXPECT_THROW(load_label_file(dir.file("nope.txt")), std::runtime_error);
}

TEST(SourceNames, RoundTrip) {
    for (auto s : {SourceKind::blobs, SourceKind::agnews, SourceKind::stackoverflow, SourceKind::corpus, SourceKind::embeddings})
        EXPECT_EQ(parse_source(to_string(s)), s);
    EXPECT_THROW(parse_source("twitter"), std::invalid_argument);
}
