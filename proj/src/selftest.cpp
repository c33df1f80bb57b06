#include "textclust/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "textclust/augment.hpp"
#include "textclust/cluster.hpp"
#include "textclust/corpus.hpp"
#include "textclust/embed.hpp"
#include "textclust/losses.hpp"
#include "textclust/metrics.hpp"
#include "textclust/rng.hpp"
#include "textclust/trainer.hpp"

namespace textclust {

namespace {

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
    Matrix m(r, c);
    for (double& v : m.data()) v = rng.normal();
    return m;
}

bool rows_sum_to_one(const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (double v : m.row(i)) s += v;
        if (std::abs(s - 1.0) > 1e-9) return false;
    }
    return true;
}

bool check_distributions() {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 1 + rng.below(8), k = 2 + rng.below(3), d = 1 + rng.below(6);
        const auto q = soft_assign(random_matrix(rng, n, d), random_matrix(rng, k, d));
        const auto p = target_distribution(q);
        if (!rows_sum_to_one(q.q) || !rows_sum_to_one(p.p)) return false;
        if (kl_divergence(p.p, q.q) < 0.0 || std::abs(kl_divergence(q.q, q.q)) > 1e-12) return false;
    }
    return true;
}

bool check_contrastive_scale() {
    Rng rng(12);
    Matrix a = random_matrix(rng, 5, 6), b = random_matrix(rng, 5, 6);
    const double base = contrastive_loss(a, b, 0.5).loss;
    for (double& v : a.data()) v *= 3.5;
    for (double& v : b.data()) v *= 3.5;
    return std::abs(contrastive_loss(a, b, 0.5).loss - base) < 1e-12;
}

bool check_metric_invariance() {
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        std::vector<int> pred(n), truth(n);
        for (auto& v : pred) v = static_cast<int>(rng.below(4));
        for (auto& v : truth) v = static_cast<int>(rng.below(4));
        std::vector<int> perm = {2, 0, 3, 1}, relabeled(n);
        for (std::size_t i = 0; i < n; ++i) relabeled[i] = perm[pred[i]];
        if (std::abs(clustering_accuracy(pred, truth).acc - clustering_accuracy(relabeled, truth).acc) > 1e-12) return false;
        if (std::abs(nmi(pred, truth) - nmi(relabeled, truth)) > 1e-12) return false;
        if (std::abs(nmi(pred, truth) - nmi(truth, pred)) > 1e-12) return false;
        const double m = nmi(pred, truth);
        if (m < 0.0 || m > 1.0) return false;
    }
    return true;
}

bool check_kmeans_monotone() {
    Rng rng(14);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto res = kmeans(random_matrix(rng, 60, 3), 4, 100, seed);
        for (std::size_t i = 1; i < res.sse_trace.size(); ++i)
            if (res.sse_trace[i] > res.sse_trace[i - 1] + 1e-9) return false;
    }
    return true;
}

bool check_som_unit_norm() {
    Rng rng(15);
    bool ok = true;
    SomConfig config;
    config.rows = 3;
    config.cols = 2;
    config.iterations = 10;
    som_fit(random_matrix(rng, 40, 5), config, 3, [&](const SomGrid& g) {
        for (std::size_t i = 0; i < g.weights.rows(); ++i) ok = ok && std::abs(norm2(g.weights.row(i)) - 1.0) <= 1e-6;
    });
    return ok;
}

bool check_hashed_norm() {
    for (const std::string text : {"", "ai", "ai ai", "the quick brown fox", "a b c d e f g h i j k"}) {
        const auto v = hashed_bow(text, 16, 5);
        const double n = norm2(v);
        if (!(n == 0.0 || std::abs(n - 1.0) < 1e-12)) return false;
    }
    return true;
}

bool check_attention_rows() {
    Rng rng(16);
    Matrix att;
    self_attention(random_matrix(rng, 6, 4), random_matrix(rng, 6, 4), random_matrix(rng, 6, 3), &att);
    for (double v : att.data())
        if (v < 0.0) return false;
    return rows_sum_to_one(att);
}

bool check_emb1_roundtrip() {
    Rng rng(17);
    const auto set = EmbeddingSet::from_matrix(random_matrix(rng, 5, 8));
    const auto bytes = serialize_embeddings(set);
    return parse_embeddings(bytes) == set;
}

bool check_text_idempotence() {
    Corpus c;
    const char* texts[] = {"Generative AI!", "generative ai", "Hello, World", "hello world", "Hello, World"};
    std::uint64_t id = 0;
    for (const char* t : texts) c.documents.push_back({id++, t, std::nullopt, std::nullopt});
    const PreprocessRules rules;
    const auto once = preprocess_corpus(c, rules);
    if (preprocess_corpus(once, rules) != once) return false;
    const auto d1 = dedup(once);
    return dedup(d1) == d1 && d1.size() == 2;
}

bool check_augment_multiset() {
    const std::string text = "the cat sat on the mat with a hat";
    std::map<std::string, int> allowed;
    for (const auto& t : tokenize(text)) ++allowed[t];
    AugmentPolicy policy{0.3, 0.3, 0.5, 9};
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto [a, b] = augment_pair(text, policy, i);
        for (const auto& view : {a, b}) {
            std::map<std::string, int> seen;
            const auto tokens = tokenize(view);
            if (tokens.empty()) return false;
            for (const auto& t : tokens)
                if (t != kMaskToken && ++seen[t] > allowed[t]) return false;
        }
    }
    return true;
}

bool check_training_determinism() {
    BlobSpec spec;
    spec.points = 80;
    const auto data = make_blobs(spec);
    TrainConfig config;
    config.batch_size = 40;
    config.epochs = 3;
    config.head = HeadKind::som;
    const auto a = train(config, data);
    const auto b = train(config, data);
    return a.trace == b.trace && a.labels == b.labels && a.report == b.report;
}

}  // namespace

int run_selftest(std::ostream& out) {
    const std::vector<std::pair<std::string, std::function<bool()>>> checks = {
        {"soft assignment and target rows are distributions; KL >= 0", check_distributions},
        {"contrastive loss is invariant to rescaling", check_contrastive_scale},
        {"ACC and NMI are relabeling invariant; NMI is symmetric and in [0,1]", check_metric_invariance},
        {"k-means SSE is non-increasing", check_kmeans_monotone},
        {"SOM weights stay unit norm after every update", check_som_unit_norm},
        {"hashed bag-of-words has norm 1 or 0", check_hashed_norm},
        {"attention rows are probability vectors", check_attention_rows},
        {"EMB1 serialization round-trips", check_emb1_roundtrip},
        {"preprocess and dedup are idempotent", check_text_idempotence},
        {"augmented views only reuse input tokens or the mask", check_augment_multiset},
        {"training is deterministic for a fixed seed", check_training_determinism},
    };
    int failures = 0;
    for (const auto& [name, fn] : checks) {
        bool ok = false;
        std::string error;
        try {
            ok = fn();
        } catch (const std::exception& ex) {
            error = ex.what();
        }
        out << (ok ? "PASS " : "FAIL ") << name;
        if (!error.empty()) out << " (" << error << ")";
        out << "\n";
        if (!ok) ++failures;
    }
    out << (failures == 0 ? "selftest passed" : "selftest failed: " + std::to_string(failures) + " check(s)") << "\n";
    return failures;
}

}  // namespace textclust
