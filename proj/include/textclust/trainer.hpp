#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "textclust/augment.hpp"
#include "textclust/cluster.hpp"
#include "textclust/corpus.hpp"
#include "textclust/embed.hpp"
#include "textclust/losses.hpp"
#include "textclust/metrics.hpp"

namespace textclust {

// Where representations come from.
//   fixed   - precomputed vectors; nothing upstream of the clustering head trains
//   hashed  - hashed bag-of-words of the text and of its augmented views; frozen
//   encoder - toy attention encoder over hashed token vectors; trained
enum class ProviderKind { fixed, hashed, encoder };
enum class OptimizerKind { sgd, adam };

std::string to_string(ProviderKind kind);
ProviderKind parse_provider(const std::string& name);
std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(const std::string& name);

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 400;
    double tau = 0.5;
    double lr = 1e-5;
    double lr_scale = 100.0;  // clustering-head learning rate = lr · lr_scale
    double alpha = 1.0;       // Student-t degrees of freedom
    HeadKind head = HeadKind::kmeans;
    std::size_t k = 4;        // must equal rows·cols for SOM heads
    SomConfig som;
    std::size_t kmeans_max_iter = 100;
    std::size_t restarts = 10;  // random re-initializations tried per head fit
    std::uint64_t seed = 0;
    OptimizerKind optimizer = OptimizerKind::sgd;
    ProviderKind provider = ProviderKind::fixed;
    std::uint64_t hash_seed = 0;
    std::size_t max_len = 32;
    EncoderShape encoder;     // model_dim doubles as the hashed-BoW dimension
    AugmentPolicy augment;    // augment.seed is ignored; views are seeded from `seed`

    std::size_t num_clusters() const { return is_som(head) ? som.neurons() : k; }
    void validate() const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct TrainData {
    std::string name = "data";
    std::vector<std::string> texts;   // required by the hashed and encoder providers
    std::optional<Matrix> embeddings; // required by the fixed provider
    std::vector<int> labels;          // ground truth, empty when unknown

    std::size_t size() const;
    static TrainData from_corpus(const Corpus& corpus);
    static TrainData from_embeddings(const EmbeddingSet& set, std::vector<int> labels = {});
};

struct EpochRecord {
    std::size_t epoch = 0;
    LossBreakdown loss;
    std::optional<double> batch_acc;
    std::optional<double> batch_nmi;

    friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct RunResult {
    TrainConfig config;
    std::vector<EpochRecord> trace;
    HardAssignment labels;
    std::optional<EvalReport> report;
    double wall_time_s = 0.0;
};

class Trainer {
public:
    Trainer(TrainConfig config, const TrainData& data);

    // One pass of the training loop on a sampled mini-batch.
    EpochRecord run_epoch(std::size_t epoch);
    // Labels for the full data set from the current parameters.
    HardAssignment predict() const;
    std::optional<EvalReport> evaluate() const;

    const TrainConfig& config() const { return config_; }
    const Matrix& centroids() const { return centroids_; }
    const std::optional<EncoderParams>& encoder() const { return encoder_; }
    const Matrix& projection() const { return projection_; }

    // Representations of every item (no augmentation) and their clustering space.
    Matrix represent_all() const;
    Matrix clustering_space(const Matrix& representations) const;

private:
    struct Moments {
        std::vector<double> m, v;
    };

    void fit_head(const Matrix& space, std::uint64_t seed);
    std::vector<std::size_t> sample_batch(std::size_t epoch) const;
    void step(const std::string& name, std::span<double> params, std::span<const double> grads, double lr);

    TrainConfig config_;
    TrainData data_;
    std::optional<EncoderParams> encoder_;
    Matrix hashed_;                // cached hashed-BoW representations
    Matrix projection_;            // D×K, projection heads only
    Matrix centroids_;             // K×(D or K)
    std::optional<SomGrid> grid_;
    std::size_t adam_step_ = 0;
    std::map<std::string, Moments> moments_;
};

// When `representations` is set it receives the final representations of every item.
RunResult train(const TrainConfig& config, const TrainData& data, Matrix* representations = nullptr);

// ---------------------------------------------------------------------------
// Hyperparameter sweeps

enum class SweepAxis { lr, lr_scale, tau };
std::string to_string(SweepAxis axis);
SweepAxis parse_axis(const std::string& name);

TrainConfig with_axis_value(TrainConfig config, SweepAxis axis, double value);

struct SweepRow {
    std::string dataset;
    HeadKind head = HeadKind::kmeans;
    std::string metric;  // "NMI" or "ACC"
    std::vector<double> values;
    std::vector<bool> best;  // per column; the maximum over all rows of this metric
};

struct SweepTable {
    SweepAxis axis = SweepAxis::lr;
    std::vector<double> axis_values;
    std::vector<SweepRow> rows;
    std::vector<RunResult> runs;  // ordered by (axis value, head)
};

inline const std::vector<HeadKind> kSweepHeads = {HeadKind::som, HeadKind::somr, HeadKind::kmeans, HeadKind::kmeansr};

// One run per (value, head). Every derived config is validated before the
// first run starts. Runs use the base seed, so a single-value sweep cell
// equals a lone train() call.
SweepTable sweep(const TrainConfig& base, SweepAxis axis, const std::vector<double>& values, const TrainData& data,
                 const std::vector<HeadKind>& heads = kSweepHeads, std::size_t jobs = 1);

// CSV: header "dataset,head,metric,<axis values>", one row per (metric, head);
// the best cell of each metric carries a trailing '*'.
std::string sweep_to_csv(const SweepTable& table);
SweepTable parse_sweep_csv(const std::string& csv);

std::string format_double(double v);

// ---------------------------------------------------------------------------

struct BlobSpec {
    std::size_t points = 200;
    std::size_t dim = 16;
    std::size_t blobs = 4;
    double sigma = 0.05;
    double min_separation = 2.0;
    std::uint64_t seed = 0;

    friend bool operator==(const BlobSpec&, const BlobSpec&) = default;
};

// Isotropic Gaussian blobs; point i belongs to blob i % blobs.
TrainData make_blobs(const BlobSpec& spec);
Matrix blob_centers(const BlobSpec& spec);

}  // namespace textclust
