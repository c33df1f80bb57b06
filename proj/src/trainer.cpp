#include "textclust/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "textclust/rng.hpp"

namespace textclust {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) { return splitmix64(seed ^ splitmix64(tag)); }

constexpr std::uint64_t kTagEncoder = 1;
constexpr std::uint64_t kTagProjection = 2;
constexpr std::uint64_t kTagInitialFit = 3;
constexpr std::uint64_t kTagBatch = 0x1000;
constexpr std::uint64_t kTagFit = 0x2000;
constexpr std::uint64_t kTagAugment = 0x3000;

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& idx) {
    Matrix out(idx.size(), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) std::copy(m.row(idx[i]).begin(), m.row(idx[i]).end(), out.row(i).begin());
    return out;
}

void set_row(Matrix& m, std::size_t r, const Vector& v) { std::copy(v.begin(), v.end(), m.row(r).begin()); }

// Gradient through y -> y/|y| applied row-wise.
Matrix normalize_rows_backward(const Matrix& y, const Matrix& grad_unit) {
    Matrix out(y.rows(), y.cols());
    for (std::size_t i = 0; i < y.rows(); ++i) {
        const double r = norm2(y.row(i));
        const auto u = unit_normalize(y.row(i));
        const double radial = dot(u, grad_unit.row(i));
        for (std::size_t j = 0; j < y.cols(); ++j) out(i, j) = (grad_unit(i, j) - radial * u[j]) / r;
    }
    return out;
}

double mean_winner_distance(const Matrix& unit_rows, const Matrix& weights) {
    double s = 0.0;
    for (std::size_t i = 0; i < unit_rows.rows(); ++i) {
        const auto w = som_winner(unit_rows.row(i), weights);
        s += std::sqrt(squared_distance(unit_rows.row(i), weights.row(w)));
    }
    return s / static_cast<double>(unit_rows.rows());
}

struct ContrastiveTerm {
    double loss = 0.0;
    Matrix grad_z1, grad_z2;
};

// Contrastive loss over the instances whose three vectors are nonzero.
ContrastiveTerm contrastive_on_nonzero(const Matrix& e, const Matrix& z1, const Matrix& z2, double tau) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < z1.rows(); ++i)
        if (norm2(e.row(i)) > 0.0 && norm2(z1.row(i)) > 0.0 && norm2(z2.row(i)) > 0.0) keep.push_back(i);
    ContrastiveTerm out;
    out.grad_z1 = Matrix(z1.rows(), z1.cols());
    out.grad_z2 = Matrix(z2.rows(), z2.cols());
    if (keep.empty()) return out;
    auto res = contrastive_loss(gather_rows(z1, keep), gather_rows(z2, keep), tau);
    out.loss = res.loss;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        std::copy(res.grad_z1.row(i).begin(), res.grad_z1.row(i).end(), out.grad_z1.row(keep[i]).begin());
        std::copy(res.grad_z2.row(i).begin(), res.grad_z2.row(i).end(), out.grad_z2.row(keep[i]).begin());
    }
    return out;
}

}  // namespace

std::string to_string(ProviderKind kind) {
    switch (kind) {
        case ProviderKind::fixed: return "fixed";
        case ProviderKind::hashed: return "hashed";
        case ProviderKind::encoder: return "encoder";
    }
    return "unknown";
}

ProviderKind parse_provider(const std::string& name) {
    if (name == "fixed" || name == "file") return ProviderKind::fixed;
    if (name == "hashed") return ProviderKind::hashed;
    if (name == "encoder") return ProviderKind::encoder;
    throw std::invalid_argument("unknown provider '" + name + "' (expected fixed, hashed, encoder)");
}

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::sgd ? "sgd" : "adam"; }

OptimizerKind parse_optimizer(const std::string& name) {
    if (name == "sgd") return OptimizerKind::sgd;
    if (name == "adam") return OptimizerKind::adam;
    throw std::invalid_argument("unknown optimizer '" + name + "' (expected sgd, adam)");
}

void TrainConfig::validate() const {
    if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
    check_tau(tau);
    if (!(lr > 0.0) || !std::isfinite(lr)) throw std::invalid_argument("lr must be positive");
    if (!(lr_scale > 0.0) || !std::isfinite(lr_scale)) throw std::invalid_argument("lr_scale must be positive");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    som.validate();
    if (is_som(head) && k != som.neurons()) {
        throw std::invalid_argument("SOM heads need k == rows*cols (k=" + std::to_string(k) + ", grid " +
                                    std::to_string(som.rows) + "x" + std::to_string(som.cols) + ")");
    }
    if (num_clusters() < 2) throw std::invalid_argument("need at least 2 clusters");
    if (kmeans_max_iter == 0) throw std::invalid_argument("kmeans_max_iter must be positive");
    if (max_len == 0) throw std::invalid_argument("max_len must be positive");
    if (encoder.model_dim < 2 || encoder.heads == 0 || encoder.head_dim == 0 || encoder.ff_dim == 0 ||
        encoder.out_dim == 0) {
        throw std::invalid_argument("encoder dimensions must be positive (model_dim >= 2)");
    }
    augment.validate();
}

std::size_t TrainData::size() const {
    if (embeddings) return embeddings->rows();
    return texts.size();
}

TrainData TrainData::from_corpus(const Corpus& corpus) {
    TrainData d;
    d.name = corpus.source_tag.empty() ? "corpus" : corpus.source_tag;
    for (const auto& doc : corpus.documents) d.texts.push_back(doc.text);
    if (corpus.has_labels()) d.labels = corpus.labels();
    return d;
}

TrainData TrainData::from_embeddings(const EmbeddingSet& set, std::vector<int> labels) {
    TrainData d;
    d.name = "embeddings";
    d.embeddings = set.to_matrix();
    d.labels = std::move(labels);
    return d;
}

// ---------------------------------------------------------------------------

Trainer::Trainer(TrainConfig config, const TrainData& data) : config_(std::move(config)), data_(data) {
    config_.validate();
    const std::size_t n = data_.size();
    switch (config_.provider) {
        case ProviderKind::fixed:
            if (!data_.embeddings) throw std::invalid_argument("provider 'fixed' needs an embedding set");
            if (!data_.texts.empty() && data_.texts.size() != n) {
                throw std::invalid_argument("embedding rows and texts disagree in count");
            }
            if (!data_.embeddings->all_finite()) throw std::invalid_argument("embedding set has non-finite values");
            break;
        case ProviderKind::hashed:
        case ProviderKind::encoder:
            if (data_.texts.empty()) {
                throw std::invalid_argument("provider '" + to_string(config_.provider) + "' needs texts");
            }
            if (data_.embeddings && data_.embeddings->rows() != data_.texts.size()) {
                throw std::invalid_argument("embedding rows and texts disagree in count");
            }
            break;
    }
    if (n == 0) throw std::invalid_argument("training data is empty");
    if (!data_.labels.empty() && data_.labels.size() != n) {
        throw std::invalid_argument("label count " + std::to_string(data_.labels.size()) + " != item count " +
                                    std::to_string(n));
    }
    if (config_.batch_size > n) {
        throw std::invalid_argument("batch_size " + std::to_string(config_.batch_size) + " exceeds data size " +
                                    std::to_string(n));
    }
    const std::size_t k = config_.num_clusters();
    if (config_.batch_size < k) throw std::invalid_argument("batch_size must be at least the number of clusters");

    if (config_.provider == ProviderKind::hashed) {
        hashed_ = Matrix(n, config_.encoder.model_dim);
        for (std::size_t i = 0; i < n; ++i)
            set_row(hashed_, i, hashed_bow(data_.texts[i], config_.encoder.model_dim, config_.hash_seed));
    }
    if (config_.provider == ProviderKind::encoder) {
        encoder_ = EncoderParams::random(config_.encoder, derive_seed(config_.seed, kTagEncoder));
    }

    const std::size_t dim = config_.provider == ProviderKind::fixed    ? data_.embeddings->cols()
                            : config_.provider == ProviderKind::hashed ? config_.encoder.model_dim
                                                                       : config_.encoder.out_dim;
    if (uses_projection(config_.head)) {
        projection_ = Matrix(dim, k);
        Rng rng(derive_seed(config_.seed, kTagProjection));
        const double stddev = std::sqrt(2.0 / static_cast<double>(dim + k));
        for (double& w : projection_.data()) w = stddev * rng.normal();
    }

    fit_head(clustering_space(represent_all()), derive_seed(config_.seed, kTagInitialFit));
}

Matrix Trainer::represent_all() const {
    switch (config_.provider) {
        case ProviderKind::fixed: return *data_.embeddings;
        case ProviderKind::hashed: return hashed_;
        case ProviderKind::encoder: {
            Matrix out(data_.texts.size(), config_.encoder.out_dim);
            for (std::size_t i = 0; i < data_.texts.size(); ++i) {
                const auto x = token_matrix(data_.texts[i], config_.encoder.model_dim, config_.hash_seed, config_.max_len);
                set_row(out, i, encoder_forward(*encoder_, x));
            }
            return out;
        }
    }
    throw std::logic_error("unreachable provider");
}

Matrix Trainer::clustering_space(const Matrix& representations) const {
    Matrix y = uses_projection(config_.head) ? matmul(representations, projection_) : representations;
    return is_som(config_.head) ? normalize_rows(y) : y;
}

void Trainer::fit_head(const Matrix& space, std::uint64_t seed) {
    const std::size_t k = config_.num_clusters();
    switch (config_.head) {
        case HeadKind::label_as_rep:
            centroids_ = Matrix::identity(k);
            return;
        case HeadKind::kmeans:
        case HeadKind::kmeansr: {
            auto best = kmeans(space, k, KMeansOptions{config_.kmeans_max_iter, config_.restarts}, seed);
            if (!centroids_.empty()) {
                auto warm = kmeans_from(space, centroids_, config_.kmeans_max_iter);
                if (warm.sse <= best.sse) best = std::move(warm);
            }
            centroids_ = std::move(best.centroids);
            return;
        }
        case HeadKind::som:
        case HeadKind::somr: {
            std::optional<SomFitResult> best;
            double best_qe = 0.0;
            auto consider = [&](SomFitResult res) {
                const double qe = mean_winner_distance(space, res.grid.weights);
                if (!best || qe < best_qe) {
                    best_qe = qe;
                    best = std::move(res);
                }
            };
            if (grid_) consider(som_fit_from(space, *grid_));
            const std::size_t restarts = std::max<std::size_t>(1, config_.restarts);
            for (std::size_t r = 0; r < restarts; ++r) consider(som_fit(space, config_.som, derive_seed(seed, r)));
            grid_ = std::move(best->grid);
            centroids_ = grid_->weights;
            return;
        }
    }
}

std::vector<std::size_t> Trainer::sample_batch(std::size_t epoch) const {
    const std::size_t n = data_.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(derive_seed(config_.seed, kTagBatch + epoch));
    for (std::size_t i = 0; i < config_.batch_size; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
    idx.resize(config_.batch_size);
    std::sort(idx.begin(), idx.end());
    return idx;
}

void Trainer::step(const std::string& name, std::span<double> params, std::span<const double> grads, double lr) {
    if (config_.optimizer == OptimizerKind::sgd) {
        axpy(-lr, grads, params);
        return;
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    auto& mo = moments_[name];
    if (mo.m.size() != params.size()) {
        mo.m.assign(params.size(), 0.0);
        mo.v.assign(params.size(), 0.0);
    }
    const double t = static_cast<double>(adam_step_);
    const double c1 = 1.0 - std::pow(beta1, t);
    const double c2 = 1.0 - std::pow(beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        mo.m[i] = beta1 * mo.m[i] + (1.0 - beta1) * grads[i];
        mo.v[i] = beta2 * mo.v[i] + (1.0 - beta2) * grads[i] * grads[i];
        params[i] -= lr * (mo.m[i] / c1) / (std::sqrt(mo.v[i] / c2) + eps);
    }
}

EpochRecord Trainer::run_epoch(std::size_t epoch) {
    const auto idx = sample_batch(epoch);
    const std::size_t b = idx.size();

    // Representations of the originals (e) and of the two augmented views (z1, z2).
    Matrix e, z1, z2;
    std::vector<EncoderCache> cache_e, cache_z1, cache_z2;
    AugmentPolicy policy = config_.augment;
    policy.seed = derive_seed(config_.seed, kTagAugment + epoch);

    switch (config_.provider) {
        case ProviderKind::fixed:
            e = gather_rows(*data_.embeddings, idx);
            z1 = e;
            z2 = e;
            break;
        case ProviderKind::hashed: {
            const std::size_t d = config_.encoder.model_dim;
            e = gather_rows(hashed_, idx);
            z1 = Matrix(b, d);
            z2 = Matrix(b, d);
            for (std::size_t i = 0; i < b; ++i) {
                const auto [v1, v2] = augment_pair(data_.texts[idx[i]], policy, idx[i]);
                set_row(z1, i, hashed_bow(v1, d, config_.hash_seed));
                set_row(z2, i, hashed_bow(v2, d, config_.hash_seed));
            }
            break;
        }
        case ProviderKind::encoder: {
            const auto& s = config_.encoder;
            e = Matrix(b, s.out_dim);
            z1 = Matrix(b, s.out_dim);
            z2 = Matrix(b, s.out_dim);
            cache_e.resize(b);
            cache_z1.resize(b);
            cache_z2.resize(b);
            for (std::size_t i = 0; i < b; ++i) {
                const auto& text = data_.texts[idx[i]];
                const auto [v1, v2] = augment_pair(text, policy, idx[i]);
                set_row(e, i, encoder_forward(*encoder_, token_matrix(text, s.model_dim, config_.hash_seed, config_.max_len), &cache_e[i]));
                set_row(z1, i, encoder_forward(*encoder_, token_matrix(v1, s.model_dim, config_.hash_seed, config_.max_len), &cache_z1[i]));
                set_row(z2, i, encoder_forward(*encoder_, token_matrix(v2, s.model_dim, config_.hash_seed, config_.max_len), &cache_z2[i]));
            }
            break;
        }
    }

    const auto co = contrastive_on_nonzero(e, z1, z2, config_.tau);

    // Head refit and self-training target for this batch.
    const Matrix projected = uses_projection(config_.head) ? matmul(e, projection_) : e;
    const Matrix space = is_som(config_.head) ? normalize_rows(projected) : projected;
    fit_head(space, derive_seed(config_.seed, kTagFit + epoch));
    const auto q = soft_assign(space, centroids_, config_.alpha);
    const auto p = target_distribution(q);
    const auto cl = kl_cluster_loss(p, q, space, centroids_);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = total_loss(co.loss, cl.loss, config_.tau);
    if (!std::isfinite(rec.loss.total)) throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch));

    if (!data_.labels.empty()) {
        HardAssignment batch_pred;
        if (uses_projection(config_.head)) {
            batch_pred = label_as_representation(projected);
        } else {
            batch_pred.k = static_cast<int>(centroids_.rows());
            for (std::size_t i = 0; i < b; ++i)
                batch_pred.labels.push_back(static_cast<int>(nearest_centroid(space.row(i), centroids_)));
        }
        std::vector<int> truth;
        for (auto i : idx) truth.push_back(data_.labels[i]);
        rec.batch_acc = clustering_accuracy(batch_pred.labels, truth).acc;
        rec.batch_nmi = nmi(batch_pred.labels, truth);
    }

    // Backpropagate the clustering loss to the representations.
    Matrix grad_projected = is_som(config_.head) ? normalize_rows_backward(projected, cl.grad_embeddings) : cl.grad_embeddings;
    Matrix grad_e;
    Matrix grad_projection;
    if (uses_projection(config_.head)) {
        grad_projection = matmul_tn(e, grad_projected);
        grad_e = matmul_nt(grad_projected, projection_);
    } else {
        grad_e = std::move(grad_projected);
    }

    ++adam_step_;
    const double head_lr = config_.lr * config_.lr_scale;
    if (config_.head != HeadKind::label_as_rep) {
        step("centroids", centroids_.flat(), cl.grad_centroids.flat(), head_lr);
        if (is_som(config_.head)) {
            centroids_ = normalize_rows(centroids_);
            grid_->weights = centroids_;
        }
    }
    if (uses_projection(config_.head)) step("projection", projection_.flat(), grad_projection.flat(), head_lr);

    if (encoder_) {
        auto grads = EncoderParams::zeros(encoder_->shape());
        for (std::size_t i = 0; i < b; ++i) {
            encoder_backward(*encoder_, cache_e[i], grad_e.row(i), grads);
            encoder_backward(*encoder_, cache_z1[i], co.grad_z1.row(i), grads);
            encoder_backward(*encoder_, cache_z2[i], co.grad_z2.row(i), grads);
        }
        std::vector<std::pair<std::string, Matrix*>> params, grad_list;
        encoder_->for_each([&](const std::string& name, Matrix& m) { params.emplace_back(name, &m); });
        grads.for_each([&](const std::string& name, Matrix& m) { grad_list.emplace_back(name, &m); });
        for (std::size_t t = 0; t < params.size(); ++t)
            step("encoder." + params[t].first, params[t].second->flat(), grad_list[t].second->flat(), config_.lr);
        if (!encoder_->wc.all_finite() || !encoder_->g.all_finite()) {
            throw std::runtime_error("encoder parameters diverged at epoch " + std::to_string(epoch));
        }
    }
    return rec;
}

HardAssignment Trainer::predict() const {
    const Matrix reps = represent_all();
    if (uses_projection(config_.head)) return label_as_representation(matmul(reps, projection_));
    const Matrix space = clustering_space(reps);
    HardAssignment out;
    out.k = static_cast<int>(centroids_.rows());
    for (std::size_t i = 0; i < space.rows(); ++i)
        out.labels.push_back(static_cast<int>(nearest_centroid(space.row(i), centroids_)));
    return out;
}

std::optional<EvalReport> Trainer::evaluate() const {
    if (data_.labels.empty()) return std::nullopt;
    return textclust::evaluate(predict().labels, data_.labels);
}

RunResult train(const TrainConfig& config, const TrainData& data, Matrix* representations) {
    const auto start = std::chrono::steady_clock::now();
    Trainer trainer(config, data);
    RunResult result;
    result.config = trainer.config();
    for (std::size_t e = 0; e < config.epochs; ++e) result.trace.push_back(trainer.run_epoch(e));
    result.labels = trainer.predict();
    if (!data.labels.empty()) result.report = evaluate(result.labels.labels, data.labels);
    if (representations) *representations = trainer.represent_all();
    result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

// ---------------------------------------------------------------------------

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::lr: return "lr";
        case SweepAxis::lr_scale: return "lr_scale";
        case SweepAxis::tau: return "tau";
    }
    return "unknown";
}

SweepAxis parse_axis(const std::string& name) {
    if (name == "lr") return SweepAxis::lr;
    if (name == "lr_scale" || name == "lr-scale") return SweepAxis::lr_scale;
    if (name == "tau") return SweepAxis::tau;
    throw std::invalid_argument("unknown sweep axis '" + name + "' (expected lr, lr_scale, tau)");
}

TrainConfig with_axis_value(TrainConfig config, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::lr: config.lr = value; break;
        case SweepAxis::lr_scale: config.lr_scale = value; break;
        case SweepAxis::tau: config.tau = value; break;
    }
    return config;
}

SweepTable sweep(const TrainConfig& base, SweepAxis axis, const std::vector<double>& values, const TrainData& data,
                 const std::vector<HeadKind>& heads, std::size_t jobs) {
    if (values.empty()) throw std::invalid_argument("sweep needs at least one axis value");
    if (heads.empty()) throw std::invalid_argument("sweep needs at least one head");

    std::vector<TrainConfig> configs;
    for (double v : values) {
        for (HeadKind h : heads) {
            TrainConfig c = with_axis_value(base, axis, v);
            c.head = h;
            try {
                c.validate();
            } catch (const std::invalid_argument& ex) {
                throw std::invalid_argument("invalid " + to_string(axis) + " value " + format_double(v) + ": " + ex.what());
            }
            configs.push_back(std::move(c));
        }
    }

    SweepTable table;
    table.axis = axis;
    table.axis_values = values;
    table.runs.resize(configs.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                table.runs[i] = train(configs[i], data);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, configs.size());
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (const char* metric : {"NMI", "ACC"}) {
        const std::size_t first = table.rows.size();
        for (std::size_t h = 0; h < heads.size(); ++h) {
            SweepRow row;
            row.dataset = data.name;
            row.head = heads[h];
            row.metric = metric;
            for (std::size_t v = 0; v < values.size(); ++v) {
                const auto& run = table.runs[v * heads.size() + h];
                const double value = !run.report ? NAN : (metric[0] == 'N' ? run.report->nmi : run.report->acc);
                row.values.push_back(value);
            }
            row.best.assign(values.size(), false);
            table.rows.push_back(std::move(row));
        }
        double best = -INFINITY;
        std::size_t br = 0, bc = 0;
        for (std::size_t r = first; r < table.rows.size(); ++r)
            for (std::size_t c = 0; c < values.size(); ++c)
                if (table.rows[r].values[c] > best) {
                    best = table.rows[r].values[c];
                    br = r;
                    bc = c;
                }
        if (std::isfinite(best)) table.rows[br].best[bc] = true;
    }
    return table;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

namespace {

double parse_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("bad number '" + s + "' in sweep CSV");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string sweep_to_csv(const SweepTable& table) {
    std::string out = "dataset,head,metric";
    for (double v : table.axis_values) out += "," + format_double(v);
    out += "\n";
    for (const auto& row : table.rows) {
        out += row.dataset + "," + to_string(row.head) + "," + row.metric;
        for (std::size_t c = 0; c < row.values.size(); ++c) {
            out += "," + format_double(row.values[c]);
            if (row.best[c]) out += "*";
        }
        out += "\n";
    }
    return out;
}

SweepTable parse_sweep_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty sweep CSV");
    const auto header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "dataset" || header[1] != "head" || header[2] != "metric") {
        throw std::invalid_argument("sweep CSV header must start with dataset,head,metric");
    }
    SweepTable table;
    for (std::size_t i = 3; i < header.size(); ++i) table.axis_values.push_back(parse_double(header[i]));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) throw std::invalid_argument("sweep CSV row has wrong column count");
        SweepRow row;
        row.dataset = cells[0];
        row.head = parse_head(cells[1]);
        row.metric = cells[2];
        for (std::size_t i = 3; i < cells.size(); ++i) {
            std::string cell = cells[i];
            const bool best = !cell.empty() && cell.back() == '*';
            if (best) cell.pop_back();
            row.values.push_back(parse_double(cell));
            row.best.push_back(best);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

// ---------------------------------------------------------------------------

Matrix blob_centers(const BlobSpec& spec) {
    if (spec.blobs == 0 || spec.dim == 0) throw std::invalid_argument("blobs: counts must be positive");
    Rng rng(derive_seed(spec.seed, 0xb10b));
    Matrix centers(spec.blobs, spec.dim);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        for (double& v : centers.data()) v = rng.normal();
        bool ok = true;
        for (std::size_t a = 0; a < spec.blobs && ok; ++a)
            for (std::size_t b = a + 1; b < spec.blobs && ok; ++b)
                ok = std::sqrt(squared_distance(centers.row(a), centers.row(b))) >= spec.min_separation;
        if (ok) return centers;
    }
    throw std::invalid_argument("blobs: could not place centers at the requested separation");
}

TrainData make_blobs(const BlobSpec& spec) {
    const Matrix centers = blob_centers(spec);
    Rng rng(derive_seed(spec.seed, 0xda7a));
    TrainData data;
    data.name = "blobs";
    Matrix points(spec.points, spec.dim);
    for (std::size_t i = 0; i < spec.points; ++i) {
        const std::size_t c = i % spec.blobs;
        for (std::size_t j = 0; j < spec.dim; ++j) points(i, j) = centers(c, j) + spec.sigma * rng.normal();
        data.labels.push_back(static_cast<int>(c));
    }
    data.embeddings = std::move(points);
    return data;
}

}  // namespace textclust
