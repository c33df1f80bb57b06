#include "textclust/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "textclust/rng.hpp"

namespace textclust {

std::string to_string(HeadKind kind) {
    switch (kind) {
        case HeadKind::kmeans: return "kmeans";
        case HeadKind::kmeansr: return "kmeansr";
        case HeadKind::som: return "som";
        case HeadKind::somr: return "somr";
        case HeadKind::label_as_rep: return "label-as-rep";
    }
    return "unknown";
}

HeadKind parse_head(const std::string& name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "kmeans") return HeadKind::kmeans;
    if (s == "kmeansr") return HeadKind::kmeansr;
    if (s == "som") return HeadKind::som;
    if (s == "somr") return HeadKind::somr;
    if (s == "label-as-rep" || s == "label_as_rep") return HeadKind::label_as_rep;
    throw std::invalid_argument("unknown head '" + name + "' (expected kmeans, kmeansr, som, somr, label-as-rep)");
}

bool uses_projection(HeadKind kind) {
    return kind == HeadKind::kmeansr || kind == HeadKind::somr || kind == HeadKind::label_as_rep;
}

bool is_som(HeadKind kind) { return kind == HeadKind::som || kind == HeadKind::somr; }

Vector unit_normalize(std::span<const double> v) {
    const double n = norm2(v);
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("cannot normalize a zero vector");
    Vector out(v.begin(), v.end());
    for (double& x : out) x /= n;
    return out;
}

Matrix normalize_rows(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto u = unit_normalize(m.row(i));
        std::copy(u.begin(), u.end(), out.row(i).begin());
    }
    return out;
}

HardAssignment label_as_representation(const Matrix& projected) {
    HardAssignment out;
    out.k = static_cast<int>(projected.cols());
    out.labels.reserve(projected.rows());
    for (std::size_t i = 0; i < projected.rows(); ++i) {
        auto r = projected.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < r.size(); ++j)
            if (r[best] < r[j]) best = j;
        out.labels.push_back(static_cast<int>(best));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::size_t nearest_centroid(std::span<const double> point, const Matrix& centroids) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double d = squared_distance(point, centroids.row(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

double within_cluster_sse(const Matrix& z, const Matrix& centroids, const std::vector<int>& labels) {
    double sse = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) sse += squared_distance(z.row(i), centroids.row(labels[i]));
    return sse;
}

KMeansResult kmeans_from(const Matrix& z, const Matrix& initial, std::size_t max_iter) {
    const std::size_t n = z.rows();
    const std::size_t k = initial.rows();
    if (k == 0) throw std::invalid_argument("kmeans: need at least one centroid");
    if (k > n) throw std::invalid_argument("kmeans: K=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
    if (initial.cols() != z.cols()) throw std::invalid_argument("kmeans: centroid dimension mismatch");
    if (max_iter == 0) throw std::invalid_argument("kmeans: max_iter must be positive");

    KMeansResult res;
    res.centroids = initial;
    res.assignment.k = static_cast<int>(k);
    res.assignment.labels.assign(n, -1);
    std::vector<std::size_t> counts(k);

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const int c = static_cast<int>(nearest_centroid(z.row(i), res.centroids));
            if (c != res.assignment.labels[i]) {
                res.assignment.labels[i] = c;
                changed = true;
            }
        }
        if (!changed) break;

        Matrix sums(k, z.cols());
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(res.assignment.labels[i]);
            axpy(1.0, z.row(i), sums.row(c));
            ++counts[c];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (double& v : sums.row(c)) v /= static_cast<double>(counts[c]);
        }
        // Empty clusters are re-seeded at the point farthest from its own centroid.
        std::vector<bool> taken(n, false);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i]) continue;
                const double d = squared_distance(z.row(i), sums.row(res.assignment.labels[i]));
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            taken[far] = true;
            std::copy(z.row(far).begin(), z.row(far).end(), sums.row(c).begin());
        }
        res.centroids = std::move(sums);
        res.sse_trace.push_back(within_cluster_sse(z, res.centroids, res.assignment.labels));
        ++res.iterations;
    }
    res.sse = within_cluster_sse(z, res.centroids, res.assignment.labels);
    return res;
}

KMeansResult kmeans(const Matrix& z, std::size_t k, const KMeansOptions& options, std::uint64_t seed) {
    const std::size_t n = z.rows();
    if (k == 0) throw std::invalid_argument("kmeans: K must be at least 1");
    if (k > n) throw std::invalid_argument("kmeans: K=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
    const std::size_t restarts = std::max<std::size_t>(1, options.restarts);

    std::optional<KMeansResult> best;
    Rng rng(seed);
    std::vector<std::size_t> idx(n);
    for (std::size_t r = 0; r < restarts; ++r) {
        // K distinct samples by partial Fisher-Yates
        std::iota(idx.begin(), idx.end(), 0);
        Matrix init(k, z.cols());
        for (std::size_t c = 0; c < k; ++c) {
            const std::size_t j = c + rng.below(n - c);
            std::swap(idx[c], idx[j]);
            std::copy(z.row(idx[c]).begin(), z.row(idx[c]).end(), init.row(c).begin());
        }
        auto res = kmeans_from(z, init, options.max_iter);
        if (!best || res.sse < best->sse) best = std::move(res);
    }
    return std::move(*best);
}

KMeansResult kmeans(const Matrix& z, std::size_t k, std::size_t max_iter, std::uint64_t seed) {
    return kmeans(z, k, KMeansOptions{max_iter, 1}, seed);
}

// ---------------------------------------------------------------------------

void SomConfig::validate() const {
    if (rows == 0 || cols == 0) throw std::invalid_argument("som: grid dimensions must be positive");
    if (iterations == 0) throw std::invalid_argument("som: iterations must be positive");
    if (!(alpha0 > 0.0 && alpha0 <= 1.0)) throw std::invalid_argument("som: alpha0 must lie in (0, 1]");
    if (!(delta0 > 0.0)) throw std::invalid_argument("som: delta0 must be positive");
}

std::pair<std::size_t, std::size_t> SomGrid::position(std::size_t index) const {
    return {index / config.cols, index % config.cols};
}

double SomGrid::lattice_sqdist(std::size_t a, std::size_t b) const {
    const auto [ra, ca] = position(a);
    const auto [rb, cb] = position(b);
    const double dr = static_cast<double>(ra) - static_cast<double>(rb);
    const double dc = static_cast<double>(ca) - static_cast<double>(cb);
    return dr * dr + dc * dc;
}

double som_neighborhood(double rate, double lattice_sqdist, double width) {
    return rate * std::exp(-lattice_sqdist / (2.0 * width));
}

double som_learning_rate(double alpha0, std::size_t t, std::size_t total) {
    return alpha0 * (1.0 - static_cast<double>(t) / static_cast<double>(total));
}

double som_width(double delta0, std::size_t t, std::size_t total) {
    return delta0 * (1.0 - static_cast<double>(t) / static_cast<double>(total)) + 0.01;
}

std::size_t som_winner(std::span<const double> z, const Matrix& weights) {
    return nearest_centroid(z, weights);
}

SomGrid som_init(std::size_t dim, const SomConfig& config, std::uint64_t seed) {
    config.validate();
    if (dim == 0) throw std::invalid_argument("som: dimension must be positive");
    SomGrid grid;
    grid.config = config;
    grid.weights = Matrix(config.neurons(), dim);
    Rng rng(seed);
    for (std::size_t u = 0; u < config.neurons(); ++u) {
        auto w = grid.weights.row(u);
        double nrm = 0.0;
        while (nrm == 0.0) {
            for (double& x : w) x = rng.normal();
            nrm = norm2(w);
        }
        for (double& x : w) x /= nrm;
    }
    return grid;
}

SomFitResult som_fit_from(const Matrix& z, SomGrid grid, const SomObserver& observer) {
    grid.config.validate();
    if (z.rows() == 0) throw std::invalid_argument("som: empty input");
    if (grid.weights.cols() != z.cols() || grid.weights.rows() != grid.config.neurons()) {
        throw std::invalid_argument("som: weight matrix does not match grid or input dimension");
    }
    const Matrix data = normalize_rows(z);
    const std::size_t total = grid.config.iterations;
    const std::size_t neurons = grid.config.neurons();

    SomFitResult res;
    res.quantization_error.reserve(total);
    for (std::size_t t = 0; t < total; ++t) {
        const double rate = som_learning_rate(grid.config.alpha0, t, total);
        const double width = som_width(grid.config.delta0, t, total);
        double qe = 0.0;
        for (std::size_t i = 0; i < data.rows(); ++i) {
            auto x = data.row(i);
            const std::size_t winner = som_winner(x, grid.weights);
            qe += std::sqrt(squared_distance(x, grid.weights.row(winner)));
            for (std::size_t u = 0; u < neurons; ++u) {
                const double h = som_neighborhood(rate, grid.lattice_sqdist(winner, u), width);
                auto w = grid.weights.row(u);
                Vector updated(w.begin(), w.end());
                for (std::size_t j = 0; j < updated.size(); ++j) updated[j] += h * (x[j] - updated[j]);
                const double nrm = norm2(updated);
                if (nrm > 1e-12) {
                    for (std::size_t j = 0; j < updated.size(); ++j) w[j] = updated[j] / nrm;
                }
            }
            if (observer) observer(grid);
        }
        res.quantization_error.push_back(qe / static_cast<double>(data.rows()));
    }
    res.assignment = som_assign(data, grid);
    res.grid = std::move(grid);
    return res;
}

SomFitResult som_fit(const Matrix& z, const SomConfig& config, std::uint64_t seed, const SomObserver& observer) {
    return som_fit_from(z, som_init(z.cols(), config, seed), observer);
}

HardAssignment som_assign(const Matrix& z, const SomGrid& grid) {
    const Matrix data = normalize_rows(z);
    HardAssignment out;
    out.k = static_cast<int>(grid.config.neurons());
    out.labels.reserve(data.rows());
    // label = row·N + col, which is the row-major neuron index
    for (std::size_t i = 0; i < data.rows(); ++i)
        out.labels.push_back(static_cast<int>(som_winner(data.row(i), grid.weights)));
    return out;
}

// ---------------------------------------------------------------------------

Centroids centroids_of(const HeadFit& fit) {
    Centroids out;
    out.origin = fit.kind;
    switch (fit.kind) {
        case HeadKind::kmeans:
        case HeadKind::kmeansr:
            if (!fit.kmeans) throw std::logic_error("centroids_of: k-means head has not been fitted");
            out.values = fit.kmeans->centroids;
            break;
        case HeadKind::som:
        case HeadKind::somr:
            if (!fit.som) throw std::logic_error("centroids_of: SOM head has not been fitted");
            out.values = fit.som->grid.weights;
            break;
        case HeadKind::label_as_rep:
            if (fit.projected_dim == 0) throw std::logic_error("centroids_of: label-as-representation head has not been fitted");
            out.values = Matrix::identity(fit.projected_dim);
            break;
    }
    return out;
}

}  // namespace textclust
