#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "textclust/matrix.hpp"

namespace textclust {

enum class HeadKind { kmeans, kmeansr, som, somr, label_as_rep };

std::string to_string(HeadKind kind);
HeadKind parse_head(const std::string& name);
// R variants and plain label-as-representation cluster a K-dim projection.
bool uses_projection(HeadKind kind);
bool is_som(HeadKind kind);

struct HardAssignment {
    std::vector<int> labels;
    int k = 0;

    friend bool operator==(const HardAssignment&, const HardAssignment&) = default;
};

struct Centroids {
    Matrix values;  // K×d
    HeadKind origin = HeadKind::kmeans;
};

// v / ||v||_2
Vector unit_normalize(std::span<const double> v);
Matrix normalize_rows(const Matrix& m);

// Row-wise argmax, lowest index on ties.
HardAssignment label_as_representation(const Matrix& projected);

// ---------------------------------------------------------------------------
// K-means (Lloyd)

struct KMeansResult {
    Matrix centroids;
    HardAssignment assignment;
    double sse = 0.0;
    std::size_t iterations = 0;
    // SSE after each assign+update step.
    std::vector<double> sse_trace;
};

struct KMeansOptions {
    std::size_t max_iter = 100;
    // Independent random initializations; the lowest final SSE wins.
    std::size_t restarts = 1;
};

KMeansResult kmeans(const Matrix& z, std::size_t k, std::size_t max_iter, std::uint64_t seed);
KMeansResult kmeans(const Matrix& z, std::size_t k, const KMeansOptions& options, std::uint64_t seed);
// Lloyd iterations starting from the given centroids.
KMeansResult kmeans_from(const Matrix& z, const Matrix& initial, std::size_t max_iter);

std::size_t nearest_centroid(std::span<const double> point, const Matrix& centroids);
double within_cluster_sse(const Matrix& z, const Matrix& centroids, const std::vector<int>& labels);

// ---------------------------------------------------------------------------
// Self-organizing map

struct SomConfig {
    std::size_t rows = 2;
    std::size_t cols = 2;
    std::size_t iterations = 20;  // T, passes over the data
    double alpha0 = 0.5;          // initial learning rate
    double delta0 = 1.0;          // initial neighborhood width

    std::size_t neurons() const { return rows * cols; }
    void validate() const;
    friend bool operator==(const SomConfig&, const SomConfig&) = default;
};

struct SomGrid {
    SomConfig config;
    Matrix weights;  // (rows·cols)×d, unit rows

    // Lattice position of neuron `index` (row-major).
    std::pair<std::size_t, std::size_t> position(std::size_t index) const;
    double lattice_sqdist(std::size_t a, std::size_t b) const;
};

struct SomFitResult {
    SomGrid grid;
    HardAssignment assignment;
    // Mean winner distance during each pass.
    std::vector<double> quantization_error;
};

// h = a · exp(-sqdist / (2δ))
double som_neighborhood(double rate, double lattice_sqdist, double width);
// α0 (1 - t/T), t counted from 0
double som_learning_rate(double alpha0, std::size_t t, std::size_t total);
// δ0 (1 - t/T) + 0.01
double som_width(double delta0, std::size_t t, std::size_t total);

// Neuron with the smallest squared distance, lowest index on ties.
std::size_t som_winner(std::span<const double> z, const Matrix& weights);

SomGrid som_init(std::size_t dim, const SomConfig& config, std::uint64_t seed);

using SomObserver = std::function<void(const SomGrid&)>;

// Online Kohonen training on unit-normalized rows of z. The observer, when
// set, is called after every per-sample weight update.
SomFitResult som_fit(const Matrix& z, const SomConfig& config, std::uint64_t seed, const SomObserver& observer = {});
SomFitResult som_fit_from(const Matrix& z, SomGrid grid, const SomObserver& observer = {});
HardAssignment som_assign(const Matrix& z, const SomGrid& grid);

// ---------------------------------------------------------------------------

struct HeadFit {
    HeadKind kind = HeadKind::kmeans;
    std::optional<KMeansResult> kmeans;
    std::optional<SomFitResult> som;
    std::size_t projected_dim = 0;  // label_as_rep only
};

// Centroids by head kind:
//   kmeans, kmeansr  Lloyd centroids
//   som, somr        neuron weights
//   label_as_rep     basis vectors of the projected space (nearest == argmax)
Centroids centroids_of(const HeadFit& fit);

}  // namespace textclust
