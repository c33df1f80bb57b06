#include "textclust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace textclust {

namespace {

void check_labels(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size()) {
        throw std::invalid_argument("label length mismatch: " + std::to_string(pred.size()) + " predicted vs " +
                                    std::to_string(truth.size()) + " true");
    }
    if (pred.empty()) throw std::invalid_argument("cannot evaluate an empty labeling");
    auto negative = [](int v) { return v < 0; };
    if (std::any_of(pred.begin(), pred.end(), negative) || std::any_of(truth.begin(), truth.end(), negative)) {
        throw std::invalid_argument("labels must be non-negative");
    }
}

}  // namespace

CountMatrix confusion_matrix(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_labels(pred, truth);
    const auto kp = static_cast<std::size_t>(*std::max_element(pred.begin(), pred.end())) + 1;
    const auto kt = static_cast<std::size_t>(*std::max_element(truth.begin(), truth.end())) + 1;
    CountMatrix c(kp, std::vector<long long>(kt, 0));
    for (std::size_t i = 0; i < pred.size(); ++i) ++c[pred[i]][truth[i]];
    return c;
}

// Shortest augmenting path formulation with row/column potentials, O(n^3).
std::vector<std::size_t> hungarian_min_cost(const Matrix& cost) {
    const std::size_t n = cost.rows();
    if (cost.cols() != n) throw std::invalid_argument("hungarian: cost matrix must be square");
    if (n == 0) return {};
    const double inf = std::numeric_limits<double>::infinity();

    // 1-based internally; column 0 is a virtual source
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::size_t> assignment(n);
    for (std::size_t j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
    return assignment;
}

AccuracyResult clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    const auto conf = confusion_matrix(pred, truth);
    const std::size_t kp = conf.size();
    const std::size_t kt = conf.front().size();
    const std::size_t k = std::max(kp, kt);

    Matrix cost(k, k);
    for (std::size_t r = 0; r < kp; ++r)
        for (std::size_t c = 0; c < kt; ++c) cost(r, c) = -static_cast<double>(conf[r][c]);
    const auto assignment = hungarian_min_cost(cost);

    AccuracyResult out;
    out.mapping.assign(kp, -1);
    long long matched = 0;
    for (std::size_t r = 0; r < kp; ++r) {
        if (assignment[r] < kt) {
            out.mapping[r] = static_cast<int>(assignment[r]);
            matched += conf[r][assignment[r]];
        }
    }
    out.acc = static_cast<double>(matched) / static_cast<double>(pred.size());
    return out;
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
    const auto conf = confusion_matrix(pred, truth);
    const double n = static_cast<double>(pred.size());
    std::vector<double> rows(conf.size(), 0.0), cols(conf.front().size(), 0.0);
    for (std::size_t r = 0; r < conf.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            rows[r] += static_cast<double>(conf[r][c]);
            cols[c] += static_cast<double>(conf[r][c]);
        }
    }
    auto h = [n](const std::vector<double>& counts) {
        double s = 0.0;
        for (double c : counts)
            if (c > 0) s -= (c / n) * std::log(c / n);
        return s;
    };
    const double hp = h(rows);
    const double ht = h(cols);
    if (hp + ht == 0.0) return 1.0;

    double mi = 0.0;
    for (std::size_t r = 0; r < conf.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (conf[r][c] == 0) continue;
            const double pxy = static_cast<double>(conf[r][c]) / n;
            mi += pxy * std::log(pxy * n * n / (rows[r] * cols[c]));
        }
    }
    return std::clamp(2.0 * mi / (hp + ht), 0.0, 1.0);
}

EvalReport evaluate(const std::vector<int>& pred, const std::vector<int>& truth) {
    EvalReport r;
    const auto acc = clustering_accuracy(pred, truth);
    r.acc = acc.acc;
    r.mapping = acc.mapping;
    r.nmi = nmi(pred, truth);
    r.n = pred.size();
    r.confusion = confusion_matrix(pred, truth);
    return r;
}

}  // namespace textclust
