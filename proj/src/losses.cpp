#include "textclust/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace textclust {

void check_tau(double tau) {
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sa = std::max(sa, std::abs(a[i]));
        sb = std::max(sb, std::abs(b[i]));
    }
    if (sa == 0.0 || sb == 0.0) throw std::invalid_argument("zero vector in cosine");
    double d = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i] / sa, y = b[i] / sb;
        d += x * y;
        na += x * x;
        nb += y * y;
    }
    return std::clamp(d / std::sqrt(na * nb), -1.0, 1.0);
}

ContrastiveResult contrastive_loss(const Matrix& z1, const Matrix& z2, double tau) {
    check_tau(tau);
    if (z1.rows() == 0) throw std::invalid_argument("contrastive_loss: empty batch");
    if (z1.rows() != z2.rows() || z1.cols() != z2.cols()) {
        throw std::invalid_argument("contrastive_loss: view matrices differ in shape");
    }
    const std::size_t n = z1.rows();
    const std::size_t views = 2 * n;
    const std::size_t d = z1.cols();

    Matrix unit(views, d);
    std::vector<double> norms(views);
    for (std::size_t i = 0; i < views; ++i) {
        auto src = i < n ? z1.row(i) : z2.row(i - n);
        norms[i] = norm2(src);
        if (norms[i] == 0.0 || !std::isfinite(norms[i])) throw std::invalid_argument("zero vector in cosine");
        for (std::size_t j = 0; j < d; ++j) unit(i, j) = src[j] / norms[i];
    }
    const Matrix sim = matmul_nt(unit, unit);
    auto positive = [n](std::size_t i) { return i < n ? i + n : i - n; };

    // weight(i, j) = d(loss)/d(s_ij) as seen from view i's term
    Matrix weight(views, views);
    double total = 0.0;
    for (std::size_t i = 0; i < views; ++i) {
        double mx = -INFINITY;
        for (std::size_t j = 0; j < views; ++j)
            if (j != i) mx = std::max(mx, sim(i, j) / tau);
        double z = 0.0;
        for (std::size_t j = 0; j < views; ++j)
            if (j != i) z += std::exp(sim(i, j) / tau - mx);
        const double lse = mx + std::log(z);
        const std::size_t pos = positive(i);
        total += lse - sim(i, pos) / tau;
        for (std::size_t j = 0; j < views; ++j) {
            if (j == i) continue;
            const double prob = std::exp(sim(i, j) / tau - lse);
            weight(i, j) = (prob - (j == pos ? 1.0 : 0.0)) / (tau * static_cast<double>(views));
        }
    }

    ContrastiveResult out;
    out.loss = total / static_cast<double>(views);
    out.grad_z1 = Matrix(n, d);
    out.grad_z2 = Matrix(n, d);
    Vector grad_unit(d);
    for (std::size_t i = 0; i < views; ++i) {
        std::fill(grad_unit.begin(), grad_unit.end(), 0.0);
        for (std::size_t j = 0; j < views; ++j) {
            if (j == i) continue;
            axpy(weight(i, j) + weight(j, i), unit.row(j), grad_unit);
        }
        // project out the radial component of z/|z|
        const double radial = dot(unit.row(i), grad_unit);
        auto dst = i < n ? out.grad_z1.row(i) : out.grad_z2.row(i - n);
        for (std::size_t k = 0; k < d; ++k) dst[k] = (grad_unit[k] - radial * unit(i, k)) / norms[i];
    }
    return out;
}

SoftAssignment soft_assign(const Matrix& embeddings, const Matrix& centroids, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("soft_assign: alpha must be positive");
    if (centroids.rows() < 2) throw std::invalid_argument("soft_assign: need at least 2 centroids");
    if (embeddings.cols() != centroids.cols()) throw std::invalid_argument("soft_assign: dimension mismatch");

    const double power = -(alpha + 1.0) / 2.0;
    SoftAssignment out;
    out.alpha = alpha;
    out.q = Matrix(embeddings.rows(), centroids.rows());
    for (std::size_t j = 0; j < embeddings.rows(); ++j) {
        double z = 0.0;
        for (std::size_t k = 0; k < centroids.rows(); ++k) {
            const double dist = squared_distance(embeddings.row(j), centroids.row(k));
            if (!std::isfinite(dist)) throw std::invalid_argument("soft_assign: non-finite distance in row " + std::to_string(j));
            const double w = std::pow(1.0 + dist / alpha, power);
            out.q(j, k) = w;
            z += w;
        }
        for (double& v : out.q.row(j)) v /= z;
    }
    return out;
}

TargetDistribution target_distribution(const SoftAssignment& q) {
    const std::size_t n = q.q.rows();
    const std::size_t k = q.q.cols();
    TargetDistribution out;
    out.f.assign(k, 0.0);
    for (std::size_t j = 0; j < n; ++j) axpy(1.0, q.q.row(j), out.f);
    for (double f : out.f)
        if (!(f > 0.0)) throw std::invalid_argument("empty soft cluster");

    out.p = Matrix(n, k);
    for (std::size_t j = 0; j < n; ++j) {
        double z = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            const double v = q.q(j, c) * q.q(j, c) / out.f[c];
            out.p(j, c) = v;
            z += v;
        }
        for (double& v : out.p.row(j)) v /= z;
    }
    return out;
}

double kl_divergence(const Matrix& p, const Matrix& q) {
    if (p.rows() != q.rows() || p.cols() != q.cols()) throw std::invalid_argument("kl: shape mismatch between P and Q");
    if (p.rows() == 0) throw std::invalid_argument("kl: empty batch");
    double total = 0.0;
    for (std::size_t j = 0; j < p.rows(); ++j) {
        double row = 0.0;
        for (std::size_t k = 0; k < p.cols(); ++k) {
            const double pv = p(j, k);
            if (pv <= 0.0) continue;
            row += pv * std::log(pv / std::max(q(j, k), kProbFloor));
        }
        total += std::max(row, 0.0);
    }
    return total / static_cast<double>(p.rows());
}

KlResult kl_cluster_loss(const TargetDistribution& p, const SoftAssignment& q, const Matrix& embeddings,
                         const Matrix& centroids) {
    const std::size_t n = q.q.rows();
    const std::size_t k = q.q.cols();
    require_shape(p.p, n, k, "kl_cluster_loss: P");
    require_shape(embeddings, n, centroids.cols(), "kl_cluster_loss: embeddings");
    require_shape(centroids, k, embeddings.cols(), "kl_cluster_loss: centroids");

    KlResult out;
    out.loss = kl_divergence(p.p, q.q);
    out.grad_embeddings = Matrix(n, embeddings.cols());
    out.grad_centroids = Matrix(k, centroids.cols());

    const double alpha = q.alpha;
    const double coeff = (alpha + 1.0) / alpha / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        auto e = embeddings.row(j);
        auto ge = out.grad_embeddings.row(j);
        for (std::size_t c = 0; c < k; ++c) {
            auto mu = centroids.row(c);
            const double dist = squared_distance(e, mu);
            const double w = coeff * (p.p(j, c) - q.q(j, c)) / (1.0 + dist / alpha);
            auto gc = out.grad_centroids.row(c);
            for (std::size_t t = 0; t < e.size(); ++t) {
                const double g = w * (e[t] - mu[t]);
                ge[t] += g;
                gc[t] -= g;
            }
        }
    }
    return out;
}

LossBreakdown total_loss(double contrastive, double clustering, double tau) {
    if (!std::isfinite(contrastive) || !std::isfinite(clustering)) throw std::invalid_argument("total_loss: non-finite term");
    return {contrastive, clustering, contrastive + clustering, tau};
}

double entropy(std::span<const double> p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

}  // namespace textclust
