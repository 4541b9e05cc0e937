#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "qmoduli/graph_algebra.hpp"

namespace qm {

namespace {

constexpr double kMatchThreshold = 1e-6;
constexpr double kDiagonalizableTol = 1e-8;

struct Cluster {
    double chi;
    int label;
    cplx phase;
};

}  // namespace

TwistResult twist_from_trace(const LevelData& ctx, int aux, const Mat& Wp, int dir) {
    const int n = static_cast<int>(Wp.rows());
    Eigen::ComplexEigenSolver<Mat> es(Wp, false);
    if (es.info() != Eigen::Success) throw NotSemisimple("eigenvalue solver failed");
    const int max_label = 2 * ctx.k + 3;

    std::vector<Cluster> clusters;
    for (int i = 0; i < n; ++i) {
        const cplx e = es.eigenvalues()(i);
        std::vector<int> hits;
        for (int b = 0; b <= max_label; ++b)
            if (std::abs(character(ctx.k, aux, b) - e) < kMatchThreshold) hits.push_back(b);
        if (hits.empty())
            throw NotSemisimple("Wilson-loop eigenvalue " + std::to_string(e.real()) + "+" +
                                std::to_string(e.imag()) + "i matches no character");
        // labels with equal characters must carry the same twist
        const cplx ph = ribbon_phase(ctx, hits.front(), dir);
        for (int b : hits)
            if (std::abs(ribbon_phase(ctx, b, dir) - ph) > 1e-8)
                throw NotSemisimple("character collision with distinct twists");
        const double chi = character(ctx.k, aux, hits.front());
        bool seen = false;
        for (const auto& c : clusters)
            if (std::abs(c.chi - chi) < kMatchThreshold) seen = true;
        if (!seen) clusters.push_back({chi, hits.front(), ph});
    }
    std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) { return a.label < b.label; });

    const Mat I = identity(n);
    TwistResult out;
    out.v = Mat::Zero(n, n);
    Mat prod = I;
    for (const auto& c : clusters) {
        Mat P = I;
        for (const auto& o : clusters)
            if (&o != &c) P = P * (Wp - o.chi * I) / (c.chi - o.chi);
        out.v += c.phase * P;
        out.labels.push_back(c.label);
        prod = prod * (Wp - c.chi * I);
    }
    out.diagonalizable = prod.norm() / std::pow(std::max(1.0, Wp.norm()), static_cast<double>(clusters.size()));
    if (out.diagonalizable > kDiagonalizableTol)
        throw NotSemisimple("Wilson loop is not diagonalizable (residual " +
                            std::to_string(out.diagonalizable) + "); carrier is not semisimple");
    return out;
}

TwistResult twist_operator(const LevelData& ctx, const GeneratorFamily& f, const LoopWord& p) {
    const int aux = f.signature.aux;
    const Mat Mp = holonomy(f, p);
    SlotSpace rest{std::vector<int>(f.carrier.dims.begin() + 1, f.carrier.dims.end())};
    const Mat Wp = quantum_trace(ctx, aux, Mp, rest, f.conventions.balancing_power);
    return twist_from_trace(ctx, aux, Wp, f.conventions.ribbon_direction);
}

}  // namespace qm
