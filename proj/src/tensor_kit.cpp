#include "qmoduli/tensor_kit.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qm {

int SlotSpace::total() const {
    int d = 1;
    for (int x : dims) {
        if (x <= 0) throw DimensionError("slot dimension must be positive");
        d *= x;
    }
    return d;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat kron(const std::vector<Mat>& factors) {
    Mat out = Mat::Identity(1, 1);
    for (const auto& f : factors) out = kron(out, f);
    return out;
}

Mat identity(int n) { return Mat::Identity(n, n); }

namespace {

std::vector<int> strides_of(const std::vector<int>& dims) {
    std::vector<int> s(dims.size(), 1);
    for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * dims[i + 1];
    return s;
}

}  // namespace

Mat embed(const Mat& op, const std::vector<int>& slots, const SlotSpace& space) {
    const int n = static_cast<int>(space.dims.size());
    const int D = space.total();
    int dop = 1;
    std::vector<bool> used(n, false);
    for (int s : slots) {
        if (s < 0 || s >= n) throw DimensionError("slot index out of range");
        if (used[s]) throw DimensionError("repeated slot index");
        used[s] = true;
        dop *= space.dims[s];
    }
    if (op.rows() != dop || op.cols() != dop)
        throw DimensionError("operator dimension " + std::to_string(op.rows()) +
                             " does not match slots (" + std::to_string(dop) + ")");

    const auto stride = strides_of(space.dims);
    // offset of each op-basis index inside the full index, and of each
    // complementary basis index
    std::vector<int> op_off(dop, 0);
    {
        std::vector<int> sub_dims;
        for (int s : slots) sub_dims.push_back(space.dims[s]);
        const auto sub_stride = strides_of(sub_dims);
        for (int a = 0; a < dop; ++a) {
            int off = 0;
            for (std::size_t t = 0; t < slots.size(); ++t)
                off += ((a / sub_stride[t]) % sub_dims[t]) * stride[slots[t]];
            op_off[a] = off;
        }
    }
    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
        if (!used[i]) rest.push_back(i);
    int drest = 1;
    for (int i : rest) drest *= space.dims[i];
    std::vector<int> rest_off(drest, 0);
    {
        std::vector<int> rd;
        for (int i : rest) rd.push_back(space.dims[i]);
        const auto rs = strides_of(rd);
        for (int b = 0; b < drest; ++b) {
            int off = 0;
            for (std::size_t t = 0; t < rest.size(); ++t)
                off += ((b / rs[t]) % rd[t]) * stride[rest[t]];
            rest_off[b] = off;
        }
    }

    Mat out = Mat::Zero(D, D);
    for (int b = 0; b < drest; ++b)
        for (int j = 0; j < dop; ++j)
            for (int i = 0; i < dop; ++i) {
                const cplx v = op(i, j);
                if (v != cplx(0.0)) out(rest_off[b] + op_off[i], rest_off[b] + op_off[j]) = v;
            }
    return out;
}

Mat partial_trace(const Mat& op, int slot, const SlotSpace& space) {
    const int D = space.total();
    const int n = static_cast<int>(space.dims.size());
    if (op.rows() != D || op.cols() != D) throw DimensionError("operator does not act on space");
    if (slot < 0 || slot >= n) throw DimensionError("slot index out of range");
    const int d = space.dims[slot];
    const auto stride = strides_of(space.dims);
    const int outer = D / (d * stride[slot]);
    const int inner = stride[slot];
    const int Dr = D / d;
    Mat out = Mat::Zero(Dr, Dr);
    // full index = (o * d + s) * inner + i ; reduced index = o * inner + i
    for (int o1 = 0; o1 < outer; ++o1)
        for (int i1 = 0; i1 < inner; ++i1)
            for (int o2 = 0; o2 < outer; ++o2)
                for (int i2 = 0; i2 < inner; ++i2) {
                    cplx acc = 0.0;
                    for (int s = 0; s < d; ++s)
                        acc += op((o1 * d + s) * inner + i1, (o2 * d + s) * inner + i2);
                    out(o1 * inner + i1, o2 * inner + i2) = acc;
                }
    return out;
}

Mat flip(int d1, int d2) {
    Mat p = Mat::Zero(d1 * d2, d1 * d2);
    for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d2; ++b) p(b * d1 + a, a * d2 + b) = 1.0;
    return p;
}

double proportionality_residual(const Mat& a, const Mat& b, cplx* ratio) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("shape mismatch");
    const double bb = b.squaredNorm();
    if (bb == 0.0) return std::numeric_limits<double>::infinity();
    const cplx lam = (b.adjoint() * a).trace() / bb;
    if (ratio) *ratio = lam;
    const double scale = std::abs(lam) * std::sqrt(bb);
    if (scale == 0.0) return std::numeric_limits<double>::infinity();
    return (a - lam * b).norm() / scale;
}

std::optional<cplx> proportional(const Mat& a, const Mat& b, const Tolerance& tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("shape mismatch");
    const double bb = b.squaredNorm();
    if (bb == 0.0) throw std::invalid_argument("proportional: reference matrix vanishes");
    const cplx lam = (b.adjoint() * a).trace() / bb;
    const double r = (a - lam * b).norm();
    if (r <= tol.rel_eps * std::sqrt(bb) * std::abs(lam) + tol.abs_eps) return lam;
    return std::nullopt;
}

double relative_residual(const Mat& a, const Mat& b) {
    return (a - b).norm() / std::max(1.0, b.norm());
}

std::vector<Eigenprojector> simultaneous_eigenprojectors(const Mat& op, const Tolerance& tol,
                                                         double cluster_gap) {
    const Eigen::Index n = op.rows();
    const double scale = std::max(1.0, op.norm());
    if ((op * op.adjoint() - op.adjoint() * op).norm() > tol.rel_eps * scale * scale + tol.abs_eps)
        throw std::domain_error("simultaneous_eigenprojectors: operator is not normal");
    // For a normal matrix the complex Schur form is diagonal and the Schur
    // vectors are an orthonormal eigenbasis.
    Eigen::ComplexSchur<Mat> schur(op);
    const Mat& U = schur.matrixU();
    const Mat& T = schur.matrixT();
    std::vector<Eigenprojector> out;
    std::vector<std::vector<int>> members;
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx ev = T(i, i);
        bool placed = false;
        for (std::size_t c = 0; c < out.size(); ++c)
            if (std::abs(out[c].value - ev) < cluster_gap) {
                members[c].push_back(static_cast<int>(i));
                placed = true;
                break;
            }
        if (!placed) {
            out.push_back({ev, Mat()});
            members.push_back({static_cast<int>(i)});
        }
    }
    for (std::size_t c = 0; c < out.size(); ++c) {
        Mat P = Mat::Zero(n, n);
        cplx mean = 0.0;
        for (int i : members[c]) {
            P += U.col(i) * U.col(i).adjoint();
            mean += T(i, i);
        }
        out[c].value = mean / static_cast<double>(members[c].size());
        out[c].projector = P;
    }
    std::sort(out.begin(), out.end(), [](const Eigenprojector& x, const Eigenprojector& y) {
        if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
        return x.value.imag() < y.value.imag();
    });
    return out;
}

bool all_finite(const Mat& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

}  // namespace qm
