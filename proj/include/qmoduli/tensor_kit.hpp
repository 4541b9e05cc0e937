#pragma once
// Dense complex linear algebra on labeled tensor slots.
//
// Kronecker convention: the index of (i, j) in A (x) B is i * dim(B) + j.
// Every slot computation in the library depends on it.

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qm {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct Tolerance {
    double rel_eps = 1e-9;
    double abs_eps = 1e-12;
};

struct SlotSpace {
    std::vector<int> dims;
    int total() const;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

Mat kron(const Mat& a, const Mat& b);
Mat kron(const std::vector<Mat>& factors);
Mat identity(int n);

// op acts on the listed slots, in the listed order; identity elsewhere.
Mat embed(const Mat& op, const std::vector<int>& slots, const SlotSpace& space);

Mat partial_trace(const Mat& op, int slot, const SlotSpace& space);

// Permutation matrix V_{d1} (x) V_{d2} -> V_{d2} (x) V_{d1}.
Mat flip(int d1, int d2);

// lambda = tr(b^H a) / tr(b^H b) when a is that multiple of b within tol.
std::optional<cplx> proportional(const Mat& a, const Mat& b, const Tolerance& tol);

// Relative distance of a from the line through b: min_l |a - l b| / |l b|.
// Returns +inf when b vanishes or a is orthogonal to b.
double proportionality_residual(const Mat& a, const Mat& b, cplx* ratio = nullptr);

// |a - b|_F / |b|_F, with the denominator floored at 1.
double relative_residual(const Mat& a, const Mat& b);

struct Eigenprojector {
    cplx value;
    Mat projector;
};

// Orthogonal spectral projectors of a normal operator. Eigenvalues closer
// than cluster_gap are merged.
std::vector<Eigenprojector> simultaneous_eigenprojectors(const Mat& op, const Tolerance& tol,
                                                         double cluster_gap = 1e-6);

bool all_finite(const Mat& m);

}  // namespace qm
