#pragma once
// Torus Verlinde representation from closed-form modular data, and the
// comparison with the genus-one graph-algebra family.

#include <string>

#include "qmoduli/graph_algebra.hpp"

namespace qm {

struct TorusRep {
    int k = 1;
    int tau = 1;
    Mat S;
    Mat W_a, W_b;           // Wilson loops along a and b
    Mat v_alpha, v_beta;    // Dehn twists
};
// v_alpha = diag(theta_j^dir), v_beta = S v_alpha S^-1
TorusRep torus_rep(const LevelData& ctx, int tau, int dir = +1);

struct TorusReport {
    int k = 1;
    double braid = 0.0;      // v_a v_b v_a ~ v_b v_a v_b
    double sprime2 = 0.0;    // S'^2 ~ 1
    double sprime4 = 0.0;    // S'^4 ~ 1
    double s_match = 0.0;    // S' ~ S
    double unitarity = 0.0;  // |U^H U - 1| for both twists
    double spectrum = 0.0;   // W_a against the eigenvalues of tr_q(M)
    bool pass = false;
};
TorusReport check_torus_mcg(const LevelData& ctx, int tau, int dir = +1);

// Matrix of a twist word in a, b letters (a1/b1 accepted) on the torus.
Mat torus_word(const TorusRep& t, const TwistWord& w);

struct CrosscheckReport {
    bool available = false;
    std::string reason;
    FlatnessReport flatness;
    double alpha = 0.0, beta = 0.0;
    bool pass = false;
};
CrosscheckReport crosscheck_graph_vs_modular(const LevelData& ctx, const ConventionReport& conv, int aux = 1);

}  // namespace qm
