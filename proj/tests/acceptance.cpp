// Acceptance runner: one line per criterion, tolerances pinned below.
//
//   acceptance [--expect-fail 8,10]
//
// Exits 0 iff the set of failing criteria equals the expected set, so an
// unexpected pass is reported as loudly as an unexpected failure.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "qmoduli/modular_mcg.hpp"
#include "qmoduli/report.hpp"

using namespace qm;
namespace fs = std::filesystem;

namespace {

constexpr double kAlgebraTol = 1e-10;  // criteria 1-3
constexpr double kFusionTol = 1e-9;
constexpr double kFamilyTol = 1e-9;    // criteria 5-9
constexpr double kFlatTol = 1e-8;
constexpr double kWrongBalancingFloor = 0.1;
constexpr double kC1Seconds = 30.0;
constexpr double kC9Seconds = 5.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string sci(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", x);
    return b;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::vector<std::vector<int>> assignments(int k, int n) {
    std::vector<std::vector<int>> out{{}};
    for (int i = 0; i < n; ++i) {
        std::vector<std::vector<int>> next;
        for (const auto& a : out)
            for (int s : {1, 2})
                if (s <= k) {
                    auto b = a;
                    b.push_back(s);
                    next.push_back(b);
                }
        out = next;
    }
    return out;
}

fs::path workdir() {
    static const fs::path d = [] {
        auto p = fs::temp_directory_path() / ("qmoduli_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return d;
}

int workbench(const std::string& args) {
    const std::string cmd = "cd '" + workdir().string() + "' && '" WORKBENCH_EXE "' " + args + " 2>/dev/null";
    const int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// ---- criteria ----

Outcome c1() {
    const auto t0 = std::chrono::steady_clock::now();
    double yb = 0.0, qt = 0.0;
    for (int k = 1; k <= 6; ++k) {
        const auto ctx = make_level(k);
        for (int a = 0; a <= k; ++a)
            for (int b = 0; b <= k; ++b) {
                qt = std::max(qt, check_quasitriangularity(ctx, a, b).value);
                for (int c = 0; c <= k; ++c) yb = std::max(yb, check_yang_baxter(ctx, a, b, c).value);
            }
    }
    const double t = seconds_since(t0);
    return {yb < kAlgebraTol && qt < kAlgebraTol && t < kC1Seconds,
            "yang-baxter " + sci(yb) + ", quasitriangularity " + sci(qt) + " (tol 1e-10), " + sci(t) +
                " s (limit 30 s), k <= 6"};
}

Outcome c2() {
    double worst = 0.0;
    for (int k = 1; k <= 6; ++k) {
        const auto ctx = make_level(k);
        for (int t = 0; t <= k; ++t)
            for (int p = 0; p <= k; ++p)
                worst = std::max(worst, check_loop_relation(ctx, loop_generator(ctx, t, p)).value);
    }
    return {worst < kAlgebraTol, "max loop-relation residual " + sci(worst) + " (tol 1e-10), k <= 6"};
}

Outcome c3() {
    double central = 0.0, weakest_wrong = INFINITY;
    for (int k = 1; k <= 6; ++k) {
        const auto ctx = make_level(k);
        double wrong = 0.0;
        for (int t = 0; t <= k; ++t)
            for (int p = 0; p <= k; ++p) {
                central = std::max(central, check_centrality(ctx, t, p, -1).value);
                wrong = std::max(wrong, check_centrality(ctx, t, p, +1).value);
            }
        weakest_wrong = std::min(weakest_wrong, wrong);
    }
    return {central < kAlgebraTol && weakest_wrong > kWrongBalancingFloor,
            "K^-1 commutator / |M| " + sci(central) + " (tol 1e-10); K^+1 control, weakest level " + sci(weakest_wrong) +
                " (must exceed 0.1)"};
}

Outcome c4() {
    double worst = 0.0;
    bool tables = true;
    for (int k = 1; k <= 6; ++k) {
        const auto ctx = make_level(k);
        std::vector<int> taus;
        for (int t = 0; t <= k; ++t) taus.push_back(t);
        const auto f = check_fusion_algebra(ctx, taus);
        worst = std::max({worst, f.residual, f.ratio_residual});
        tables = tables && f.table_matches;
    }
    return {worst < kFusionTol && tables,
            "character residual " + sci(worst) + " (tol 1e-9), fusion table " +
                (tables ? "equals" : "differs from") + " CG channel counts, k <= 6"};
}

Outcome c5() {
    double worst = 0.0;
    int cases = 0;
    for (int k = 1; k <= 4; ++k) {
        const auto ctx = make_level(k);
        ConventionReport conv;
        conv.monodromy_dressing = arbitrate_dressing(ctx, 1);
        for (int n = 1; n <= 3; ++n)
            for (const auto& spins : assignments(k, n)) {
                const auto c = check_family(ctx, multiloop_generators(ctx, {0, n, spins, 1}, conv));
                worst = std::max({worst, c.eq4, c.exchange});
                ++cases;
            }
    }
    return {worst < kFamilyTol, "max exchange residual " + sci(worst) + " over " + std::to_string(cases) +
                                    " families (tol 1e-9), N <= 3, k <= 4"};
}

Outcome c6() {
    double oracle = 0.0, modulus = 0.0, relations = 0.0, unitary = 0.0;
    int cases = 0, skipped = 0;
    for (int k = 1; k <= 4; ++k) {
        const auto ctx = make_level(k);
        const auto conv = arbitrate_all(ctx, 1);
        for (int n = 2; n <= 3; ++n)
            for (const auto& spins : assignments(k, n)) {
                const auto f = multiloop_generators(ctx, {0, n, spins, 1}, conv);
                try {
                    std::vector<Mat> gens;
                    std::map<std::string, Mat> img;
                    for (int nu = 0; nu < n; ++nu)
                        for (int mu = nu + 1; mu < n; ++mu) {
                            const PureWord w{{nu, mu, 1}};
                            const Mat v = pure_braid_rep(ctx, f, w);
                            cplx ratio;
                            oracle = std::max(oracle, proportionality_residual(
                                                          v, braid_matrix_oracle(ctx, spins,
                                                                                 pure_to_braid(w, conv.eta_convention)),
                                                          &ratio));
                            modulus = std::max(modulus, std::abs(std::abs(ratio) - 1.0));
                            gens.push_back(v);
                            img["e" + std::to_string(nu + 1) + std::to_string(mu + 1)] = v;
                        }
                    unitary = std::max(unitary, check_unitarity(ctx, spins, gens).residual);
                    if (n == 3) {
                        const Mat &a = img["e12"], &b = img["e13"], &c = img["e23"];
                        const Mat cba = c * b * a;
                        const Mat full = braid_matrix_oracle(ctx, spins, parse_braid_word("s1 s2 s1 s2 s1 s2"));
                        relations = std::max({relations, proportionality_residual(b * a * c, cba),
                                              proportionality_residual(a * c * b, cba),
                                              proportionality_residual(cba, full)});
                        for (const Mat* x : {&a, &b, &c})
                            relations = std::max(relations, proportionality_residual(*x * cba, cba * *x));
                    }
                    ++cases;
                } catch (const NotSemisimple&) {
                    ++skipped;
                }
            }
    }
    return {std::max({oracle, modulus, relations, unitary}) < kFamilyTol,
            "oracle " + sci(oracle) + ", ||ratio|-1| " + sci(modulus) + ", PB_3 relations " + sci(relations) +
                ", unitarity " + sci(unitary) + " (tol 1e-9); " + std::to_string(cases) + " carriers, " +
                std::to_string(skipped) + " non-semisimple skipped"};
}

Outcome c7() {
    double worst = 0.0;
    int cases = 0;
    for (int k = 1; k <= 2; ++k) {
        const auto ctx = make_level(k);
        const auto conv = arbitrate_all(ctx, 1);
        for (int n = 2; n <= 3; ++n)
            for (const auto& spins : assignments(k, n)) {
                const auto f = multiloop_generators(ctx, {0, n, spins, 1}, conv);
                for (int nu = 0; nu < n; ++nu)
                    for (int mu = nu + 1; mu < n; ++mu) try {
                            worst = std::max(worst, check_inner_automorphism(ctx, f, {{nu, mu, 1}}).residual);
                            ++cases;
                        } catch (const NotSemisimple&) {
                        }
            }
    }
    return {worst < kFamilyTol, "max projective residual " + sci(worst) + " over " + std::to_string(cases) +
                                    " (family, generator) pairs (tol 1e-9), N <= 3, k <= 2"};
}

Outcome c8() {
    bool pass = true;
    std::string detail;
    for (int k = 1; k <= 2; ++k) {
        const auto out = workdir() / ("verify_k" + std::to_string(k) + ".json");
        const int code = workbench("verify --k " + std::to_string(k) + " --max-n 2 --out '" + out.string() + "'");
        double handle = INFINITY;
        bool structured = false;
        try {
            const auto j = json::parse(slurp(out));
            for (const auto& r : j["rows"])
                if (r["relation"] == "handle-exchange" && r["residual"].is_number()) handle = r["residual"];
            for (const auto& f : j["arbitration_failures"])
                structured = structured || f["what"].get<std::string>().rfind("handle", 0) == 0;
        } catch (const std::exception&) {
        }
        const bool ok = handle < kFamilyTol;
        // a failing arbitration must surface as exit 3 with its table
        const bool reported = ok || (code == 3 && structured);
        pass = pass && ok && reported;
        detail += (k > 1 ? "; " : "") + std::string("k=") + std::to_string(k) + " best handle residual " + sci(handle) +
                  ", exit " + std::to_string(code) + (reported ? "" : " (failure NOT reported)");
    }
    return {pass, detail + " (tol 1e-9)"};
}

Outcome c9() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int k = 1; k <= 6; ++k)
        for (int tau = 0; tau <= k; ++tau) {
            const auto r = check_torus_mcg(make_level(k), tau);
            worst = std::max({worst, r.braid, r.sprime2, r.sprime4, r.s_match, r.unitarity});
        }
    const double t = seconds_since(t0);
    return {worst < kFamilyTol && t < kC9Seconds,
            "max residual " + sci(worst) + " (tol 1e-9), " + sci(t) + " s (limit 5 s), k <= 6"};
}

Outcome c10() {
    bool pass = true;
    std::string detail;
    for (int k = 1; k <= 2; ++k) {
        const auto ctx = make_level(k);
        const auto rep = crosscheck_graph_vs_modular(ctx, arbitrate_all(ctx, 1), 1);
        pass = pass && rep.available && rep.pass && rep.alpha < kFlatTol && rep.beta < kFlatTol;
        detail += (k > 1 ? "; " : "") + std::string("k=") + std::to_string(k) + " ";
        detail += rep.available ? "block scalar " + sci(rep.flatness.block_scalar) + ", trivial block dim " +
                                      std::to_string(rep.flatness.trivial_block_dim) + ", alpha " + sci(rep.alpha) +
                                      ", beta " + sci(rep.beta)
                                : rep.reason;
    }
    return {pass, detail + " (tol 1e-8)"};
}

Outcome c11() {
    const auto side = workdir() / "det_conventions.json";
    const auto a = workdir() / "det_a.json", b = workdir() / "det_b.json";
    fs::remove(side);
    const std::string common = "verify --k 2 --max-n 3 --conventions '" + side.string() + "' --out ";
    const int ca = workbench(common + "'" + a.string() + "'");
    const bool persisted = fs::exists(side);
    const int cb = workbench(common + "'" + b.string() + "'");
    const std::string sa = slurp(a), sb = slurp(b);
    const bool same = !sa.empty() && sa == sb;
    return {same && persisted && ca == cb, std::string(same ? "byte-identical" : "outputs differ") + " JSON (" +
                                               std::to_string(sa.size()) + " bytes), sidecar " +
                                               (persisted ? "persisted" : "missing") + ", exit codes " +
                                               std::to_string(ca) + "/" + std::to_string(cb)};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> expected;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--expect-fail" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) expected.insert(std::stoi(item));
        } else {
            std::cerr << "usage: acceptance [--expect-fail i,j,...]\n";
            return 2;
        }
    }
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"yang-baxter and quasitriangularity", c1},
        {"loop relation of the monodromy", c2},
        {"centrality of tr_q(M)", c3},
        {"fusion-algebra characters", c4},
        {"multiloop exchange relations", c5},
        {"pure-braid master oracle", c6},
        {"inner-automorphism identity", c7},
        {"handle relation on the W model", c8},
        {"torus mapping class group", c9},
        {"flatness and graph/modular agreement", c10},
        {"determinism of verify output", c11},
    };
    std::set<int> failed;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) failed.insert(id);
        const char* tag = o.pass ? (expected.count(id) ? "XPASS" : "PASS") : (expected.count(id) ? "XFAIL" : "FAIL");
        std::cout << "[" << tag << "] " << id << " " << criteria[i].first << ": " << o.detail << std::endl;
    }
    std::error_code ec;
    fs::remove_all(workdir(), ec);
    const bool ok = failed == expected;
    std::cout << (ok ? "acceptance: failures match the expected set" : "acceptance: unexpected outcome") << std::endl;
    return ok ? 0 : 1;
}
