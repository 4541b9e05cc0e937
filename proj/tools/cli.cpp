#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <tuple>

#include "qmoduli/report.hpp"

namespace wb {

using qm::json;

std::vector<int> parse_spins(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
        if (item.empty()) continue;
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(item, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad spin label '" + item + "'");
        }
        if (pos != item.size() || v < 0) throw std::invalid_argument("bad spin label '" + item + "'");
        out.push_back(v);
    }
    return out;
}

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IOError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Failure {
    std::string what;
    std::vector<qm::ArbitrationRow> table;
};

json table_json(const std::vector<qm::ArbitrationRow>& t) {
    json a = json::array();
    for (const auto& r : t) a.push_back({{"variant", r.name}, {"residual", r.residual}, {"pass", r.pass}});
    return a;
}

json failure_json(const Failure& f) { return {{"what", f.what}, {"table", table_json(f.table)}}; }

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(cfg.out);
    if (!f) throw IOError("cannot open " + cfg.out + " for writing");
    f << text;
    if (!f) throw IOError("write failed for " + cfg.out);
}

std::string sidecar_path(const RunConfig& cfg) {
    if (!cfg.conventions.empty()) return cfg.conventions;
    return "qmoduli_conventions_k" + std::to_string(cfg.k) + "_aux" + std::to_string(cfg.aux) + ".json";
}

int carrier_dim(int aux, const std::vector<int>& spins) {
    long long d = aux + 1;
    for (int s : spins) d *= s + 1;
    return d > kCarrierGuard ? kCarrierGuard + 1 : static_cast<int>(d);
}

// key=value list; a bare integer fixes the dressing variant
void apply_fixed(const std::string& spec, qm::ConventionReport& conv, int& handle_variant) {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::string key = "dressing", val = item;
        if (const auto eq = item.find('='); eq != std::string::npos) {
            key = item.substr(0, eq);
            val = item.substr(eq + 1);
        }
        int v = 0;
        try {
            std::size_t pos = 0;
            v = std::stoi(val, &pos);
            if (pos != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception&) {
            throw UsageError("bad --fixed-variants entry '" + item + "'");
        }
        if (key == "dressing") conv.monodromy_dressing = v;
        else if (key == "handle") handle_variant = v;
        else if (key == "artin") conv.artin_convention = v;
        else if (key == "balancing") conv.balancing_power = v;
        else if (key == "direction") conv.ribbon_direction = v;
        else if (key == "pair") conv.pair_order = v;
        else if (key == "eta") conv.eta_convention = v;
        else throw UsageError("unknown --fixed-variants key '" + key + "'");
    }
    if (conv.monodromy_dressing < 0 || conv.monodromy_dressing >= qm::dressing_variant_count() ||
        conv.artin_convention < 0 || conv.artin_convention > 3 || std::abs(conv.balancing_power) != 1 ||
        std::abs(conv.ribbon_direction) != 1 || (conv.pair_order != 0 && conv.pair_order != 1) ||
        (conv.eta_convention != 0 && conv.eta_convention != 1) || handle_variant < -1 ||
        handle_variant >= qm::handle_variant_count())
        throw UsageError("--fixed-variants value out of range");
}

// Loads the sidecar or arbitrates afresh, applies fixed variants, and
// re-confirms the result. Confirmation failures are returned, not thrown.
qm::ConventionReport obtain_conventions(const RunConfig& cfg, const qm::LevelData& ctx, int& handle_variant,
                                        std::vector<Failure>& failures) {
    const std::string path = sidecar_path(cfg);
    std::optional<qm::ConventionReport> conv;
    if (!cfg.rearbitrate) {
        try {
            conv = qm::load_conventions(path);
        } catch (const std::runtime_error& e) {
            throw IOError(e.what());
        }
    }
    if (!conv) {
        conv = qm::arbitrate_all(ctx, cfg.aux);  // ArbitrationFailure escapes to the caller
        try {
            qm::save_conventions(path, *conv);
        } catch (const std::runtime_error& e) {
            throw IOError(e.what());
        }
    }
    handle_variant = conv->handle_B_variant;
    if (!cfg.fixed_variants.empty()) apply_fixed(cfg.fixed_variants, *conv, handle_variant);
    const auto rows = qm::confirm_conventions(ctx, cfg.aux, *conv);
    for (const auto& r : rows)
        if (!r.pass) {
            failures.push_back({"recorded convention fails its arbitration probe: " + r.name, rows});
            break;
        }
    return *conv;
}

// ---- modular ----

int cmd_modular(const RunConfig& cfg, std::ostream& out) {
    const auto ctx = qm::make_level(cfg.k);
    const auto md = qm::modular_data(ctx);
    const bool ok = md.verlinde_residual < cfg.tol;
    std::ostringstream os;
    if (cfg.format == "json") {
        os << qm::dump_json(qm::modular_json(md));
    } else if (cfg.format == "csv") {
        auto table = [&](const char* name, const qm::Mat& m) {
            os << "# " << name << "\nrow,col,re,im\n";
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                for (Eigen::Index j = 0; j < m.cols(); ++j)
                    os << i << ',' << j << ',' << qm::csv_number(m(i, j).real()) << ','
                       << qm::csv_number(m(i, j).imag()) << '\n';
        };
        table("S", md.S);
        table("T", md.T);
        os << "# fusion\ni,j,l,N\n";
        for (int i = 0; i <= cfg.k; ++i)
            for (int j = 0; j <= cfg.k; ++j)
                for (int l = 0; l <= cfg.k; ++l) os << i << ',' << j << ',' << l << ',' << md.fusion[i][j][l] << '\n';
        os << "# qdims\nj,qdim\n";
        for (std::size_t j = 0; j < md.qdims.size(); ++j) os << j << ',' << qm::csv_number(md.qdims[j]) << '\n';
        os << "# twists\nj,re,im\n";
        for (std::size_t j = 0; j < md.twists.size(); ++j)
            os << j << ',' << qm::csv_number(md.twists[j].real()) << ',' << qm::csv_number(md.twists[j].imag())
               << '\n';
    } else {
        os << std::setprecision(6) << "level k = " << cfg.k << "\nS =\n";
        for (Eigen::Index i = 0; i < md.S.rows(); ++i) {
            for (Eigen::Index j = 0; j < md.S.cols(); ++j) os << std::setw(12) << md.S(i, j).real();
            os << '\n';
        }
        os << "twists (arg / 2pi):";
        for (const auto& t : md.twists) os << ' ' << std::arg(t) / (2 * M_PI);
        os << "\nqdims:";
        for (double d : md.qdims) os << ' ' << d;
        os << "\nVerlinde residual " << md.verlinde_residual << (ok ? " (pass)" : " (FAIL)") << '\n';
    }
    emit(cfg, os.str(), out);
    return ok ? kPass : kFail;
}

// ---- verify ----

struct Row {
    std::string relation;
    std::vector<int> labels;
    double residual;
};

std::vector<std::vector<int>> spin_assignments(int k, int n) {
    std::vector<int> pool;
    for (int s : {1, 2})
        if (s <= k) pool.push_back(s);
    std::vector<std::vector<int>> out{{}};
    for (int i = 0; i < n; ++i) {
        std::vector<std::vector<int>> next;
        for (const auto& a : out)
            for (int s : pool) {
                auto b = a;
                b.push_back(s);
                next.push_back(b);
            }
        out = next;
    }
    return out;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const auto ctx = qm::make_level(cfg.k);
    std::vector<Failure> failures;
    int handle_variant = -1;
    qm::ConventionReport conv;
    try {
        conv = obtain_conventions(cfg, ctx, handle_variant, failures);
    } catch (const qm::ArbitrationFailure& e) {
        failures.push_back({e.what(), e.table});
        json doc = {{"k", cfg.k}, {"arbitration_failures", json::array({failure_json(failures[0])})},
                    {"pass", false}};
        emit(cfg, qm::dump_json(doc), out);
        return kArbitration;
    }

    std::vector<Row> rows;
    const int k = cfg.k;
    for (int a = 0; a <= k; ++a)
        for (int b = 0; b <= k; ++b) {
            rows.push_back({"eq1-quasitriangularity", {a, b}, qm::check_quasitriangularity(ctx, a, b).value});
            rows.push_back({"eq2", {+1, a, b}, qm::check_gauge_relation(ctx, +1, a, b).value});
            rows.push_back({"eq2", {-1, a, b}, qm::check_gauge_relation(ctx, -1, a, b).value});
            rows.push_back({"eq2", {0, a, b}, qm::check_gauge_mixed(ctx, a, b).value});
            rows.push_back({"eq4", {a, b}, qm::check_loop_relation(ctx, qm::loop_generator(ctx, a, b)).value});
            rows.push_back({"centrality", {a, b}, qm::check_centrality(ctx, a, b, conv.balancing_power).value});
            for (int c = 0; c <= k; ++c)
                rows.push_back({"yang-baxter", {a, b, c}, qm::check_yang_baxter(ctx, a, b, c).value});
        }
    {
        std::vector<int> taus;
        for (int t = 0; t <= k; ++t) taus.push_back(t);
        const auto f = qm::check_fusion_algebra(ctx, taus);
        rows.push_back({"fusion", {k}, f.table_matches ? std::max(f.residual, f.ratio_residual) : INFINITY});
    }
    // link algebra on spin-1/2 auxiliary slot
    bool link_reported = false;
    for (int p = 0; p <= std::min(k, 2); ++p)
        for (int r = 0; r <= std::min(k, 2); ++r) {
            const auto lr = qm::check_link_relation(ctx, 1, p, r);
            rows.push_back({"eq3", {1, p, r}, lr.best_residual});
            if (!lr.pass && !link_reported) {
                link_reported = true;
                std::vector<qm::ArbitrationRow> t;
                for (int v = 0; v < qm::link_variant_count(); ++v)
                    t.push_back({qm::link_variant_name(v), lr.table[v], lr.table[v] < 1e-10});
                failures.push_back({"eq3: no link variant passes for (tau, pi, rho) = (1, " + std::to_string(p) +
                                        ", " + std::to_string(r) + ")",
                                    t});
            }
        }
    // multiloop exchange
    for (int n = 2; n <= cfg.max_n; ++n)
        for (const auto& spins : spin_assignments(k, n)) {
            if (carrier_dim(cfg.aux, spins) > kCarrierGuard) continue;
            const auto fam = qm::multiloop_generators(ctx, {0, n, spins, cfg.aux}, conv);
            const auto c = qm::check_family(ctx, fam);
            std::vector<int> labels{cfg.aux};
            labels.insert(labels.end(), spins.begin(), spins.end());
            rows.push_back({"multiloop-exchange", labels, std::max(c.eq4, c.exchange)});
        }
    // handle and mixed relations need the handle model
    {
        std::vector<qm::ArbitrationRow> table;
        bool have = false;
        try {
            table = qm::handle_generators(ctx, cfg.aux).table;
            have = true;
        } catch (const qm::ArbitrationFailure& e) {
            table = e.table;
            failures.push_back({std::string("handle: ") + e.what(), table});
        }
        if (have && handle_variant >= 0 && !table[handle_variant].pass) {
            have = false;
            failures.push_back({"handle: fixed variant '" + table[handle_variant].name + "' fails", table});
        }
        double best = INFINITY;
        for (const auto& r : table) best = std::min(best, r.residual);
        rows.push_back({"handle-exchange", {cfg.aux}, best});
        double mixed = INFINITY;
        if (have && carrier_dim(cfg.aux, {1}) <= kCarrierGuard) {
            const auto fam = qm::graph_generators(ctx, {1, 1, {1}, cfg.aux}, conv);
            mixed = qm::check_family(ctx, fam).mixed;
        }
        rows.push_back({"mixed-exchange", {cfg.aux, 1}, mixed});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.relation, a.labels) < std::tie(b.relation, b.labels);
    });

    bool all_pass = true;
    for (const auto& r : rows) all_pass = all_pass && r.residual < cfg.tol;
    const int code = !failures.empty() ? kArbitration : all_pass ? kPass : kFail;

    std::ostringstream os;
    if (cfg.format == "json") {
        json jr = json::array(), jf = json::array();
        for (const auto& r : rows)
            jr.push_back({{"relation", r.relation},
                          {"k", k},
                          {"labels", r.labels},
                          {"residual", r.residual},
                          {"pass", r.residual < cfg.tol}});
        for (const auto& f : failures) jf.push_back(failure_json(f));
        json doc = {{"k", k},
                    {"aux", cfg.aux},
                    {"tol", cfg.tol},
                    {"max_n", cfg.max_n},
                    {"conventions", qm::conventions_json(conv)},
                    {"rows", jr},
                    {"arbitration_failures", jf},
                    {"pass", code == kPass},
                    {"exit_code", code}};
        os << qm::dump_json(doc);
    } else if (cfg.format == "csv") {
        os << "relation,k,labels,residual,pass\n";
        for (const auto& r : rows) {
            std::string l;
            for (std::size_t i = 0; i < r.labels.size(); ++i) l += (i ? ";" : "") + std::to_string(r.labels[i]);
            os << r.relation << ',' << k << ',' << l << ',' << qm::csv_number(r.residual) << ','
               << (r.residual < cfg.tol ? "true" : "false") << '\n';
        }
        for (const auto& f : failures) os << "# arbitration failure: " << f.what << '\n';
    } else {
        os << std::left;
        for (const auto& r : rows) {
            std::string l;
            for (std::size_t i = 0; i < r.labels.size(); ++i) l += (i ? "," : "") + std::to_string(r.labels[i]);
            os << std::setw(24) << r.relation << std::setw(14) << l << std::setw(14) << std::setprecision(3)
               << r.residual << (r.residual < cfg.tol ? "pass" : "FAIL") << '\n';
        }
        for (const auto& f : failures) {
            os << "\narbitration failure: " << f.what << '\n';
            for (const auto& t : f.table)
                os << "  " << std::setw(40) << t.name << std::setprecision(3) << t.residual << '\n';
        }
        os << (code == kPass ? "PASS" : "FAIL") << '\n';
    }
    emit(cfg, os.str(), out);
    return code;
}

// ---- rep ----

json unitarity_json(const qm::UnitarityReport& u) {
    return {{"residual", u.residual}, {"standard_adjoint", u.standard_adjoint}, {"charges", u.charges}};
}

std::string render_matrix(const RunConfig& cfg, const json& doc, const qm::Mat& m) {
    if (cfg.format == "json") return qm::dump_json(doc);
    std::ostringstream os;
    if (cfg.format == "csv") {
        os << "row,col,re,im\n";
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                os << i << ',' << j << ',' << qm::csv_number(m(i, j).real()) << ','
                   << qm::csv_number(m(i, j).imag()) << '\n';
        return os.str();
    }
    os << std::setprecision(4) << std::fixed;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            os << std::setw(9) << m(i, j).real() << (m(i, j).imag() < 0 ? "-" : "+") << std::setw(6)
               << std::abs(m(i, j).imag()) << "i ";
        os << '\n';
    }
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "matrix") os << it.key() << ": " << it.value().dump() << '\n';
    return os.str();
}

int cmd_rep(const RunConfig& cfg, std::ostream& out) {
    const auto ctx = qm::make_level(cfg.k);
    const auto spins = parse_spins(cfg.spins);
    int handle_variant = -1;
    std::vector<Failure> failures;
    qm::ConventionReport conv;
    try {
        conv = obtain_conventions(cfg, ctx, handle_variant, failures);
    } catch (const qm::ArbitrationFailure& e) {
        json doc = {{"arbitration_failures", json::array({failure_json({e.what(), e.table})})}};
        emit(cfg, qm::dump_json(doc), out);
        return kArbitration;
    }
    if (!failures.empty()) {
        json jf = json::array();
        for (const auto& f : failures) jf.push_back(failure_json(f));
        emit(cfg, qm::dump_json({{"arbitration_failures", jf}}), out);
        return kArbitration;
    }

    if (cfg.rep_kind == "torus") {
        const auto w = qm::parse_twist_word(cfg.word);
        const auto t = qm::torus_rep(ctx, cfg.aux, conv.ribbon_direction);
        const qm::Mat m = qm::torus_word(t, w);
        const double unit = (m.adjoint() * m - qm::identity(m.rows())).norm();
        json doc = {{"kind", "torus"},
                    {"k", cfg.k},
                    {"word", cfg.word},
                    {"matrix", qm::matrix_json(m)},
                    {"unitarity", unit},
                    {"S_residual", qm::proportionality_residual(m, t.S)}};
        emit(cfg, render_matrix(cfg, doc, m), out);
        return unit < cfg.tol ? kPass : kOracle;
    }

    const int n = static_cast<int>(spins.size());
    if (cfg.rep_kind == "mcg" && cfg.genus == 1) {
        const auto w = qm::parse_twist_word(cfg.word);
        qm::GeneratorFamily fam;
        try {
            fam = qm::graph_generators(ctx, {1, n, spins, cfg.aux}, conv);
        } catch (const qm::ArbitrationFailure& e) {
            emit(cfg, qm::dump_json({{"arbitration_failures", json::array({failure_json({e.what(), e.table})})}}),
                 out);
            return kArbitration;
        }
        const qm::Mat m = qm::mcg_rep(ctx, fam, w);
        json doc = {{"kind", "mcg"}, {"k", cfg.k}, {"genus", 1}, {"word", cfg.word}, {"matrix", qm::matrix_json(m)}};
        emit(cfg, render_matrix(cfg, doc, m), out);
        return kPass;
    }
    if (cfg.genus != 0) throw UsageError("--genus must be 0 or 1");

    const auto fam = qm::multiloop_generators(ctx, {0, n, spins, cfg.aux}, conv);
    qm::Mat m;
    json doc = {{"kind", cfg.rep_kind}, {"k", cfg.k}, {"spins", spins}, {"aux", cfg.aux}, {"word", cfg.word}};
    bool ok = true;
    if (cfg.rep_kind == "pbn") {
        const auto w = qm::parse_pure_word(cfg.word);
        for (const auto& e : w)
            if (e.mu >= n) throw UsageError("pure-braid index beyond the number of punctures");
        m = qm::pure_braid_rep(ctx, fam, w);
        const qm::Mat o = qm::braid_matrix_oracle(ctx, spins, qm::pure_to_braid(w, conv.eta_convention));
        qm::cplx ratio = 1.0;
        const double r = qm::proportionality_residual(m, o, &ratio);
        doc["oracle_residual"] = r;
        doc["oracle_ratio"] = qm::complex_json(ratio);
        ok = r < cfg.tol && std::abs(std::abs(ratio) - 1.0) < cfg.tol;
    } else {
        const auto w = qm::parse_twist_word(cfg.word);
        for (const auto& t : w)
            for (const auto& l : t.curve)
                if (l.kind != qm::Cycle::L || l.index >= n)
                    throw UsageError("twist curve letter out of range for genus 0");
        m = qm::mcg_rep(ctx, fam, w);
    }
    const auto u = qm::check_unitarity(ctx, spins, {m});
    doc["unitarity"] = unitarity_json(u);
    doc["matrix"] = qm::matrix_json(m);
    ok = ok && u.residual < cfg.tol;
    doc["pass"] = ok;
    emit(cfg, render_matrix(cfg, doc, m), out);
    return ok ? kPass : kOracle;
}

// ---- calibrate ----

int cmd_calibrate(const RunConfig& cfg, std::ostream& out) {
    const auto ctx = qm::make_level(cfg.k);
    qm::ConventionReport conv;
    try {
        conv = qm::arbitrate_all(ctx, cfg.aux);
    } catch (const qm::ArbitrationFailure& e) {
        emit(cfg, qm::dump_json({{"arbitration_failures", json::array({failure_json({e.what(), e.table})})}}), out);
        return kArbitration;
    }
    try {
        qm::save_conventions(sidecar_path(cfg), conv);
    } catch (const std::runtime_error& e) {
        throw IOError(e.what());
    }
    json doc = {{"k", cfg.k}, {"aux", cfg.aux}, {"sidecar", sidecar_path(cfg)}, {"conventions", qm::conventions_json(conv)}};
    // the certificate solves a dense system with ((aux+1) dim W)^2 unknowns
    int dimW = 0;
    for (int b = 0; b <= cfg.k; ++b) dimW += (b + 1) * (b + 1);
    if ((cfg.aux + 1) * dimW <= 30) {
        const auto c = qm::handle_certificate(ctx, cfg.aux);
        doc["handle_certificate"] = {{"unknowns", c.unknowns},
                                     {"solution_dim", c.solution_dim},
                                     {"generic_rank", c.max_rank},
                                     {"full_rank", c.full_rank}};
    }
    if (cfg.format == "json") {
        emit(cfg, qm::dump_json(doc), out);
    } else {
        std::ostringstream os;
        for (auto it = doc.begin(); it != doc.end(); ++it) os << it.key() << ": " << it.value().dump() << '\n';
        emit(cfg, os.str(), out);
    }
    return conv.handle_B_variant < 0 && cfg.aux > 0 ? kArbitration : kPass;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Matrix-model workbench for combinatorial quantization at level k"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file mirroring the flags; flags override it");
    RunConfig cfg;
    app.add_option("--k", cfg.k, "level k >= 1");
    app.add_option("--tol", cfg.tol, "relative tolerance");
    app.add_option("--aux", cfg.aux, "auxiliary label (twice the spin)");
    app.add_option("--spins", cfg.spins, "puncture labels, twice the spin, comma separated");
    app.add_option("--genus", cfg.genus, "genus for rep mcg (0 or 1)");
    app.add_option("--max-n", cfg.max_n, "largest puncture count in verify sweeps");
    app.add_option("--word", cfg.word, "word in the syntax of the chosen representation");
    app.add_option("--format", cfg.format, "json, csv or pretty")->check(CLI::IsMember({"json", "csv", "pretty"}));
    app.add_option("--out", cfg.out, "output path (default stdout)");
    app.add_option("--conventions", cfg.conventions, "ConventionReport sidecar path");
    app.add_option("--fixed-variants", cfg.fixed_variants, "e.g. dressing=0,artin=3; a bare id fixes the dressing");
    app.add_flag("--rearbitrate", cfg.rearbitrate, "ignore the sidecar and arbitrate afresh");

    auto* modular = app.add_subcommand("modular", "S, T, fusion and twists at level k");
    auto* verify = app.add_subcommand("verify", "run the relation suites");
    auto* rep = app.add_subcommand("rep", "representation matrices");
    rep->add_option("kind", cfg.rep_kind, "pbn, mcg or torus")->required()->check(CLI::IsMember({"pbn", "mcg", "torus"}));
    auto* calibrate = app.add_subcommand("calibrate", "arbitrate conventions and write the sidecar");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kPass : kUsage;
    }
    try {
        if (cfg.k < 1) throw UsageError("--k must be at least 1");
        if (!(cfg.tol > 0)) throw UsageError("--tol must be positive");
        if (cfg.max_n < 1) throw UsageError("--max-n must be at least 1");
        if (cfg.aux < 0 || cfg.aux > cfg.k) throw UsageError("--aux out of range for this level");
        const auto spins = parse_spins(cfg.spins);
        for (int s : spins)
            if (s > cfg.k) throw UsageError("spin label " + std::to_string(s) + " exceeds the level");
        if (carrier_dim(cfg.aux, spins) > kCarrierGuard) throw UsageError("carrier dimension exceeds 4096");
        if (*modular) return cmd_modular(cfg, out);
        if (*verify) return cmd_verify(cfg, out);
        if (*rep) return cmd_rep(cfg, out);
        if (*calibrate) return cmd_calibrate(cfg, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {  // ParseError, DimensionError
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::out_of_range& e) {  // LabelError and index errors
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IOError& e) {
        err << "io error: " << e.what() << '\n';
        return kIO;
    } catch (const qm::NotSemisimple& e) {
        err << "error: " << e.what() << '\n';
        return kOracle;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kFail;
    }
    return kUsage;
}

}  // namespace wb
