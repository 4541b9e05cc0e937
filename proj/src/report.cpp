#include "qmoduli/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qm {

namespace {

void emit(std::ostringstream& os, const json& j, int indent, int depth) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{' << nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {  // std::map keeps keys sorted
                if (!first) os << ',' << nl;
                first = false;
                os << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
                emit(os, it.value(), indent, depth + 1);
            }
            os << nl << close << '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            // short arrays of scalars stay on one line
            bool flat = j.size() <= 8;
            for (const auto& e : j)
                if (e.is_structured()) flat = flat && e.is_array() && e.size() <= 2 && !e.empty() && e[0].is_number();
            os << '[';
            if (!flat) os << nl;
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ',' << (flat ? (indent > 0 ? " " : "") : nl);
                if (!flat) os << pad;
                emit(os, j[i], flat ? 0 : indent, depth + 1);
            }
            if (!flat) os << nl << close;
            os << ']';
            return;
        }
        case json::value_t::number_float: {
            const double x = j.get<double>();
            if (!std::isfinite(x)) {
                os << "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            os << buf;
            return;
        }
        default: os << j.dump(); return;
    }
}

}  // namespace

std::string dump_json(const json& j, int indent) {
    std::ostringstream os;
    emit(os, j, indent, 0);
    os << '\n';
    return os.str();
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(i, c)));
        rows.push_back(row);
    }
    return rows;
}

json residual_row(const Residual& r, int k) {
    return {{"relation", r.relation}, {"k", k}, {"labels", r.labels}, {"residual", r.value}, {"pass", r.pass}};
}

json modular_json(const ModularData& md) {
    json qd = json::array(), tw = json::array();
    for (double d : md.qdims) qd.push_back(d);
    for (cplx t : md.twists) tw.push_back(complex_json(t));
    return {{"k", md.k},
            {"S", matrix_json(md.S)},
            {"T", matrix_json(md.T)},
            {"fusion", md.fusion},
            {"qdims", qd},
            {"twists", tw},
            {"verlinde_residual", md.verlinde_residual}};
}

json torus_json(const TorusReport& r) {
    return {{"k", r.k},
            {"relations",
             {{"braid", r.braid}, {"Sprime2", r.sprime2}, {"Sprime4", r.sprime4}, {"S_match", r.s_match}}},
            {"unitarity", r.unitarity},
            {"pass", r.pass}};
}

json conventions_json(const ConventionReport& c) {
    json tables = json::object();
    for (const auto& [name, rows] : c.tables) {
        json t = json::array();
        for (const auto& r : rows) t.push_back({{"variant", r.name}, {"residual", r.residual}, {"pass", r.pass}});
        tables[name] = t;
    }
    return {{"monodromy_dressing", c.monodromy_dressing},
            {"handle_B_variant", c.handle_B_variant},
            {"ribbon_direction", c.ribbon_direction},
            {"balancing_power", c.balancing_power},
            {"artin_convention", c.artin_convention},
            {"eta_convention", c.eta_convention},
            {"pair_order", c.pair_order},
            {"V_normalization", c.V_normalization},
            {"created", c.created},
            {"tables", tables}};
}

ConventionReport conventions_from_json(const json& j) {
    try {
        ConventionReport c;
        c.monodromy_dressing = j.at("monodromy_dressing").get<int>();
        c.handle_B_variant = j.at("handle_B_variant").get<int>();
        c.ribbon_direction = j.at("ribbon_direction").get<int>();
        c.balancing_power = j.at("balancing_power").get<int>();
        c.artin_convention = j.at("artin_convention").get<int>();
        c.eta_convention = j.at("eta_convention").get<int>();
        c.pair_order = j.at("pair_order").get<int>();
        c.V_normalization = j.at("V_normalization").get<std::string>();
        c.created = j.value("created", "");
        if (j.contains("tables"))
            for (const auto& [name, rows] : j.at("tables").items())
                for (const auto& r : rows) {
                    const double res = r.at("residual").is_null() ? INFINITY : r.at("residual").get<double>();
                    c.tables[name].push_back({r.at("variant").get<std::string>(), res, r.at("pass").get<bool>()});
                }
        if (std::abs(c.ribbon_direction) != 1 || std::abs(c.balancing_power) != 1 || c.artin_convention < 0 ||
            c.artin_convention > 3)
            throw std::runtime_error("convention value out of range");
        return c;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed convention report: ") + e.what());
    }
}

std::optional<ConventionReport> load_conventions(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("cannot parse " + path + ": " + e.what());
    }
    return conventions_from_json(j);
}

void save_conventions(const std::string& path, const ConventionReport& c) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << dump_json(conventions_json(c));
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::string csv_number(double x) {
    if (!std::isfinite(x)) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace qm
