#include "qmoduli/words.hpp"

#include <cctype>
#include <sstream>

namespace qm {

namespace {

std::vector<std::string> tokens(const std::string& text) {
    std::istringstream is(text);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

// splits "x12^-1" into ("x12", -1)
std::pair<std::string, int> strip_exponent(const std::string& tok) {
    const auto pos = tok.find('^');
    if (pos == std::string::npos) return {tok, 1};
    const std::string e = tok.substr(pos + 1);
    if (e == "-1") return {tok.substr(0, pos), -1};
    if (e == "1" || e == "+1") return {tok.substr(0, pos), 1};
    throw ParseError("bad exponent in '" + tok + "' (only ^-1 is allowed)");
}

int parse_index(const std::string& digits, const std::string& tok) {
    if (digits.empty()) throw ParseError("missing index in '" + tok + "'");
    for (char c : digits)
        if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("bad index in '" + tok + "'");
    const int v = std::stoi(digits);
    if (v < 1) throw ParseError("indices start at 1 in '" + tok + "'");
    return v - 1;
}

LoopLetter parse_loop_token(const std::string& tok, bool allow_bare) {
    auto [body, exp] = strip_exponent(tok);
    if (body.empty()) throw ParseError("empty token");
    LoopLetter l;
    l.exp = exp;
    switch (body[0]) {
        case 'l': l.kind = Cycle::L; break;
        case 'a': l.kind = Cycle::A; break;
        case 'b': l.kind = Cycle::B; break;
        default: throw ParseError("unknown loop generator '" + tok + "'");
    }
    if (body.size() == 1 && allow_bare && l.kind != Cycle::L)
        l.index = 0;
    else
        l.index = parse_index(body.substr(1), tok);
    return l;
}

}  // namespace

LoopWord parse_loop_word(const std::string& text) {
    LoopWord w;
    for (const auto& t : tokens(text)) w.push_back(parse_loop_token(t, true));
    return w;
}

BraidWord parse_braid_word(const std::string& text) {
    BraidWord w;
    for (const auto& t : tokens(text)) {
        auto [body, exp] = strip_exponent(t);
        if (body.empty() || body[0] != 's') throw ParseError("unknown braid generator '" + t + "'");
        w.push_back({parse_index(body.substr(1), t), exp});
    }
    return w;
}

PureWord parse_pure_word(const std::string& text) {
    PureWord w;
    for (const auto& t : tokens(text)) {
        auto [body, exp] = strip_exponent(t);
        if (body.size() != 3 || body[0] != 'e')
            throw ParseError("pure-braid generators look like e12, got '" + t + "'");
        const int nu = parse_index(body.substr(1, 1), t), mu = parse_index(body.substr(2, 1), t);
        if (nu >= mu) throw ParseError("e_ij needs i < j in '" + t + "'");
        w.push_back({nu, mu, exp});
    }
    return w;
}

TwistWord parse_twist_word(const std::string& text) {
    TwistWord w;
    for (const auto& t : tokens(text)) {
        auto [body, exp] = strip_exponent(t);
        TwistLetter tl;
        tl.exp = exp;
        std::size_t start = 0;
        while (start <= body.size()) {
            const auto dot = body.find('.', start);
            const std::string part = body.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            tl.curve.push_back(parse_loop_token(part, true));
            if (dot == std::string::npos) break;
            start = dot + 1;
        }
        w.push_back(tl);
    }
    return w;
}

std::string format_loop_word(const LoopWord& w) {
    std::string s;
    for (const auto& l : w) {
        if (!s.empty()) s += ' ';
        s += l.kind == Cycle::L ? 'l' : l.kind == Cycle::A ? 'a' : 'b';
        s += std::to_string(l.index + 1);
        if (l.exp < 0) s += "^-1";
    }
    return s;
}

std::string format_braid_word(const BraidWord& w) {
    std::string s;
    for (const auto& l : w) {
        if (!s.empty()) s += ' ';
        s += "s" + std::to_string(l.rho + 1);
        if (l.exp < 0) s += "^-1";
    }
    return s;
}

LoopWord inverse(const LoopWord& w) {
    LoopWord out(w.rbegin(), w.rend());
    for (auto& l : out) l.exp = -l.exp;
    return out;
}

LoopWord reduce(const LoopWord& w) {
    LoopWord out;
    for (const auto& l : w) {
        if (!out.empty() && out.back().kind == l.kind && out.back().index == l.index &&
            out.back().exp == -l.exp)
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

BraidWord eta_braid_word(int nu, int mu, int convention) {
    if (nu < 0 || nu >= mu) throw ParseError("eta needs 0 <= nu < mu");
    const int sgn = convention == 1 ? -1 : 1;
    BraidWord pre;
    for (int i = mu - 1; i > nu; --i) pre.push_back({i, sgn});
    BraidWord w;
    for (auto it = pre.rbegin(); it != pre.rend(); ++it) w.push_back({it->rho, -it->exp});
    w.push_back({nu, 1});
    w.push_back({nu, 1});
    w.insert(w.end(), pre.begin(), pre.end());
    return w;
}

BraidWord pure_to_braid(const PureWord& w, int convention) {
    BraidWord out;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        BraidWord e = eta_braid_word(it->nu, it->mu, convention);
        if (it->exp < 0) {
            BraidWord inv(e.rbegin(), e.rend());
            for (auto& l : inv) l.exp = -l.exp;
            e = inv;
        }
        out.insert(out.end(), e.begin(), e.end());
    }
    return out;
}

}  // namespace qm
