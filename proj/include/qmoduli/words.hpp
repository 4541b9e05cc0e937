#pragma once
// Flat word syntax shared by the library and the CLI.
//
//   loop words        l1 l2^-1 a1 b1^-1
//   braid words       s1 s2^-1
//   pure-braid words  e12 e13^-1
//   twist words       curves separated by spaces, letters of one curve
//                     joined by '.', e.g. "l1.l2 a b^-1" (a, b abbreviate a1, b1)
//
// Indices are 1-based in text and 0-based in memory.

#include <stdexcept>
#include <string>
#include <vector>

namespace qm {

class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Cycle { L, A, B };

struct LoopLetter {
    Cycle kind = Cycle::L;
    int index = 0;
    int exp = 1;
    bool operator==(const LoopLetter&) const = default;
};
using LoopWord = std::vector<LoopLetter>;

struct BraidLetter {
    int rho = 0;  // sigma_rho exchanges strands rho, rho+1
    int exp = 1;
    bool operator==(const BraidLetter&) const = default;
};
// Letters in time order: the first letter acts first.
using BraidWord = std::vector<BraidLetter>;

struct PureLetter {
    int nu = 0, mu = 1;  // nu < mu
    int exp = 1;
    bool operator==(const PureLetter&) const = default;
};
// Operator order: the matrix of e_a e_b is v(e_a) v(e_b).
using PureWord = std::vector<PureLetter>;

struct TwistLetter {
    LoopWord curve;
    int exp = 1;
};
using TwistWord = std::vector<TwistLetter>;

LoopWord parse_loop_word(const std::string& text);
BraidWord parse_braid_word(const std::string& text);
PureWord parse_pure_word(const std::string& text);
TwistWord parse_twist_word(const std::string& text);

std::string format_loop_word(const LoopWord& w);
std::string format_braid_word(const BraidWord& w);

LoopWord inverse(const LoopWord& w);
// cancels adjacent x x^-1 pairs
LoopWord reduce(const LoopWord& w);

// Braid word of the pure-braid generator eta_{nu,mu}, time order:
//   sigma_{nu+1} ... sigma_{mu-1}  sigma_nu^2  sigma_{mu-1}^-1 ... sigma_{nu+1}^-1
// Convention 0 flips the exponents of the conjugating letters.
BraidWord eta_braid_word(int nu, int mu, int convention = 1);
// Time-ordered braid word of a pure-braid word (last operator factor first).
BraidWord pure_to_braid(const PureWord& w, int convention = 1);

}  // namespace qm
