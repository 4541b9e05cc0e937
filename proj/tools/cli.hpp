#pragma once
// workbench command line: modular, verify, rep, calibrate.

#include <iosfwd>
#include <string>
#include <vector>

namespace wb {

enum Exit : int { kPass = 0, kFail = 1, kUsage = 2, kArbitration = 3, kOracle = 4, kIO = 5 };

constexpr int kCarrierGuard = 4096;

struct RunConfig {
    std::string command;
    std::string rep_kind;
    int k = 2;
    int aux = 1;
    int genus = 0;
    int max_n = 3;
    double tol = 1e-9;
    std::string spins = "1,1";
    std::string word;
    std::string format = "json";
    std::string out;
    std::string conventions;  // sidecar path
    std::string fixed_variants;
    bool rearbitrate = false;
};

std::vector<int> parse_spins(const std::string& text);  // throws std::invalid_argument

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wb
