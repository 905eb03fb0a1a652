#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qnnv {

struct SelfcheckOptions {
    std::size_t bv_instances = 40;   // random fixed-point reach-bv, brute vs automata
    std::size_t cnf_instances = 40;  // random 3-CNF, truth table vs pattern LP vs quantised brute force
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

struct SelfcheckCase {
    std::string name;
    bool agree = true;
    std::string detail;  // verdicts per backend
};

struct SelfcheckReport {
    std::vector<SelfcheckCase> cases;  // in instance order, whatever the job count
    std::size_t disagreements() const;
};

/// Each instance is generated from (seed, index) alone.
SelfcheckReport run_selfcheck(const SelfcheckOptions& opts);

}  // namespace qnnv
