#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpd/rng.hpp"

namespace qpd {

struct IdentityRow {
    std::string name;
    std::string detail;      // grid or case the check ran over
    double defect = 0.0;     // measured discrepancy; mismatch count for exact rows
    double tolerance = 0.0;
    bool pass = false;
};

struct IdentityOptions {
    long long mc_samples = 200000;
    std::uint64_t seed = kDefaultSeed;
    bool include_monte_carlo = true;
};

/* The full battery of structural checks: exact-backend identities first,
 * float grids after, Monte Carlo last.  Row names and order are stable,
 * so the rendered output can be compared byte-for-byte between runs. */
std::vector<IdentityRow> run_identity_checks(const IdentityOptions& options = {});

} // namespace qpd
