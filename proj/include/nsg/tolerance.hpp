#pragma once

#include "nsg/errors.hpp"

namespace nsg {

// Numerical knobs shared by every float-backend computation. The defaults
// are the contract the acceptance suite runs at; change them per call, not
// globally.
struct ToleranceConfig {
    double eps_abs = 1e-9;   // absolute norm tolerance
    double eps_flat = 1e-7;  // flatness detection threshold
    int grid_2d = 4096;      // angle samples for 2-D scans
    int grid_3d = 8192;      // low-discrepancy samples for 3-D/4-D scans
    double tau_min = 1e-4;   // smallest relative probe scale for strictness

    [[nodiscard]] int grid_for(int dim) const {
        return dim <= 2 ? grid_2d : grid_3d;
    }

    void validate() const {
        if (eps_abs <= 0 || eps_flat <= 0 || grid_2d <= 0 || grid_3d <= 0)
            throw InvalidSpec("tolerances must be positive");
        if (tau_min <= 0 || tau_min >= 1)
            throw InvalidSpec("tau_min must lie in (0,1)");
    }
};

} // namespace nsg
