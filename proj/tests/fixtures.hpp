#pragma once

#include "shearband/heteroclinic.hpp"
#include "shearband/model.hpp"
#include "shearband/reconstruct.hpp"

namespace sbtest {

inline const shearband::ModelParams& params_fig3() {
    static const shearband::ModelParams p = [] {
        shearband::RawParams raw;
        raw.n = 0.3;
        raw.lambda = 2.0;
        return shearband::validate(raw);
    }();
    return p;
}

// The (n, lambda) = (0.3, 2) heteroclinic orbit, built once and shared by the
// heteroclinic / reconstruct / pdecheck suites.
inline const shearband::het::Orbit& orbit_fig3() {
    static const shearband::het::Orbit orb = shearband::het::build_orbit(params_fig3());
    return orb;
}

inline const shearband::reconstruct::Profile& profile_fig3() {
    static const shearband::reconstruct::Profile pr =
        shearband::reconstruct::profile_from_orbit(orbit_fig3(), params_fig3());
    return pr;
}

} // namespace sbtest
