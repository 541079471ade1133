/// A declared system: parameters, the potential, and the derived component
/// nonlinearities, bundled so solvers do not rederive term lists per call.
#pragma once

#include <vector>

#include "cnls/params.hpp"
#include "cnls/potential.hpp"

namespace cnls {

struct NonlinearSystem {
    SystemParams params;
    PotentialF F;
    std::vector<NonlinearTerm> f;  // f[k-1] is the k-th component nonlinearity
};

inline NonlinearSystem make_system(SystemParams params, PotentialF F) {
    params.validate();
    if (params.l != F.ncomp)
        throw std::invalid_argument("make_system: params.l != F.ncomp");
    NonlinearSystem sys;
    sys.params = std::move(params);
    sys.f = derive_all(F);
    sys.F = std::move(F);
    return sys;
}

}  // namespace cnls
