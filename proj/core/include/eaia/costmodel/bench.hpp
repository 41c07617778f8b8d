#pragma once

#include "eaia/costmodel/costs.hpp"
#include "eaia/group/group.hpp"

namespace eaia::cost {

// Median wall time of hash, scalar-mul and point-add on the given backend.
// The other primitives keep their default figures. Energy is not measured.
PrimitiveCosts bench_primitives(unsigned iterations, const group::Group& g);

// Same, on the production curve.
PrimitiveCosts bench_primitives(unsigned iterations);

}  // namespace eaia::cost
