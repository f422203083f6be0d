#pragma once

#include "dpnsound/dpn.hpp"

#include <cstddef>

namespace dpnsound {

// Prepends a chain of n fresh places q1..qn and true-guarded transitions: the new initial
// marking is {q1}, and the last transition produces the old initial marking.  n = 0 is the
// identity.
Dpn add_sequential_states(const Dpn& dpn, std::size_t n);

// Rewrites every top-level atom e op e' of each guard into
//   e = z1 && z1 chain z2 && ... && zk op e'
// where the z's are fresh written variables of the atom's sort and `chain` defaults to "=".
// Atom j of a guard uses the j-th block of k variables; blocks are shared between guards.
// k = 0 is the identity.
Dpn add_chained_vars(const Dpn& dpn, std::size_t k, Op chain = Op::Eq);

} // namespace dpnsound
