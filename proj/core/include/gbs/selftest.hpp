#pragma once

#include <iosfwd>

namespace gbs {

/// Gating self-checks (algebra laws, conventions, correspondence rules,
/// master-vs-commutator, decomposition, Wiener moments, free-SDE limit).
/// Prints one line per check; returns false when anything fails. A correct
/// build passes everything in well under a minute.
bool run_validation(std::ostream& out);

}  // namespace gbs
