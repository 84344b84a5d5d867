#ifndef SEQKERN_SELFTEST_HPP
#define SEQKERN_SELFTEST_HPP

#include <cstdint>
#include <iosfwd>

namespace seqkern {

/// Runs the randomized invariant checks (oracle equivalence, factor algebra,
/// Chen and shuffle identities, Gram PSD) and prints one line per check.
/// Returns true when every check passes.
bool run_selftest(std::ostream& out, std::uint64_t seed = 2024);

}  // namespace seqkern

#endif  // SEQKERN_SELFTEST_HPP
