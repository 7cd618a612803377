#ifndef IONSPEC_VERIFY_HPP
#define IONSPEC_VERIFY_HPP

#include <ostream>

namespace ionspec {

// Fast self-contained invariant sweep: unitarity, propagator composition,
// parity-block structure, dataset round trips, thread determinism, the
// time-dependent integrator against the closed-form propagator, and config
// parsing. Prints one line per check; returns the number of failures.
int run_verification(std::ostream& os);

}  // namespace ionspec

#endif
