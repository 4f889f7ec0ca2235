#pragma once

#include <stdexcept>
#include <string>

namespace xscreen {

// Bad caller input: malformed files, out-of-range parameters, shape mismatches.
// The CLI maps this to exit code 2.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The exact method cannot place the scores on an integer lattice of workable
// size. Callers should rerun with the normal approximation; we never fall
// back silently.
struct exact_unavailable : input_error {
    using input_error::input_error;
};

}  // namespace xscreen
