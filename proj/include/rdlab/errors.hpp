#ifndef RDLAB_ERRORS_HPP
#define RDLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rdlab {

// Root-finding / shooting / calibration could not produce a result.
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// NaN or blow-up detected during time stepping.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input data does not satisfy the assumptions a routine requires.
struct assumption_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace rdlab

#endif
