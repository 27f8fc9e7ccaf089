#pragma once

#include <stdexcept>
#include <string>

namespace morsejt {

// Contract violations carry the offending quantity in the message.
struct NonPositiveInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NoBoundStates : std::domain_error {
    using std::domain_error::domain_error;
};

struct IndexOutOfBasis : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct NonPositiveArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BasisTooSmall : std::domain_error {
    using std::domain_error::domain_error;
};

struct BasisMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptyInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MissingTruncation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotHermitian : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotAnEigenstate : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NphiTooSmall : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct QuadratureDegraded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigInvalid : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace morsejt
