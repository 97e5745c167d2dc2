#pragma once

#include <stdexcept>
#include <string>

namespace dcm {

// Fatal error raised by any stage. Recoverable conditions (rejected tweets,
// undefined correlation scores, skipped records) are values, not exceptions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dcm
