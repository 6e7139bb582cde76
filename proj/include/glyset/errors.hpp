#pragma once

#include <stdexcept>
#include <string>

namespace glyset {

// Every contract violation or unrecoverable input problem in the library
// surfaces as this type. The CLI turns it into a nonzero exit status.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace glyset
