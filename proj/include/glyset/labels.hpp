#pragma once

#include "glyset/errors.hpp"

#include <string>

namespace glyset {

// UD (unhealthy for diabetics) is the positive class throughout.
enum class BinaryClass : unsigned char { UD, HD };

inline const char* to_string(BinaryClass c) {
    return c == BinaryClass::UD ? "UD" : "HD";
}

inline BinaryClass binary_class_from_string(const std::string& s) {
    if (s == "UD") return BinaryClass::UD;
    if (s == "HD") return BinaryClass::HD;
    throw Error("unknown binary class: " + s);
}

} // namespace glyset
