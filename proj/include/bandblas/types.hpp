#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bandblas {

using index_t = std::int64_t;

/// Element precision of a matrix or kernel instantiation.
enum class Precision { f32, f64 };

constexpr double epsilon(Precision p) {
    return p == Precision::f32 ? 0x1p-23 : 0x1p-52;
}

constexpr std::string_view to_string(Precision p) {
    return p == Precision::f32 ? "f32" : "f64";
}

template <typename T>
struct precision_of;
template <>
struct precision_of<float> {
    static constexpr Precision value = Precision::f32;
};
template <>
struct precision_of<double> {
    static constexpr Precision value = Precision::f64;
};

template <typename T>
constexpr Precision precision_of_v = precision_of<T>::value;

enum class Side { lower, upper };

constexpr std::string_view to_string(Side s) {
    return s == Side::lower ? "lower" : "upper";
}

/// Invalid call argument, xerbla-style: carries the 1-based position of the
/// offending parameter in the called signature.
class argument_error : public std::invalid_argument {
public:
    argument_error(int parameter_index, const std::string& what)
        : std::invalid_argument("argument " + std::to_string(parameter_index) + ": " + what),
          index_(parameter_index) {}

    int parameter_index() const noexcept { return index_; }

private:
    int index_;
};

/// Access to an (i, j) position outside the stored band (or the wrong
/// triangle of a one-triangle container).
class band_error : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A vector-engine view was too short for the requested effective length.
class bounds_error : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

}  // namespace bandblas
