#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace jou {

using i128 = __int128;
using u128 = unsigned __int128;

/// Raised when an exact computation would leave the representable range.
/// Certification soundness outranks completeness: never wrap around.
struct OverflowError : std::runtime_error {
    explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

inline i128 checked_add(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("i128 add overflow");
    return r;
}

inline i128 checked_sub(i128 a, i128 b) {
    i128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("i128 sub overflow");
    return r;
}

inline i128 checked_mul(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("i128 mul overflow");
    return r;
}

inline u128 checked_umul(u128 a, u128 b) {
    u128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("u128 mul overflow");
    return r;
}

inline long long checked_mul_ll(long long a, long long b) {
    long long r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("i64 mul overflow");
    return r;
}

std::string i128_to_string(i128 v);
std::string u128_to_string(u128 v);
i128 i128_from_string(const std::string& s);

}  // namespace jou
