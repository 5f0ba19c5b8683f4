#include "jouanolou/checked_int.hpp"

#include <algorithm>

namespace jou {

std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string out;
    while (v > 0) {
        out.push_back(char('0' + int(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string i128_to_string(i128 v) {
    if (v < 0) return "-" + u128_to_string(u128(0) - u128(v));
    return u128_to_string(u128(v));
}

i128 i128_from_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("i128_from_string: empty");
    bool neg = s[0] == '-';
    std::size_t i = neg ? 1 : 0;
    if (i >= s.size()) throw std::invalid_argument("i128_from_string: sign only");
    u128 acc = 0;
    constexpr u128 kLimit = (~u128(0)) / 10;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c < '0' || c > '9') throw std::invalid_argument("i128_from_string: bad digit");
        if (acc > kLimit) throw OverflowError("i128_from_string: overflow");
        acc = acc * 10 + u128(c - '0');
    }
    constexpr u128 kMax = u128(1) << 127;
    if (neg) {
        if (acc > kMax) throw OverflowError("i128_from_string: overflow");
        return -i128(acc - (acc == kMax ? 1 : 0)) - (acc == kMax ? 1 : 0);
    }
    if (acc >= kMax) throw OverflowError("i128_from_string: overflow");
    return i128(acc);
}

}  // namespace jou
