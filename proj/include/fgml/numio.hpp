#ifndef FGML_NUMIO_HPP
#define FGML_NUMIO_HPP

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fgml {

// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_int(long long v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Strict full-token parse; the whole token must be consumed.
inline bool try_parse_double(std::string_view tok, double& out) {
    if (tok.empty()) return false;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

inline double parse_double(std::string_view tok, const char* what = "number") {
    double v;
    if (!try_parse_double(tok, v))
        throw std::runtime_error(std::string("cannot parse ") + what + " from '" +
                                 std::string(tok) + "'");
    return v;
}

inline bool try_parse_int(std::string_view tok, long long& out) {
    if (tok.empty()) return false;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

// FNV-1a, used for content fingerprints in the text formats.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(data);
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

} // namespace fgml

#endif
