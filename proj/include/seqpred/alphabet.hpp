#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seqpred/errors.hpp"

namespace seqpred {

using Symbol = std::uint8_t;
using Seq = std::vector<Symbol>;

// Finite alphabet {0, ..., size-1}. bits() = log2(size) is the per-symbol
// information budget M used throughout the bounds.
class Alphabet {
  public:
    explicit Alphabet(int size) : size_(size) {
        if (size < 2 || size > 256)
            throw InputError("alphabet size must be in [2, 256], got " + std::to_string(size));
        bits_ = std::log2(static_cast<double>(size));
    }

    int size() const { return size_; }
    double bits() const { return bits_; }

    bool contains(Symbol a) const { return static_cast<int>(a) < size_; }

    void validate(const Seq& x) const {
        for (Symbol a : x)
            if (!contains(a))
                throw InputError("symbol " + std::to_string(int(a)) + " out of range for alphabet of size " +
                                 std::to_string(size_));
    }

    bool operator==(const Alphabet& o) const { return size_ == o.size_; }
    bool operator!=(const Alphabet& o) const { return size_ != o.size_; }

  private:
    int size_;
    double bits_;
};

// Digits '0'..'9' then 'a'..'z'; enough for the desk-scale alphabets in use.
inline Seq seq_from_string(std::string_view s) {
    Seq out;
    out.reserve(s.size());
    for (char c : s) {
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'z') v = 10 + (c - 'a');
        else throw InputError(std::string("bad symbol character '") + c + "' in sequence literal");
        out.push_back(static_cast<Symbol>(v));
    }
    return out;
}

inline std::string seq_to_string(const Seq& x) {
    std::string s;
    s.reserve(x.size());
    for (Symbol a : x) s.push_back(a < 10 ? char('0' + a) : char('a' + (a - 10)));
    return s;
}

// Radix-A encoding with the first symbol most significant, so numeric order
// equals lexicographic order. Caller guarantees A^n fits 32 bits.
inline std::uint32_t encode_seq(const Seq& x, int a) {
    std::uint32_t code = 0;
    for (Symbol s : x) code = code * static_cast<std::uint32_t>(a) + s;
    return code;
}

inline Seq decode_seq(std::uint32_t code, int n, int a) {
    Seq x(static_cast<std::size_t>(n));
    for (int t = n - 1; t >= 0; --t) {
        x[static_cast<std::size_t>(t)] = static_cast<Symbol>(code % static_cast<std::uint32_t>(a));
        code /= static_cast<std::uint32_t>(a);
    }
    return x;
}

// A^n as size_t, throwing when it would exceed `cap`.
inline std::size_t pow_checked(int a, int n, std::size_t cap) {
    std::size_t v = 1;
    for (int i = 0; i < n; ++i) {
        if (v > cap / static_cast<std::size_t>(a))
            throw CapExceeded("A^n exceeds cap of " + std::to_string(cap) + " sequences (A=" + std::to_string(a) +
                              ", n=" + std::to_string(n) + ")");
        v *= static_cast<std::size_t>(a);
    }
    return v;
}

} // namespace seqpred
