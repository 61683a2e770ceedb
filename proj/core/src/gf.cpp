#include "relnc/gf.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace relnc::gf {

namespace {

// x+1, x^2+x+1, x^3+x+1, x^4+x+1, x^5+x^2+1, x^6+x+1, x^7+x^3+1,
// x^8+x^4+x^3+x^2+1 (0x11d).
constexpr std::array<int, 9> kPrimitivePolys = {0, 0x3, 0x7, 0xb, 0x13, 0x25, 0x43, 0x89, 0x11d};

struct FieldTables {
    std::vector<int> log;    // log[a] for a in [1, 2^m)
    std::vector<int> antilog;  // antilog[k] = alpha^k, k in [0, 2^m-1)
};

const FieldTables& tables(int m) {
    static std::array<FieldTables, 9> cache;
    FieldTables& t = cache[static_cast<std::size_t>(m)];
    if (t.log.empty()) {
        const int card = 1 << m;
        t.log.assign(static_cast<std::size_t>(card), 0);
        t.antilog.assign(static_cast<std::size_t>(card - 1), 0);
        int b = 1;
        for (int k = 0; k < card - 1; ++k) {
            t.antilog[static_cast<std::size_t>(k)] = b;
            t.log[static_cast<std::size_t>(b)] = k;
            b <<= 1;
            if (b & card) b ^= kPrimitivePolys[static_cast<std::size_t>(m)];
        }
    }
    return t;
}

void check_operand(int x, int m) {
    if (m < 1 || m > 8) throw std::invalid_argument("gf: degree must be in [1, 8]");
    if (x < 0 || x >= (1 << m)) throw std::invalid_argument("gf: operand out of field");
}

}  // namespace

int primitive_poly(int m) {
    if (m < 1 || m > 8) throw std::invalid_argument("gf: degree must be in [1, 8]");
    return kPrimitivePolys[static_cast<std::size_t>(m)];
}

int mul(int x, int y, int m) {
    check_operand(x, m);
    check_operand(y, m);
    if (x == 0 || y == 0) return 0;
    if (m == 1) return 1;
    const FieldTables& t = tables(m);
    const int order = (1 << m) - 1;
    int k = t.log[static_cast<std::size_t>(x)] + t.log[static_cast<std::size_t>(y)];
    if (k >= order) k -= order;
    return t.antilog[static_cast<std::size_t>(k)];
}

int inv(int x, int m) {
    check_operand(x, m);
    if (x == 0) throw std::invalid_argument("gf: zero has no inverse");
    if (m == 1) return 1;
    const FieldTables& t = tables(m);
    const int order = (1 << m) - 1;
    const int k = (order - t.log[static_cast<std::size_t>(x)]) % order;
    return t.antilog[static_cast<std::size_t>(k)];
}

}  // namespace relnc::gf
