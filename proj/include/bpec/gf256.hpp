#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace bpec {

// A packet body: P bytes, each byte one GF(2^8) symbol. Every payload in a
// simulation shares the same length.
using Payload = std::vector<std::uint8_t>;

namespace gf {

// Reduction polynomial x^8 + x^4 + x^3 + x + 1. Fixed so that decode
// transcripts are reproducible bit-exactly.
inline constexpr unsigned kPoly = 0x11b;

void init_tables();

inline std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }

std::uint8_t mul(std::uint8_t a, std::uint8_t b);

// Multiplicative inverse; throws std::domain_error on zero.
std::uint8_t inv(std::uint8_t a);

// Symbol-wise sum of coeffs[i] * payloads[i]. All payloads must share one
// length and the two lists must be nonempty and of equal size; otherwise
// throws std::invalid_argument.
Payload combine(const std::vector<Payload>& payloads, const std::vector<std::uint8_t>& coeffs);

// acc += c * x, symbol-wise. Sizes must already agree.
void axpy(Payload& acc, std::uint8_t c, const Payload& x);

struct LinearRow {
  std::vector<std::uint8_t> coeffs;  // length U, one entry per unknown
  Payload rhs;
};

// Gaussian elimination over GF(2^8) with partial pivoting by first nonzero
// entry. Returns the unique solution (U payloads) when the coefficient matrix
// has rank U, std::nullopt when it is rank deficient.
std::optional<std::vector<Payload>> solve_linear_system(std::vector<LinearRow> rows,
                                                        std::size_t unknowns);

}  // namespace gf
}  // namespace bpec
