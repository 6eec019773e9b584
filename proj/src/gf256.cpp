#include "bpec/gf256.hpp"

#include <array>
#include <stdexcept>

namespace bpec::gf {

namespace {

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};

  Tables() {
    // 0x03 generates the multiplicative group of GF(2^8)/0x11b (0x02 does not).
    unsigned x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[i] = static_cast<std::uint8_t>(x);
      log[x] = static_cast<std::uint8_t>(i);
      unsigned x2 = x << 1;
      if (x2 & 0x100) x2 ^= kPoly;
      x = x2 ^ x;  // multiply by 0x03 = x * 2 + x
    }
    for (int i = 255; i < 512; ++i) exp[i] = exp[i - 255];
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

void init_tables() { tables(); }

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  const Tables& t = tables();
  return t.exp[t.log[a] + t.log[b]];
}

std::uint8_t inv(std::uint8_t a) {
  if (a == 0) throw std::domain_error("gf256: zero has no inverse");
  const Tables& t = tables();
  return t.exp[255 - t.log[a]];
}

void axpy(Payload& acc, std::uint8_t c, const Payload& x) {
  if (c == 0) return;
  const Tables& t = tables();
  const unsigned lc = t.log[c];
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const std::uint8_t xi = x[i];
    if (xi) acc[i] ^= t.exp[lc + t.log[xi]];
  }
}

Payload combine(const std::vector<Payload>& payloads, const std::vector<std::uint8_t>& coeffs) {
  if (payloads.empty() || payloads.size() != coeffs.size())
    throw std::invalid_argument("gf256: combine needs equal-length nonempty lists");
  const std::size_t len = payloads.front().size();
  for (const auto& p : payloads)
    if (p.size() != len) throw std::invalid_argument("gf256: payload length mismatch");
  Payload out(len, 0);
  for (std::size_t i = 0; i < payloads.size(); ++i) axpy(out, coeffs[i], payloads[i]);
  return out;
}

std::optional<std::vector<Payload>> solve_linear_system(std::vector<LinearRow> rows,
                                                        std::size_t unknowns) {
  if (rows.size() < unknowns) return std::nullopt;
  for (const auto& r : rows)
    if (r.coeffs.size() != unknowns)
      throw std::invalid_argument("gf256: row width does not match unknown count");

  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < unknowns; ++col) {
    std::size_t sel = pivot_row;
    while (sel < rows.size() && rows[sel].coeffs[col] == 0) ++sel;
    if (sel == rows.size()) return std::nullopt;  // rank deficient
    std::swap(rows[sel], rows[pivot_row]);

    const std::uint8_t piv_inv = inv(rows[pivot_row].coeffs[col]);
    for (auto& c : rows[pivot_row].coeffs) c = mul(c, piv_inv);
    for (auto& b : rows[pivot_row].rhs) b = mul(b, piv_inv);

    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == pivot_row) continue;
      const std::uint8_t f = rows[r].coeffs[col];
      if (f == 0) continue;
      for (std::size_t c = col; c < unknowns; ++c)
        rows[r].coeffs[c] ^= mul(f, rows[pivot_row].coeffs[c]);
      axpy(rows[r].rhs, f, rows[pivot_row].rhs);
    }
    ++pivot_row;
  }

  std::vector<Payload> out(unknowns);
  for (std::size_t i = 0; i < unknowns; ++i) out[i] = std::move(rows[i].rhs);
  return out;
}

}  // namespace bpec::gf
