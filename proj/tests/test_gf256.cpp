#include <doctest.h>

#include <stdexcept>

#include "bpec/gf256.hpp"
#include "bpec/rng.hpp"

using namespace bpec;

namespace {

// Independent oracle: Russian-peasant multiplication, reducing by 0x11b on
// every overflow of the running shift.
std::uint8_t peasant_mul(std::uint8_t a, std::uint8_t b) {
  unsigned acc = 0;
  unsigned aa = a;
  unsigned bb = b;
  while (bb) {
    if (bb & 1) acc ^= aa;
    aa <<= 1;
    if (aa & 0x100) aa ^= 0x11b;
    bb >>= 1;
  }
  return static_cast<std::uint8_t>(acc);
}

// Independent oracle: exhaustive search for the inverse.
std::uint8_t search_inv(std::uint8_t a) {
  for (int b = 1; b < 256; ++b)
    if (peasant_mul(a, static_cast<std::uint8_t>(b)) == 1) return static_cast<std::uint8_t>(b);
  return 0;
}

Payload random_payload(Rng& rng, int len) {
  Payload p(len);
  for (auto& b : p) b = rng.byte();
  return p;
}

}  // namespace

TEST_CASE("gf add is xor with identity 0") {
  CHECK(gf::add(0x57, 0x57) == 0x00);
  CHECK(gf::add(0x57, 0x83) == 0xd4);
  for (int a = 0; a < 256; ++a) CHECK(gf::add(static_cast<std::uint8_t>(a), 0x00) == a);
}

TEST_CASE("gf mul matches the peasant-multiplication oracle everywhere") {
  CHECK(gf::mul(0x80, 0x02) == 0x1b);  // 0x100 reduced by 0x11b
  CHECK(gf::mul(0x57, 0x83) == peasant_mul(0x57, 0x83));
  for (int a = 0; a < 256; ++a) {
    CHECK(gf::mul(static_cast<std::uint8_t>(a), 0x01) == a);
    for (int b = 0; b < 256; ++b)
      REQUIRE(gf::mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)) ==
              peasant_mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)));
  }
}

TEST_CASE("gf inv matches exhaustive search and rejects zero") {
  CHECK(gf::inv(0x01) == 0x01);
  CHECK_THROWS_AS(gf::inv(0x00), std::domain_error);
  for (int a = 1; a < 256; ++a) {
    const auto inv = gf::inv(static_cast<std::uint8_t>(a));
    CHECK(inv == search_inv(static_cast<std::uint8_t>(a)));
    CHECK(gf::mul(static_cast<std::uint8_t>(a), inv) == 1);
  }
}

TEST_CASE("field axioms hold on random triples") {
  Rng rng(42, Rng::Stream::coding);
  for (int it = 0; it < 20000; ++it) {
    const std::uint8_t a = rng.byte(), b = rng.byte(), c = rng.byte();
    CHECK(gf::mul(a, b) == gf::mul(b, a));
    CHECK(gf::mul(gf::mul(a, b), c) == gf::mul(a, gf::mul(b, c)));
    CHECK(gf::mul(a, gf::add(b, c)) == gf::add(gf::mul(a, b), gf::mul(a, c)));
  }
  for (int a = 0; a < 256; ++a)
    for (int b = 1; b < 256; ++b)
      REQUIRE(gf::mul(gf::mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)),
                      gf::inv(static_cast<std::uint8_t>(b))) == a);
}

TEST_CASE("combine basics") {
  Rng rng(7, Rng::Stream::coding);
  const Payload p = random_payload(rng, 32);
  const Payload q = random_payload(rng, 32);

  CHECK(gf::combine({p}, {1}) == p);
  CHECK(gf::combine({p, q}, {0, 0}) == Payload(32, 0));

  Payload x = gf::combine({p, q}, {1, 1});
  for (int i = 0; i < 32; ++i) CHECK(x[i] == (p[i] ^ q[i]));

  CHECK_THROWS_AS(gf::combine({p}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(gf::combine({p, Payload(8, 0)}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(gf::combine({}, {}), std::invalid_argument);
}

TEST_CASE("combine is linear in the coefficients") {
  Rng rng(11, Rng::Stream::coding);
  std::vector<Payload> packets;
  for (int i = 0; i < 5; ++i) packets.push_back(random_payload(rng, 24));
  for (int it = 0; it < 200; ++it) {
    std::vector<std::uint8_t> c1(5), c2(5), mixed(5);
    for (auto& c : c1) c = rng.byte();
    for (auto& c : c2) c = rng.byte();
    const std::uint8_t alpha = rng.byte(), beta = rng.byte();
    for (int i = 0; i < 5; ++i)
      mixed[i] = gf::add(gf::mul(alpha, c1[i]), gf::mul(beta, c2[i]));

    const Payload lhs = gf::combine(packets, mixed);
    Payload rhs(24, 0);
    gf::axpy(rhs, alpha, gf::combine(packets, c1));
    gf::axpy(rhs, beta, gf::combine(packets, c2));
    REQUIRE(lhs == rhs);
  }
}

TEST_CASE("solve_linear_system on identity and rank-deficient input") {
  Rng rng(3, Rng::Stream::coding);
  std::vector<Payload> planted = {random_payload(rng, 16), random_payload(rng, 16)};

  std::vector<gf::LinearRow> rows;
  rows.push_back({{1, 0}, planted[0]});
  rows.push_back({{0, 1}, planted[1]});
  auto solved = gf::solve_linear_system(rows, 2);
  REQUIRE(solved.has_value());
  CHECK(*solved == planted);

  std::vector<gf::LinearRow> dup;
  dup.push_back({{1, 2}, planted[0]});
  dup.push_back({{1, 2}, planted[0]});
  CHECK_FALSE(gf::solve_linear_system(dup, 2).has_value());

  CHECK_FALSE(gf::solve_linear_system({{{1, 2}, planted[0]}}, 2).has_value());
}

TEST_CASE("solve_linear_system accepts redundant consistent rows") {
  Rng rng(17, Rng::Stream::coding);
  std::vector<Payload> planted = {random_payload(rng, 8), random_payload(rng, 8),
                                  random_payload(rng, 8)};
  std::vector<gf::LinearRow> rows;
  for (int i = 0; i < 10; ++i) {
    gf::LinearRow row;
    row.coeffs = {rng.byte(), rng.byte(), rng.byte()};
    row.rhs = gf::combine(planted, row.coeffs);
    rows.push_back(std::move(row));
  }
  auto solved = gf::solve_linear_system(rows, 3);
  REQUIRE(solved.has_value());
  CHECK(*solved == planted);
}

TEST_CASE("solve_linear_system recovers a planted 8x8 solution bit-exactly") {
  Rng rng(99, Rng::Stream::coding);
  const int n = 8;
  std::vector<Payload> planted;
  for (int i = 0; i < n; ++i) planted.push_back(random_payload(rng, 16));

  // Full rank by construction: product of unit-lower and nonzero-diagonal
  // upper triangular matrices.
  std::vector<std::vector<std::uint8_t>> lower(n, std::vector<std::uint8_t>(n, 0));
  std::vector<std::vector<std::uint8_t>> upper(n, std::vector<std::uint8_t>(n, 0));
  for (int i = 0; i < n; ++i) {
    lower[i][i] = 1;
    upper[i][i] = rng.nonzero_byte();
    for (int j = 0; j < i; ++j) lower[i][j] = rng.byte();
    for (int j = i + 1; j < n; ++j) upper[i][j] = rng.byte();
  }
  std::vector<gf::LinearRow> rows(n);
  for (int i = 0; i < n; ++i) {
    rows[i].coeffs.assign(n, 0);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        rows[i].coeffs[j] ^= gf::mul(lower[i][k], upper[k][j]);
    rows[i].rhs = gf::combine(planted, rows[i].coeffs);
  }

  auto solved = gf::solve_linear_system(rows, n);
  REQUIRE(solved.has_value());
  CHECK(*solved == planted);
}
