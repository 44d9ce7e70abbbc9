#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "wiretap/gf2.hpp"

using wiretap::gf2::BitMatrix;

TEST_CASE("multiply by identity is identity") {
  auto m = BitMatrix::from_rows({{1, 0, 1}, {0, 1, 1}, {1, 1, 0}});
  CHECK(multiply(BitMatrix::identity(3), m) == m);
  CHECK(multiply(m, BitMatrix::identity(3)) == m);
}

TEST_CASE("multiply uses mod-2 arithmetic") {
  auto a = BitMatrix::from_rows({{1, 1}, {0, 1}});
  auto b = BitMatrix::from_rows({{1, 0}, {1, 1}});
  auto expected = BitMatrix::from_rows({{0, 1}, {1, 1}});
  CHECK(multiply(a, b) == expected);
}

TEST_CASE("row vector times identity") {
  auto v = BitMatrix::from_rows({{1, 0, 1}});
  CHECK(multiply(v, BitMatrix::identity(3)) == v);
  CHECK(wiretap::gf2::multiply_vec({1, 0, 1}, BitMatrix::identity(3)) ==
        std::vector<std::uint8_t>{1, 0, 1});
}

TEST_CASE("multiply rejects mismatched dimensions") {
  auto a = BitMatrix::identity(3);
  auto b = BitMatrix::identity(4);
  CHECK_THROWS_AS(multiply(a, b), std::invalid_argument);
}

TEST_CASE("lu_invert of identity") {
  auto inv = wiretap::gf2::lu_invert(BitMatrix::identity(5));
  REQUIRE(inv.has_value());
  CHECK(*inv == BitMatrix::identity(5));
}

TEST_CASE("lu_invert reports singular") {
  BitMatrix zeros(4, 4);
  CHECK_FALSE(wiretap::gf2::lu_invert(zeros).has_value());
  CHECK_THROWS_AS(wiretap::gf2::lu_invert(BitMatrix(2, 3)),
                  std::invalid_argument);
}

TEST_CASE("lu_invert round trip on random invertible matrices") {
  std::mt19937_64 rng(7);
  for (std::size_t k : {1u, 2u, 8u, 17u, 65u}) {
    auto m = wiretap::gf2::random_invertible(k, rng);
    auto inv = wiretap::gf2::lu_invert(m);
    REQUIRE(inv.has_value());
    CHECK(multiply(m, *inv) == BitMatrix::identity(k));
    CHECK(multiply(*inv, m) == BitMatrix::identity(k));
  }
}

TEST_CASE("rank basics") {
  CHECK(wiretap::gf2::rank(BitMatrix::identity(6)) == 6);
  CHECK(wiretap::gf2::rank(BitMatrix::from_rows({{1, 1}, {1, 1}})) == 1);
  // Transpose of the (7,4) Hamming parity-check matrix: 7x3, full column
  // rank (hand elimination: columns are independent).
  auto ht = BitMatrix::from_rows({{1, 1, 1},
                                  {1, 1, 0},
                                  {1, 0, 1},
                                  {0, 1, 1},
                                  {1, 0, 0},
                                  {0, 1, 0},
                                  {0, 0, 1}});
  CHECK(wiretap::gf2::rank(ht) == 3);
}

TEST_CASE("rank equals rank of transpose") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    BitMatrix m(5, 9);
    std::bernoulli_distribution bit(0.4);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 9; ++j) m.set(i, j, bit(rng));
    }
    CHECK(wiretap::gf2::rank(m) ==
          wiretap::gf2::rank(wiretap::gf2::transpose(m)));
  }
}

TEST_CASE("multiply is associative") {
  std::mt19937_64 rng(13);
  std::bernoulli_distribution bit(0.5);
  auto random_matrix = [&](std::size_t r, std::size_t c) {
    BitMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) m.set(i, j, bit(rng));
    }
    return m;
  };
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_matrix(3, 4);
    auto b = random_matrix(4, 5);
    auto c = random_matrix(5, 2);
    CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
  }
}

TEST_CASE("random_invertible determinism and seed sensitivity") {
  std::mt19937_64 rng1(42), rng2(42), rng3(43);
  auto a = wiretap::gf2::random_invertible(8, rng1);
  auto b = wiretap::gf2::random_invertible(8, rng2);
  auto c = wiretap::gf2::random_invertible(8, rng3);
  CHECK(a == b);
  CHECK_FALSE(a == c);

  std::mt19937_64 rng4(1);
  auto one = wiretap::gf2::random_invertible(1, rng4);
  CHECK(one == BitMatrix::identity(1));
}
