#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>

#include "wiretap/channel.hpp"
#include "wiretap/ldpc.hpp"
#include "wiretap/protocol.hpp"
#include "wiretap/seeding.hpp"

namespace ch = wiretap::channel;
namespace ldpc = wiretap::ldpc;
namespace proto = wiretap::protocol;

namespace {

wiretap::gf2::BitMatrix hamming_h() {
  return wiretap::gf2::BitMatrix::from_rows({{1, 1, 1, 0, 1, 0, 0},
                                             {1, 1, 0, 1, 0, 1, 0},
                                             {1, 0, 1, 1, 0, 0, 1}});
}

proto::CodecContext small_context(std::uint64_t seed = 1,
                                  std::size_t codewords = 2) {
  std::mt19937_64 rng(seed);
  // (7,4) code: n = k = 4, eta = 4 packets of alpha = 1 bit per codeword.
  return proto::build_context(hamming_h(), 4, 1, codewords, rng);
}

}  // namespace

TEST_CASE("build_context assembles the small fixture") {
  auto ctx = small_context();
  CHECK(ctx.k == 4);
  CHECK(ctx.n == 4);
  CHECK(ctx.n_total == 7);
  CHECK(ctx.eta == 4);
  CHECK(ctx.pattern.punctured.size() == 3);
  CHECK_FALSE(ldpc::certify_pattern(ctx.graph, ctx.pattern).has_value());
}

TEST_CASE("build_context rejects mismatched packetization") {
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(proto::build_context(hamming_h(), 5, 1, 1, rng),
                  std::invalid_argument);
}

TEST_CASE("full-scale dimensions fit the rate-one regime") {
  // N = 10000, k = 5000, |R| = 5000, alpha = 1 implies eta = n = 5000.
  // Checked arithmetically here; the full-scale build is exercised in
  // the simulator.
  const std::size_t n_total = 10000, k = 5000;
  CHECK(n_total - k == 5000);
  CHECK(k == 5000 * 1);
}

TEST_CASE("all-zero message encodes to all-zero packets") {
  auto ctx = small_context(3, 1);
  std::vector<std::uint8_t> zeros(ctx.k, 0);
  auto packets = proto::encode_message(ctx, zeros);
  REQUIRE(packets.packets.size() == 4);
  for (const auto& pkt : packets.packets) {
    for (auto b : pkt) CHECK(b == 0);
  }
}

TEST_CASE("encode_message rejects wrong message length") {
  auto ctx = small_context();
  CHECK_THROWS_AS(proto::encode_message(ctx, std::vector<std::uint8_t>(3)),
                  std::invalid_argument);
}

TEST_CASE("interleaver layout: packet i holds alpha bits of every codeword") {
  auto ctx = small_context(4, 2);
  std::mt19937_64 rng(9);
  auto msg = proto::random_message(ctx, rng);
  auto packets = proto::encode_message(ctx, msg);
  for (const auto& pkt : packets.packets) {
    CHECK(pkt.size() == ctx.alpha * ctx.codewords);
  }
}

TEST_CASE("encode/decode round trip with full reception") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto ctx = small_context(seed + 100, 3);
    std::mt19937_64 rng(seed);
    auto msg = proto::random_message(ctx, rng);
    auto packets = proto::encode_message(ctx, msg);
    CHECK(proto::decode_bob(ctx, packets) == msg);
  }
}

TEST_CASE("distinct messages yield distinct packet sets") {
  auto ctx = small_context(5, 1);
  std::mt19937_64 rng(2);
  auto msg = proto::random_message(ctx, rng);
  auto base = proto::encode_message(ctx, msg);
  for (std::size_t flip = 0; flip < ctx.k; ++flip) {
    auto other = msg;
    other[flip] ^= 1;
    auto packets = proto::encode_message(ctx, other);
    CHECK(packets.packets != base.packets);
  }
}

TEST_CASE("decode_bob requires every packet") {
  auto ctx = small_context(6, 1);
  std::mt19937_64 rng(3);
  auto packets = proto::encode_message(ctx, proto::random_message(ctx, rng));
  packets.erased[2] = 1;
  CHECK_THROWS_AS(proto::decode_bob(ctx, packets),
                  proto::IncompleteReception);
}

TEST_CASE("corrupted transmitted bit decodes to a different message") {
  // In the rate-one regime the transmitted positions form an information
  // set, so a flipped bit yields another consistent codeword rather than
  // a check violation; the corruption is silent but never crosses into
  // the original message.
  auto ctx = small_context(7, 1);
  std::mt19937_64 rng(4);
  auto msg = proto::random_message(ctx, rng);
  auto packets = proto::encode_message(ctx, msg);
  packets.packets[0][0] ^= 1;
  CHECK(proto::decode_bob(ctx, packets) != msg);
}

TEST_CASE("peeling detects corruption when checks are overdetermined") {
  // Known bits that violate a check surface as InconsistentInput; with
  // no erasures every check is fully known.
  auto h = hamming_h();
  ldpc::TannerGraph g(h);
  auto gen = ldpc::systematic_generator(h);
  auto cw = wiretap::gf2::multiply_vec({1, 0, 1, 1}, gen.g);
  cw[0] ^= 1;
  CHECK_THROWS_AS(ldpc::peel_decode(g, cw, {}), ldpc::InconsistentInput);
}

TEST_CASE("transmit_arq with a perfect main channel") {
  auto ctx = small_context(8, 1);
  std::mt19937_64 rng(5);
  auto packets = proto::encode_message(ctx, proto::random_message(ctx, rng));
  // delta = 0: one transmission each; Eve misses iff her single draw
  // erased.
  auto dist = ch::joint_independent(0.0, 0.5);
  auto trial = proto::transmit_arq(packets, dist, rng, ctx.alpha,
                                   ctx.codewords);
  for (auto w : trial.w_per_packet) CHECK(w == 1);
}

TEST_CASE("transmit_arq with a perfect wiretap channel") {
  auto ctx = small_context(9, 1);
  std::mt19937_64 rng(6);
  auto packets = proto::encode_message(ctx, proto::random_message(ctx, rng));
  auto dist = ch::joint_independent(0.5, 0.0);
  auto trial = proto::transmit_arq(packets, dist, rng, ctx.alpha,
                                   ctx.codewords);
  CHECK(trial.eve_missing.empty());
  CHECK(trial.d == 0);
}

TEST_CASE("transmit_arq enforces the retransmission cap") {
  auto ctx = small_context(10, 1);
  std::mt19937_64 rng(7);
  auto packets = proto::encode_message(ctx, proto::random_message(ctx, rng));
  ch::JointErasureDist always_erased{0.0, 0.0, 0.0, 1.0};
  CHECK_THROWS_AS(proto::transmit_arq(packets, always_erased, rng, 1, 1, 10),
                  proto::RetransmissionCapExceeded);
}

TEST_CASE("decode_eve with full reception recovers the message") {
  auto ctx = small_context(11, 2);
  std::mt19937_64 rng(8);
  auto msg = proto::random_message(ctx, rng);
  auto packets = proto::encode_message(ctx, msg);
  auto eve = proto::decode_eve(ctx, packets);
  CHECK(eve.d == 0);
  CHECK(eve.message == msg);
}

TEST_CASE("single missing packet costs exactly alpha degrees of freedom") {
  auto h = hamming_h();
  auto ctx = small_context(12, 1);
  std::mt19937_64 rng(9);
  auto msg = proto::random_message(ctx, rng);
  auto packets = proto::encode_message(ctx, msg);
  for (std::size_t miss = 0; miss < ctx.eta; ++miss) {
    auto received = packets;
    received.erased[miss] = 1;
    received.packets[miss].assign(received.packets[miss].size(), 0);
    auto eve = proto::decode_eve(ctx, received);
    CHECK(eve.d == 1);
    // ML oracle agrees: punctured plus the erased transmitted position.
    auto unknown = ctx.pattern.punctured;
    unknown.push_back(ctx.pattern.transmitted[miss]);
    CHECK(ldpc::dof_ml(h, unknown) == 1);
    for (auto r : eve.residual_per_codeword) CHECK(r >= 1);
  }
}

TEST_CASE("all packets missing costs n degrees of freedom") {
  auto h = hamming_h();
  auto ctx = small_context(13, 1);
  std::mt19937_64 rng(10);
  auto packets = proto::encode_message(ctx, proto::random_message(ctx, rng));
  for (std::size_t i = 0; i < ctx.eta; ++i) {
    packets.erased[i] = 1;
    packets.packets[i].assign(packets.packets[i].size(), 0);
  }
  auto eve = proto::decode_eve(ctx, packets);
  CHECK(eve.d == ctx.n);
  std::vector<std::size_t> unknown(ctx.n_total);
  std::iota(unknown.begin(), unknown.end(), 0);
  CHECK(ldpc::dof_ml(h, unknown) == ctx.n);
}

TEST_CASE("Bob always recovers and D is constant across codewords") {
  std::mt19937_64 param_rng(2025);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int trial = 0; trial < 200; ++trial) {
    auto ctx = small_context(500 + trial % 5, 3);
    const double delta = unit(param_rng);
    const double epsilon = unit(param_rng);
    auto bounds = ch::correlation_bounds(delta, epsilon);
    std::uniform_real_distribution<double> rho_draw(bounds.rho_min,
                                                    bounds.rho_max);
    auto dist = ch::joint_from_rho({delta, epsilon, rho_draw(param_rng)});

    auto rng = wiretap::seeding::make_rng(77, 0, trial);
    auto msg = proto::random_message(ctx, rng);
    auto packets = proto::encode_message(ctx, msg);
    auto result = proto::transmit_arq(packets, dist, rng, ctx.alpha,
                                      ctx.codewords);
    CHECK(proto::decode_bob(ctx, result.bob) == msg);

    auto eve = proto::decode_eve(ctx, result.eve);
    CHECK(eve.d == ctx.alpha * result.eve_missing.size());
    for (auto d : result.d_per_codeword) CHECK(d == result.d);
  }
}

TEST_CASE("empirical Pr(R_ef) matches the independent-case formula") {
  // delta = eps = 0.5, rho = 0: Pr(R_ef) = (1-0.5)/(1-0.25) = 2/3.
  auto dist = ch::joint_independent(0.5, 0.5);
  std::mt19937_64 rng(31337);
  const std::size_t packets = 100'000;
  std::size_t eve_got = 0;
  for (std::size_t i = 0; i < packets; ++i) {
    bool got = false;
    for (;;) {
      auto draw = ch::sample_pair(dist, rng);
      if (!draw.wiretap_erased) got = true;
      if (!draw.main_erased) break;
    }
    eve_got += got;
  }
  const double p = 2.0 / 3.0;
  const double se = std::sqrt(p * (1 - p) / packets);
  CHECK(std::abs(static_cast<double>(eve_got) / packets - p) < 4 * se);
}
