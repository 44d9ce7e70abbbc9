#pragma once

// End-to-end pipeline: scramble -> systematic LDPC encode -> puncture ->
// interleave into packets -> per-packet ARQ over the correlated channel
// pair -> deinterleave -> peel -> descramble, for Bob and for Eve.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "wiretap/channel.hpp"
#include "wiretap/gf2.hpp"
#include "wiretap/ldpc.hpp"

namespace wiretap::protocol {

struct IncompleteReception : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidPattern : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RetransmissionCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultMaxRetx = 1'000'000;

// Everything a trial needs: scrambler pair, systematic generator,
// certified puncture pattern, and the interleaver dimensions.
struct CodecContext {
  gf2::BitMatrix h;
  ldpc::TannerGraph graph;
  gf2::BitMatrix scrambler;      // S, k x k
  gf2::BitMatrix descrambler;    // S^-1
  ldpc::SystematicGenerator gen;
  ldpc::PuncturePattern pattern;
  std::size_t eta;    // packets per message
  std::size_t alpha;  // bits per codeword per packet
  std::size_t codewords;  // L
  std::size_t k;
  std::size_t n;  // transmitted bits per codeword, = k in this regime
  std::size_t n_total;  // N
};

// Packets after the interleaver. Packet i holds bits
// p^j[(i)*alpha .. (i+1)*alpha) for every codeword j, so each packet is
// alpha * L bits.
struct PacketSet {
  std::vector<std::vector<std::uint8_t>> packets;  // eta x (alpha * L)
  std::vector<std::uint8_t> erased;  // per-packet flag for the holder
};

struct TrialResult {
  std::vector<std::size_t> w_per_packet;   // transmissions until Bob got it
  std::vector<std::size_t> eve_missing;    // packets Eve never saw clean
  std::vector<std::size_t> d_per_codeword; // L entries, all alpha*|missing|
  std::size_t d = 0;
  PacketSet bob;
  PacketSet eve;
};

inline CodecContext build_context(const gf2::BitMatrix& h, std::size_t eta,
                                  std::size_t alpha, std::size_t codewords,
                                  std::mt19937_64& rng,
                                  std::size_t max_restarts =
                                      ldpc::kDefaultMaxRestarts) {
  ldpc::TannerGraph graph(h);
  const std::size_t n_total = h.cols();
  const std::size_t k = h.cols() - h.rows();
  const std::size_t n = k;  // |R| = N-k, so n = N - |R| = k
  if (eta * alpha != n) {
    throw std::invalid_argument("build_context: eta * alpha must equal n");
  }
  auto pattern = ldpc::find_puncture_pattern(graph, rng, max_restarts);
  if (!pattern) {
    throw std::runtime_error(
        "build_context: no full-size puncture pattern found");
  }
  auto gen = ldpc::systematic_generator(h);
  auto scrambler = gf2::random_invertible(k, rng);
  auto descrambler = gf2::lu_invert(scrambler);
  return CodecContext{h,
                      std::move(graph),
                      std::move(scrambler),
                      std::move(*descrambler),
                      std::move(gen),
                      std::move(*pattern),
                      eta,
                      alpha,
                      codewords,
                      k,
                      n,
                      n_total};
}

inline std::vector<std::uint8_t> random_message(const CodecContext& ctx,
                                                std::mt19937_64& rng) {
  std::vector<std::uint8_t> m(ctx.codewords * ctx.k);
  std::bernoulli_distribution bit(0.5);
  for (auto& b : m) b = bit(rng) ? 1 : 0;
  return m;
}

inline PacketSet encode_message(const CodecContext& ctx,
                                const std::vector<std::uint8_t>& message) {
  if (message.size() != ctx.codewords * ctx.k) {
    throw std::invalid_argument("encode_message: message length mismatch");
  }
  // Per codeword: a = m S, b = a G, then keep transmitted positions Q.
  std::vector<std::vector<std::uint8_t>> punctured(ctx.codewords);
  for (std::size_t j = 0; j < ctx.codewords; ++j) {
    std::vector<std::uint8_t> block(message.begin() + j * ctx.k,
                                    message.begin() + (j + 1) * ctx.k);
    auto scrambled = gf2::multiply_vec(block, ctx.scrambler);
    auto codeword = gf2::multiply_vec(scrambled, ctx.gen.g);
    auto& p = punctured[j];
    p.reserve(ctx.n);
    for (std::size_t q : ctx.pattern.transmitted) p.push_back(codeword[q]);
  }

  PacketSet out;
  out.packets.resize(ctx.eta);
  out.erased.assign(ctx.eta, 0);
  for (std::size_t i = 0; i < ctx.eta; ++i) {
    auto& pkt = out.packets[i];
    pkt.reserve(ctx.alpha * ctx.codewords);
    for (std::size_t j = 0; j < ctx.codewords; ++j) {
      for (std::size_t b = 0; b < ctx.alpha; ++b) {
        pkt.push_back(punctured[j][i * ctx.alpha + b]);
      }
    }
  }
  return out;
}

// Per-packet ARQ: retransmit until Bob receives; Eve keeps a packet iff
// any (re)transmission reached her error-free. `alpha` and `codewords`
// size the degrees-of-freedom bookkeeping.
inline TrialResult transmit_arq(const PacketSet& packets,
                                const channel::JointErasureDist& dist,
                                std::mt19937_64& rng,
                                std::size_t alpha = 1,
                                std::size_t codewords = 1,
                                std::size_t max_retx = kDefaultMaxRetx) {
  TrialResult trial;
  trial.bob.packets = packets.packets;
  trial.bob.erased.assign(packets.packets.size(), 0);
  trial.eve.packets = packets.packets;
  trial.eve.erased.assign(packets.packets.size(), 0);

  const std::size_t eta = packets.packets.size();
  const std::size_t alpha_l = eta ? packets.packets[0].size() : 0;
  for (std::size_t i = 0; i < eta; ++i) {
    std::size_t w = 0;
    bool eve_got = false;
    for (;;) {
      ++w;
      if (w > max_retx) {
        throw RetransmissionCapExceeded("transmit_arq: packet " +
                                        std::to_string(i) +
                                        " exceeded the retransmission cap");
      }
      auto draw = channel::sample_pair(dist, rng);
      if (!draw.wiretap_erased) eve_got = true;
      if (!draw.main_erased) break;
    }
    trial.w_per_packet.push_back(w);
    if (!eve_got) {
      trial.eve_missing.push_back(i);
      trial.eve.erased[i] = 1;
      trial.eve.packets[i].assign(alpha_l, 0);
    }
  }

  trial.d = alpha * trial.eve_missing.size();
  trial.d_per_codeword.assign(codewords, trial.d);
  return trial;
}

namespace detail {

// Deinterleave one codeword's transmitted bits out of the packets;
// missing packets contribute erased positions (indices into Q).
struct Deinterleaved {
  std::vector<std::uint8_t> bits;          // length n, erased slots 0
  std::vector<std::size_t> erased_offsets; // indices into the Q ordering
};

inline Deinterleaved deinterleave(const CodecContext& ctx,
                                  const PacketSet& received,
                                  std::size_t codeword) {
  Deinterleaved out;
  out.bits.assign(ctx.n, 0);
  for (std::size_t i = 0; i < ctx.eta; ++i) {
    for (std::size_t b = 0; b < ctx.alpha; ++b) {
      const std::size_t pos = i * ctx.alpha + b;
      if (received.erased[i]) {
        out.erased_offsets.push_back(pos);
      } else {
        out.bits[pos] = received.packets[i][codeword * ctx.alpha + b];
      }
    }
  }
  return out;
}

struct CodewordDecode {
  std::vector<std::uint8_t> message;  // valid when residual == 0
  std::size_t residual_unknowns;
};

inline CodewordDecode decode_codeword(const CodecContext& ctx,
                                      const Deinterleaved& d) {
  std::vector<std::uint8_t> bits(ctx.n_total, 0);
  std::vector<std::size_t> erased = ctx.pattern.punctured;
  for (std::size_t q = 0; q < ctx.pattern.transmitted.size(); ++q) {
    bits[ctx.pattern.transmitted[q]] = d.bits[q];
  }
  for (std::size_t off : d.erased_offsets) {
    erased.push_back(ctx.pattern.transmitted[off]);
  }
  auto peeled = ldpc::peel_decode(ctx.graph, std::move(bits), erased);

  CodewordDecode out;
  out.residual_unknowns = peeled.residual.size();
  if (out.residual_unknowns == 0) {
    std::vector<std::uint8_t> scrambled(ctx.k);
    for (std::size_t j = 0; j < ctx.k; ++j) {
      scrambled[j] = peeled.bits[ctx.gen.systematic[j]];
    }
    out.message = gf2::multiply_vec(scrambled, ctx.descrambler);
  }
  return out;
}

}  // namespace detail

// Bob's decoder. ARQ guarantees every packet is present; a peeling
// residual here means the pattern certification was wrong.
inline std::vector<std::uint8_t> decode_bob(const CodecContext& ctx,
                                            const PacketSet& received) {
  for (std::size_t i = 0; i < ctx.eta; ++i) {
    if (received.erased[i]) {
      throw IncompleteReception("decode_bob: packet " + std::to_string(i) +
                                " missing");
    }
  }
  std::vector<std::uint8_t> message;
  message.reserve(ctx.codewords * ctx.k);
  for (std::size_t j = 0; j < ctx.codewords; ++j) {
    auto decoded =
        detail::decode_codeword(ctx, detail::deinterleave(ctx, received, j));
    if (decoded.residual_unknowns != 0) {
      throw InvalidPattern("decode_bob: peeling residual nonempty");
    }
    message.insert(message.end(), decoded.message.begin(),
                   decoded.message.end());
  }
  return message;
}

struct EveDecode {
  std::size_t d;  // alpha * missing packets
  std::vector<std::size_t> residual_per_codeword;
  std::vector<std::uint8_t> message;  // valid when d == 0
};

inline EveDecode decode_eve(const CodecContext& ctx,
                            const PacketSet& received) {
  EveDecode out;
  std::size_t missing = 0;
  for (auto e : received.erased) missing += e;
  out.d = ctx.alpha * missing;
  for (std::size_t j = 0; j < ctx.codewords; ++j) {
    auto decoded =
        detail::decode_codeword(ctx, detail::deinterleave(ctx, received, j));
    out.residual_per_codeword.push_back(decoded.residual_unknowns);
    if (decoded.residual_unknowns == 0) {
      out.message.insert(out.message.end(), decoded.message.begin(),
                         decoded.message.end());
    }
  }
  return out;
}

}  // namespace wiretap::protocol
