#pragma once

// LDPC machinery: Tanner graph, peeling erasure decoder, maximal stopping
// sets, puncture-pattern search, systematic generator derivation, alist
// I/O, and random code construction.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wiretap/gf2.hpp"

namespace wiretap::ldpc {

struct InconsistentInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bipartite graph of an (N-k) x N parity-check matrix. Check node u_i is
// adjacent to variable node v_j iff H[i][j] = 1.
class TannerGraph {
 public:
  explicit TannerGraph(const gf2::BitMatrix& h)
      : n_var_(h.cols()), n_chk_(h.rows()),
        var_to_chk_(h.cols()), chk_to_var_(h.rows()) {
    for (std::size_t i = 0; i < h.rows(); ++i) {
      for (std::size_t j = 0; j < h.cols(); ++j) {
        if (h.get(i, j)) {
          chk_to_var_[i].push_back(j);
          var_to_chk_[j].push_back(i);
        }
      }
    }
  }

  std::size_t n_var() const { return n_var_; }
  std::size_t n_chk() const { return n_chk_; }
  const std::vector<std::size_t>& checks_of(std::size_t v) const {
    return var_to_chk_[v];
  }
  const std::vector<std::size_t>& vars_of(std::size_t u) const {
    return chk_to_var_[u];
  }

  gf2::BitMatrix to_matrix() const {
    gf2::BitMatrix h(n_chk_, n_var_);
    for (std::size_t u = 0; u < n_chk_; ++u) {
      for (std::size_t v : chk_to_var_[u]) h.set(u, v, true);
    }
    return h;
  }

 private:
  std::size_t n_var_;
  std::size_t n_chk_;
  std::vector<std::vector<std::size_t>> var_to_chk_;
  std::vector<std::vector<std::size_t>> chk_to_var_;
};

// Peeling on erasure structure only: repeatedly resolve any erased
// variable adjacent to a check with exactly one erased neighbor. Returns
// the residual unknown set, which is the maximal stopping set within
// `erased`.
inline std::vector<std::size_t> peel_residual(
    const TannerGraph& graph, const std::vector<std::size_t>& erased) {
  std::vector<std::uint8_t> is_erased(graph.n_var(), 0);
  for (std::size_t v : erased) is_erased[v] = 1;

  std::vector<std::size_t> chk_unknown(graph.n_chk(), 0);
  for (std::size_t u = 0; u < graph.n_chk(); ++u) {
    for (std::size_t v : graph.vars_of(u)) chk_unknown[u] += is_erased[v];
  }

  std::vector<std::size_t> frontier;
  for (std::size_t u = 0; u < graph.n_chk(); ++u) {
    if (chk_unknown[u] == 1) frontier.push_back(u);
  }

  while (!frontier.empty()) {
    const std::size_t u = frontier.back();
    frontier.pop_back();
    if (chk_unknown[u] != 1) continue;
    std::size_t resolved = graph.n_var();
    for (std::size_t v : graph.vars_of(u)) {
      if (is_erased[v]) {
        resolved = v;
        break;
      }
    }
    is_erased[resolved] = 0;
    for (std::size_t u2 : graph.checks_of(resolved)) {
      if (--chk_unknown[u2] == 1) frontier.push_back(u2);
    }
  }

  std::vector<std::size_t> residual;
  for (std::size_t v = 0; v < graph.n_var(); ++v) {
    if (is_erased[v]) residual.push_back(v);
  }
  return residual;
}

inline std::vector<std::size_t> maximal_stopping_set(
    const TannerGraph& graph, const std::vector<std::size_t>& subset) {
  return peel_residual(graph, subset);
}

// Value-level peeling decode. `bits[v]` holds the known value for
// non-erased v and is filled in as variables are resolved. Checks whose
// neighbors are all known must be satisfied; otherwise the input is
// corrupted rather than erased.
struct PeelResult {
  std::vector<std::uint8_t> bits;       // full assignment (residual bits 0)
  std::vector<std::size_t> residual;    // unresolved variables; empty = full
};

inline PeelResult peel_decode(const TannerGraph& graph,
                              std::vector<std::uint8_t> bits,
                              const std::vector<std::size_t>& erased) {
  if (bits.size() != graph.n_var()) {
    throw std::invalid_argument("peel_decode: assignment size mismatch");
  }
  std::vector<std::uint8_t> is_erased(graph.n_var(), 0);
  for (std::size_t v : erased) {
    is_erased[v] = 1;
    bits[v] = 0;
  }

  std::vector<std::size_t> chk_unknown(graph.n_chk(), 0);
  std::vector<std::uint8_t> chk_parity(graph.n_chk(), 0);
  for (std::size_t u = 0; u < graph.n_chk(); ++u) {
    for (std::size_t v : graph.vars_of(u)) {
      chk_unknown[u] += is_erased[v];
      if (!is_erased[v]) chk_parity[u] ^= bits[v];
    }
  }

  std::vector<std::size_t> frontier;
  for (std::size_t u = 0; u < graph.n_chk(); ++u) {
    if (chk_unknown[u] == 0 && chk_parity[u] != 0) {
      throw InconsistentInput("peel_decode: known bits violate a check");
    }
    if (chk_unknown[u] == 1) frontier.push_back(u);
  }

  while (!frontier.empty()) {
    const std::size_t u = frontier.back();
    frontier.pop_back();
    if (chk_unknown[u] != 1) continue;
    std::size_t resolved = graph.n_var();
    for (std::size_t v : graph.vars_of(u)) {
      if (is_erased[v]) {
        resolved = v;
        break;
      }
    }
    bits[resolved] = chk_parity[u];
    is_erased[resolved] = 0;
    for (std::size_t u2 : graph.checks_of(resolved)) {
      chk_parity[u2] ^= bits[resolved];
      if (--chk_unknown[u2] == 1) {
        frontier.push_back(u2);
      } else if (chk_unknown[u2] == 0 && chk_parity[u2] != 0) {
        throw InconsistentInput("peel_decode: known bits violate a check");
      }
    }
  }

  PeelResult result;
  result.bits = std::move(bits);
  for (std::size_t v = 0; v < graph.n_var(); ++v) {
    if (is_erased[v]) result.residual.push_back(v);
  }
  return result;
}

// Punctured positions R (|R| = N-k) and the transmitted complement Q.
struct PuncturePattern {
  std::vector<std::size_t> punctured;    // R, sorted
  std::vector<std::size_t> transmitted;  // Q, sorted

  static PuncturePattern from_punctured(std::vector<std::size_t> r,
                                        std::size_t n_var,
                                        std::size_t n_chk) {
    std::sort(r.begin(), r.end());
    if (r.size() != n_chk) {
      throw std::invalid_argument("PuncturePattern: |R| must equal N-k");
    }
    PuncturePattern p;
    p.punctured = std::move(r);
    std::vector<std::uint8_t> in_r(n_var, 0);
    for (std::size_t v : p.punctured) in_r[v] = 1;
    for (std::size_t v = 0; v < n_var; ++v) {
      if (!in_r[v]) p.transmitted.push_back(v);
    }
    return p;
  }
};

struct PatternViolation {
  enum class Kind { size, nonempty_residual, extensible } kind;
  // Residual witness for nonempty_residual; the extensible variable for
  // extensible.
  std::vector<std::size_t> witness;
};

// Checks the three pattern invariants: |R| = N-k, empty maximal stopping
// set in R, and nonempty maximal stopping set in R+v for every v outside
// R. Returns the first violation found, or nothing when certified.
inline std::optional<PatternViolation> certify_pattern(
    const TannerGraph& graph, const PuncturePattern& pattern) {
  if (pattern.punctured.size() != graph.n_chk()) {
    return PatternViolation{PatternViolation::Kind::size, {}};
  }
  auto residual = maximal_stopping_set(graph, pattern.punctured);
  if (!residual.empty()) {
    return PatternViolation{PatternViolation::Kind::nonempty_residual,
                            std::move(residual)};
  }
  for (std::size_t v : pattern.transmitted) {
    auto extended = pattern.punctured;
    extended.push_back(v);
    if (maximal_stopping_set(graph, extended).empty()) {
      return PatternViolation{PatternViolation::Kind::extensible, {v}};
    }
  }
  return std::nullopt;
}

inline constexpr std::size_t kDefaultMaxRestarts = 100;

// Greedy-random search for a full-size puncture pattern: grow R one
// variable at a time, accepting a candidate iff the maximal stopping set
// of R + v stays empty. Each restart walks a fresh random permutation.
inline std::optional<PuncturePattern> find_puncture_pattern(
    const TannerGraph& graph, std::mt19937_64& rng,
    std::size_t max_restarts = kDefaultMaxRestarts,
    std::size_t* restarts_used = nullptr) {
  const std::size_t target = graph.n_chk();
  std::vector<std::size_t> order(graph.n_var());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t restart = 0; restart < max_restarts; ++restart) {
    if (restarts_used) *restarts_used = restart;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> r;
    r.reserve(target);
    for (std::size_t v : order) {
      r.push_back(v);
      if (!maximal_stopping_set(graph, r).empty()) {
        r.pop_back();
      } else if (r.size() == target) {
        return PuncturePattern::from_punctured(r, graph.n_var(),
                                               graph.n_chk());
      }
    }
  }
  return std::nullopt;
}

// Systematic generator of H: G is k x N with an identity block on the k
// non-pivot columns of H's reduced form. systematic[j] is the codeword
// position carrying message bit j.
struct SystematicGenerator {
  gf2::BitMatrix g;
  std::vector<std::size_t> systematic;  // k message-bit positions, sorted
  std::vector<std::size_t> parity;      // N-k pivot positions, sorted
};

inline SystematicGenerator systematic_generator(const gf2::BitMatrix& h) {
  const std::size_t m = h.rows();
  const std::size_t n = h.cols();
  if (n <= m) {
    throw std::invalid_argument("systematic_generator: need N > N-k");
  }
  gf2::BitMatrix red = h;
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < m; ++col) {
    std::size_t pivot = row;
    while (pivot < m && !red.get(pivot, col)) ++pivot;
    if (pivot == m) continue;
    red.swap_rows(row, pivot);
    for (std::size_t i = 0; i < m; ++i) {
      if (i != row && red.get(i, col)) red.add_row(i, row);
    }
    pivot_cols.push_back(col);
    ++row;
  }
  if (row < m) {
    throw RankDeficient("systematic_generator: H is rank deficient");
  }

  std::vector<std::uint8_t> is_pivot(n, 0);
  for (std::size_t c : pivot_cols) is_pivot[c] = 1;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < n; ++c) {
    if (!is_pivot[c]) free_cols.push_back(c);
  }

  const std::size_t k = n - m;
  // Codeword for message unit vector e_j: free column j set to 1, pivot
  // column i set to red[i][free_cols[j]].
  gf2::BitMatrix g(k, n);
  for (std::size_t j = 0; j < k; ++j) {
    g.set(j, free_cols[j], true);
    for (std::size_t i = 0; i < m; ++i) {
      if (red.get(i, free_cols[j])) g.set(j, pivot_cols[i], true);
    }
  }
  return {std::move(g), std::move(free_cols), std::move(pivot_cols)};
}

// Degrees of freedom under message passing in the |R| = N-k regime:
// the count of channel-erased transmitted bits.
inline std::size_t dof_mp(const TannerGraph& /*graph*/,
                          const std::vector<std::size_t>& erased,
                          const PuncturePattern& /*pattern*/) {
  return erased.size();
}

// ML oracle: dimension of the solution space for the unknown bits,
// |unknown| - rank(H restricted to the unknown columns).
inline std::size_t dof_ml(const gf2::BitMatrix& h,
                          const std::vector<std::size_t>& unknown) {
  if (unknown.empty()) return 0;
  gf2::BitMatrix sub(h.rows(), unknown.size());
  for (std::size_t j = 0; j < unknown.size(); ++j) {
    for (std::size_t i = 0; i < h.rows(); ++i) {
      if (h.get(i, unknown[j])) sub.set(i, j, true);
    }
  }
  return unknown.size() - gf2::rank(sub);
}

// --- alist interchange format ---------------------------------------------
// First line "N M", then max degrees, per-node degree lists, and 1-indexed
// adjacency lists. Zero-padded entries are tolerated and ignored.

inline gf2::BitMatrix read_alist(std::istream& in) {
  std::size_t n = 0, m = 0;
  if (!(in >> n >> m) || n == 0 || m == 0) {
    throw std::runtime_error("alist: bad header");
  }
  std::size_t max_var_deg = 0, max_chk_deg = 0;
  in >> max_var_deg >> max_chk_deg;
  std::vector<std::size_t> var_deg(n), chk_deg(m);
  for (auto& d : var_deg) in >> d;
  for (auto& d : chk_deg) in >> d;
  if (!in) throw std::runtime_error("alist: truncated degree lists");

  gf2::BitMatrix h(m, n);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t e = 0; e < max_var_deg; ++e) {
      long idx = 0;
      if (!(in >> idx)) throw std::runtime_error("alist: truncated adjacency");
      if (idx == 0) continue;  // padding
      if (idx < 1 || static_cast<std::size_t>(idx) > m) {
        throw std::runtime_error("alist: check index out of range");
      }
      h.set(static_cast<std::size_t>(idx - 1), v, true);
    }
  }
  // The check-side lists are redundant with the variable-side ones; they
  // are consumed but only the degrees are validated.
  for (std::size_t u = 0; u < m; ++u) {
    std::size_t seen = 0;
    for (std::size_t e = 0; e < max_chk_deg; ++e) {
      long idx = 0;
      if (!(in >> idx)) break;
      if (idx != 0) ++seen;
    }
    if (seen != 0 && seen != chk_deg[u]) {
      throw std::runtime_error("alist: check degree mismatch");
    }
  }
  return h;
}

inline gf2::BitMatrix read_alist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("alist: cannot open " + path);
  return read_alist(in);
}

inline void write_alist(std::ostream& out, const gf2::BitMatrix& h) {
  const std::size_t m = h.rows();
  const std::size_t n = h.cols();
  std::vector<std::vector<std::size_t>> var_adj(n), chk_adj(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (h.get(i, j)) {
        var_adj[j].push_back(i + 1);
        chk_adj[i].push_back(j + 1);
      }
    }
  }
  std::size_t max_var = 0, max_chk = 0;
  for (const auto& a : var_adj) max_var = std::max(max_var, a.size());
  for (const auto& a : chk_adj) max_chk = std::max(max_chk, a.size());

  out << n << ' ' << m << '\n' << max_var << ' ' << max_chk << '\n';
  for (std::size_t v = 0; v < n; ++v) {
    out << var_adj[v].size() << (v + 1 < n ? ' ' : '\n');
  }
  for (std::size_t u = 0; u < m; ++u) {
    out << chk_adj[u].size() << (u + 1 < m ? ' ' : '\n');
  }
  auto emit = [&](const std::vector<std::size_t>& adj, std::size_t width) {
    for (std::size_t e = 0; e < width; ++e) {
      out << (e < adj.size() ? adj[e] : 0) << (e + 1 < width ? ' ' : '\n');
    }
  };
  for (const auto& adj : var_adj) emit(adj, max_var);
  for (const auto& adj : chk_adj) emit(adj, max_chk);
}

inline void write_alist_file(const std::string& path,
                             const gf2::BitMatrix& h) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("alist: cannot write " + path);
  write_alist(out, h);
}

// --- random code construction ----------------------------------------------

// H = [Hs | T] with Hs random of the given column degree (double edges
// rejected) and T the (N-k) x (N-k) dual-diagonal accumulator. The
// accumulator part makes full-size puncture patterns plentiful.
inline gf2::BitMatrix make_staircase_code(std::size_t n, std::size_t k,
                                          std::size_t systematic_degree,
                                          std::mt19937_64& rng) {
  if (n <= k || k == 0) {
    throw std::invalid_argument("make_staircase_code: need N > k >= 1");
  }
  const std::size_t m = n - k;
  if (systematic_degree == 0 || systematic_degree > m) {
    throw std::invalid_argument("make_staircase_code: bad degree");
  }
  gf2::BitMatrix h(m, n);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  for (std::size_t v = 0; v < k; ++v) {
    std::vector<std::size_t> chosen;
    while (chosen.size() < systematic_degree) {
      std::size_t u = pick(rng);
      if (std::find(chosen.begin(), chosen.end(), u) == chosen.end()) {
        chosen.push_back(u);
      }
    }
    for (std::size_t u : chosen) h.set(u, v, true);
  }
  for (std::size_t i = 0; i < m; ++i) {
    h.set(i, k + i, true);
    if (i > 0) h.set(i, k + i - 1, true);
  }
  return h;
}

// Fully random construction with regular variable degree; check degrees
// fall where they may. Double edges rejected by construction.
inline gf2::BitMatrix make_regular_code(std::size_t n, std::size_t k,
                                        std::size_t var_degree,
                                        std::mt19937_64& rng) {
  if (n <= k || k == 0) {
    throw std::invalid_argument("make_regular_code: need N > k >= 1");
  }
  const std::size_t m = n - k;
  if (var_degree == 0 || var_degree > m) {
    throw std::invalid_argument("make_regular_code: bad degree");
  }
  gf2::BitMatrix h(m, n);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> chosen;
    while (chosen.size() < var_degree) {
      std::size_t u = pick(rng);
      if (std::find(chosen.begin(), chosen.end(), u) == chosen.end()) {
        chosen.push_back(u);
      }
    }
    for (std::size_t u : chosen) h.set(u, v, true);
  }
  return h;
}

}  // namespace wiretap::ldpc
