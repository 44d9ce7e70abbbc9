// Command-line driver: correlation bounds, analytic sweeps, Monte Carlo
// simulation against the analytic formulas, code generation, and pattern
// certification.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wiretap/analysis.hpp"
#include "wiretap/channel.hpp"
#include "wiretap/gf2.hpp"
#include "wiretap/ldpc.hpp"
#include "wiretap/protocol.hpp"
#include "wiretap/seeding.hpp"

namespace ch = wiretap::channel;
namespace an = wiretap::analysis;
namespace ldpc = wiretap::ldpc;
namespace proto = wiretap::protocol;

using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string resolve_out(const std::string& path, const std::string& outdir) {
  if (path.empty() || path == "-") return path;
  if (!outdir.empty() && path.find('/') == std::string::npos) {
    return outdir + "/" + path;
  }
  return path;
}

struct CsvSink {
  std::ofstream file;
  std::ostream* out = &std::cout;

  explicit CsvSink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file.open(path);
      if (!file) throw std::runtime_error("cannot open output " + path);
      out = &file;
    }
  }
  template <typename T>
  CsvSink& operator<<(const T& v) {
    *out << v;
    return *this;
  }
};

void write_manifest(const std::string& csv_path, const json& config,
                    double wall_seconds) {
  if (csv_path.empty() || csv_path == "-") return;
  json manifest{{"tool", "wiretap-cli"},
                {"version", kVersion},
                {"config", config},
                {"wall_seconds", wall_seconds}};
  std::ofstream out(csv_path + ".manifest.json");
  out << manifest.dump(2) << '\n';
}

struct CodeSpec {
  std::string alist_path;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t degree = 2;
  std::string construction = "staircase";

  wiretap::gf2::BitMatrix build(std::mt19937_64& rng) const {
    if (!alist_path.empty()) return ldpc::read_alist_file(alist_path);
    if (n == 0 || k == 0) {
      throw CLI::ValidationError(
          "code", "provide --alist or both --n and --k");
    }
    if (n <= k) throw CLI::ValidationError("code", "need N > k");
    if (construction == "staircase") {
      return ldpc::make_staircase_code(n, k, degree, rng);
    }
    if (construction == "regular") {
      return ldpc::make_regular_code(n, k, degree, rng);
    }
    throw CLI::ValidationError("code", "unknown construction " + construction);
  }

  void add_options(CLI::App* cmd) {
    cmd->add_option("--alist", alist_path, "parity-check matrix alist file");
    cmd->add_option("--n", n, "codeword length N for generated codes");
    cmd->add_option("--k", k, "message length k for generated codes");
    cmd->add_option("--degree", degree,
                    "column degree of the generated systematic part");
    cmd->add_option("--construction", construction,
                    "staircase (accumulator parity) or regular");
  }
};

// Rho grid for one (delta, epsilon) point: fixed list if given, else an
// even sweep over the feasible interval.
std::vector<double> rho_grid(const std::vector<double>& fixed, double delta,
                             double epsilon, std::size_t points) {
  if (!fixed.empty()) return fixed;
  auto b = ch::correlation_bounds(delta, epsilon);
  std::vector<double> grid;
  grid.reserve(points);
  if (points == 1) {
    grid.push_back(0.5 * (b.rho_min + b.rho_max));
    return grid;
  }
  for (std::size_t i = 0; i < points; ++i) {
    grid.push_back(b.rho_min +
                   (b.rho_max - b.rho_min) * static_cast<double>(i) /
                       static_cast<double>(points - 1));
  }
  return grid;
}

bool rho_feasible(double delta, double epsilon, double rho) {
  auto b = ch::correlation_bounds(delta, epsilon);
  return rho >= b.rho_min - 1e-12 && rho <= b.rho_max + 1e-12;
}

int cmd_bounds(double delta, double epsilon, bool as_json) {
  auto b = ch::correlation_bounds(delta, epsilon);
  const double p11_lo = std::max(delta + epsilon - 1.0, 0.0);
  const double p11_hi = std::min(delta, epsilon);
  if (as_json) {
    json out{{"delta", delta},     {"epsilon", epsilon},
             {"rho_min", b.rho_min}, {"rho_max", b.rho_max},
             {"p11_min", p11_lo},  {"p11_max", p11_hi}};
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << "rho_min " << fmt(b.rho_min) << "\nrho_max "
              << fmt(b.rho_max) << "\np11_min " << fmt(p11_lo)
              << "\np11_max " << fmt(p11_hi) << '\n';
  }
  return 0;
}

struct AnalyzeConfig {
  std::size_t eta = 5000;
  std::size_t alpha = 1;
  std::size_t beta = 50;
  std::vector<double> deltas{0.5};
  std::vector<double> epsilons{0.3, 0.4, 0.5, 0.51, 0.6};
  std::vector<double> rhos;  // empty: sweep the feasible interval
  std::size_t rho_points = 101;
  std::string out;
};

int cmd_analyze(const AnalyzeConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  CsvSink csv(cfg.out);
  csv << "delta,epsilon,rho,feasible,pr_ref,expected_d,pr_d_geq_beta\n";
  const std::size_t k = cfg.eta * cfg.alpha;
  for (double delta : cfg.deltas) {
    for (double epsilon : cfg.epsilons) {
      for (double rho : rho_grid(cfg.rhos, delta, epsilon, cfg.rho_points)) {
        csv << fmt(delta) << ',' << fmt(epsilon) << ',' << fmt(rho) << ',';
        if (!rho_feasible(delta, epsilon, rho)) {
          csv << "0,nan,nan,nan\n";
          continue;
        }
        const double p_ref = an::pr_ref(delta, epsilon, rho);
        csv << "1," << fmt(p_ref) << ',' << fmt(an::expected_d(k, p_ref))
            << ',' << fmt(an::pr_d_geq(cfg.beta, cfg.eta, cfg.alpha, p_ref))
            << '\n';
      }
    }
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  write_manifest(cfg.out,
                 json{{"command", "analyze"},
                      {"eta", cfg.eta},
                      {"alpha", cfg.alpha},
                      {"beta", cfg.beta},
                      {"delta", cfg.deltas},
                      {"epsilon", cfg.epsilons},
                      {"rho", cfg.rhos},
                      {"rho_points", cfg.rho_points}},
                 wall);
  return 0;
}

struct SimulateConfig {
  CodeSpec code;
  std::size_t eta = 0;  // 0: derived as n / alpha
  std::size_t alpha = 1;
  std::size_t codewords = 1;
  std::size_t beta = 0;  // 0: min(50, alpha * eta)
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::size_t max_retx = proto::kDefaultMaxRetx;
  std::vector<double> deltas{0.5};
  std::vector<double> epsilons{0.5};
  std::vector<double> rhos{0.0};
  std::string out;
};

int cmd_simulate(const SimulateConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 setup_rng(wiretap::seeding::derive_seed(cfg.seed, ~0ull, 0));
  auto h = cfg.code.build(setup_rng);
  const std::size_t k = h.cols() - h.rows();
  const std::size_t eta = cfg.eta ? cfg.eta : k / cfg.alpha;
  const std::size_t beta =
      cfg.beta ? cfg.beta : std::min<std::size_t>(50, cfg.alpha * eta);
  auto ctx =
      proto::build_context(h, eta, cfg.alpha, cfg.codewords, setup_rng);

  CsvSink csv(cfg.out);
  csv << "delta,epsilon,rho,status,trials,pr_ref_emp,pr_ref_se,pr_ref,"
         "mean_d_emp,mean_d_se,expected_d,pr_d_geq_emp,pr_d_geq_se,"
         "pr_d_geq_beta\n";

  std::size_t grid_index = 0;
  for (double delta : cfg.deltas) {
    for (double epsilon : cfg.epsilons) {
      for (double rho : cfg.rhos) {
        const std::size_t gi = grid_index++;
        csv << fmt(delta) << ',' << fmt(epsilon) << ',' << fmt(rho) << ',';
        if (!rho_feasible(delta, epsilon, rho)) {
          csv << "infeasible," << cfg.trials << ",nan,nan,nan,nan,nan,nan,"
              << "nan,nan,nan\n";
          continue;
        }
        auto dist = ch::joint_from_rho({delta, epsilon, rho});
        const double p_ref = an::pr_ref(delta, epsilon, rho);
        const double exp_d = an::expected_d(ctx.k, p_ref);
        const double p_beta = an::pr_d_geq(beta, eta, cfg.alpha, p_ref);

        std::size_t total_missing = 0;
        std::size_t d_geq_beta = 0;
        double d_sum = 0.0, d_sq_sum = 0.0;
        bool capped = false;
        for (std::size_t t = 0; t < cfg.trials && !capped; ++t) {
          auto rng = wiretap::seeding::make_rng(cfg.seed, gi, t);
          auto msg = proto::random_message(ctx, rng);
          auto packets = proto::encode_message(ctx, msg);
          try {
            auto trial = proto::transmit_arq(packets, dist, rng, ctx.alpha,
                                             ctx.codewords, cfg.max_retx);
            if (proto::decode_bob(ctx, trial.bob) != msg) {
              throw std::runtime_error("Bob failed to recover the message");
            }
            total_missing += trial.eve_missing.size();
            const auto d = static_cast<double>(trial.d);
            d_sum += d;
            d_sq_sum += d * d;
            if (trial.d >= beta) ++d_geq_beta;
          } catch (const proto::RetransmissionCapExceeded&) {
            capped = true;
          }
        }
        if (capped) {
          csv << "retx_cap," << cfg.trials
              << ",nan,nan," << fmt(p_ref) << ",nan,nan," << fmt(exp_d)
              << ",nan,nan," << fmt(p_beta) << '\n';
          continue;
        }
        const double n_packets =
            static_cast<double>(cfg.trials) * static_cast<double>(eta);
        const double p_emp =
            1.0 - static_cast<double>(total_missing) / n_packets;
        const double p_se = std::sqrt(p_emp * (1.0 - p_emp) / n_packets);
        const double d_mean = d_sum / static_cast<double>(cfg.trials);
        const double d_var =
            (d_sq_sum - d_sum * d_mean) /
            std::max<double>(1.0, static_cast<double>(cfg.trials) - 1.0);
        const double d_se =
            std::sqrt(d_var / static_cast<double>(cfg.trials));
        const double b_emp =
            static_cast<double>(d_geq_beta) / static_cast<double>(cfg.trials);
        const double b_se = std::sqrt(b_emp * (1.0 - b_emp) /
                                      static_cast<double>(cfg.trials));
        csv << "ok," << cfg.trials << ',' << fmt(p_emp) << ',' << fmt(p_se)
            << ',' << fmt(p_ref) << ',' << fmt(d_mean) << ',' << fmt(d_se)
            << ',' << fmt(exp_d) << ',' << fmt(b_emp) << ',' << fmt(b_se)
            << ',' << fmt(p_beta) << '\n';
      }
    }
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  write_manifest(cfg.out,
                 json{{"command", "simulate"},
                      {"alist", cfg.code.alist_path},
                      {"n", h.cols()},
                      {"k", k},
                      {"eta", eta},
                      {"alpha", cfg.alpha},
                      {"codewords", cfg.codewords},
                      {"beta", beta},
                      {"trials", cfg.trials},
                      {"seed", cfg.seed},
                      {"max_retx", cfg.max_retx},
                      {"delta", cfg.deltas},
                      {"epsilon", cfg.epsilons},
                      {"rho", cfg.rhos}},
                 wall);
  return 0;
}

int cmd_codegen(const CodeSpec& spec, std::uint64_t seed,
                std::size_t max_restarts, const std::string& out_prefix) {
  std::mt19937_64 rng(seed);
  auto h = spec.build(rng);
  ldpc::TannerGraph graph(h);
  std::size_t restarts = 0;
  auto pattern =
      ldpc::find_puncture_pattern(graph, rng, max_restarts, &restarts);
  if (!pattern) {
    std::cerr << "no full-size puncture pattern found after " << max_restarts
              << " restarts; try a different degree spec or construction\n";
    return 1;
  }
  if (auto v = ldpc::certify_pattern(graph, *pattern)) {
    std::cerr << "internal error: search result failed certification\n";
    return 1;
  }
  ldpc::write_alist_file(out_prefix + ".alist", h);
  json pat{{"n", h.cols()},
           {"m", h.rows()},
           {"punctured", pattern->punctured},
           {"seed", seed},
           {"restarts", restarts}};
  std::ofstream pf(out_prefix + ".pattern.json");
  pf << pat.dump(2) << '\n';
  std::cout << "wrote " << out_prefix << ".alist and " << out_prefix
            << ".pattern.json (restarts used: " << restarts << ")\n";
  return 0;
}

int cmd_certify(const std::string& alist_path,
                const std::string& pattern_path) {
  auto h = ldpc::read_alist_file(alist_path);
  ldpc::TannerGraph graph(h);
  std::ifstream pf(pattern_path);
  if (!pf) throw std::runtime_error("cannot open " + pattern_path);
  json pat = json::parse(pf);
  auto punctured = pat.at("punctured").get<std::vector<std::size_t>>();
  // Assemble the pattern by hand: from_punctured rejects size mismatches up
  // front, but here a wrong-sized pattern should be reported as a violation.
  ldpc::PuncturePattern pattern;
  std::sort(punctured.begin(), punctured.end());
  std::vector<bool> in_r(h.cols(), false);
  for (auto v : punctured) {
    if (v >= h.cols()) throw std::invalid_argument("pattern index out of range");
    in_r[v] = true;
  }
  pattern.punctured = std::move(punctured);
  for (std::size_t v = 0; v < h.cols(); ++v)
    if (!in_r[v]) pattern.transmitted.push_back(v);
  auto violation = ldpc::certify_pattern(graph, pattern);
  if (!violation) {
    std::cout << "certificate: pattern of size " << pattern.punctured.size()
              << " is valid\n";
    return 0;
  }
  switch (violation->kind) {
    case ldpc::PatternViolation::Kind::size:
      std::cout << "violation: |R| != N-k\n";
      break;
    case ldpc::PatternViolation::Kind::nonempty_residual:
      std::cout << "violation: maximal stopping set of R is nonempty ("
                << violation->witness.size() << " nodes)\n";
      break;
    case ldpc::PatternViolation::Kind::extensible:
      std::cout << "violation: R + v still peels for v = "
                << violation->witness.front() << '\n';
      break;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wiretap-channel secrecy toolkit: correlated packet-erasure "
               "analysis and simulation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file");

  std::string outdir;
  app.add_option("--outdir", outdir, "default directory for output files")
      ->envname("WIRETAP_OUTDIR");

  // bounds
  double b_delta = 0.0, b_epsilon = 0.0;
  bool b_json = false;
  auto* bounds = app.add_subcommand(
      "bounds", "feasible correlation interval for (delta, epsilon)");
  bounds->add_option("--delta", b_delta, "Bob's erasure probability")
      ->required();
  bounds->add_option("--epsilon", b_epsilon, "Eve's erasure probability")
      ->required();
  bounds->add_flag("--json", b_json, "emit JSON instead of text");

  // analyze
  AnalyzeConfig a_cfg;
  auto* analyze = app.add_subcommand(
      "analyze", "closed-form sweep: pr_ref, E[D], Pr(D >= beta)");
  analyze->add_option("--eta", a_cfg.eta, "packets per message");
  analyze->add_option("--alpha", a_cfg.alpha, "bits per codeword per packet");
  analyze->add_option("--beta", a_cfg.beta, "degrees-of-freedom target");
  analyze->add_option("--delta", a_cfg.deltas, "Bob erasure probabilities");
  analyze->add_option("--epsilon", a_cfg.epsilons,
                      "Eve erasure probabilities");
  analyze->add_option("--rho", a_cfg.rhos,
                      "fixed correlation values (default: feasible sweep)");
  analyze->add_option("--rho-points", a_cfg.rho_points,
                      "sweep resolution when --rho is omitted");
  analyze->add_option("--out", a_cfg.out, "CSV output path ('-' = stdout)");

  // simulate
  SimulateConfig s_cfg;
  auto* simulate = app.add_subcommand(
      "simulate", "Monte Carlo protocol trials vs analytic formulas");
  s_cfg.code.add_options(simulate);
  simulate->add_option("--eta", s_cfg.eta,
                       "packets per message (default n / alpha)");
  simulate->add_option("--alpha", s_cfg.alpha,
                       "bits per codeword per packet");
  simulate->add_option("--codewords", s_cfg.codewords,
                       "codewords per message (L)");
  simulate->add_option("--beta", s_cfg.beta,
                       "degrees-of-freedom target (default: min(50, alpha*eta))");
  simulate->add_option("--trials", s_cfg.trials, "trials per grid point")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", s_cfg.seed, "master seed");
  simulate->add_option("--max-retx", s_cfg.max_retx,
                       "retransmission cap per packet");
  simulate->add_option("--delta", s_cfg.deltas, "Bob erasure probabilities");
  simulate->add_option("--epsilon", s_cfg.epsilons,
                       "Eve erasure probabilities");
  simulate->add_option("--rho", s_cfg.rhos, "correlation values");
  simulate->add_option("--out", s_cfg.out, "CSV output path ('-' = stdout)");

  // codegen
  CodeSpec g_spec;
  std::uint64_t g_seed = 1;
  std::size_t g_restarts = ldpc::kDefaultMaxRestarts;
  std::string g_out = "code";
  auto* codegen = app.add_subcommand(
      "codegen", "generate a code and a certified puncture pattern");
  g_spec.add_options(codegen);
  codegen->add_option("--seed", g_seed, "construction/search seed");
  codegen->add_option("--max-restarts", g_restarts,
                      "pattern search restart budget");
  codegen->add_option("--out", g_out, "output file prefix");

  // certify
  std::string c_alist, c_pattern;
  auto* certify = app.add_subcommand(
      "certify", "check a puncture pattern against its code");
  certify->add_option("--alist", c_alist, "parity-check alist file")
      ->required();
  certify->add_option("--pattern", c_pattern, "pattern JSON file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*bounds) return cmd_bounds(b_delta, b_epsilon, b_json);
    if (*analyze) {
      a_cfg.out = resolve_out(a_cfg.out, outdir);
      return cmd_analyze(a_cfg);
    }
    if (*simulate) {
      s_cfg.out = resolve_out(s_cfg.out, outdir);
      return cmd_simulate(s_cfg);
    }
    if (*codegen) return cmd_codegen(g_spec, g_seed, g_restarts,
                                     resolve_out(g_out, outdir));
    if (*certify) return cmd_certify(c_alist, c_pattern);
  } catch (const ch::DegenerateMarginal& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ch::InfeasibleCorrelation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
