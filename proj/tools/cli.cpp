#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <thread>

#include "btsp/backbone.hpp"
#include "btsp/cactus.hpp"
#include "btsp/certificate_io.hpp"
#include "btsp/error.hpp"
#include "btsp/graph.hpp"
#include "btsp/instance.hpp"
#include "btsp/onetree.hpp"
#include "btsp/oracles.hpp"
#include "btsp/record.hpp"

namespace btsp::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised after the violations have been printed.
class VerificationFailed : public std::runtime_error {
 public:
  VerificationFailed() : std::runtime_error("verification failed") {}
};

Rational rational_flag(const std::string& flag, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const std::exception&) {
    throw UsageError(flag + ": '" + text + "' is not a rational number");
  }
}

Instance load_input(const std::string& path) {
  try {
    return load_instance(path);
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const Error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void write_file(const std::string& flag, const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError(flag + ": cannot write " + path);
  out << text;
}

void require_exact_size(const std::string& flag, int n) {
  if (n > kExactTspMaxN) {
    throw UsageError(flag + ": n = " + std::to_string(n) + " exceeds the exact solver limit of " +
                     std::to_string(kExactTspMaxN));
  }
}

void require_solve_size(int n, bool unsafe_large) {
  if (n > kSolveMaxN && !unsafe_large) {
    throw UsageError("--unsafe-large: n = " + std::to_string(n) + " exceeds the default cap of " +
                     std::to_string(kSolveMaxN));
  }
}

Instance generate(const std::string& kind, int n, const Rational& param, std::uint64_t seed) {
  if (kind == "uniform-beta") return gen_uniform_beta(n, param, seed);
  if (kind == "euclidean-power") return gen_euclidean_power(n, param, seed);
  throw UsageError("--kind: unknown generator '" + kind + "' (uniform-beta or euclidean-power)");
}

std::string vertices_csv(const std::vector<Vertex>& order) {
  std::string out;
  for (Vertex v : order) out += (out.empty() ? "" : ",") + std::to_string(v);
  return out;
}

void print_violations(const VerificationReport& report, std::ostream& out) {
  for (const auto& v : report.violations) out << "violation check=" << v.check << " detail=" << v.detail << "\n";
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string kind;
  int n = 0;
  std::string beta;
  std::string p;
  std::uint64_t seed = 0;
  std::string out;
};

int do_gen(const GenArgs& a, std::ostream& out) {
  Rational param;
  if (a.kind == "uniform-beta") {
    if (!a.p.empty()) throw UsageError("--p: only valid with --kind euclidean-power");
    if (a.beta.empty()) throw UsageError("--beta: required for --kind uniform-beta");
    param = rational_flag("--beta", a.beta);
  } else if (a.kind == "euclidean-power") {
    if (!a.beta.empty()) throw UsageError("--beta: only valid with --kind uniform-beta");
    if (a.p.empty()) throw UsageError("--p: required for --kind euclidean-power");
    param = rational_flag("--p", a.p);
  }
  Instance inst = [&] {
    try {
      return generate(a.kind, a.n, param, a.seed);
    } catch (const DomainError& e) {
      throw UsageError(std::string(a.kind == "uniform-beta" ? "--beta/--n" : "--p/--n") + ": " + e.what());
    }
  }();
  try {
    save_instance(inst, a.out);
  } catch (const Error& e) {
    throw UsageError(std::string("--out: ") + e.what());
  }
  out << "wrote " << a.out << " name=" << inst.name() << " n=" << inst.size() << " beta=" << beta_of(inst).to_string()
      << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- info

int do_info(const std::string& path, std::ostream& out) {
  Instance inst = load_input(path);
  const int n = inst.size();
  Rational lo = inst.weight(0, 1), hi = lo, sum = 0;
  for (const Edge& e : all_edges(n)) {
    const Rational& w = inst.weight(e.u, e.v);
    lo = std::min(lo, w);
    hi = std::max(hi, w);
    sum += w;
  }
  Rational mean = sum / Rational(static_cast<long>(n) * (n - 1) / 2);
  Beta beta = beta_of(inst);
  out << "info name=" << inst.name() << " n=" << n << " beta=" << beta.to_string();
  out << " beta_dec=" << (beta.is_infinite() ? "-" : to_decimal(beta.value()));
  out << " declared_beta=" << (inst.declared_beta() ? to_fraction(*inst.declared_beta()) : "-");
  out << " min=" << to_fraction(lo) << " max=" << to_fraction(hi) << " mean=" << to_fraction(mean)
      << " mean_dec=" << to_decimal(mean) << " nonnegative=" << (inst.nonnegative() ? "yes" : "no") << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string input;
  bool certify = false;
  bool check_exact = false;
  bool trace = false;
  bool unsafe_large = false;
  bool timing = false;
  std::string out_tour;
  std::string out_cert;
};

int do_solve(const SolveArgs& a, std::ostream& out) {
  Instance inst = load_input(a.input);
  require_solve_size(inst.size(), a.unsafe_large);
  if (a.check_exact) require_exact_size("--check-exact", inst.size());
  if (!inst.nonnegative()) throw UsageError(a.input + ": solve needs nonnegative weights");
  if (beta_of(inst).is_infinite()) throw UsageError(a.input + ": instance has infinite beta");

  Trace trace;
  PipelineOptions options;
  if (a.trace) options.trace = &trace;
  const auto start = std::chrono::steady_clock::now();
  TourCertificate cert = approximate_tour(inst, options);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  if (a.check_exact) cert.opt = exact_tsp(inst).weight;

  for (const auto& line : trace) out << "trace " << line << "\n";
  RunRecord record = RunRecord::from_certificate(inst.name(), cert);
  if (a.timing) record.wall_seconds = elapsed.count();
  out << record.line() << "\n";
  out << "tour order=" << vertices_csv(cert.order) << "\n";
  if (!a.out_tour.empty()) write_file("--out-tour", a.out_tour, write_tour(cert.order));
  if (!a.out_cert.empty()) write_file("--out-cert", a.out_cert, write_certificate(inst, cert));

  if (a.certify) {
    const Rational chain = cert.beta * cert.heavy_weight + cert.beta * cert.beta * cert.light_weight;
    out << "certificate decisions=" << cert.families.decisions.size()
        << " light=" << to_fraction(cert.light_weight) << " heavy_edges=" << to_fraction(cert.heavy_weight)
        << " cheap_side=" << to_fraction(cert.cheap_side_weight) << " expensive_side=" << to_fraction(cert.expensive_side_weight)
        << " chain=" << to_fraction(chain) << " chain_dec=" << to_decimal(chain) << "\n";
    VerificationReport report = verify_certificate(inst, cert);
    if (!report.ok()) {
      print_violations(report, out);
      throw VerificationFailed();
    }
    out << "verified ok\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- backbone

struct BackboneArgs {
  std::string input;
  bool check_exact = false;
  bool dump_matching = false;
};

int do_backbone(const BackboneArgs& a, std::ostream& out) {
  Instance inst = load_input(a.input);
  require_solve_size(inst.size(), false);
  if (a.check_exact) require_exact_size("--check-exact", inst.size());
  BackboneBuild build = build_backbone(inst);
  const EulerianBackbone& h = build.backbone;
  for (const auto& e : h.edges) {
    out << "edge id=" << e.id << " u=" << e.ends.u << " v=" << e.ends.v << " weight=" << to_fraction(e.weight)
        << " source=" << (e.source == EdgeSource::kTree ? "tree" : "matching") << "\n";
  }
  if (a.dump_matching) {
    const auto edges = all_edges(inst.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (build.matching.x[i] == 0) continue;
      out << "matching u=" << edges[i].u << " v=" << edges[i].v << " mult=" << build.matching.x[i]
          << " weight=" << to_fraction(inst.weight(edges[i].u, edges[i].v)) << "\n";
    }
  }
  out << "backbone name=" << inst.name() << " n=" << inst.size() << " edges=" << h.edges.size()
      << " weight=" << to_fraction(h.weight) << " weight_dec=" << to_decimal(h.weight)
      << " tree=" << to_fraction(build.tree.weight) << " matching=" << to_fraction(build.matching.weight);
  if (a.check_exact) {
    Rational opt = exact_tsp(inst).weight;
    out << " opt=" << to_fraction(opt);
    if (opt != 0) {
      Rational ratio = h.weight / opt;
      out << " ratio=" << to_fraction(ratio) << " ratio_dec=" << to_decimal(ratio);
    }
  }
  out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- exact

int do_exact(const std::string& path, std::ostream& out) {
  Instance inst = load_input(path);
  ExactTour t = exact_tsp(inst);
  out << "exact name=" << inst.name() << " n=" << inst.size() << " opt=" << to_fraction(t.weight)
      << " opt_dec=" << to_decimal(t.weight) << " order=" << vertices_csv(t.order) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- verify

int do_verify(const std::string& path, const std::string& instance_path, std::ostream& out) {
  std::optional<CertificateFile> file;
  try {
    file = load_certificate(path);
  } catch (const ParseError& e) {
    out << "violation check=parse detail=" << e.what() << "\n";
    throw VerificationFailed();
  }
  if (!instance_path.empty()) {
    Instance given = load_input(instance_path);
    bool same = given.size() == file->instance.size();
    for (const Edge& e : all_edges(given.size())) {
      if (!same) break;
      same = given.weight(e.u, e.v) == file->instance.weight(e.u, e.v);
    }
    if (!same) {
      out << "violation check=instance-match detail=embedded instance differs from " << instance_path << "\n";
      throw VerificationFailed();
    }
  }
  VerificationReport report = verify_certificate(file->instance, file->certificate);
  if (!report.ok()) {
    print_violations(report, out);
    throw VerificationFailed();
  }
  out << "verified ok name=" << file->instance.name() << " n=" << file->instance.size()
      << " tour=" << to_fraction(file->certificate.tour_weight) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- onetree

struct OneTreeArgs {
  std::string input;
  int b = 2;
  std::vector<int> bounds;
  bool dump = false;
};

int do_onetree(const OneTreeArgs& a, std::ostream& out) {
  Instance inst = load_input(a.input);
  require_solve_size(inst.size(), false);
  std::vector<int> b = a.bounds.empty() ? std::vector<int>(inst.size(), a.b) : a.bounds;
  if (static_cast<int>(b.size()) != inst.size()) {
    throw UsageError("--bounds: expected " + std::to_string(inst.size()) + " entries");
  }
  if (std::any_of(b.begin(), b.end(), [](int x) { return x < 1; })) throw UsageError("--b/--bounds: entries must be >= 1");
  OneTreeStats stats;
  OneTree tree = [&] {
    try {
      return min_bounded_one_tree(inst, DegreeBounds(b), {}, &stats);
    } catch (const InfeasibleError& e) {
      throw UsageError(std::string("--b/--bounds: ") + e.what());
    }
  }();
  if (a.dump) {
    for (const Edge& e : tree.edges) {
      out << "tree-edge u=" << e.u << " v=" << e.v << " weight=" << to_fraction(inst.weight(e.u, e.v)) << "\n";
    }
  }
  int excess = 0;
  for (int v = 0; v < inst.size(); ++v) excess = std::max(excess, tree.degree[v] - b[v]);
  out << "onetree name=" << inst.name() << " n=" << inst.size() << " root=" << tree.root
      << " weight=" << to_fraction(tree.weight) << " weight_dec=" << to_decimal(tree.weight)
      << " max_excess=" << excess << " lp_solves=" << stats.lp_solves << " rank_cuts=" << stats.rank_cuts << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string kind = "uniform-beta";
  std::vector<int> sizes;
  std::vector<std::string> betas;
  std::vector<std::string> powers;
  std::vector<std::uint64_t> seeds;
  bool check_exact = false;
  bool timing = false;
  bool unsafe_large = false;
  int threads = 0;
  std::string csv;
};

struct BenchJob {
  int n;
  Rational param;
  std::uint64_t seed;
};

struct BenchResult {
  std::optional<RunRecord> record;
  std::string violations;
  std::string error;
};

BenchResult run_bench_job(const BenchArgs& a, const BenchJob& job) {
  BenchResult result;
  try {
    Instance inst = generate(a.kind, job.n, job.param, job.seed);
    const auto start = std::chrono::steady_clock::now();
    TourCertificate cert = approximate_tour(inst);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    if (a.check_exact) cert.opt = exact_tsp(inst).weight;
    RunRecord record = RunRecord::from_certificate(inst.name(), cert);
    record.seed = job.seed;
    if (a.timing) record.wall_seconds = elapsed.count();
    VerificationReport report = verify_certificate(inst, cert);
    for (const auto& v : report.violations) {
      result.violations += "violation name=" + inst.name() + " check=" + v.check + " detail=" + v.detail + "\n";
    }
    result.record = std::move(record);
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  return result;
}

int bench_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* cap = std::getenv("BTSP_THREADS")) {
    try {
      int c = std::stoi(cap);
      if (c >= 1) n = std::min(n, c);
    } catch (const std::exception&) {
      throw UsageError("BTSP_THREADS: '" + std::string(cap) + "' is not a positive integer");
    }
  }
  return std::max(1, n);
}

int do_bench(const BenchArgs& a, std::ostream& out) {
  const bool uniform = a.kind == "uniform-beta";
  if (!uniform && a.kind != "euclidean-power") {
    throw UsageError("--kind: unknown generator '" + a.kind + "' (uniform-beta or euclidean-power)");
  }
  if (uniform && !a.powers.empty()) throw UsageError("--powers: only valid with --kind euclidean-power");
  if (!uniform && !a.betas.empty()) throw UsageError("--betas: only valid with --kind uniform-beta");
  const auto& params_text = uniform ? a.betas : a.powers;
  const std::string param_flag = uniform ? "--betas" : "--powers";
  if (params_text.empty()) throw UsageError(param_flag + ": at least one value is required");
  std::vector<Rational> params;
  for (const auto& t : params_text) params.push_back(rational_flag(param_flag, t));
  for (int n : a.sizes) {
    if (n < 3) throw UsageError("--sizes: n = " + std::to_string(n) + " is below 3");
    require_solve_size(n, a.unsafe_large);
    if (a.check_exact) require_exact_size("--check-exact", n);
  }

  std::vector<BenchJob> jobs;
  for (int n : a.sizes) {
    for (const Rational& p : params) {
      for (std::uint64_t s : a.seeds) jobs.push_back({n, p, s});
    }
  }
  std::vector<BenchResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) results[i] = run_bench_job(a, jobs[i]);
  };
  const int threads = std::min<int>(bench_threads(a.threads), std::max<std::size_t>(1, jobs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int status = kExitOk;
  std::string csv = RunRecord::csv_header() + "\n";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const BenchResult& r = results[i];
    if (!r.error.empty()) {
      throw UsageError("bench n=" + std::to_string(jobs[i].n) + " param=" + to_fraction(jobs[i].param) +
                       " seed=" + std::to_string(jobs[i].seed) + ": " + r.error);
    }
    out << r.record->line() << "\n" << r.violations;
    if (!r.violations.empty()) status = kExitVerifyFailed;
    csv += r.record->csv_row() + "\n";
  }
  if (!a.csv.empty()) write_file("--csv", a.csv, csv);
  out << "bench runs=" << jobs.size() << (status == kExitOk ? " verified=all" : " verified=failed") << "\n";
  return status;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate TSP under the relaxed triangle inequality", "btsp"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random instance");
  gen_cmd->add_option("--kind", gen.kind, "uniform-beta or euclidean-power")->required();
  gen_cmd->add_option("--n", gen.n, "Number of vertices")->required();
  gen_cmd->add_option("--beta", gen.beta, "Beta for uniform-beta (rational)");
  gen_cmd->add_option("--p", gen.p, "Exponent for euclidean-power (positive integer)");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Output .btsp file")->required();

  std::string info_input;
  auto* info_cmd = app.add_subcommand("info", "Print size, beta and weight statistics");
  info_cmd->add_option("instance", info_input, "Instance file")->required();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run the approximation algorithm");
  solve_cmd->add_option("instance", solve.input, "Instance file")->required();
  solve_cmd->add_flag("--certify", solve.certify, "Verify the certificate and print its summary");
  solve_cmd->add_flag("--check-exact", solve.check_exact, "Add the optimum (n <= 20)");
  solve_cmd->add_flag("--trace", solve.trace, "Print every construction step");
  solve_cmd->add_flag("--unsafe-large", solve.unsafe_large, "Allow n above the default cap");
  solve_cmd->add_flag("--timing", solve.timing, "Report wall time");
  solve_cmd->add_option("--out-tour", solve.out_tour, "Write the tour (.tour)");
  solve_cmd->add_option("--out-cert", solve.out_cert, "Write the certificate (.cert)");

  BackboneArgs backbone;
  auto* backbone_cmd = app.add_subcommand("backbone", "Build the degree-4 Eulerian backbone only");
  backbone_cmd->add_option("instance", backbone.input, "Instance file")->required();
  backbone_cmd->add_flag("--check-exact", backbone.check_exact, "Compare with the optimum (n <= 20)");
  backbone_cmd->add_flag("--dump-matching", backbone.dump_matching, "Print the parity matching");

  std::string exact_input;
  auto* exact_cmd = app.add_subcommand("exact", "Solve exactly by dynamic programming (n <= 20)");
  exact_cmd->add_option("instance", exact_input, "Instance file")->required();

  std::string verify_input, verify_instance;
  auto* verify_cmd = app.add_subcommand("verify", "Recheck a stored certificate");
  verify_cmd->add_option("certificate", verify_input, "Certificate file")->required();
  verify_cmd->add_option("--instance", verify_instance, "Also require the embedded instance to match this file");

  OneTreeArgs onetree;
  auto* onetree_cmd = app.add_subcommand("onetree", "Degree-bounded minimum 1-tree");
  onetree_cmd->add_option("instance", onetree.input, "Instance file")->required();
  onetree_cmd->add_option("--b", onetree.b, "Uniform degree bound");
  onetree_cmd->add_option("--bounds", onetree.bounds, "Per-vertex degree bounds")->delimiter(',');
  onetree_cmd->add_flag("--dump", onetree.dump, "Print the tree edges");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Sweep generated instances");
  bench_cmd->add_option("--kind", bench.kind, "uniform-beta or euclidean-power");
  bench_cmd->add_option("--sizes", bench.sizes, "Vertex counts")->delimiter(',')->required();
  bench_cmd->add_option("--betas", bench.betas, "Betas for uniform-beta")->delimiter(',');
  bench_cmd->add_option("--powers", bench.powers, "Exponents for euclidean-power")->delimiter(',');
  bench_cmd->add_option("--seeds", bench.seeds, "Seeds")->delimiter(',')->required();
  bench_cmd->add_flag("--check-exact", bench.check_exact, "Add the optimum (n <= 20)");
  bench_cmd->add_flag("--timing", bench.timing, "Report wall time");
  bench_cmd->add_flag("--unsafe-large", bench.unsafe_large, "Allow n above the default cap");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (capped by BTSP_THREADS)");
  bench_cmd->add_option("--csv", bench.csv, "Write the CSV table here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return do_gen(gen, out);
    if (info_cmd->parsed()) return do_info(info_input, out);
    if (solve_cmd->parsed()) return do_solve(solve, out);
    if (backbone_cmd->parsed()) return do_backbone(backbone, out);
    if (exact_cmd->parsed()) return do_exact(exact_input, out);
    if (verify_cmd->parsed()) return do_verify(verify_input, verify_instance, out);
    if (onetree_cmd->parsed()) return do_onetree(onetree, out);
    if (bench_cmd->parsed()) return do_bench(bench, out);
  } catch (const VerificationFailed&) {
    return kExitVerifyFailed;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapacityError& e) {
    err << "capacity: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvariantViolation& e) {
    err << "internal invariant violated: " << e.what() << "\n";
    return kExitVerifyFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitVerifyFailed;
  }
  return kExitUsage;
}

}  // namespace btsp::cli
