#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polyham/bitvector.hpp"
#include "polyham/dataset.hpp"
#include "polyham/errors.hpp"
#include "polyham/neighbors.hpp"
#include "polyham/reductions.hpp"
#include "polyham/rng.hpp"
#include "polyham/threshold.hpp"

using namespace polyham;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kBudget = 3, kVerify = 4 };

struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  bool pretty = false;
  std::string output = "-";
};

struct SearchFlags {
  std::string input, db, queries, format = "auto";
  std::optional<std::size_t> k;
  std::string s = "auto", rounds = "auto";
  std::size_t budget = std::size_t{1} << 20;
  double u_param = 16.0;
  std::string strategy = "auto";
  bool brute_force = false;
  bool oracle = false;
  bool four_russians = false;
};

std::uint64_t resolve_seed(const Globals& g) {
  if (g.seed) return *g.seed;
  if (const char* env = std::getenv("POLYHAM_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used, 0);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ParameterError(std::string("POLYHAM_SEED is not a 64-bit integer: ") + env);
  }
  return 0;
}

std::optional<std::size_t> parse_auto(const std::string& text, const char* name) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used == text.size()) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw ParameterError(std::string("--") + name + " expects an integer or 'auto', got '" + text + "'");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

VectorFormat detect_format(const std::string& path, const std::string& format) {
  if (format == "text01") return VectorFormat::kText01;
  if (format == "hex") return VectorFormat::kHex;
  auto in = open_input(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    return line.rfind("dim=", 0) == 0 ? VectorFormat::kHex : VectorFormat::kText01;
  }
  return VectorFormat::kText01;
}

Dataset read_dataset(const std::string& path, const std::string& format) {
  const auto fmt = detect_format(path, format);
  auto in = open_input(path);
  return load_dataset(in, fmt);
}

std::vector<BitVector> read_vectors(const std::string& path, const std::string& format) {
  const auto fmt = detect_format(path, format);
  auto in = open_input(path);
  return load_vectors(in, fmt);
}

ClosestPairConfig make_config(const SearchFlags& f, const Globals& g) {
  ClosestPairConfig cfg;
  cfg.group_size = parse_auto(f.s, "s");
  cfg.rounds = parse_auto(f.rounds, "rounds");
  if (cfg.group_size && *cfg.group_size == 0) throw ParameterError("--s must be positive");
  if (cfg.rounds && *cfg.rounds == 0) throw ParameterError("--rounds must be positive");
  cfg.budget = f.budget;
  cfg.u_param = f.u_param;
  cfg.brute_force = f.brute_force;
  cfg.eval.threads = g.threads;
  cfg.eval.four_russians = f.four_russians;
  if (f.strategy == "matrix") cfg.strategy = EvalStrategy::kMatrix;
  if (f.strategy == "structural") cfg.strategy = EvalStrategy::kStructural;
  return cfg;
}

class Output {
 public:
  explicit Output(const Globals& g) : pretty_(g.pretty) {
    if (g.output != "-") {
      file_ = std::make_unique<std::ofstream>(g.output);
      if (!*file_) throw InputError("cannot write " + g.output);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void record(const json& j) { stream() << (pretty_ ? j.dump(2) : j.dump()) << '\n'; }

 private:
  bool pretty_;
  std::unique_ptr<std::ofstream> file_;
};

json stats_json(const PipelineStats& s) {
  return {{"group_size", s.group_size},
          {"rounds", s.rounds},
          {"mode", to_string(s.mode)},
          {"oracle_calls", s.oracle_calls},
          {"flagged_group_pairs", s.flagged_group_pairs},
          {"rejected_group_pairs", s.rejected_group_pairs},
          {"fallback_group_pairs", s.fallback_group_pairs}};
}

json metadata(const std::string& command, std::uint64_t seed, const SearchFlags& f) {
  return {{"type", "metadata"}, {"command", command}, {"seed", seed},    {"s", f.s},
          {"rounds", f.rounds},  {"budget", f.budget},  {"strategy", f.strategy},
          {"brute_force", f.brute_force}};
}

void finish(Output& out, json meta, std::optional<bool> agree) {
  if (agree) meta["oracle_agreement"] = *agree;
  out.record(meta);
  if (agree && !*agree) throw VerificationFailure("result disagrees with brute force");
}

void add_search_flags(CLI::App* cmd, SearchFlags& f, bool two_files) {
  if (two_files) {
    cmd->add_option("--db", f.db, "database vectors")->required();
    cmd->add_option("--queries", f.queries, "query vectors")->required();
  } else {
    cmd->add_option("--input", f.input, "red/blue dataset")->required();
  }
  cmd->add_option("--format", f.format, "input format")->check(CLI::IsMember({"auto", "text01", "hex"}));
  cmd->add_option("--s", f.s, "group size (int or auto)");
  cmd->add_option("--rounds", f.rounds, "amplification rounds (int or auto)");
  cmd->add_option("--budget", f.budget, "expansion monomial budget; 0 means brute force");
  cmd->add_option("--u", f.u_param, "exponent parameter of the automatic group size");
  cmd->add_option("--strategy", f.strategy, "group-pair evaluation")
      ->check(CLI::IsMember({"auto", "matrix", "structural"}));
  cmd->add_flag("--brute-force", f.brute_force, "skip the polynomial pipeline");
  cmd->add_flag("--oracle", f.oracle, "also run brute force and report agreement");
  cmd->add_flag("--four-russians", f.four_russians, "use the four-Russians product kernel");
}

// --- gen -------------------------------------------------------------------

struct GenFlags {
  std::string kind = "uniform", format = "text01";
  std::size_t n = 0, d = 0, distance = 0;
};

void cmd_gen(const GenFlags& f, const Globals& g) {
  if (f.n == 0 || f.d == 0) throw ParameterError("gen needs n >= 1 and d >= 1");
  if (f.kind == "planted" && f.distance >= f.d) throw ParameterError("planted distance must be below d");
  Rng rng(resolve_seed(g));
  Rng vectors = rng.split("gen-vectors");
  Dataset ds;
  ds.dim = f.d;
  for (std::size_t i = 0; i < f.n; ++i) ds.red.push_back(random_vector(f.d, vectors));
  for (std::size_t i = 0; i < f.n; ++i) ds.blue.push_back(random_vector(f.d, vectors));
  if (f.kind == "planted") {
    Rng plant = rng.split("gen-plant");
    const auto r = plant.below(f.n);
    const auto b = plant.below(f.n);
    ds.blue[b] = bitwise_xor(ds.red[r], random_vector_of_weight(f.d, f.distance, plant));
  }
  Output out(g);
  write_dataset(out.stream(), ds, f.format == "hex" ? VectorFormat::kHex : VectorFormat::kText01);
}

// --- sample-poly / verify-error ----------------------------------------------

struct PolyFlags {
  std::size_t n = 0;
  std::string theta = "1/2", eps = "1/10";
  std::string expand;
  std::size_t budget = IntPolynomial::kDefaultBudget;
  std::size_t trials = 500;
  std::size_t random_inputs = 50;
};

ThresholdSpec poly_spec(const PolyFlags& f) {
  ThresholdSpec spec{f.n, Rational::parse(f.theta), Rational::parse(f.eps)};
  spec.validate();
  return spec;
}

void cmd_sample_poly(const PolyFlags& f, const Globals& g) {
  const auto spec = poly_spec(f);
  const auto seed = resolve_seed(g);
  Rng rng(seed);
  const auto circuit = sample_threshold(spec, rng);
  json report = {{"type", "polynomial"},
                 {"seed", seed},
                 {"n", spec.n},
                 {"theta", spec.theta.to_string()},
                 {"eps", spec.eps.to_string()},
                 {"kind", circuit.kind() == ThresholdCircuit::Kind::kExactBase ? "exact_base" : "recursive"},
                 {"depth", circuit.depth()},
                 {"degree", circuit.degree()},
                 {"degree_bound", 41.0 * std::sqrt(static_cast<double>(spec.n) * std::log(1.0 / spec.eps.to_double()))}};
  Output out(g);
  if (!f.expand.empty()) {
    const auto poly = circuit.expand(f.budget);
    report["degree"] = poly.degree();
    report["monomials"] = poly.monomial_count().get_str();
    if (f.expand == "-") {
      out.record(report);
      poly.serialize(out.stream());
      return;
    }
    std::ofstream file(f.expand);
    if (!file) throw InputError("cannot write " + f.expand);
    poly.serialize(file);
  }
  out.record(report);
}

void cmd_verify_error(const PolyFlags& f, const Globals& g) {
  const auto spec = poly_spec(f);
  if (f.trials == 0) throw ParameterError("--trials must be positive");
  const auto seed = resolve_seed(g);
  Rng rng(seed);
  Rng input_rng = rng.split("inputs");
  const auto cutoff = spec.cutoff();
  const auto inputs = threshold_test_inputs(spec.n, cutoff, f.random_inputs, input_rng);
  ThresholdSampler sampler;
  Rng trial_rng = rng.split("trials");
  const auto report = measure_error(
      [&](Rng& r) -> PolynomialEvaluator {
        auto c = sampler.sample(spec, r);
        return [c](const BitVector& x) { return c.eval(x); };
      },
      [cutoff](const BitVector& x) { return static_cast<std::int64_t>(x.weight()) >= cutoff ? 1 : 0; }, inputs,
      f.trials, trial_rng);
  const double eps = spec.eps.to_double();
  const double floor = 1.0 - eps - 3.0 * std::sqrt(eps * (1.0 - eps) / static_cast<double>(f.trials));
  Output out(g);
  bool ok = true;
  for (const auto& row : report) {
    const bool pass = row.agreement() >= floor;
    ok = ok && pass;
    out.record({{"type", "input"},
                {"weight", row.weight},
                {"agreement", row.agreement()},
                {"trials", row.trials},
                {"pass", pass}});
  }
  out.record({{"type", "summary"},
              {"seed", seed},
              {"n", spec.n},
              {"theta", spec.theta.to_string()},
              {"eps", spec.eps.to_string()},
              {"threshold", floor},
              {"pass", ok}});
  if (!ok) throw VerificationFailure("agreement below 1 - eps - 3 sigma");
}

// --- bench -----------------------------------------------------------------

struct BenchFlags {
  std::vector<std::size_t> sizes{256, 512, 1024};
  std::vector<std::size_t> dims{16, 27, 40};
  std::string mode = "both";
};

void cmd_bench(const BenchFlags& b, const SearchFlags& f, const Globals& g) {
  const auto seed = resolve_seed(g);
  Output out(g);
  out.stream() << "n,d,mode,seconds,red,blue,distance\n";
  for (const auto n : b.sizes) {
    for (const auto d : b.dims) {
      if (n == 0 || d == 0) throw ParameterError("bench sizes and dims must be positive");
      Rng data_rng = Rng(seed).split("bench-data", n * 1000003 + d);
      Dataset ds;
      ds.dim = d;
      for (std::size_t i = 0; i < n; ++i) ds.red.push_back(random_vector(d, data_rng));
      for (std::size_t i = 0; i < n; ++i) ds.blue.push_back(random_vector(d, data_rng));
      for (const std::string mode : {"poly", "brute"}) {
        if (b.mode != "both" && b.mode != mode) continue;
        auto cfg = make_config(f, g);
        cfg.brute_force = mode == "brute";
        Rng run = Rng(seed).split("bench-run", n * 1000003 + d);
        const auto start = std::chrono::steady_clock::now();
        const auto res = closest_pair(ds, cfg, run);
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        out.stream() << n << ',' << d << ',' << mode << ',' << took.count() << ',' << res.red << ',' << res.blue
                     << ',' << res.distance << '\n';
      }
    }
  }
}

// --- search commands ---------------------------------------------------------

void cmd_closest_pair(const SearchFlags& f, const Globals& g) {
  const auto seed = resolve_seed(g);
  const auto ds = read_dataset(f.input, f.format);
  const auto cfg = make_config(f, g);
  Rng rng(seed);
  PipelineStats stats;
  Output out(g);
  std::optional<bool> agree;
  auto meta = metadata("closest-pair", seed, f);
  if (f.k) {
    if (*f.k >= ds.dim) throw ParameterError("--k must be below the dimension");
    const auto hit = bichromatic_close_pair(ds, *f.k, cfg, rng, &stats);
    if (hit) {
      out.record({{"red", hit->red}, {"blue", hit->blue}, {"dist", hit->distance}});
    } else {
      out.record({{"red", nullptr}, {"blue", nullptr}, {"dist", nullptr}});
    }
    meta["k"] = *f.k;
    if (f.oracle) agree = hit.has_value() == (closest_pair_bruteforce(ds).distance <= *f.k);
  } else {
    const auto res = closest_pair(ds, cfg, rng, &stats);
    out.record({{"red", res.red}, {"blue", res.blue}, {"dist", res.distance}});
    if (f.oracle) agree = res.distance == closest_pair_bruteforce(ds).distance;
  }
  meta["stats"] = stats_json(stats);
  finish(out, meta, agree);
}

void emit_nn(Output& out, const std::vector<NNEntry>& entries) {
  for (const auto& e : entries) out.record({{"query", e.query}, {"nn", e.nn}, {"dist", e.distance}});
}

bool same_distances(const std::vector<NNEntry>& a, const std::vector<NNEntry>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].query != b[i].query || a[i].distance != b[i].distance) return false;
  }
  return true;
}

void cmd_batch_nn(const SearchFlags& f, const Globals& g) {
  const auto seed = resolve_seed(g);
  const auto db = read_vectors(f.db, f.format);
  const auto queries = read_vectors(f.queries, f.format);
  const auto cfg = make_config(f, g);
  Rng rng(seed);
  const auto res = batch_nn(db, queries, cfg, rng);
  Output out(g);
  emit_nn(out, res.entries);
  std::optional<bool> agree;
  if (f.oracle) agree = same_distances(res.entries, batch_nn_bruteforce(db, queries));
  auto meta = metadata("batch-nn", seed, f);
  meta["outer_group_size"] = res.outer_group_size;
  meta["stats"] = stats_json(res.stats);
  finish(out, meta, agree);
}

void cmd_l1_batch_nn(const SearchFlags& f, const Globals& g) {
  const auto seed = resolve_seed(g);
  auto db_in = open_input(f.db);
  auto q_in = open_input(f.queries);
  const auto db = load_int_vectors(db_in);
  const auto queries = load_int_vectors(q_in);
  const auto cfg = make_config(f, g);
  Rng rng(seed);
  const auto res = l1_batch_nn(db, queries, cfg, rng);
  Output out(g);
  emit_nn(out, res.entries);
  std::optional<bool> agree;
  if (f.oracle) agree = same_distances(res.entries, l1_batch_nn_bruteforce(db, queries));
  auto meta = metadata("l1-batch-nn", seed, f);
  meta["stats"] = stats_json(res.stats);
  finish(out, meta, agree);
}

void cmd_furthest_pair(const SearchFlags& f, const Globals& g) {
  const auto seed = resolve_seed(g);
  const auto ds = read_dataset(f.input, f.format);
  Rng rng(seed);
  PipelineStats stats;
  const auto res = furthest_pair(ds, make_config(f, g), rng, &stats);
  Output out(g);
  out.record({{"red", res.red}, {"blue", res.blue}, {"dist", res.distance}});
  std::optional<bool> agree;
  if (f.oracle) agree = res.distance == furthest_pair_bruteforce(ds).distance;
  auto meta = metadata("furthest-pair", seed, f);
  meta["stats"] = stats_json(stats);
  finish(out, meta, agree);
}

void cmd_inner_product(const SearchFlags& f, const Globals& g, IpMode mode) {
  const auto seed = resolve_seed(g);
  const auto ds = read_dataset(f.input, f.format);
  Rng rng(seed);
  PipelineStats stats;
  const auto res = extreme_inner_product(ds, mode, make_config(f, g), rng, &stats);
  Output out(g);
  out.record({{"red", res.red}, {"blue", res.blue}, {"ip", res.value}});
  std::optional<bool> agree;
  if (f.oracle) agree = res.value == extreme_inner_product_bruteforce(ds, mode).value;
  auto meta = metadata(mode == IpMode::kMin ? "min-ip" : "max-ip", seed, f);
  meta["stats"] = stats_json(stats);
  finish(out, meta, agree);
}

void cmd_orthogonal(const SearchFlags& f, const Globals& g) {
  const auto seed = resolve_seed(g);
  const auto ds = read_dataset(f.input, f.format);
  Rng rng(seed);
  PipelineStats stats;
  const auto res = find_orthogonal_pair(ds, make_config(f, g), rng, &stats);
  Output out(g);
  if (res) {
    out.record({{"red", res->red}, {"blue", res->blue}});
  } else {
    out.record({{"red", nullptr}, {"blue", nullptr}});
  }
  std::optional<bool> agree;
  if (f.oracle) agree = res.has_value() == find_orthogonal_pair_bruteforce(ds).has_value();
  auto meta = metadata("orthogonal", seed, f);
  meta["stats"] = stats_json(stats);
  finish(out, meta, agree);
}

void cmd_jaccard(const SearchFlags& f, const Globals& g) {
  const auto seed = resolve_seed(g);
  const auto ds = read_dataset(f.input, f.format);
  Rng rng(seed);
  PipelineStats stats;
  const auto res = max_jaccard_pair(ds, make_config(f, g), rng, &stats);
  Output out(g);
  out.record({{"red", res.red},
              {"blue", res.blue},
              {"jaccard", res.coefficient.to_string()},
              {"value", res.coefficient.to_double()}});
  std::optional<bool> agree;
  if (f.oracle) agree = res.coefficient == max_jaccard_pair_bruteforce(ds).coefficient;
  auto meta = metadata("jaccard", seed, f);
  meta["stats"] = stats_json(stats);
  finish(out, meta, agree);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic polynomials for Hamming closest pair and nearest neighbors"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "64-bit seed (falls back to POLYHAM_SEED, then 0)");
  app.add_option("--threads", g.threads, "worker cap; 0 uses every core");
  app.add_flag("--pretty", g.pretty, "indented JSON");
  app.add_option("--output,-o", g.output, "output path, - for standard output");

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a red/blue dataset");
  gen_cmd->add_option("--kind", gen.kind)->check(CLI::IsMember({"uniform", "planted"}));
  gen_cmd->add_option("--n", gen.n, "vectors per color")->required();
  gen_cmd->add_option("--d", gen.d, "dimension")->required();
  gen_cmd->add_option("--distance", gen.distance, "planted pair distance");
  gen_cmd->add_option("--format", gen.format)->check(CLI::IsMember({"text01", "hex"}));

  PolyFlags poly;
  auto* sample_cmd = app.add_subcommand("sample-poly", "sample a threshold polynomial and report its shape");
  auto* verify_cmd = app.add_subcommand("verify-error", "measure agreement of sampled threshold polynomials");
  for (auto* cmd : {sample_cmd, verify_cmd}) {
    cmd->add_option("--n", poly.n, "number of variables")->required();
    cmd->add_option("--theta", poly.theta, "threshold as a fraction or decimal");
    cmd->add_option("--eps", poly.eps, "error bound");
  }
  sample_cmd->add_option("--expand", poly.expand, "write the expanded polynomial to this path (- for stdout)");
  sample_cmd->add_option("--budget", poly.budget, "expansion monomial budget");
  verify_cmd->add_option("--trials", poly.trials, "sampled polynomials");
  verify_cmd->add_option("--random-inputs", poly.random_inputs, "random inputs besides the boundary weights");

  BenchFlags bench;
  SearchFlags bench_search;
  auto* bench_cmd = app.add_subcommand("bench", "time closest pair on random instances (CSV)");
  bench_cmd->add_option("--sizes", bench.sizes)->delimiter(',');
  bench_cmd->add_option("--dims", bench.dims)->delimiter(',');
  bench_cmd->add_option("--mode", bench.mode)->check(CLI::IsMember({"poly", "brute", "both"}));
  bench_cmd->add_option("--s", bench_search.s);
  bench_cmd->add_option("--rounds", bench_search.rounds);
  bench_cmd->add_option("--budget", bench_search.budget);

  SearchFlags search;
  auto* cp_cmd = app.add_subcommand("closest-pair", "bichromatic Hamming closest pair");
  add_search_flags(cp_cmd, search, false);
  cp_cmd->add_option("--k", search.k, "decide whether some pair is within distance k");
  auto* nn_cmd = app.add_subcommand("batch-nn", "nearest database vector for every query");
  add_search_flags(nn_cmd, search, true);
  auto* l1_cmd = app.add_subcommand("l1-batch-nn", "batch nearest neighbors under l1");
  add_search_flags(l1_cmd, search, true);
  auto* fp_cmd = app.add_subcommand("furthest-pair", "bichromatic Hamming furthest pair");
  add_search_flags(fp_cmd, search, false);
  auto* minip_cmd = app.add_subcommand("min-ip", "minimum inner product pair");
  add_search_flags(minip_cmd, search, false);
  auto* maxip_cmd = app.add_subcommand("max-ip", "maximum inner product pair");
  add_search_flags(maxip_cmd, search, false);
  auto* ov_cmd = app.add_subcommand("orthogonal", "an orthogonal red/blue pair");
  add_search_flags(ov_cmd, search, false);
  auto* jac_cmd = app.add_subcommand("jaccard", "maximum Jaccard coefficient pair");
  add_search_flags(jac_cmd, search, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen_cmd) cmd_gen(gen, g);
    else if (*sample_cmd) cmd_sample_poly(poly, g);
    else if (*verify_cmd) cmd_verify_error(poly, g);
    else if (*bench_cmd) cmd_bench(bench, bench_search, g);
    else if (*cp_cmd) cmd_closest_pair(search, g);
    else if (*nn_cmd) cmd_batch_nn(search, g);
    else if (*l1_cmd) cmd_l1_batch_nn(search, g);
    else if (*fp_cmd) cmd_furthest_pair(search, g);
    else if (*minip_cmd) cmd_inner_product(search, g, IpMode::kMin);
    else if (*maxip_cmd) cmd_inner_product(search, g, IpMode::kMax);
    else if (*ov_cmd) cmd_orthogonal(search, g);
    else if (*jac_cmd) cmd_jaccard(search, g);
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kVerify;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kData;
  } catch (const ParameterError& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}
