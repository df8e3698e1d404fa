// Command-line front end: motifs, train, eval, bench, gradcheck, generate.
// Exit codes: 0 success, 1 check failure or divergence, 2 usage or I/O error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "infomotif/config.hpp"
#include "infomotif/eval.hpp"
#include "infomotif/gradcheck_layers.hpp"
#include "infomotif/graph_io.hpp"
#include "infomotif/motif_index.hpp"
#include "infomotif/pipeline.hpp"
#include "infomotif/synthetic.hpp"

namespace fs = std::filesystem;
using namespace infomotif;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Common {
  unsigned threads = 1;
};

RunConfig build_config(const std::string& file, const std::vector<std::string>& sets, std::optional<std::uint64_t> seed) {
  ConfigBuilder b;
  if (!file.empty()) b.merge_file(resolve_data_path(file));
  for (const auto& s : sets) b.override_with(s);
  if (seed) b.set("train.seeds", nlohmann::ordered_json::array({*seed}));
  return b.build();
}

// ---------------------------------------------------------------------------

struct MotifsArgs {
  std::string action, graph, catalog, schema, node_types, out;
  bool directed = false;
};

int cmd_motifs(const MotifsArgs& a, const Common& c) {
  // "typed:<schema.json>" is shorthand for --schema with the default base catalog.
  auto catalog_name = a.catalog;
  auto schema_path = a.schema;
  if (catalog_name.rfind("typed:", 0) == 0) {
    schema_path = catalog_name.substr(6);
    catalog_name.clear();
  }
  if (catalog_name.empty()) catalog_name = a.directed ? "directed-full" : "undirected";
  std::optional<Schema> schema;
  GraphLoadOptions opts;
  opts.directed = a.directed;
  if (!schema_path.empty()) {
    schema = Schema::load(resolve_data_path(schema_path));
    opts.schema = &*schema;
  }
  if (!a.node_types.empty()) opts.node_types = resolve_data_path(a.node_types);
  auto loaded = load_graph(resolve_data_path(a.graph), opts);
  if (loaded.stats.self_loops) std::cerr << "warning: dropped " << loaded.stats.self_loops << " self-loop(s)\n";
  if (loaded.stats.duplicates) std::cerr << "warning: merged " << loaded.stats.duplicates << " duplicate edge(s)\n";
  auto catalog = make_catalog(catalog_name, schema ? &*schema : nullptr);
  auto index = MotifIndex::build(loaded.graph, catalog, c.threads);

  std::vector<std::pair<std::string, std::size_t>> totals;
  for (std::size_t t = 0; t < catalog.size(); ++t) totals.emplace_back(catalog[t].name, index.total(t));
  std::sort(totals.begin(), totals.end());
  for (std::size_t i = 0; i < totals.size(); ++i)
    std::cout << (i ? ", " : "") << totals[i].first << ": " << totals[i].second;
  std::cout << '\n';

  if (!a.out.empty()) {
    fs::create_directories(a.out);
    std::ofstream csv(fs::path(a.out) / "motif_counts.csv");
    if (!csv) throw ParseError("cannot write " + (fs::path(a.out) / "motif_counts.csv").string());
    csv << "node";
    for (std::size_t t = 0; t < catalog.size(); ++t) csv << ',' << catalog[t].name;
    csv << '\n';
    for (NodeId v = 0; v < loaded.graph.n_nodes(); ++v) {
      csv << loaded.ids.original(v);
      for (std::size_t t = 0; t < catalog.size(); ++t) csv << ',' << index.count(v, t);
      csv << '\n';
    }
    nlohmann::ordered_json j;
    for (std::size_t t = 0; t < catalog.size(); ++t) j[catalog[t].name] = index.total(t);
    write_json(fs::path(a.out) / "motif_totals.json", j);
    nlohmann::ordered_json cfg{{"catalog", catalog_name}, {"directed", a.directed}, {"graph", a.graph}};
    write_manifest(a.out, "motifs", cfg, content_hash(loaded.graph), {"motif_counts.csv", "motif_totals.json"});
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string config, out, checkpoint;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
};

int cmd_train(const RunArgs& a, const Common& c) {
  auto cfg = build_config(a.config, a.sets, a.seed);
  auto outcome = run_train(cfg, a.out, c.threads, &std::cout);
  const auto& s = outcome.report.test_acc;
  std::cout << "test accuracy " << s.mean;
  if (s.std) std::cout << " +/- " << *s.std;
  std::cout << " over " << s.count << " seed(s); outputs in " << a.out << '\n';
  return kOk;
}

int cmd_eval(const RunArgs& a, const Common& c) {
  auto cfg = build_config(a.config, a.sets, std::nullopt);
  auto r = run_eval(cfg, resolve_data_path(a.checkpoint), a.out, c.threads);
  std::cout << "test accuracy " << r.test_acc << '\n';
  for (const auto* rep : {&r.degree, &r.label_fraction, &r.diversity}) {
    std::cout << rep->name << ':';
    for (const auto& b : rep->rows) std::cout << " Q" << b.bin + 1 << "=" << b.accuracy;
    std::cout << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};
  std::size_t m = 3;
  int epochs = 3;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_bench(const BenchArgs& a, const Common&) {
  BenchConfig bc;
  bc.sizes = a.sizes;
  bc.m = a.m;
  bc.epochs = a.epochs;
  bc.seed = a.seed;
  auto rep = runtime_bench(bc, builtin_catalog(false));
  std::cout << "n,edges,base_s,motif_s,overhead_s\n";
  for (const auto& r : rep.rows)
    std::cout << r.n << ',' << r.edges << ',' << r.base_epoch_seconds << ',' << r.motif_epoch_seconds << ','
              << r.overhead_seconds << '\n';
  std::cout << "overhead fit: slope " << rep.overhead_fit.slope << " s/node, R^2 " << rep.overhead_fit.r2 << '\n';
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_csv(fs::path(a.out) / "bench.csv", rep);
    write_json(fs::path(a.out) / "bench.json", to_json(rep));
    nlohmann::ordered_json cfg{{"sizes", a.sizes}, {"m", a.m}, {"epochs", a.epochs}, {"seed", a.seed}};
    write_manifest(a.out, "bench", cfg, std::nullopt, {"bench.csv", "bench.json"});
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct GradcheckArgs {
  std::uint64_t seed = 1;
  int configs = 20;
  std::string out;
};

int cmd_gradcheck(const GradcheckArgs& a, const Common&) {
  GradcheckOptions opts;
  opts.seed = a.seed;
  opts.configs = a.configs;
  auto results = gradcheck_all(opts);
  bool ok = true;
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    ok = ok && r.passed();
    std::cout << (r.passed() ? "ok   " : "FAIL ") << r.op << "  configs " << r.configs << "  max err " << r.max_error
              << '\n';
    j.push_back({{"op", r.op}, {"configs", r.configs}, {"failures", r.failures}, {"max_error", r.max_error}});
  }
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_json(fs::path(a.out) / "gradcheck.json", j);
    write_manifest(a.out, "gradcheck", {{"seed", a.seed}, {"configs", a.configs}}, std::nullopt, {"gradcheck.json"});
  }
  std::cout << (ok ? "all gradients match" : "gradient mismatch") << '\n';
  return ok ? kOk : kFailed;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string kind, out;
  std::uint64_t seed = 0;
  std::size_t n = 1000, m = 3;
};

int cmd_generate(const GenerateArgs& a, const Common&) {
  fs::create_directories(a.out);
  if (a.kind == "planted-role") {
    write_planted_role(PlantedRoleBenchmark{}, a.seed, a.out);
    std::cout << "wrote planted-role data and config.json to " << a.out << '\n';
    write_manifest(a.out, "generate", {{"kind", a.kind}, {"seed", a.seed}}, std::nullopt,
                   {"edges.txt", "features.csv", "labels.txt", "config.json"});
  } else {
    auto g = generate_ba_graph(a.n, a.m, a.seed);
    save_graph(fs::path(a.out) / "edges.txt", g);
    std::cout << "wrote BA graph with " << g.n_nodes() << " nodes and " << g.n_edges() << " edges to " << a.out << '\n';
    write_manifest(a.out, "generate", {{"kind", a.kind}, {"n", a.n}, {"m", a.m}, {"seed", a.seed}}, content_hash(g),
                   {"edges.txt"});
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motif-regularized graph neural networks"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "Worker cap for motif enumeration")->check(CLI::PositiveNumber);

  MotifsArgs motifs;
  auto* m = app.add_subcommand("motifs", "Enumerate motif instances and print per-motif totals");
  m->add_option("--graph", motifs.graph, "Edge list")->required();
  m->add_flag("--directed", motifs.directed, "Treat edges as directed");
  m->add_option("action", motifs.action, "enumerate (the only action; may be omitted)")
      ->check(CLI::IsMember({"enumerate"}));
  m->add_option("--catalog", motifs.catalog, "undirected | directed-full | directed-paper | typed:<schema.json>");
  m->add_option("--schema", motifs.schema, "Schema JSON for typed motifs");
  m->add_option("--node-types", motifs.node_types, "\"node type\" file");
  m->add_option("--out", motifs.out, "Directory for the per-node count table");

  RunArgs train, eval;
  auto* t = app.add_subcommand("train", "Train over the configured seeds; writes checkpoints and a run report");
  t->add_option("--config", train.config, "JSON config with flat dotted keys");
  t->add_option("--set", train.sets, "Override, key=value (repeatable)");
  t->add_option("--seed", train.seed, "Single seed, replaces train.seeds");
  t->add_option("--out", train.out, "Output directory")->required();

  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint with degree, label-fraction and diversity breakdowns");
  e->add_option("--config", eval.config, "JSON config with flat dotted keys");
  e->add_option("--set", eval.sets, "Override, key=value (repeatable)");
  e->add_option("--checkpoint", eval.checkpoint, "Checkpoint written by train")->required();
  e->add_option("--out", eval.out, "Output directory")->required();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Per-epoch runtime on Barabasi-Albert graphs");
  b->add_option("--sizes", bench.sizes, "Node counts")->delimiter(',');
  b->add_option("--m", bench.m, "Edges per new node")->check(CLI::PositiveNumber);
  b->add_option("--epochs", bench.epochs, "Timed epochs per size")->check(CLI::PositiveNumber);
  b->add_option("--seed", bench.seed, "Root seed");
  b->add_option("--out", bench.out, "Output directory");

  GradcheckArgs grad;
  auto* g = app.add_subcommand("gradcheck", "Finite-difference check of every op and both layer types");
  g->add_option("--seed", grad.seed, "Root seed");
  g->add_option("--configs", grad.configs, "Random configurations per op")->check(CLI::PositiveNumber);
  g->add_option("--out", grad.out, "Output directory");

  GenerateArgs gen;
  auto* gn = app.add_subcommand("generate", "Write a synthetic dataset");
  gn->add_option("kind", gen.kind, "planted-role | ba")->required()->check(CLI::IsMember({"planted-role", "ba"}));
  gn->add_option("--out", gen.out, "Output directory")->required();
  gn->add_option("--seed", gen.seed, "Root seed");
  gn->add_option("--n", gen.n, "BA node count");
  gn->add_option("--m", gen.m, "BA edges per new node")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*m) return cmd_motifs(motifs, common);
    if (*t) return cmd_train(train, common);
    if (*e) return cmd_eval(eval, common);
    if (*b) return cmd_bench(bench, common);
    if (*g) return cmd_gradcheck(grad, common);
    if (*gn) return cmd_generate(gen, common);
  } catch (const NumericError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kFailed;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
