// Acceptance checks 1-11. Prints one PASS/FAIL/SKIP line per check and exits
// 1 when any check fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "infomotif/curriculum.hpp"
#include "infomotif/eval.hpp"
#include "infomotif/gnn.hpp"
#include "infomotif/gradcheck_layers.hpp"
#include "infomotif/motif_index.hpp"
#include "infomotif/pipeline.hpp"
#include "infomotif/regularizer.hpp"
#include "infomotif/synthetic.hpp"

namespace fs = std::filesystem;
using namespace infomotif;

namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::kPass : Status::kFail, std::move(detail)}; }

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

// ---- 1, 2: motif enumeration ------------------------------------------------

Graph erdos_renyi(std::size_t n, double p, bool directed, Rng& rng) {
  std::bernoulli_distribution keep(p);
  std::vector<Edge> edges;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = 0; b < n; ++b) {
      if (a == b || (!directed && b < a)) continue;
      if (keep(rng)) edges.push_back({a, b});
    }
  return Graph::build(n, edges, directed);
}

/// Node set {a, b, c} is an instance of m iff some slot assignment makes
/// every ordered pair's arc presence equal the pattern's.
bool matches(const Graph& g, const MotifSpec& m, std::array<NodeId, 3> s) {
  std::array<std::array<bool, 3>, 3> want{};
  for (auto [i, j] : m.edge_pattern) {
    want[i][j] = true;
    if (!m.directed) want[j][i] = true;
  }
  std::array<int, 3> perm{0, 1, 2};
  do {
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i)
      for (int j = 0; j < 3 && ok; ++j)
        if (i != j) ok = g.has_arc(s[perm[i]], s[perm[j]]) == want[i][j];
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

bool index_matches_brute_force(const Graph& g, const MotifCatalog& cat) {
  auto index = MotifIndex::build(g, cat);
  for (std::size_t t = 0; t < cat.size(); ++t) {
    std::set<Triple> want;
    for (NodeId a = 0; a < g.n_nodes(); ++a)
      for (NodeId b = a + 1; b < g.n_nodes(); ++b)
        for (NodeId c = b + 1; c < g.n_nodes(); ++c)
          if (matches(g, cat[t], {a, b, c})) want.insert({a, b, c});
    std::set<Triple> got;
    for (auto tr : index.instances(t)) {
      std::sort(tr.begin(), tr.end());
      got.insert(tr);
    }
    if (got != want || index.instances(t).size() != want.size()) return false;
  }
  return true;
}

Outcome motif_oracle() {
  auto rng = substream(2024, "acceptance/er");
  const double ps[3] = {0.2, 0.4, 0.6};
  const auto undirected = builtin_catalog(false);
  const auto directed = builtin_catalog(true, DirectedCatalog::kFull);
  int mismatches = 0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 3 + static_cast<std::size_t>(k % 10);
    const double p = ps[k % 3];
    if (!index_matches_brute_force(erdos_renyi(n, p, false, rng), undirected)) ++mismatches;
    if (!index_matches_brute_force(erdos_renyi(n, p, true, rng), directed)) ++mismatches;
  }
  return verdict(mismatches == 0, "100 undirected + 100 directed graphs, n 3..12, " + std::to_string(mismatches) +
                                      " mismatches");
}

Outcome closed_form_counts() {
  const auto cat = builtin_catalog(false);
  bool ok = true;
  std::ostringstream msg;
  for (std::size_t n : {3u, 4u, 5u, 8u, 12u}) {
    std::vector<Edge> edges;
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = a + 1; b < n; ++b) edges.push_back({a, b});
    auto idx = MotifIndex::build(Graph::build(n, edges, false), cat);
    const std::size_t tri = n * (n - 1) * (n - 2) / 6, per_node = (n - 1) * (n - 2) / 2;
    ok = ok && idx.total(1) == tri && idx.total(0) == 0;
    for (NodeId v = 0; v < n; ++v) ok = ok && idx.count(v, 1) == per_node;
  }
  std::vector<Edge> star{{0, 1}, {0, 2}, {0, 3}};
  auto sidx = MotifIndex::build(Graph::build(4, star, false), cat);
  ok = ok && sidx.total(0) == 3 && sidx.total(1) == 0 && sidx.count(0, 0) == 3 && sidx.count(1, 0) == 2;
  msg << "K3..K12 triangles C(n,3) and C(n-1,2) per node; star wedges " << sidx.total(0);
  return verdict(ok, msg.str());
}

// ---- 3: gradients -----------------------------------------------------------

Outcome gradient_fidelity() {
  GradcheckOptions opts;  // h 1e-5, rel 1e-4, 20 configs
  auto results = gradcheck_all(opts);
  int failed = 0;
  double worst = 0;
  std::string names;
  for (const auto& r : results) {
    worst = std::max(worst, r.max_error);
    if (!r.passed() || r.configs < 20) {
      ++failed;
      names += " " + r.op;
    }
  }
  return verdict(failed == 0, std::to_string(results.size()) + " ops/layers x 20 configs, worst rel err " +
                                  fmt(worst * 1e6, 3) + "e-6" + (failed ? ", failing:" + names : ""));
}

// ---- 4: locality ------------------------------------------------------------

Outcome locality() {
  auto rng = substream(7, "acceptance/locality");
  int violations = 0, graphs_without_signal = 0;
  double worst_outside = 0;
  for (int k = 0; k < 20; ++k) {
    const auto arch = k % 2 ? Arch::kGat : Arch::kGcn;
    auto g = erdos_renyi(40 + static_cast<std::size_t>(k), 0.05, false, rng);
    GnnConfig cfg{.arch = arch, .layers = 2, .hidden = 8, .heads = 2, .dropout = 0.0, .out_dim = 4};
    GnnEncoder<double> enc(cfg, 5, rng);
    Classifier<double> clf(4, 3, rng);
    auto ops = GraphOperators<double>::build(g);
    std::vector<NodeId> labeled;
    std::vector<std::uint32_t> rows;
    std::vector<std::int32_t> y;
    for (NodeId v = 0; v < g.n_nodes(); v += 9) {
      labeled.push_back(v);
      rows.push_back(v);
      y.push_back(static_cast<std::int32_t>(v % 3));
    }
    std::vector<double> w(rows.size(), 1.0 / static_cast<double>(rows.size()));
    Tape<double> tape;
    auto x = tape.variable(detail::random_tensor(static_cast<Eigen::Index>(g.n_nodes()), 5, rng));
    Rng unused(0);
    auto probs = clf.probabilities(tape, gather_rows<double>(enc.forward(tape, ops, x, false, unused), rows));
    tape.backward(supervised_loss<double>(probs, y, w));
    auto gx = tape.grad(x);
    std::vector<bool> near(g.n_nodes(), false);
    for (auto v : khop_neighborhood(g, labeled, 2)) near[v] = true;
    bool inside_nonzero = false;
    for (NodeId v = 0; v < g.n_nodes(); ++v) {
      const double mag = gx.row(v).cwiseAbs().maxCoeff();
      if (near[v]) {
        inside_nonzero = inside_nonzero || mag > 0;
      } else {
        worst_outside = std::max(worst_outside, mag);
        if (mag > 1e-12) ++violations;
      }
    }
    if (!inside_nonzero) ++graphs_without_signal;
  }
  return verdict(violations == 0 && graphs_without_signal == 0,
                 "20 graphs (GCN and GAT), max |dL/dx| outside 2 hops " + fmt(worst_outside, 3) + ", " +
                     std::to_string(graphs_without_signal) + " graphs without inside gradient");
}

// ---- 5, 6: normalization and analytic anchors -------------------------------

Outcome normalization() {
  auto rng = substream(11, "acceptance/normalization");
  std::uniform_int_distribution<int> small(1, 6);
  double worst_enc = 0, worst_att = 0, worst_nov = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto d = small(rng);
    std::array<RowVec<double>, 3> gated;
    for (auto& r : gated) r = detail::random_tensor(1, d, rng, -5, 5);
    auto enc = encode_instance<double>(gated, detail::random_tensor(2 * d, 1, rng, -5, 5));
    worst_enc = std::max(worst_enc, std::abs(enc.weights[0] + enc.weights[1] + enc.weights[2] - 1.0));

    Tape<double> tape(false);
    std::vector<Var<double>> views;
    const auto motifs = small(rng), n = small(rng);
    for (int t = 0; t < motifs; ++t) views.push_back(tape.constant(detail::random_tensor(n, d, rng, -5, 5)));
    auto att = motif_attention<double>(views, tape.constant(detail::random_tensor(d, 1, rng, -5, 5)));
    for (Eigen::Index v = 0; v < att.weights.rows(); ++v)
      worst_att = std::max(worst_att, std::abs(att.weights.value().row(v).sum() - 1.0));

    auto alpha = row_softmax(tape.constant(detail::random_tensor(1 + small(rng) * 3, motifs, rng, -5, 5))).value();
    auto beta = novelty_weights(alpha);
    double total = 0;
    for (double b : beta) total += b;
    worst_nov = std::max(worst_nov, std::abs(total - 1.0));
  }
  const double worst = std::max({worst_enc, worst_att, worst_nov});
  return verdict(worst <= 1e-6, "1e4 draws each; max |sum-1| encoder " + fmt(worst_enc * 1e15, 1) +
                                    "e-15, attention " + fmt(worst_att * 1e15, 1) + "e-15, novelty " +
                                    fmt(worst_nov * 1e15, 1) + "e-15");
}

Outcome analytic_losses() {
  // Frozen discriminator: zero bilinear weights give D = 1/2 for every pair.
  Rng rng(5);
  std::vector<Edge> edges{{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 2}, {4, 5}, {5, 6}, {6, 4}, {0, 6}};
  auto g = Graph::build(7, edges, false);
  auto index = MotifIndex::build(g, builtin_catalog(false));
  MotifRegularizer<double> reg(index.n_motifs(), 6, rng);
  std::vector<NodeId> nodes(7);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  double worst_mi = 0;
  std::size_t terms = 0;
  for (std::size_t t = 0; t < index.n_motifs(); ++t) {
    reg.head(t).scorer.value.setZero();
    auto batch = assemble_batch(g, index, t, nodes, 20, rng);
    if (batch.empty()) continue;
    Tape<double> tape;
    auto h = tape.constant(detail::random_tensor(7, 6, rng));
    auto out = reg.anchor_losses(tape, t, h, batch);
    for (Eigen::Index i = 0; i < out.losses.rows(); ++i, ++terms)
      worst_mi = std::max(worst_mi, std::abs(out.losses.value()(i, 0) - std::log(2.0)));
  }
  const std::vector<double> half{0.5, 0.5, 0.5};
  worst_mi = std::max(worst_mi, std::abs(motif_mi_loss<double>(half, half) - std::log(2.0)));

  double worst_ce = 0;
  for (std::int32_t c = 0; c < 7; ++c) {
    Tape<double> tape;
    auto probs = row_softmax(tape.constant(Tensor<double>::Zero(1, 7)));
    std::vector<std::int32_t> y{c};
    std::vector<double> w{1.0};
    worst_ce = std::max(worst_ce, std::abs(supervised_loss<double>(probs, y, w).value()(0, 0) - std::log(7.0)));
  }
  return verdict(terms > 0 && worst_mi <= 1e-9 && worst_ce <= 1e-9,
                 std::to_string(terms) + " (v,t) terms |L-ln2| " + fmt(worst_mi * 1e15, 1) + "e-15, |L_B-ln7| " +
                     fmt(worst_ce * 1e15, 1) + "e-15");
}

// ---- 7, 8, 9: accuracy benchmarks ------------------------------------------

Outcome cora() {
  const char* root = std::getenv("INFOMOTIF_DATA");
  if (!root || !*root || !fs::is_directory(fs::path(root) / "cora"))
    return {Status::kSkip, "no $INFOMOTIF_DATA/cora; the synthetic benchmark (8) stands in"};
  const auto dir = fs::path(root) / "cora";
  DataConfig dc;
  dc.edges = (dir / "edges.txt").string();
  dc.features = (fs::exists(dir / "features.csv") ? dir / "features.csv" : dir / "features.txt").string();
  dc.labels = (dir / "labels.txt").string();
  auto ds = load_dataset(dc);
  auto index = MotifIndex::build(ds.data.graph, builtin_catalog(false));
  TrainConfig cfg;
  cfg.seeds = {0, 1, 2, 3, 4};
  auto cmp = compare_arms(ds.data, index, cfg, {0.4, 0.1});
  const double base = cmp.base.test_acc.mean;
  return verdict(std::abs(base - 0.82) <= 0.03 && cmp.gain() >= 0.015,
                 "base " + fmt(base) + " (target 0.820 +/- 0.030), motif " + fmt(cmp.motif.test_acc.mean) +
                     ", gain " + fmt(cmp.gain()) + " (need >= 0.015)");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct SyntheticRuns {
  ArmComparison q20;
  double seconds = 0;
};

Outcome planted_role(SyntheticRuns& runs) {
  const auto t0 = std::chrono::steady_clock::now();
  runs.q20 = run_planted_role(PlantedRoleBenchmark{});
  runs.seconds = seconds_since(t0);
  const auto& c = runs.q20;
  return verdict(c.gain() >= 0.05 && runs.seconds < 300,
                 "base " + fmt(c.base.test_acc.mean) + ", motif " + fmt(c.motif.test_acc.mean) + ", gain " +
                     fmt(c.gain()) + " (need >= 0.050), 5 seeds, " + fmt(runs.seconds, 1) + " s");
}

Outcome q_sensitivity(const SyntheticRuns& runs) {
  auto q5 = run_planted_role(PlantedRoleBenchmark{}, 5);
  const double a5 = q5.motif.test_acc.mean, a20 = runs.q20.motif.test_acc.mean;
  return verdict(a20 >= a5, "motif accuracy Q=5 " + fmt(a5) + ", Q=20 " + fmt(a20));
}

// ---- 10, 11 -----------------------------------------------------------------

Outcome linear_overhead() {
  auto rep = runtime_bench(BenchConfig{}, builtin_catalog(false));
  std::ostringstream s;
  s << "overhead s/epoch";
  for (const auto& r : rep.rows) s << " n=" << r.n << ":" << fmt(r.overhead_seconds, 3);
  s << ", R^2 " << fmt(rep.overhead_fit.r2);
  return verdict(rep.overhead_fit.r2 >= 0.95, s.str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / ("infomotif_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  PlantedRoleBenchmark b;
  write_planted_role(b, 3, root / "data");
  auto cfg = ConfigBuilder().merge_file(root / "data" / "config.json").override_with("train.max_epochs=8").build();
  run_train(cfg, root / "a");
  run_train(cfg, root / "b");
  const bool same_ckpt = slurp(root / "a" / "checkpoint_seed3.bin") == slurp(root / "b" / "checkpoint_seed3.bin");
  const bool same_report = slurp(root / "a" / "report.json") == slurp(root / "b" / "report.json");
  const auto bytes = fs::file_size(root / "a" / "checkpoint_seed3.bin");
  fs::remove_all(root);
  return verdict(same_ckpt && same_report, "checkpoint (" + std::to_string(bytes) + " bytes) " +
                                               (same_ckpt ? "identical" : "differs") + ", report.json " +
                                               (same_report ? "identical" : "differs"));
}

}  // namespace

int main() {
  SyntheticRuns synthetic;
  struct Check {
    int id;
    std::string name;
    std::function<Outcome()> run;
    double limit_seconds;  ///< 0 when no runtime bound applies
  };
  const std::vector<Check> checks{
      {1, "motif oracle equivalence", motif_oracle, 5},
      {2, "closed-form motif counts", closed_form_counts, 0},
      {3, "gradient fidelity", gradient_fidelity, 60},
      {4, "two-hop locality", locality, 30},
      {5, "normalization", normalization, 0},
      {6, "analytic loss anchors", analytic_losses, 0},
      {7, "citation benchmark", cora, 0},
      {8, "planted-role benchmark", [&] { return planted_role(synthetic); }, 300},
      {9, "Q sensitivity", [&] { return q_sensitivity(synthetic); }, 0},
      {10, "linear regularization overhead", linear_overhead, 0},
      {11, "determinism", determinism, 0},
  };
  int failures = 0;
  for (const auto& c : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    if (o.status == Status::kPass && c.limit_seconds > 0 && secs >= c.limit_seconds) {
      o.status = Status::kFail;
      o.detail += ", over the " + fmt(c.limit_seconds, 0) + " s budget";
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
    failures += o.status == Status::kFail;
    std::cout << tag << "  " << std::setw(2) << c.id << "  " << c.name << ": " << o.detail << " [" << fmt(secs, 1)
              << " s]" << std::endl;
  }
  return failures ? 1 : 0;
}
