#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "bfcs/data_io.hpp"
#include "bfcs/errors.hpp"
#include "bfcs/eval.hpp"
#include "bfcs/graph_priors.hpp"
#include "bfcs/random.hpp"
#include "bfcs/scan.hpp"
#include "bfcs/sim.hpp"

namespace bfcs::cli {

namespace fs = std::filesystem;

namespace {

/// Files written to a temporary name and renamed only on commit(); any that
/// were not committed are removed on destruction.
class StagedFiles {
 public:
  StagedFiles() = default;
  StagedFiles(const StagedFiles&) = delete;
  StagedFiles& operator=(const StagedFiles&) = delete;
  ~StagedFiles() {
    std::error_code ec;
    for (const auto& [tmp, final_path] : files_) fs::remove(tmp, ec);
  }

  fs::path stage(const fs::path& final_path) {
    fs::path tmp = final_path;
    tmp += ".tmp";
    files_.emplace_back(tmp, final_path);
    return tmp;
  }

  void commit() {
    for (const auto& [tmp, final_path] : files_) fs::rename(tmp, final_path);
    files_.clear();
  }

 private:
  std::vector<std::pair<fs::path, fs::path>> files_;
};

/// Writes `body` to `path`, or to `out` when path is empty.
void emit(const std::string& path, const std::string& body, std::ostream& out) {
  if (path.empty()) {
    out << body;
    return;
  }
  StagedFiles staged;
  const fs::path tmp = staged.stage(path);
  {
    std::ofstream f(tmp);
    if (!f) throw DataError(path + ": cannot open for writing");
    f << body;
    if (!f) throw DataError(path + ": write failed");
  }
  staged.commit();
}

void load_constraints(const std::string& path, PriorSpec& spec) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open constraint file");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string verb;
    if (!(fields >> verb)) continue;
    int from = 0, to = 0;
    if (!(fields >> from >> to) || from < 1 || from > 3 || to < 1 || to > 3) {
      throw DataError(path + ": line " + std::to_string(line_no) + ": expected '<forbid|require> FROM TO' with nodes 1..3");
    }
    const DirectedEdge e{from - 1, to - 1};
    if (verb == "forbid") {
      spec.forbidden_edges.push_back(e);
    } else if (verb == "require") {
      spec.required_edges.push_back(e);
    } else {
      throw DataError(path + ": line " + std::to_string(line_no) + ": unknown directive '" + verb + "'");
    }
  }
}

PriorSpec prior_spec_from(const CliConfig& c) {
  PriorSpec spec;
  if (c.kind) {
    if (*c.kind == "dag") {
      spec.kind = GraphKind::kDag;
    } else if (*c.kind == "dmag") {
      spec.kind = GraphKind::kDmag;
    } else {
      throw DomainError("--kind must be dag or dmag");
    }
    if (c.bk) spec.bk_root = 0;
  } else {
    spec = named_prior_spec(c.prior);
  }
  spec.edge_prob_q = c.q;
  if (!c.constraints.empty()) load_constraints(c.constraints, spec);
  validate(spec);
  return spec;
}

std::string prior_label(const CliConfig& c) {
  std::string label = c.kind ? *c.kind + (c.bk ? "-bk" : "") : c.prior;
  if (c.q) label += ",q=" + format_double(*c.q);
  if (!c.constraints.empty()) label += ",constraints=" + c.constraints;
  return label;
}

int run_bound(const CliConfig& c, std::ostream& out) {
  const auto prior = build_prior(prior_spec_from(c));
  emit(c.output, format_double(posterior_upper_bound(c.n, c.nu, prior)) + "\n", out);
  return 0;
}

int run_priors(const CliConfig& c, std::ostream& out) {
  std::ostringstream body;
  const std::array<PriorSpec, 4> columns = {named_prior_spec("dag"), named_prior_spec("dag-bk"),
                                            named_prior_spec("dmag"), named_prior_spec("dmag-bk")};
  std::array<std::array<int, kNumModels>, 4> counts;
  for (std::size_t col = 0; col < columns.size(); ++col) counts[col] = class_counts(columns[col]);

  body << "model\tcase\tdescription\tDAG\tDAG_BK\tDMAG\tDMAG_BK\n";
  std::array<int, 4> totals{};
  for (int j = 0; j < kNumModels; ++j) {
    const CiModelId id = model_from_index(j);
    body << 'M' << j << '\t' << canonical_case_name(canonical_case(id)) << '\t' << description(id);
    for (std::size_t col = 0; col < columns.size(); ++col) {
      body << '\t' << counts[col][j];
      totals[col] += counts[col][j];
    }
    body << '\n';
  }
  body << "all\t\t";
  for (int t : totals) body << '\t' << t;
  body << "\n\n";

  const PriorSpec spec = prior_spec_from(c);
  const auto selected = class_counts(spec);
  const auto prior = build_prior(spec);
  body << "# prior " << prior_label(c) << '\n';
  body << "model\tcount\tweight\n";
  int total = 0;
  for (int j = 0; j < kNumModels; ++j) {
    body << 'M' << j << '\t' << selected[j] << '\t' << format_double(prior[j]) << '\n';
    total += selected[j];
  }
  body << "all\t" << total << "\t1\n";
  emit(c.output, body.str(), out);
  return 0;
}

int run_scan(const CliConfig& c, std::ostream& out, std::ostream& err) {
  if (c.markers.empty() || c.traits.empty()) throw DomainError("scan needs --markers and --traits");
  const FormatOptions fmt{c.delimiter};
  const ExpressionDataset data = load_dataset(c.markers, c.traits, fmt);
  const JointCorrelation corr = correlation_matrix(data);
  const auto prior = build_prior(prior_spec_from(c));

  ScanOptions options;
  options.nu = c.nu;
  options.strategy = parse_strategy(c.strategy);
  options.threads = c.threads;
  options.prior_label = prior_label(c);
  if (!c.quiet) {
    options.progress = [&err, last = Eigen::Index{-1}](Eigen::Index done, Eigen::Index total) mutable {
      const Eigen::Index decile = 10 * done / total;
      if (decile != last) {
        err << "scan: " << done << "/" << total << " regulators\n";
        last = decile;
      }
    };
  }
  const ScanResult res = full_scan(corr, prior, options);
  if (!c.quiet) {
    err << "scan: n=" << res.meta.n << " nu=" << format_double(res.meta.nu) << " prior=" << res.meta.prior_label
        << " strategy=" << to_string(res.meta.strategy) << " skipped_triplets=" << res.meta.skipped_triplets
        << " upper_bound=" << format_double(res.meta.upper_bound) << '\n';
  }

  const std::size_t all = static_cast<std::size_t>(res.m() * (res.m() - 1));
  const auto edges = rank_edges(res, c.top_k == 0 ? all : c.top_k);
  std::ostringstream body;
  body << "regulator\ttarget\tprobability\tbest_marker\n";
  for (const auto& e : edges) {
    body << data.trait_names[static_cast<std::size_t>(e.regulator)] << '\t'
         << data.trait_names[static_cast<std::size_t>(e.target)] << '\t' << format_double(e.probability) << '\t'
         << (e.best_marker == kNoMarker ? std::string("NA") : data.marker_names[static_cast<std::size_t>(e.best_marker)])
         << '\n';
  }

  if (!c.matrix_output.empty()) {
    NamedMatrix dump{res.prob, data.trait_names};
    dump.values.diagonal().setZero();
    StagedFiles staged;
    write_table(staged.stage(c.matrix_output), dump, fmt);
    emit(c.output, body.str(), out);
    staged.commit();
  } else {
    emit(c.output, body.str(), out);
  }
  return 0;
}

std::vector<std::string> numbered(const char* prefix, Eigen::Index count) {
  std::vector<std::string> names;
  for (Eigen::Index i = 1; i <= count; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

int run_simulate(const CliConfig& c, std::ostream& out) {
  if (c.out_dir.empty()) throw DomainError("simulate needs --out-dir");
  if (c.n < 2) throw DomainError("--n must be at least 2");
  fs::create_directories(c.out_dir);
  const fs::path dir(c.out_dir);

  nlohmann::ordered_json meta;
  meta["generator"] = std::string(Rng::kName);
  meta["seed"] = c.seed;
  meta["n"] = c.n;
  meta["mode"] = c.mode;

  NamedMatrix markers, traits;
  std::vector<std::pair<std::string, std::string>> truth_edges;

  if (c.mode == "grn") {
    GrnSpec spec;
    if (c.preset == "sparse") {
      spec = GrnSpec::sparse(c.seed);
    } else if (c.preset == "dense") {
      spec = GrnSpec::dense(c.seed);
    } else {
      throw DomainError("--preset must be sparse or dense");
    }
    if (c.m) spec.m = *c.m;
    if (c.l) spec.l = *c.l;
    if (c.edges) spec.edge_count_target = *c.edges;
    spec.marker_link_prob = c.link_prob;
    const GrnModel model = gen_grn(spec);
    const GrnSample sample = sample_grn_data(model, spec, c.n);
    markers = {sample.markers, numbered("L", spec.l)};
    traits = {sample.traits, numbered("T", spec.m)};
    for (Eigen::Index i = 0; i < spec.m; ++i) {
      for (Eigen::Index j = 0; j < spec.m; ++j) {
        if (model.truth.direct(i, j)) truth_edges.emplace_back(traits.names[i], traits.names[j]);
      }
    }
    meta["preset"] = c.preset;
    meta["m"] = spec.m;
    meta["l"] = spec.l;
    meta["marker_link_prob"] = spec.marker_link_prob;
    meta["edge_count_target"] = spec.edge_count_target;
    meta["direct_edges"] = model.truth.direct.count();
    meta["ancestral_edges"] = model.truth.ancestral.count();
  } else if (c.mode == "triplet") {
    TripletSemSpec spec;
    spec.model = parse_generating_model(c.model);
    if (c.noise == "gaussian") {
      spec.noise1 = NoiseKind::kGaussian;
    } else if (c.noise == "bernoulli") {
      spec.noise1 = NoiseKind::kBernoulli;
    } else {
      throw DomainError("--noise must be gaussian or bernoulli");
    }
    spec.seed = c.seed;
    const TripletData data = gen_triplet_data(spec, c.n);
    markers = {data.x.col(0), {"L1"}};
    traits = {data.x.rightCols(2), {"T1", "T2"}};
    if (data.coefficients.b32 != 0.0) truth_edges.emplace_back("T1", "T2");
    meta["model"] = c.model;
    meta["noise"] = c.noise;
    meta["b21"] = data.coefficients.b21;
    meta["b31"] = data.coefficients.b31;
    meta["b32"] = data.coefficients.b32;
    if (spec.noise1 == NoiseKind::kBernoulli) meta["bernoulli_p"] = data.coefficients.bernoulli_p;
  } else {
    throw DomainError("--mode must be grn or triplet");
  }

  StagedFiles staged;
  write_table(staged.stage(dir / "markers.tsv"), markers);
  write_table(staged.stage(dir / "traits.tsv"), traits);
  {
    const fs::path path = staged.stage(dir / "truth.tsv");
    std::ofstream f(path);
    f << "regulator\ttarget\n";
    for (const auto& [from, to] : truth_edges) f << from << '\t' << to << '\n';
    if (!f) throw DataError(path.string() + ": write failed");
  }
  {
    const fs::path path = staged.stage(dir / "meta.json");
    std::ofstream f(path);
    f << meta.dump(2) << '\n';
    if (!f) throw DataError(path.string() + ": write failed");
  }
  staged.commit();
  out << "wrote " << (dir / "markers.tsv").string() << ", traits.tsv, truth.tsv, meta.json\n";
  return 0;
}

/// Rows of a header-led TSV as string fields.
std::vector<std::vector<std::string>> read_rows(const std::string& path, std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream s(line);
    while (std::getline(s, field, '\t')) {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(field);
    }
    return fields;
  };
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  header = split(line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split(line));
    if (rows.back().size() < 2) throw DataError(path + ": row " + std::to_string(rows.size() + 1) + " is too short");
  }
  return rows;
}

int run_evaluate(const CliConfig& c, std::ostream& out) {
  if (c.scan_file.empty() || c.truth_file.empty()) throw DomainError("evaluate needs --scan and --truth");
  std::vector<std::string> scan_header, truth_header;
  const auto scan_rows = read_rows(c.scan_file, scan_header);
  const auto truth_rows = read_rows(c.truth_file, truth_header);
  if (scan_header.size() < 3 || scan_header[2] != "probability") {
    throw DataError(c.scan_file + ": expected columns regulator, target, probability");
  }

  std::vector<std::string> names;
  std::unordered_map<std::string, Eigen::Index> ids;
  auto id_of = [&](const std::string& name) {
    const auto [it, inserted] = ids.emplace(name, static_cast<Eigen::Index>(names.size()));
    if (inserted) names.push_back(name);
    return it->second;
  };
  struct Cell {
    Eigen::Index i, j;
    double p;
  };
  std::vector<Cell> cells;
  for (std::size_t r = 0; r < scan_rows.size(); ++r) {
    const auto& row = scan_rows[r];
    if (row.size() < 3) throw DataError(c.scan_file + ": row " + std::to_string(r + 2) + " is too short");
    double p = 0.0;
    try {
      std::size_t used = 0;
      p = std::stod(row[2], &used);
      if (used != row[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError(c.scan_file + ": row " + std::to_string(r + 2) + ": bad probability '" + row[2] + "'");
    }
    cells.push_back({id_of(row[0]), id_of(row[1]), p});
  }
  std::vector<std::pair<Eigen::Index, Eigen::Index>> truth_pairs;
  for (const auto& row : truth_rows) truth_pairs.emplace_back(id_of(row[0]), id_of(row[1]));

  const auto m = static_cast<Eigen::Index>(names.size());
  Eigen::MatrixXd prob = Eigen::MatrixXd::Zero(m, m);
  for (const auto& cell : cells) prob(cell.i, cell.j) = cell.p;
  BoolMatrix truth = BoolMatrix::Constant(m, m, false);
  for (const auto& [i, j] : truth_pairs) truth(i, j) = true;
  if (c.ancestral) truth = transitive_closure(truth);

  const LabeledScores scores = labeled_scores(prob, truth);
  const RocCurve roc = roc_auc(scores);
  const PrCurve pr = pr_auc(scores);
  Binning binning = Binning::kEqualCount;
  if (c.binning == "equal-width") {
    binning = Binning::kEqualWidth;
  } else if (c.binning != "equal-count") {
    throw DomainError("--binning must be equal-count or equal-width");
  }
  const auto calibration = calibration_table(scores, c.bins, binning);

  std::ostringstream body;
  body << "# summary\nmetric\tvalue\n";
  body << "roc_auc\t" << format_double(roc.auc) << '\n';
  body << "pr_auc\t" << format_double(pr.auc) << '\n';
  body << "positives\t" << truth.count() << '\n';
  body << "pairs\t" << scores.size() << '\n';
  body << "truth\t" << (c.ancestral ? "ancestral" : "direct") << '\n';
  body << "\n# roc\nfpr\ttpr\tthreshold\n";
  for (const auto& p : roc.points) {
    body << format_double(p.fpr) << '\t' << format_double(p.tpr) << '\t' << format_double(p.threshold) << '\n';
  }
  body << "\n# pr\nrecall\tprecision\tthreshold\n";
  for (const auto& p : pr.points) {
    body << format_double(p.recall) << '\t' << format_double(p.precision) << '\t' << format_double(p.threshold)
         << '\n';
  }
  body << "\n# calibration\nbin\tmean_score\tevent_rate\tcount\n";
  for (std::size_t b = 0; b < calibration.size(); ++b) {
    body << b + 1 << '\t' << format_double(calibration[b].mean_score) << '\t'
         << format_double(calibration[b].event_rate) << '\t' << calibration[b].count << '\n';
  }
  emit(c.output, body.str(), out);
  return 0;
}

}  // namespace

int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.subcommand == "scan") return run_scan(config, out, err);
    if (config.subcommand == "simulate") return run_simulate(config, out);
    if (config.subcommand == "evaluate") return run_evaluate(config, out);
    if (config.subcommand == "priors") return run_priors(config, out);
    if (config.subcommand == "bound") return run_bound(config, out);
    err << "error: unknown subcommand '" << config.subcommand << "'\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << config.subcommand << ": " << e.what() << '\n';
    return 1;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayes factors of covariance structures: local causal discovery over triplets"};
  app.require_subcommand(1);
  CliConfig c;

  auto add_prior = [&c](CLI::App* sub) {
    sub->add_option("--prior", c.prior, "Graph prior: dag, dag-bk, dmag, dmag-bk")->capture_default_str();
    sub->add_option("--q", c.q, "Per-pair edge probability for the sparsity prior")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--constraints", c.constraints, "File of 'forbid A B' / 'require A B' lines (nodes 1..3)")
        ->check(CLI::ExistingFile);
    sub->add_option("--nu", c.nu, "Prior degrees of freedom (> 2)")->capture_default_str();
  };

  auto* scan = app.add_subcommand("scan", "Scan marker/trait data for L -> Ti -> Tj structures");
  scan->add_option("--markers", c.markers, "Marker table (samples x markers)")->required()->check(CLI::ExistingFile);
  scan->add_option("--traits", c.traits, "Trait table (samples x traits)")->required()->check(CLI::ExistingFile);
  std::string delimiter = "\t";
  scan->add_option("--delimiter", delimiter, "Field delimiter (single character; default tab)");
  scan->add_option("--strategy", c.strategy, "max-over-markers or local-linkage")->capture_default_str();
  scan->add_option("--threads", c.threads, "Worker threads, 0 = auto")->capture_default_str();
  scan->add_option("--output,-o", c.output, "Edge list output (default: stdout)");
  scan->add_option("--matrix", c.matrix_output, "Also write the full probability matrix");
  scan->add_option("--top", c.top_k, "Keep only the top K edges (0 = all)");
  scan->add_flag("--quiet", c.quiet, "No progress on stderr");
  add_prior(scan);

  auto* simulate = app.add_subcommand("simulate", "Generate synthetic marker/trait data with known structure");
  simulate->add_option("--mode", c.mode, "grn or triplet")->capture_default_str();
  simulate->add_option("--preset", c.preset, "GRN preset: sparse (54 edges) or dense (247 edges)")->capture_default_str();
  simulate->add_option("--m", c.m, "Trait count");
  simulate->add_option("--l", c.l, "Marker count");
  simulate->add_option("--edges", c.edges, "Expected trait -> trait edge count");
  simulate->add_option("--link-prob", c.link_prob, "Marker -> trait link probability")->capture_default_str();
  simulate->add_option("--model", c.model, "Triplet model: causal, independent, full")->capture_default_str();
  simulate->add_option("--noise", c.noise, "Triplet X1 noise: gaussian or bernoulli")->capture_default_str();
  simulate->add_option("--n", c.n, "Sample count")->capture_default_str();
  simulate->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  simulate->add_option("--out-dir", c.out_dir, "Output directory")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Score a scan against a ground-truth edge list");
  evaluate->add_option("--scan", c.scan_file, "Edge list written by scan")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--truth", c.truth_file, "Ground-truth edge list")->required()->check(CLI::ExistingFile);
  evaluate->add_flag("--ancestral", c.ancestral, "Close the truth transitively first");
  evaluate->add_option("--bins", c.bins, "Calibration bins")->capture_default_str();
  evaluate->add_option("--binning", c.binning, "equal-count or equal-width")->capture_default_str();
  evaluate->add_option("--output,-o", c.output, "Output file (default: stdout)");

  auto* priors = app.add_subcommand("priors", "Print graph counts per CI model and a prior vector");
  priors->add_option("--kind", c.kind, "dag or dmag (with --bk; overrides --prior)");
  priors->add_flag("--bk", c.bk, "X1 receives no arrowheads");
  priors->add_option("--output,-o", c.output, "Output file (default: stdout)");
  add_prior(priors);

  auto* bound = app.add_subcommand("bound", "Upper bound on p(X1 -> X2 -> X3 | D)");
  bound->add_option("--n", c.n, "Sample count")->required();
  bound->add_option("--output,-o", c.output, "Output file (default: stdout)");
  add_prior(bound);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  if (delimiter == "\\t" || delimiter == "tab") delimiter = "\t";
  if (delimiter.size() != 1) {
    err << "error: --delimiter must be a single character\n";
    return 2;
  }
  c.delimiter = delimiter[0];
  c.subcommand = app.get_subcommands().front()->get_name();
  return run(c, out, err);
}

}  // namespace bfcs::cli
