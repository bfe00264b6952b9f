// Command-line driver: reads or generates graphs, runs one relaxation per
// instance and writes CSV and JSON reports.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cheeger/cheeger.hpp"

namespace {

using namespace cheeger;

struct Instance {
  std::string name;
  std::optional<Graph> graph;
  std::string error;  // set when loading failed
};

struct Outcome {
  BoundReport report;
  std::string error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GraphFormat infer_format(const std::string& path, const std::string& flag) {
  if (flag == "metis") return GraphFormat::Metis;
  if (flag == "edgelist") return GraphFormat::EdgeList;
  const auto ext = std::filesystem::path(path).extension().string();
  return (ext == ".graph" || ext == ".metis") ? GraphFormat::Metis : GraphFormat::EdgeList;
}

std::vector<double> split_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// family:params, e.g. cycle:8, bipartite:3,4, gnp:50,0.2
Instance generate(const std::string& spec, std::uint64_t seed) {
  Instance inst;
  inst.name = spec;
  try {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("expected family:params");
    const std::string family = spec.substr(0, colon);
    const auto nums = split_numbers(spec.substr(colon + 1));
    auto count = [&](std::size_t k) {
      if (nums.size() != k) throw std::invalid_argument(family + " takes " + std::to_string(k) + " parameter(s)");
    };
    FamilyParams params;
    params.seed = seed;
    GraphFamily f;
    if (family == "cycle" || family == "path" || family == "complete") {
      count(1);
      f = family == "cycle" ? GraphFamily::Cycle : family == "path" ? GraphFamily::Path : GraphFamily::Complete;
      params.n = static_cast<int>(nums[0]);
    } else if (family == "bipartite") {
      count(2);
      f = GraphFamily::CompleteBipartite;
      params.n = static_cast<int>(nums[0]);
      params.n2 = static_cast<int>(nums[1]);
    } else if (family == "gnp") {
      count(2);
      f = GraphFamily::Gnp;
      params.n = static_cast<int>(nums[0]);
      params.p = nums[1];
      inst.name += ",seed=" + std::to_string(seed);
    } else {
      throw std::invalid_argument("unknown family '" + family + "'");
    }
    inst.graph = generate_family(f, params);
    if (!inst.graph) inst.error = "disconnected sample";
  } catch (const std::exception& e) {
    inst.error = e.what();
  }
  return inst;
}

Instance load(const std::string& path, const std::string& format) {
  Instance inst;
  inst.name = std::filesystem::path(path).stem().string();
  try {
    inst.graph = parse_graph(read_file(path), infer_format(path, format));
  } catch (const ParseError& e) {
    inst.error = path + ": " + e.what();
  } catch (const std::exception& e) {
    inst.error = e.what();
  }
  return inst;
}

Outcome run_one(const Instance& inst, Relaxation relax, const SolverConfig& cfg, std::optional<double> ub,
                bool ub_from_oracle, int oracle_cap) {
  Outcome out;
  out.report.instance = inst.name;
  if (!inst.graph) {
    out.error = inst.error;
    return out;
  }
  const Graph& g = *inst.graph;
  out.report.n = g.num_vertices();
  out.report.m = g.num_edges();
  try {
    if (ub) {
      out.report.ub = ub;
    } else if (ub_from_oracle && g.num_vertices() <= oracle_cap) {
      out.report.ub = exact_edge_expansion(g, oracle_cap).value;
    }
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res = relax == Relaxation::Basic ? solve_basic(g, cfg) : solve(g, cfg);
    RelaxationResult r;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.bound = res.certificate.certified_lb;
    r.certificate = res.certificate;
    r.cuts = static_cast<int>(res.pool.size());
    r.iterations = res.iterations;
    r.log = std::move(res.log);
    out.report.slot(relax) = std::move(r);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified lower bounds on the edge expansion of a graph"};
  argv = app.ensure_utf8(argv);

  SolverConfig cfg;
  std::string relaxation = "dnnpfrc", diag = "none", format = "auto";
  std::optional<double> ub;
  bool ub_from_oracle = false;
  int oracle_cap = kDefaultOracleCap;
  std::string out_csv, out_json, log_path;
  std::uint64_t seed = 1;
  int threads = 1;
  std::vector<std::string> files, generated;

  app.add_option("files", files, "Graph files");
  app.add_option("--generate", generated, "Generated instance family:params (cycle:N, path:N, complete:N, bipartite:A,B, gnp:N,P)");
  app.add_option("--relaxation", relaxation, "Relaxation to solve")
      ->check(CLI::IsMember({"basic", "dnnp", "dnnpfrc"}))
      ->capture_default_str();
  app.add_option("--diag", diag, "Diagonal constraints of the lifted model")
      ->check(CLI::IsMember({"none", "y1", "both"}))
      ->capture_default_str();
  app.add_option("--alpha-init", cfg.alpha_init)->capture_default_str();
  app.add_option("--alpha-min", cfg.alpha_min)->capture_default_str();
  app.add_option("--alpha-factor", cfg.alpha_factor)->capture_default_str();
  app.add_option("--cut-batch", cfg.cut_batch)->capture_default_str();
  app.add_option("--cut-tol", cfg.cut_tol)->capture_default_str();
  app.add_option("--min-new-cuts", cfg.min_new_cuts)->capture_default_str();
  app.add_option("--purge-tol", cfg.purge_tol)->capture_default_str();
  app.add_option("--warmup-iters", cfg.warmup_iters_before_cuts)->capture_default_str();
  app.add_option("--post-iters", cfg.post_iters_max)->capture_default_str();
  app.add_option("--post-correction-tol", cfg.post_correction_tol)->capture_default_str();
  app.add_option("--max-outer-iters", cfg.max_outer_iterations)->capture_default_str();
  app.add_option("--lbfgs-m", cfg.inner.memory)->capture_default_str();
  app.add_option("--lbfgs-maxiter", cfg.inner.max_iterations)->capture_default_str();
  app.add_option("--lbfgs-factr", cfg.inner.factr)->capture_default_str();
  app.add_option("--lbfgs-pgtol", cfg.inner.pgtol)->capture_default_str();
  auto* ub_opt = app.add_option("--ub", ub, "Upper bound used for the gap");
  app.add_flag("--ub-from-oracle", ub_from_oracle, "Use the exact expansion as upper bound")->excludes(ub_opt);
  app.add_option("--oracle-cap", oracle_cap, "Largest n for the exact oracle")->capture_default_str();
  app.add_option("--format", format, "Input format")
      ->check(CLI::IsMember({"auto", "edgelist", "metis"}))
      ->capture_default_str();
  app.add_option("--out-csv", out_csv, "CSV report path (default: stdout)");
  app.add_option("--out-json", out_json, "JSON report path");
  app.add_option("--log-jsonl", log_path, "Per-iteration log path (JSON lines)");
  app.add_option("--seed", seed, "Seed for generated instances")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  const Relaxation relax = relaxation == "basic" ? Relaxation::Basic
                           : relaxation == "dnnp" ? Relaxation::Dnnp
                                                  : Relaxation::Dnnpfrc;
  if (relax == Relaxation::Dnnp) cfg.cut_batch = 0;
  cfg.diag_mode = diag == "y1" ? DiagMode::Y1Only : diag == "both" ? DiagMode::Both : DiagMode::None;
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (files.empty() && generated.empty()) {
    std::cerr << "error: no instances given\n" << app.help();
    return 2;
  }

  std::vector<Instance> instances;
  for (const auto& f : files) instances.push_back(load(f, format));
  for (const auto& g : generated) instances.push_back(generate(g, seed));

  std::vector<Outcome> outcomes(instances.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < instances.size(); i = next++)
      outcomes[i] = run_one(instances[i], relax, cfg, ub, ub_from_oracle, oracle_cap);
  };
  std::vector<std::thread> pool;
  const int nthreads = std::min<int>(threads, static_cast<int>(instances.size()));
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ofstream csv_file;
  if (!out_csv.empty()) {
    csv_file.open(out_csv);
    if (!csv_file) {
      std::cerr << "error: cannot write " << out_csv << "\n";
      return 2;
    }
  }
  std::ostream& csv = out_csv.empty() ? std::cout : csv_file;
  csv << kCsvHeader << "\n";

  nlohmann::json reports = nlohmann::json::array();
  std::string log_lines;
  int failures = 0;
  for (const auto& o : outcomes) {
    if (!o.error.empty()) {
      ++failures;
      std::cerr << "error: " << o.report.instance << ": " << o.error << "\n";
      reports.push_back({{"instance", o.report.instance}, {"error", o.error}});
      continue;
    }
    const auto& r = *o.report.slot(relax);
    if (o.report.ub && *o.report.ub > 0.0) gap(*o.report.ub, r.bound, &std::cerr);
    csv << csv_row(o.report, relax) << "\n";
    auto j = to_json(o.report);
    j["relaxation"] = to_string(relax);
    reports.push_back(std::move(j));
    for (const auto& e : r.log) {
      auto line = to_json(e);
      line["instance"] = o.report.instance;
      log_lines += line.dump() + "\n";
    }
  }

  if (!out_json.empty()) {
    std::ofstream js(out_json);
    if (!js) {
      std::cerr << "error: cannot write " << out_json << "\n";
      return 2;
    }
    js << reports.dump(2) << "\n";
  }
  if (!log_path.empty()) {
    std::ofstream lg(log_path);
    if (!lg) {
      std::cerr << "error: cannot write " << log_path << "\n";
      return 2;
    }
    lg << log_lines;
  }
  return failures == 0 ? 0 : 1;
}
