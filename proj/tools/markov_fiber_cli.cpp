// markov-fiber: exact conditional tests for two-way tables.
//
// Reports are JSON on stdout. Failures print {"error": ...} and exit 1.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "markov_fiber/configuration.hpp"
#include "markov_fiber/datasets.hpp"
#include "markov_fiber/fiber.hpp"
#include "markov_fiber/fit.hpp"
#include "markov_fiber/io.hpp"
#include "markov_fiber/mcmc.hpp"
#include "markov_fiber/models.hpp"
#include "markov_fiber/moves.hpp"
#include "markov_fiber/toric.hpp"

using nlohmann::json;
using namespace mfiber;

namespace {

struct Inputs {
  std::string table_path;
  std::string dataset;
  std::string model;
  std::string alt;
  bool header = false;
  int rows = 0;
  int cols = 0;
};

struct ChainFlags {
  std::int64_t steps = 100'000;
  std::int64_t burn_in = 10'000;
  std::int64_t thin = 1;
  std::uint64_t seed = 1;
  int chains = 1;
  std::string stat = "chi2";
  std::string stats_out;
};

std::vector<int> shift_one(const std::vector<int>& v) {
  std::vector<int> out;
  for (int x : v) out.push_back(x + 1);
  return out;
}

class Seconds {
 public:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void add_table_options(CLI::App* cmd, Inputs& in) {
  auto* t = cmd->add_option("--table", in.table_path, "table CSV file");
  auto* d = cmd->add_option("--dataset", in.dataset, "embedded table: gilby | victoria");
  t->excludes(d);
  cmd->add_flag("--header", in.header, "CSV has a label row and label column");
}

void add_model_option(CLI::App* cmd, Inputs& in, bool required) {
  auto* m = cmd->add_option("--model", in.model,
                            "model JSON file or preset: changepoint-gilby | common-blocks | "
                            "own-blocks");
  if (required) m->required();
}

void add_chain_options(CLI::App* cmd, ChainFlags& f) {
  cmd->add_option("--steps", f.steps, "chain length")->capture_default_str();
  cmd->add_option("--burn-in", f.burn_in, "discarded initial steps")->capture_default_str();
  cmd->add_option("--thin", f.thin, "keep every k-th step")->capture_default_str();
  cmd->add_option("--seed", f.seed, "seed of the first chain")->capture_default_str();
  cmd->add_option("--chains", f.chains, "independent chains (seeds seed..seed+k-1)")
      ->capture_default_str();
  cmd->add_option("--stat", f.stat, "chi2 | g2 | llr")
      ->check(CLI::IsMember({"chi2", "g2", "llr"}))
      ->capture_default_str();
  cmd->add_option("--stats-out", f.stats_out, "write sampled statistics, one per line");
}

Table load_table(const Inputs& in) {
  if (!in.table_path.empty()) return read_table_file(in.table_path, in.header);
  if (!in.dataset.empty()) {
    if (auto t = datasets::table(in.dataset)) return *t;
    throw std::invalid_argument("unknown dataset '" + in.dataset + "'");
  }
  throw std::invalid_argument("give --table or --dataset");
}

ModelSpec load_model(const std::string& name) {
  if (std::filesystem::exists(name)) return read_model_file(name);
  if (auto m = datasets::model(name)) return *m;
  throw std::invalid_argument("model '" + name + "' is neither a file nor a preset");
}

json matrix_json(std::span<const double> m, int cols) {
  json rows = json::array();
  for (std::size_t k = 0; k < m.size(); k += cols)
    rows.push_back(std::vector<double>(m.begin() + k, m.begin() + k + cols));
  return rows;
}

json model_json(const ModelSpec& m) { return json::parse(model_to_json(m)); }

/// Statistic, its observed value's degrees of freedom, and the model whose
/// fiber the chain walks.
struct TestSetup {
  Statistic statistic;
  int df = 0;
};

TestSetup make_setup(const std::string& stat, const ModelSpec& null_model,
                     const std::optional<ModelSpec>& alt, int rows, int cols) {
  const auto cfg = build_configuration(null_model, rows, cols);
  TestSetup s;
  if (stat == "llr") {
    if (!alt) throw std::invalid_argument("--stat llr needs --alt");
    require_valid(*alt, rows, cols);
    s.statistic = make_llr_statistic(null_model, *alt, rows, cols);
    s.df = degrees_of_freedom(cfg) - degrees_of_freedom(build_configuration(*alt, rows, cols));
  } else {
    s.statistic = stat == "chi2" ? make_chi_square_statistic(null_model, rows, cols)
                                 : make_g_square_statistic(null_model, rows, cols);
    s.df = degrees_of_freedom(cfg);
  }
  return s;
}

void write_stats(const std::string& path, const PooledResult& pooled) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  for (const auto& c : pooled.chains)
    for (double v : c.samples) out << v << '\n';
}

json chain_json(const PooledResult& pooled, const ChainFlags& f) {
  json chains = json::array();
  for (const auto& c : pooled.chains) {
    chains.push_back({{"seed", c.seed},
                      {"p_value", c.p_value},
                      {"standard_error", c.standard_error},
                      {"samples", c.samples.size()},
                      {"accepted", c.accepted},
                      {"stayed", c.stayed},
                      {"acceptance_rate", c.acceptance_rate()}});
  }
  return {{"steps", f.steps},     {"burn_in", f.burn_in},
          {"thin", f.thin},       {"seed", f.seed},
          {"chains", chains},     {"p_value", pooled.p_value},
          {"standard_error", pooled.standard_error}};
}

json run_test(const Inputs& in, const ChainFlags& f, bool asymptotic, const std::string& name) {
  Seconds clock;
  const Table table = load_table(in);
  const ModelSpec model = load_model(in.model);
  require_valid(model, table.rows(), table.cols());
  std::optional<ModelSpec> alt;
  if (!in.alt.empty()) alt = load_model(in.alt);

  const auto cfg = build_configuration(model, table.rows(), table.cols());
  const auto basis = markov_basis(model, table.rows(), table.cols());
  const auto setup = make_setup(f.stat, model, alt, table.rows(), table.cols());
  const double setup_time = clock.elapsed();

  ChainConfig cc;
  cc.steps = f.steps;
  cc.burn_in = f.burn_in;
  cc.thin = f.thin;
  cc.seed = f.seed;
  const auto pooled = run_chains(table, cfg, basis, cc, setup.statistic, f.chains);
  if (!f.stats_out.empty()) write_stats(f.stats_out, pooled);

  json report;
  report["command"] = name;
  report["model"] = model_json(model);
  if (alt) report["alt"] = model_json(*alt);
  report["rows"] = table.rows();
  report["cols"] = table.cols();
  report["statistic"] = f.stat;
  report["observed"] = pooled.observed;
  report["df"] = setup.df;
  if (asymptotic) report["asymptotic_p"] = chi_square_upper_tail(pooled.observed, setup.df);
  report["basis"] = {{"enumerated", basis.enumerated()},
                     {"size", basis.enumerated() ? json(basis.size()) : json(nullptr)}};
  report["mcmc"] = chain_json(pooled, f);
  if (!f.stats_out.empty()) report["stats_out"] = f.stats_out;
  report["timings"] = {{"setup_seconds", setup_time}, {"total_seconds", clock.elapsed()}};
  return report;
}

json run_fit(const Inputs& in) {
  const Table table = load_table(in);
  const ModelSpec model = load_model(in.model);
  require_valid(model, table.rows(), table.cols());
  const auto cfg = build_configuration(model, table.rows(), table.cols());
  const auto fit = ipf_fit(table, cfg);
  const int df = degrees_of_freedom(cfg);
  const double chi2 = chi_square(table, fit.expected);
  json report;
  report["command"] = "fit";
  report["model"] = model_json(model);
  report["expected"] = matrix_json(fit.expected, table.cols());
  report["iterations"] = fit.iterations;
  report["converged"] = fit.converged;
  report["max_discrepancy"] = fit.max_discrepancy;
  report["chi2"] = chi2;
  report["g2"] = g_square(table, fit.expected);
  report["df"] = df;
  report["asymptotic_p"] = df > 0 ? json(chi_square_upper_tail(chi2, df)) : json(nullptr);
  return report;
}

std::pair<int, int> grid_of(const Inputs& in) {
  if (!in.table_path.empty() || !in.dataset.empty()) {
    const auto t = load_table(in);
    return {t.rows(), t.cols()};
  }
  if (in.rows < 2 || in.cols < 2) throw std::invalid_argument("give --rows and --cols (>= 2)");
  return {in.rows, in.cols};
}

std::vector<MoveType> parse_types(const std::string& list) {
  std::vector<MoveType> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_move_type(item));
  return out;
}

MoveBasis basis_for(const ModelSpec& model, int rows, int cols, const std::string& types) {
  BasisOptions opts;
  opts.force_enumeration = true;
  auto basis = markov_basis(model, rows, cols, opts);
  if (types.empty() || types == "full") return basis;
  const auto t = parse_types(types);
  return basis.restricted_to(t);
}

void run_moves_dump(const Inputs& in, const std::string& types, const std::string& out_path) {
  const auto [rows, cols] = grid_of(in);
  const auto model = load_model(in.model);
  const auto basis = basis_for(model, rows, cols, types);
  if (out_path.empty()) {
    write_moves(std::cout, basis.moves(), cols);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    write_moves(out, basis.moves(), cols);
    std::cout << json{{"command", "moves dump"}, {"moves", basis.size()}, {"out", out_path}}.dump(2)
              << '\n';
  }
}

json run_fiber(const Inputs& in, std::size_t cap, const std::string& connect, bool exact_p,
               const std::string& stat) {
  const Table table = load_table(in);
  const ModelSpec model = load_model(in.model);
  require_valid(model, table.rows(), table.cols());
  const auto cfg = build_configuration(model, table.rows(), table.cols());
  const auto t = sufficient_statistic(table, cfg);
  const auto e = enumerate_fiber(t, cfg, cap);
  json report;
  report["command"] = "fiber";
  report["model"] = model_json(model);
  report["t"] = t;
  report["cap"] = cap;
  report["overflow"] = e.overflow;
  if (e.overflow) return report;
  report["size"] = e.fiber->size();
  if (!connect.empty()) {
    const auto basis = basis_for(model, table.rows(), table.cols(), connect);
    report["basis"] = connect;
    report["basis_size"] = basis.size();
    report["connected"] = is_connected(*e.fiber, basis);
  }
  if (exact_p) {
    std::optional<ModelSpec> alt;
    if (!in.alt.empty()) alt = load_model(in.alt);
    const auto setup = make_setup(stat, model, alt, table.rows(), table.cols());
    report["statistic"] = stat;
    report["observed"] = setup.statistic(table);
    report["exact_p"] = *exact_pvalue(table, cfg, setup.statistic, cap);
  }
  return report;
}

json witness_json(const FiberSweepReport::Witness& w, int cols) {
  return {{"t", w.t},
          {"members", w.members},
          {"components", w.components},
          {"first", matrix_json(std::vector<double>(w.first.begin(), w.first.end()), cols)},
          {"second", matrix_json(std::vector<double>(w.second.begin(), w.second.end()), cols)}};
}

json verify_instance(const ModelSpec& model, int rows, int cols, int max_total,
                     const std::string& types, bool grobner) {
  require_valid(model, rows, cols);
  const auto cfg = build_configuration(model, rows, cols);
  const auto basis = basis_for(model, rows, cols, types);
  const auto sweep = sweep_fibers(cfg, basis.moves(), max_total);
  json r;
  r["rows"] = rows;
  r["cols"] = cols;
  r["model"] = model_json(model);
  r["moves"] = basis.size();
  r["fibers"] = sweep.fibers;
  r["tables"] = sweep.tables;
  r["connected"] = sweep.all_connected();
  r["disconnected_fibers"] = sweep.disconnected_fibers;
  json witnesses = json::array();
  for (const auto& w : sweep.witnesses) witnesses.push_back(witness_json(w, cols));
  if (!witnesses.empty()) r["witnesses"] = witnesses;
  std::size_t dispensable = 0;
  for (const auto& z : basis.moves())
    if (!indispensable(z, cfg)) ++dispensable;
  r["indispensable"] = dispensable == 0;
  r["dispensable_moves"] = dispensable;
  if (grobner && (model.family == ModelFamily::ChangePoint ||
                  model.family == ModelFamily::Independence)) {
    const auto g = verify_grobner(model, rows, cols, std::max(rows, cols));
    r["grobner"] = {{"pairs_checked", g.pairs_checked},
                    {"all_reduced", g.all_reduced()},
                    {"square_free", g.square_free},
                    {"passed", g.passed()}};
  }
  return r;
}

json run_verify(const Inputs& in, const std::string& family, int max_dim, int blocks,
                int max_rects, int max_total, const std::string& types, bool grobner) {
  json instances = json::array();
  if (!in.model.empty()) {
    const auto [rows, cols] = grid_of(in);
    instances.push_back(verify_instance(load_model(in.model), rows, cols, max_total, types, grobner));
  } else {
    const auto fam = parse_family(family);
    for (int r = 2; r <= max_dim; ++r) {
      for (int c = 2; c <= max_dim; ++c) {
        std::vector<ModelSpec> models;
        if (fam == ModelFamily::ChangePoint) models = enumerate_change_point_models(r, c, max_rects);
        else if (fam == ModelFamily::Independence) models = {ModelSpec::independence()};
        else models = enumerate_block_models(fam, blocks, r, c);
        for (const auto& m : models)
          instances.push_back(verify_instance(m, r, c, max_total, types, grobner));
      }
    }
  }
  bool connected = true, indispensable = true, grobner_ok = true;
  for (const auto& i : instances) {
    connected = connected && i["connected"].get<bool>();
    indispensable = indispensable && i["indispensable"].get<bool>();
    if (i.contains("grobner")) grobner_ok = grobner_ok && i["grobner"]["passed"].get<bool>();
  }
  json report;
  report["command"] = "verify";
  report["max_total"] = max_total;
  report["instances"] = instances.size();
  report["all_connected"] = connected;
  report["all_indispensable"] = indispensable;
  if (grobner) report["grobner_passed"] = grobner_ok;
  report["results"] = instances;
  return report;
}

json grobner_json(const GrobnerReport& g) {
  return {{"rows", g.rows},
          {"cols", g.cols},
          {"model", model_json(g.canonical.model)},
          {"row_permutation", shift_one(g.canonical.row_permutation)},
          {"col_permutation", shift_one(g.canonical.col_permutation)},
          {"generators", g.generator_count},
          {"pairs_checked", g.pairs_checked},
          {"pairs_reduced", g.pairs_reduced},
          {"square_free", g.square_free},
          {"leads_main_diagonal", g.leads_main_diagonal},
          {"degree2_kernel_moves", g.degree2_kernel_moves},
          {"degree2_covered", g.degree2_covered},
          {"failures", g.failures},
          {"passed", g.passed()}};
}

json run_grobner(const Inputs& in, int max_dim, int max_rects) {
  std::vector<GrobnerReport> reports;
  if (!in.model.empty()) {
    const auto [rows, cols] = grid_of(in);
    reports.push_back(verify_grobner(load_model(in.model), rows, cols, max_dim));
  } else {
    for (int r = 2; r <= max_dim; ++r) {
      for (int c = 2; c <= max_dim; ++c) {
        reports.push_back(verify_grobner(ModelSpec::independence(), r, c, max_dim));
        for (const auto& m : enumerate_change_point_models(r, c, max_rects))
          reports.push_back(verify_grobner(m, r, c, max_dim));
      }
    }
  }
  json report;
  report["command"] = "grobner-check";
  report["order"] = "x_R,C > x_R,C-1 > ... > x_R,1 > x_R-1,C > ... > x_1,1";
  std::size_t pairs = 0, passed = 0;
  json failures = json::array();
  for (const auto& g : reports) {
    pairs += g.pairs_checked;
    if (g.passed()) ++passed;
    else failures.push_back(grobner_json(g));
  }
  report["instances"] = reports.size();
  report["pairs_checked"] = pairs;
  report["passed"] = passed == reports.size();
  if (reports.size() == 1) report["result"] = grobner_json(reports.front());
  report["failures"] = failures;
  return report;
}

json run_datasets(const std::string& dir) {
  std::filesystem::create_directories(dir);
  json files = json::array();
  auto write = [&](const std::string& name, const std::string& content) {
    const auto path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    files.push_back(path);
  };
  write("gilby.csv", table_to_csv(datasets::gilby()));
  write("victoria.csv", table_to_csv(datasets::victoria()));
  for (const auto& name : datasets::model_names())
    write(name + ".json", model_to_json(*datasets::model(name)) + "\n");
  return {{"command", "datasets"}, {"files", files}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact conditional goodness-of-fit tests for two-way contingency tables"};
  app.require_subcommand(1);

  Inputs in;
  ChainFlags chain;
  json report;
  std::function<void()> action;

  auto* test = app.add_subcommand("test", "fit, then estimate the conditional p-value by MCMC");
  add_table_options(test, in);
  add_model_option(test, in, true);
  test->add_option("--alt", in.alt, "alternative model for --stat llr");
  add_chain_options(test, chain);
  test->callback([&] { action = [&] { report = run_test(in, chain, true, "test"); }; });

  auto* sample = app.add_subcommand("sample", "run the fiber walk and stream the statistic");
  add_table_options(sample, in);
  add_model_option(sample, in, true);
  sample->add_option("--alt", in.alt, "alternative model for --stat llr");
  add_chain_options(sample, chain);
  sample->callback([&] { action = [&] { report = run_test(in, chain, false, "sample"); }; });

  auto* fit = app.add_subcommand("fit", "maximum likelihood fit by iterative scaling");
  add_table_options(fit, in);
  add_model_option(fit, in, true);
  fit->callback([&] { action = [&] { report = run_fit(in); }; });

  auto* moves = app.add_subcommand("moves", "Markov basis utilities");
  moves->require_subcommand(1);
  auto* dump = moves->add_subcommand("dump", "list an enumerated basis");
  std::string types, out_path;
  add_table_options(dump, in);
  add_model_option(dump, in, true);
  dump->add_option("--rows", in.rows, "grid rows when no table is given");
  dump->add_option("--cols", in.cols, "grid columns when no table is given");
  dump->add_option("--types", types, "comma-separated subset of I,II,III,IV,IVT");
  dump->add_option("--out", out_path, "write to a file instead of stdout");
  dump->callback([&] { action = [&] { run_moves_dump(in, types, out_path); }; });

  auto* fiber = app.add_subcommand("fiber", "enumerate the fiber of a table");
  std::size_t cap = kDefaultFiberCap;
  std::string connect, fiber_stat = "chi2";
  bool exact_p = false;
  add_table_options(fiber, in);
  add_model_option(fiber, in, true);
  fiber->add_option("--alt", in.alt, "alternative model for --stat llr");
  fiber->add_option("--cap", cap, "give up beyond this many members")->capture_default_str();
  fiber->add_option("--check-connect", connect, "basis to test: full or a list like I,II");
  fiber->add_flag("--exact-p", exact_p, "exact conditional p-value");
  fiber->add_option("--stat", fiber_stat, "chi2 | g2 | llr")
      ->check(CLI::IsMember({"chi2", "g2", "llr"}));
  fiber->callback([&] {
    action = [&] { report = run_fiber(in, cap, connect, exact_p, fiber_stat); };
  });

  auto* verify = app.add_subcommand("verify", "connectivity and indispensability sweeps");
  std::string family = "change_point";
  int max_dim = 3, blocks = 2, max_rects = 2, max_total = 5;
  bool with_grobner = false;
  add_model_option(verify, in, false);
  verify->add_option("--rows", in.rows, "grid rows for --model");
  verify->add_option("--cols", in.cols, "grid columns for --model");
  verify->add_option("--family", family, "family to sweep when no --model is given")
      ->capture_default_str();
  verify->add_option("--max-dim", max_dim, "largest grid side in a family sweep")
      ->capture_default_str();
  verify->add_option("--blocks", blocks, "diagonal blocks for block families")
      ->capture_default_str();
  verify->add_option("--max-rects", max_rects, "rectangles for change point sweeps")
      ->capture_default_str();
  verify->add_option("--max-total", max_total, "largest table total (<= 10)")
      ->capture_default_str();
  verify->add_option("--types", types, "restrict the basis to these move types");
  verify->add_flag("--grobner", with_grobner, "also run the S-pair check");
  verify->callback([&] {
    action = [&] {
      report = run_verify(in, family, max_dim, blocks, max_rects, max_total, types, with_grobner);
    };
  });

  auto* grobner = app.add_subcommand("grobner-check", "S-pair certificate for change point models");
  int g_max_dim = 4, g_rects = 2;
  add_model_option(grobner, in, false);
  grobner->add_option("--rows", in.rows, "grid rows for --model");
  grobner->add_option("--cols", in.cols, "grid columns for --model");
  grobner->add_option("--max-dim", g_max_dim, "largest grid side")->capture_default_str();
  grobner->add_option("--max-rects", g_rects, "rectangles per model in a sweep")
      ->capture_default_str();
  grobner->callback([&] { action = [&] { report = run_grobner(in, g_max_dim, g_rects); }; });

  auto* data = app.add_subcommand("datasets", "write the embedded tables and model presets");
  std::string dir = ".";
  data->add_option("--out-dir", dir, "target directory")->capture_default_str();
  data->callback([&] { action = [&] { report = run_datasets(dir); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout << json{{"error", e.what()}, {"kind", "usage"}}.dump() << '\n';
    return 2;
  }

  try {
    action();
  } catch (const std::exception& e) {
    std::cout << json{{"error", e.what()}, {"kind", "runtime"}}.dump() << '\n';
    return 1;
  }
  if (!report.is_null()) std::cout << report.dump(2) << '\n';
  return 0;
}
