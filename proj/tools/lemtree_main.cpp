#include <cstdint>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lemtree/exprunner.hpp"
#include "lemtree/polymodels.hpp"

namespace {

using lemtree::exprunner::ExperimentConfig;
using lemtree::exprunner::ExperimentKind;

std::vector<int> parse_degree_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(std::stoi(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lemniscate trees: exact enumeration, uniform sampling, and numerical extraction "
               "from random polynomials"};
  app.require_subcommand(1);

  ExperimentConfig config;
  std::string model_name;
  std::string degrees_text;

  auto* coeffs = app.add_subcommand("coeffs", "export the exact branching-count table as CSV");
  coeffs->add_option("--n-max", config.n_max, "largest row index")->default_val(400);
  coeffs->add_option("--out", config.out_path, "output CSV path")->required();

  auto* sample = app.add_subcommand("sample-tree", "draw uniformly random trees");
  sample->add_option("--size", config.size, "tree size")->required();
  sample->add_option("--seed", config.master_seed, "master seed")->required();
  sample->add_option("--count", config.count, "number of trees")->default_val(1);
  sample->add_option("--out", config.out_path, "output path (default stdout)");

  auto* clt = app.add_subcommand("clt", "Gaussian-limit check for the uniform-tree branching count");
  clt->add_option("--size", config.size, "tree size")->required();
  clt->add_option("--trials", config.trials, "number of samples")->required();
  clt->add_option("--seed", config.master_seed, "master seed")->required();
  clt->add_option("--jobs", config.jobs, "worker threads")->default_val(1);
  clt->add_option("--out-json", config.out_json, "summary path (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "lemniscate trees of random polynomials");
  simulate->add_option("--model", model_name, "model name")->required();
  simulate->add_option("--degree", config.degree, "polynomial degree")->required();
  simulate->add_option("--trials", config.trials, "number of trials")->required();
  simulate->add_option("--seed", config.master_seed, "master seed")->required();
  simulate->add_option("--jobs", config.jobs, "worker threads")->default_val(1);
  simulate->add_option("--out-csv", config.out_csv, "per-trial CSV path");
  simulate->add_option("--out-json", config.out_json, "summary path (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "branching scaling over a degree sweep, with a "
                                            "uniform-tree control arm");
  sweep->add_option("--model", model_name, "iid zero model name")->required();
  sweep->add_option("--degrees", degrees_text, "comma-separated increasing degrees")->required();
  sweep->add_option("--trials", config.trials, "trials per degree")->required();
  sweep->add_option("--seed", config.master_seed, "master seed")->required();
  sweep->add_option("--jobs", config.jobs, "worker threads")->default_val(1);
  sweep->add_option("--out-csv", config.out_csv, "per-trial CSV path");
  sweep->add_option("--out-json", config.out_json, "summary path (default stdout)");

  auto* cheb = app.add_subcommand("chebyshev-table", "mean branching count of perturbed "
                                                     "Chebyshev draws vs degree");
  cheb->add_option("--max-degree", config.max_degree, "largest degree")->required();
  cheb->add_option("--step", config.step, "degree step")->default_val(10);
  cheb->add_option("--trials", config.trials, "trials per degree")->required();
  cheb->add_option("--seed", config.master_seed, "master seed")->required();
  cheb->add_option("--jobs", config.jobs, "worker threads")->default_val(1);
  cheb->add_option("--out-csv", config.out_csv, "per-trial CSV path");
  cheb->add_option("--out-json", config.out_json, "summary path (default stdout)");

  auto* trace = app.add_subcommand("trace", "trace every singular level-curve component of a "
                                            "polynomial to petal-export JSON");
  trace->add_option("--poly", config.poly_path, "polynomial JSON path")->required();
  trace->add_option("--out", config.out_path, "output JSON path")->required();

  auto* pairing = app.add_subcommand("pairing", "zero/critical-point pairing diagnostics");
  pairing->add_option("--model", model_name, "iid zero model name")->required();
  pairing->add_option("--degree", config.degree, "polynomial degree")->required();
  pairing->add_option("--trials", config.trials, "number of trials")->required();
  pairing->add_option("--r", config.pairing_radius, "pairing radius multiplier")->default_val(11.0);
  pairing->add_option("--seed", config.master_seed, "master seed")->required();
  pairing->add_option("--jobs", config.jobs, "worker threads")->default_val(1);
  pairing->add_option("--out-csv", config.out_csv, "per-trial CSV path");
  pairing->add_option("--out-json", config.out_json, "summary path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // config errors exit 2
  }

  try {
    if (coeffs->parsed()) config.kind = ExperimentKind::coeffs;
    if (sample->parsed()) config.kind = ExperimentKind::sample_tree;
    if (clt->parsed()) config.kind = ExperimentKind::clt;
    if (simulate->parsed()) config.kind = ExperimentKind::simulate;
    if (sweep->parsed()) config.kind = ExperimentKind::sweep;
    if (cheb->parsed()) config.kind = ExperimentKind::chebyshev_table;
    if (trace->parsed()) config.kind = ExperimentKind::trace;
    if (pairing->parsed()) config.kind = ExperimentKind::pairing;

    if (!model_name.empty()) {
      lemtree::polymodels::ModelSpec model;
      model.kind = lemtree::polymodels::model_kind_from_name(model_name);
      model.degree = config.degree > 1 ? config.degree : 2;
      config.model = model;
    }
    if (!degrees_text.empty()) config.degrees = parse_degree_list(degrees_text);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  return lemtree::exprunner::run(config);
}
