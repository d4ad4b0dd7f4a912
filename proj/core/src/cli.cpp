// Copyright 2026 The incompat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "incompat/cli.hpp"

#include <ostream>

#include <CLI11.hpp>

namespace incompat {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

// Input-shaped problems (files, ranges, caps) exit 2; solver breakdowns exit 3.
int classify_error(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  if (dynamic_cast<const SolverFailure*>(&e)) return kExitSolver;
  return kExitInput;
}

}  // namespace

int cmd_robustness(const std::string& file, const std::vector<int>& subset, ReportFormat format,
                   const Tolerances& tol, std::ostream& out, std::ostream& err) {
  try {
    Assemblage a = load_assemblage(file);
    SubsetIndex idx(subset);
    RobustnessResult r = robustness(a, idx, tol);
    out << render_robustness(r, format);
    return kExitOk;
  } catch (const Error& e) {
    return classify_error(e, err);
  }
}

int cmd_hierarchy(const std::string& file, std::optional<double> eta,
                  const std::optional<std::vector<double>>& eta_per_x, ReportFormat format,
                  const Tolerances& tol, std::ostream& out, std::ostream& err) {
  try {
    const std::string bytes = read_file(file);
    Assemblage a = assemblage_from_json(bytes);
    if (eta && eta_per_x) {
      err << "error: --eta and --eta-per-x are mutually exclusive\n";
      return kExitInput;
    }
    std::vector<double> noise(a.size(), 1.0);
    if (eta) noise.assign(a.size(), *eta);
    if (eta_per_x) {
      if (static_cast<int>(eta_per_x->size()) != a.size()) {
        err << "error: --eta-per-x needs " << a.size() << " values\n";
        return kExitInput;
      }
      noise = *eta_per_x;
    }
    Assemblage noisy = apply_noise(a, NoiseSpec(noise));
    HierarchyReport rep = full_report(noisy, tol);
    ReportContext ctx{fnv1a64(bytes), noise};
    out << render_hierarchy(rep, ctx, format);
    return kExitOk;
  } catch (const Error& e) {
    return classify_error(e, err);
  }
}

int cmd_mub_demo(int steps, const Tolerances& tol, std::ostream& out, std::ostream& err) {
  try {
    if (steps < 2) throw BadRange("--steps must be at least 2");
    const Assemblage trio = qubit_mub_trio();
    const ClassificationRules rules{tol.classification_eps};
    std::vector<MubDemoRow> rows;
    rows.reserve(steps);
    for (int i = 1; i <= steps; ++i) {
      const double eta = static_cast<double>(i) / steps;
      Assemblage noisy = apply_noise(trio, NoiseSpec::uniform(eta, trio.size()));
      HierarchyLevel l2 = level(noisy, 2, tol);
      HierarchyLevel l3 = level(noisy, 3, tol);
      rows.push_back({eta, rules.label(l2.eta_min, l2.eta_max), rules.label(l3.eta_min, l3.eta_max)});
    }
    out << render_mub_demo(rows);
    return kExitOk;
  } catch (const Error& e) {
    return classify_error(e, err);
  }
}

int cmd_make_mub(const std::string& path, std::ostream& err) {
  try {
    save_assemblage(qubit_mub_trio(), path);
    return kExitOk;
  } catch (const Error& e) {
    return classify_error(e, err);
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"joint-measurability analysis of POVM assemblages"};
  app.require_subcommand(1);

  Tolerances tol;
  std::string format_name = "json";
  app.add_option("--tolerance", tol.classification_eps,
                 "classification tolerance for eta == 1 tests")
      ->capture_default_str();
  app.add_option("--block-cap", tol.block_cap, "max outcome tuples per joint program")
      ->capture_default_str();
  app.add_option("--budget", tol.solve_budget, "max subset solves per report")
      ->capture_default_str();

  auto* rob = app.add_subcommand("robustness", "noise robustness of one subset");
  std::string rob_file;
  std::vector<int> rob_subset;
  rob->add_option("file", rob_file, "assemblage file")->required();
  rob->add_option("--subset", rob_subset, "measurement indices, e.g. 0,1")
      ->required()
      ->delimiter(',');
  rob->add_option("--format", format_name, "json|csv")->check(CLI::IsMember({"json", "csv"}));

  auto* hier = app.add_subcommand("hierarchy", "full (n,k) classification report");
  std::string hier_file;
  double hier_eta = -1.0;
  std::vector<double> hier_eta_per;
  hier->add_option("file", hier_file, "assemblage file")->required();
  auto* eta_opt = hier->add_option("--eta", hier_eta, "uniform noise in [0,1]");
  auto* eta_per_opt =
      hier->add_option("--eta-per-x", hier_eta_per, "per-measurement noise, e.g. 0.75,0.75,0.6")
          ->delimiter(',');
  hier->add_option("--format", format_name, "json|csv")->check(CLI::IsMember({"json", "csv"}));

  auto* demo = app.add_subcommand("mub-demo", "label table for the noisy qubit MUB trio");
  int demo_steps = 21;
  demo->add_option("--steps", demo_steps, "grid size (eta = i/steps)")->capture_default_str();

  auto* make = app.add_subcommand("make-mub", "write the MUB-trio assemblage file");
  std::string make_path;
  make->add_option("path", make_path, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  ReportFormat format = format_name == "csv" ? ReportFormat::Csv : ReportFormat::Json;
  if (rob->parsed()) return cmd_robustness(rob_file, rob_subset, format, tol, out, err);
  if (hier->parsed()) {
    std::optional<double> eta;
    if (eta_opt->count() > 0) {
      if (hier_eta < 0.0 || hier_eta > 1.0) {
        err << "error: --eta must lie in [0,1]\n";
        return kExitInput;
      }
      eta = hier_eta;
    }
    std::optional<std::vector<double>> eta_per;
    if (eta_per_opt->count() > 0) {
      for (double v : hier_eta_per)
        if (v < 0.0 || v > 1.0) {
          err << "error: --eta-per-x values must lie in [0,1]\n";
          return kExitInput;
        }
      eta_per = hier_eta_per;
    }
    return cmd_hierarchy(hier_file, eta, eta_per, format, tol, out, err);
  }
  if (demo->parsed()) return cmd_mub_demo(demo_steps, tol, out, err);
  if (make->parsed()) return cmd_make_mub(make_path, err);
  err << "error: no command\n";
  return kExitInput;
}

}  // namespace incompat
