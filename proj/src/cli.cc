// Copyright 2026 The LDHD Toolkit Authors
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

#include "ldhd/cli.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ldhd/dataset.h"
#include "ldhd/error.h"
#include "ldhd/pe_kernels.h"
#include "ldhd/report.h"
#include "ldhd/verify.h"

namespace ldhd::cli {

namespace {

struct SeedBinding {
  CLI::App* sub;
  CLI::Option* option;
  uint64_t* seed;
};

struct Common {
  std::vector<SeedBinding> seeds;
  int threads = 1;
  std::string report;
  std::string csv;
  bool timing = false;
};

void AddSeed(CLI::App* sub, uint64_t& seed, Common& c) {
  CLI::Option* opt =
      sub->add_option("--seed", seed, "RNG seed (LDHD_SEED when absent)")->capture_default_str();
  c.seeds.push_back({sub, opt, &seed});
}

void AddCommon(CLI::App* sub, uint64_t& seed, Common& c, bool threaded) {
  AddSeed(sub, seed, c);
  if (threaded) {
    sub->add_option("--threads", c.threads, "worker threads")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  }
  sub->add_option("--report", c.report, "write the JSON report here");
  sub->add_option("--csv", c.csv, "write tabular results as CSV here");
  sub->add_flag("--timing", c.timing, "include wall time in the report");
}

// Applies LDHD_SEED when --seed was not given.
void ResolveSeed(const CLI::Option* opt, uint64_t& seed) {
  if (opt->count() > 0) return;
  const char* env = std::getenv("LDHD_SEED");
  if (env == nullptr || *env == '\0') return;
  const std::string s(env);
  if (s.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "LDHD_SEED must be a non-negative integer");
  }
  try {
    seed = std::stoull(s);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "LDHD_SEED is out of range");
  }
}

void ResolveSeeds(const Common& c) {
  for (const SeedBinding& b : c.seeds) {
    if (b.sub->parsed()) ResolveSeed(b.option, *b.seed);
  }
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  f << text;
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path);
}

std::string ReadFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int Finish(VerificationReport report, const Common& c, double seconds, std::ostream& out) {
  if (c.timing) report.wall_seconds = seconds;
  out << report.ToText();
  if (!c.report.empty()) WriteFile(c.report, report.ToJson());
  if (!c.csv.empty()) {
    Table checks{"checks", {"name", "measured", "threshold", "passed"}, {}};
    for (const Check& k : report.checks) {
      std::string name = k.name;
      std::replace(name.begin(), name.end(), ',', ';');
      checks.rows.push_back({name, FormatNumber(k.measured), FormatNumber(k.threshold),
                             k.passed ? "1" : "0"});
    }
    report.tables.insert(report.tables.begin(), std::move(checks));
    WriteFile(c.csv, report.TablesToCsv());
  }
  return report.passed() ? kExitPass : kExitFail;
}

std::vector<int> ParseIntList(const std::string& text) {
  std::vector<int> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw Error(ErrorCode::kInvalidArgument, "bad integer '" + item + "' in list");
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "empty list");
  return out;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-dimension-to-high-dimension generalization toolkit", "ldhd"};
  app.require_subcommand(1);

  // ---- verify ----
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  verify->require_subcommand(1);
  Common common;
  std::function<VerificationReport()> suite;

  RfmpSuiteOptions rfmp;
  CLI::App* v_rfmp = verify->add_subcommand("rfmp", "random feature model vs min-degree oracle");
  v_rfmp->add_option("--preset", rfmp.preset, "example-4-1, sparse or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"example-4-1", "sparse", "all"}));
  v_rfmp->add_option("--k", rfmp.k, "feature count")->capture_default_str();
  v_rfmp->add_option("--seeds", rfmp.seeds, "feature seeds per K")->capture_default_str();
  v_rfmp->add_option("--concepts", rfmp.concepts, "random 2-sparse concepts")->capture_default_str();
  v_rfmp->add_option("--lr", rfmp.lr)->capture_default_str();
  v_rfmp->add_option("--max-steps", rfmp.max_steps)->capture_default_str();
  v_rfmp->add_option("--loss-tol", rfmp.loss_tol)->capture_default_str();
  v_rfmp->add_option("--threshold", rfmp.threshold, "sup-norm band")->capture_default_str();
  v_rfmp->add_option("--fraction", rfmp.fraction, "required share of sparse concepts")
      ->capture_default_str();
  AddCommon(v_rfmp, rfmp.seed, common, true);
  v_rfmp->callback([&] { suite = [&] { rfmp.threads = common.threads; return VerifyRfmp(rfmp); }; });

  OracleSuiteOptions orc;
  CLI::App* v_oracle = verify->add_subcommand("oracle", "sequential solver vs Fourier closed form");
  v_oracle->add_option("--n", orc.n)->capture_default_str();
  v_oracle->add_option("--n0", orc.n0)->capture_default_str();
  v_oracle->add_option("--concepts", orc.concepts)->capture_default_str();
  v_oracle->add_option("--threshold", orc.threshold)->capture_default_str();
  AddCommon(v_oracle, orc.seed, common, false);
  v_oracle->callback([&] { suite = [&] { return VerifyOracle(orc); }; });

  NflSuiteOptions nfl;
  CLI::App* v_nfl = verify->add_subcommand("nfl", "exhaustive No-Free-Lunch sums");
  v_nfl->add_option("--n", nfl.n)->capture_default_str();
  v_nfl->add_option("--n0", nfl.n0)->capture_default_str();
  v_nfl->add_option("--pairs", nfl.pairs)->capture_default_str();
  v_nfl->add_option("--distributions", nfl.distributions)->capture_default_str();
  v_nfl->add_option("--labels", nfl.labels)->capture_default_str()->check(CLI::Range(1, 8));
  v_nfl->add_option("--threshold", nfl.threshold)->capture_default_str();
  AddCommon(v_nfl, nfl.seed, common, true);
  v_nfl->callback([&] { suite = [&] { nfl.threads = common.threads; return VerifyNfl(nfl); }; });

  PlaaLossSuiteOptions loss;
  CLI::App* v_loss = verify->add_subcommand("plaa-loss", "closed-form PLAA loss and counting");
  v_loss->add_option("--trials", loss.trials)->capture_default_str();
  v_loss->add_option("--max-n", loss.max_n)->capture_default_str()->check(CLI::Range(1, 20));
  v_loss->add_option("--max-counting-n0", loss.max_counting_n0)
      ->capture_default_str()
      ->check(CLI::Range(1, 20));
  v_loss->add_option("--threshold", loss.threshold)->capture_default_str();
  AddCommon(v_loss, loss.seed, common, false);
  v_loss->callback([&] { suite = [&] { return VerifyPlaaLoss(loss); }; });

  PlaaIdentitySuiteOptions ident;
  CLI::App* v_ident = verify->add_subcommand("plaa-identity", "PLAA forward vs basis expansion");
  v_ident->add_option("--trials", ident.trials)->capture_default_str();
  v_ident->add_option("--max-n", ident.max_n)->capture_default_str()->check(CLI::Range(1, 16));
  v_ident->add_option("--threshold", ident.threshold)->capture_default_str();
  AddCommon(v_ident, ident.seed, common, false);
  v_ident->callback([&] { suite = [&] { return VerifyPlaaIdentity(ident); }; });

  PlaaApeSuiteOptions ape;
  CLI::App* v_ape = verify->add_subcommand("plaa-ape", "APE training along the alpha ladder");
  v_ape->add_option("--n", ape.n)->capture_default_str();
  v_ape->add_option("--n0", ape.n0)->capture_default_str();
  v_ape->add_option("--d-p", ape.d_p, "embedding width, 0 for N")->capture_default_str();
  v_ape->add_option("--targets", ape.targets)->capture_default_str();
  v_ape->add_option("--ladder", ape.ladder, "alpha values")->capture_default_str()->delimiter(',');
  v_ape->add_option("--lr", ape.lr)->capture_default_str();
  v_ape->add_option("--max-steps", ape.max_steps)->capture_default_str();
  v_ape->add_option("--threshold", ape.threshold)->capture_default_str();
  AddCommon(v_ape, ape.seed, common, true);
  v_ape->callback([&] { suite = [&] { ape.threads = common.threads; return VerifyPlaaApe(ape); }; });

  PlaaGrpeSuiteOptions grpe;
  CLI::App* v_grpe = verify->add_subcommand("plaa-grpe", "GRPE training vs closed form");
  v_grpe->add_option("--n", grpe.n)->capture_default_str();
  v_grpe->add_option("--n0", grpe.n0)->capture_default_str();
  v_grpe->add_option("--random", grpe.random, "random targets besides 0 and all-ones")
      ->capture_default_str();
  v_grpe->add_option("--lr", grpe.lr)->capture_default_str();
  v_grpe->add_option("--max-steps", grpe.max_steps)->capture_default_str();
  v_grpe->add_option("--threshold", grpe.threshold)->capture_default_str();
  v_grpe->add_option("--agreement-tol", grpe.agreement_tol)->capture_default_str();
  AddCommon(v_grpe, grpe.seed, common, false);
  v_grpe->callback([&] { suite = [&] { return VerifyPlaaGrpe(grpe); }; });

  PeSuiteOptions pes;
  CLI::App* v_pe = verify->add_subcommand("pe", "RPE-Square and RPE-Absolute kernels");
  v_pe->add_option("--max-n", pes.max_n)->capture_default_str()->check(CLI::Range(1, 64));
  v_pe->add_option("--d", pes.d)->capture_default_str()->check(CLI::PositiveNumber);
  v_pe->add_option("--logit-scale", pes.logit_scale)->capture_default_str();
  v_pe->add_option("--eps", pes.eps)->capture_default_str();
  v_pe->add_option("--gradcheck-trials", pes.gradcheck_trials)->capture_default_str();
  v_pe->add_option("--gradcheck-n", pes.gradcheck_n)->capture_default_str();
  v_pe->add_option("--threshold", pes.threshold, "gradient check tolerance")
      ->capture_default_str();
  AddCommon(v_pe, pes.seed, common, false);
  v_pe->callback([&] { suite = [&] { return VerifyPe(pes); }; });

  TasksSuiteOptions tk;
  CLI::App* v_tasks = verify->add_subcommand("tasks", "URF data against a big-integer oracle");
  v_tasks->add_option("--count", tk.count)->capture_default_str()->check(CLI::PositiveNumber);
  v_tasks->add_option("--max-scale", tk.max_scale)->capture_default_str()->check(CLI::PositiveNumber);
  v_tasks->add_option("--length-samples", tk.length_samples)->capture_default_str();
  AddCommon(v_tasks, tk.seed, common, true);
  v_tasks->callback([&] { suite = [&] { tk.threads = common.threads; return VerifyTasks(tk); }; });

  // ---- gen ----
  CLI::App* gen = app.add_subcommand("gen", "emit a JSON Lines dataset and its manifest");
  std::string task;
  int max_scale = 0;
  std::string scales_text;
  int64_t count = 1000;
  uint64_t gen_seed = 0;
  std::string sampling = "up-to";
  int width = 0;
  bool no_latent = false;
  int gen_threads = 1;
  std::string gen_out;
  std::string manifest_out;
  Common gen_common;
  gen->add_option("--task", task, "urf-add, arf-add, copy, parity-cot, mul-1n, div-n1, add-mod10")
      ->required();
  CLI::Option* max_scale_opt =
      gen->add_option("--max-scale", max_scale, "single shard of this scale")
          ->check(CLI::PositiveNumber);
  gen->add_option("--scales", scales_text, "comma-separated scales, one shard each")
      ->excludes(max_scale_opt);
  gen->add_option("--count", count, "records per shard")->capture_default_str()->check(
      CLI::NonNegativeNumber);
  AddSeed(gen, gen_seed, gen_common);
  gen->add_option("--sampling", sampling)
      ->capture_default_str()
      ->check(CLI::IsMember({"up-to", "exact"}));
  gen->add_option("--width", width, "arf-add padding width, 0 for the largest scale")
      ->capture_default_str();
  gen->add_flag("--no-latent", no_latent, "omit the latent field");
  gen->add_option("--threads", gen_threads)->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "output .jsonl path")->required();
  gen->add_option("--manifest", manifest_out, "manifest path (default <out>.manifest.json)");

  // ---- pe bias ----
  CLI::App* pe_cmd = app.add_subcommand("pe", "position-embedding kernels");
  pe_cmd->require_subcommand(1);
  CLI::App* bias = pe_cmd->add_subcommand("bias", "dump a bias matrix as CSV");
  std::string kernel;
  int pe_n = 8;
  int pe_d = 4;
  int pe_window = 0;
  uint64_t pe_seed = 1;
  double slope = 1.0;
  std::string weights;
  std::string dump_weights;
  std::string bias_out;
  Common pe_common;
  bias->add_option("--kernel", kernel)
      ->required()
      ->check(CLI::IsMember({"rpe", "rpe-square", "rpe-absolute", "alibi"}));
  bias->add_option("--n", pe_n, "sequence length")->capture_default_str()->check(
      CLI::PositiveNumber);
  bias->add_option("--d", pe_d, "embedding width")->capture_default_str()->check(
      CLI::PositiveNumber);
  bias->add_option("--window", pe_window, "R window, 0 for n")->capture_default_str();
  AddSeed(bias, pe_seed, pe_common);
  bias->add_option("--slope", slope, "ALiBi slope")->capture_default_str();
  bias->add_option("--weights", weights, "read inputs from this JSON file");
  bias->add_option("--dump-weights", dump_weights, "write the inputs used as JSON");
  bias->add_option("--out", bias_out, "CSV path (stdout when absent)");

  // ---- report merge ----
  CLI::App* report = app.add_subcommand("report", "work with JSON reports");
  report->require_subcommand(1);
  CLI::App* merge = report->add_subcommand("merge", "combine reports");
  std::vector<std::string> merge_files;
  std::string merge_out;
  merge->add_option("files", merge_files, "report files")->required()->check(CLI::ExistingFile);
  merge->add_option("--out", merge_out, "merged JSON path (stdout when absent)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (verify->parsed()) {
      ResolveSeeds(common);
      const auto start = std::chrono::steady_clock::now();
      VerificationReport r = suite();
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return Finish(std::move(r), common, seconds, out);
    }

    if (gen->parsed()) {
      ResolveSeeds(gen_common);
      tasks::EmitOptions e;
      e.task = tasks::ParseTaskKind(task);
      if (!scales_text.empty()) {
        e.scales = ParseIntList(scales_text);
      } else if (max_scale > 0) {
        e.scales = {max_scale};
      } else {
        throw Error(ErrorCode::kInvalidArgument, "gen needs --max-scale or --scales");
      }
      e.count = count;
      e.seed = gen_seed;
      e.sampling = sampling == "exact" ? tasks::ScaleMode::kExact : tasks::ScaleMode::kUpTo;
      e.width = width;
      e.with_latent = !no_latent;
      e.threads = gen_threads;
      const tasks::Dataset ds = tasks::EmitDataset(e);
      const std::string manifest =
          manifest_out.empty() ? tasks::DefaultManifestPath(gen_out) : manifest_out;
      tasks::WriteDatasetFiles(gen_out, manifest, ds);
      out << "wrote " << ds.records.size() << " records to " << gen_out << " (manifest "
          << manifest << ")\n";
      return kExitPass;
    }

    if (bias->parsed()) {
      ResolveSeeds(pe_common);
      const pe::Kernel k = pe::ParseKernel(kernel);
      pe::PeInputs in;
      if (!weights.empty()) {
        in = pe::PeInputsFromJson(ReadFile(weights));
      } else {
        in = pe::RandomPeInputs(pe_d, pe_n, pe_window > 0 ? pe_window : pe_n, pe_seed);
        in.slope = slope;
      }
      if (!dump_weights.empty()) WriteFile(dump_weights, pe::PeInputsToJson(in));
      const std::string csv = pe::BiasToCsv(pe::ComputeBias(k, in));
      if (bias_out.empty()) {
        out << csv;
      } else {
        WriteFile(bias_out, csv);
      }
      return kExitPass;
    }

    if (merge->parsed()) {
      std::vector<VerificationReport> reports;
      for (const std::string& f : merge_files) {
        reports.push_back(VerificationReport::FromJson(ReadFile(f)));
      }
      const std::string merged = MergeReports(reports);
      if (merge_out.empty()) {
        out << merged;
      } else {
        WriteFile(merge_out, merged);
      }
      const bool all = std::all_of(reports.begin(), reports.end(),
                                   [](const VerificationReport& r) { return r.passed(); });
      return all ? kExitPass : kExitFail;
    }
  } catch (const Error& e) {
    err << "ldhd: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ldhd::cli
