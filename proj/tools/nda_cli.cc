// tools/nda_cli.cc

// Copyright 2026  The nda-backend Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: corpus generation, back-end training, scoring,
// evaluation and Gaussianality diagnostics.
//
// Every subcommand accepts --config <file.json>, a flat JSON object whose
// keys are the long flag names with '-' replaced by '_'. Flags given on the
// command line take precedence over the file.
//
// Exit status: 0 on success, 1 on a computational failure, 2 on a usage or
// input error.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nda/kernels.h"
#include "nda/metrics.h"
#include "nda/nda_model.h"
#include "nda/plda.h"
#include "nda/preprocess.h"
#include "nda/scoring.h"
#include "nda/serialize.h"
#include "nda/synth.h"
#include "nda/vecstore.h"

namespace fs = std::filesystem;
using namespace nda;

namespace {

std::string Shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string JsonScalar(const Json &v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw InputError("config value " + v.dump() + " is not a scalar");
}

// Feeds config-file values to every option the command line left unset.
void ApplyConfig(CLI::App *cmd, const std::string &path) {
  if (path.empty()) return;
  Json j = ReadJsonFile(path);
  if (!j.is_object()) throw InputError("'" + path + "': config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string flag = it.key();
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (flag == "config") throw InputError("'" + path + "': config files cannot nest");
    CLI::Option *opt = nullptr;
    for (CLI::Option *o : cmd->get_options())
      if (o->check_lname(flag)) opt = o;
    if (!opt) throw InputError("'" + path + "': unknown key '" + it.key() + "' for " + cmd->get_name());
    if (opt->count() > 0) continue;  // command line wins
    if (it.value().is_array()) {
      std::vector<std::string> items;
      for (const auto &v : it.value()) items.push_back(JsonScalar(v));
      opt->add_result(items);
    } else if (it.value().is_null()) {
      continue;
    } else {
      opt->add_result(JsonScalar(it.value()));
    }
    opt->run_callback();
  }
}

void Require(const std::string &value, const char *flag) {
  if (value.empty()) throw InputError(std::string("missing required option ") + flag);
}

void RequireFile(const std::string &path, const char *flag) {
  Require(path, flag);
  if (!fs::is_regular_file(path)) throw InputError("input file '" + path + "' does not exist");
}

void RequireWritableDir(const std::string &path) {
  fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent))
    throw InputError("output directory '" + parent.string() + "' does not exist");
}

EmbeddingFormat ParseFormat(const std::string &name) {
  if (name == "csv") return EmbeddingFormat::kCsv;
  if (name == "binary") return EmbeddingFormat::kBinary;
  throw InputError("unknown format '" + name + "' (expected csv or binary)");
}

// Writes text atomically enough for our purposes: everything is rendered in
// memory before the file is opened.
void WriteText(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("error writing '" + path + "'");
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string config;
  std::string out_dir;
  std::string format = "binary";
  std::size_t dim = 32;
  std::size_t train_speakers = 500;
  std::size_t eval_speakers = 100;
  std::size_t utts_per_speaker = 20;
  std::size_t nontargets_per_target = 5;
  std::vector<double> prior_variances;
  std::string warp = "identity";
  double skew = 0.0;
  double tail = 1.0;
  double strength = 0.0;
  std::uint64_t seed = 0;
};

void SetupGen(CLI::App &app, GenArgs &a) {
  auto *c = app.add_subcommand("gen", "Generate a synthetic corpus with a known oracle");
  c->add_option("--config", a.config, "JSON config file");
  c->add_option("--out-dir", a.out_dir, "Output directory (created if absent)");
  c->add_option("--format", a.format, "Embedding file format: binary or csv")->capture_default_str();
  c->add_option("--dim", a.dim)->capture_default_str();
  c->add_option("--train-speakers", a.train_speakers)->capture_default_str();
  c->add_option("--eval-speakers", a.eval_speakers)->capture_default_str();
  c->add_option("--utts-per-speaker", a.utts_per_speaker)->capture_default_str();
  c->add_option("--nontargets-per-target", a.nontargets_per_target)->capture_default_str();
  c->add_option("--prior-variances", a.prior_variances, "Per-dimension prior variances (default all 1)")
      ->delimiter(',');
  c->add_option("--warp", a.warp, "identity, sinh_arcsinh or rotation_then_cubic")
      ->capture_default_str();
  c->add_option("--skew", a.skew)->capture_default_str();
  c->add_option("--tail", a.tail)->capture_default_str();
  c->add_option("--strength", a.strength)->capture_default_str();
  c->add_option("--seed", a.seed)->capture_default_str();
}

int RunGen(const GenArgs &a) {
  Require(a.out_dir, "--out-dir");
  const EmbeddingFormat format = ParseFormat(a.format);
  SynthSpec spec;
  spec.dim = a.dim;
  spec.n_train_speakers = a.train_speakers;
  spec.n_eval_speakers = a.eval_speakers;
  spec.utts_per_speaker = a.utts_per_speaker;
  spec.nontargets_per_target = a.nontargets_per_target;
  if (!a.prior_variances.empty())
    spec.prior_variances = Eigen::Map<const Vector>(a.prior_variances.data(),
                                                    static_cast<Eigen::Index>(a.prior_variances.size()));
  spec.warp.kind = ParseWarpKind(a.warp);
  spec.warp.skew = a.skew;
  spec.warp.tail = a.tail;
  spec.warp.strength = a.strength;
  spec.seed = a.seed;
  spec.Validate();
  if (fs::exists(a.out_dir) && !fs::is_directory(a.out_dir))
    throw InputError("'" + a.out_dir + "' exists and is not a directory");

  Corpus corpus = GenerateCorpus(spec);
  fs::create_directories(a.out_dir);
  const std::string ext = format == EmbeddingFormat::kCsv ? ".csv" : ".emb";
  const fs::path dir(a.out_dir);
  WriteEmbeddingSet(corpus.train, (dir / ("train" + ext)).string(), format);
  WriteEmbeddingSet(corpus.eval, (dir / ("eval" + ext)).string(), format);
  WriteTrialList(corpus.trials, (dir / "trials.txt").string());
  WriteOracle(corpus.oracle, (dir / "oracle.json").string());
  WriteJsonFile(ToJson(spec), (dir / "spec.json").string());
  std::cout << "wrote " << corpus.train.size() << " train and " << corpus.eval.size()
            << " eval vectors, " << corpus.trials.size() << " trials to " << a.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string config;
  std::string train;
  std::string out;
  bool center = true;
  bool length_norm = false;
  std::size_t lda_dim = 0;
  bool length_norm_after_lda = false;
  std::size_t truncate_dim = 0;
  // NDA only
  std::size_t layers = 10;
  std::size_t hidden = 64;
  std::size_t hidden_layers = 0;
  double scale_cap = 2.0;
  std::string loss_trace;
  TrainConfig train_config;
  std::optional<double> grad_clip;
};

void AddPipelineOptions(CLI::App *c, TrainArgs &a) {
  c->add_option("--config", a.config, "JSON config file");
  c->add_option("--train", a.train, "Training embeddings (.csv or binary)");
  c->add_option("--out", a.out, "Output model bundle (JSON)");
  c->add_flag("--center,!--no-center", a.center, "Subtract the training mean (default on)");
  c->add_flag("--length-norm,!--no-length-norm", a.length_norm,
              std::string("Length-normalize before LDA (default ") + (a.length_norm ? "on)" : "off)"));
  c->add_option("--lda-dim", a.lda_dim, "LDA output dimension, 0 disables")->capture_default_str();
  c->add_flag("--length-norm-after-lda,!--no-length-norm-after-lda", a.length_norm_after_lda,
              "Length-normalize again after LDA (default off)");
  c->add_option("--truncate-dim", a.truncate_dim, "Keep only this many latent dimensions, 0 keeps all")
      ->capture_default_str();
}

void SetupTrainPlda(CLI::App &app, TrainArgs &a) {
  auto *c = app.add_subcommand("train-plda", "Fit a two-covariance PLDA back-end");
  AddPipelineOptions(c, a);
}

void SetupTrainNda(CLI::App &app, TrainArgs &a) {
  auto *c = app.add_subcommand("train-nda", "Fit an NDA back-end (flow + latent PLDA)");
  AddPipelineOptions(c, a);
  TrainConfig &t = a.train_config;
  c->add_option("--layers", a.layers, "Coupling layers")->capture_default_str();
  c->add_option("--hidden", a.hidden, "Hidden width of the coupling networks")->capture_default_str();
  c->add_option("--hidden-layers", a.hidden_layers, "Hidden layers per network, 0 = auto")
      ->capture_default_str();
  c->add_option("--scale-cap", a.scale_cap, "Bound on |log scale| per coordinate")->capture_default_str();
  c->add_option("--epochs", t.epochs)->capture_default_str();
  c->add_option("--speakers-per-batch", t.speakers_per_batch)->capture_default_str();
  c->add_option("--min-speakers", t.min_speakers_before_update,
                "Speakers accumulated per update, 0 = speakers-per-batch")
      ->capture_default_str();
  c->add_option("--learning-rate,--lr", t.learning_rate)->capture_default_str();
  c->add_option("--adam-beta1", t.adam_beta1)->capture_default_str();
  c->add_option("--adam-beta2", t.adam_beta2)->capture_default_str();
  c->add_option("--adam-eps", t.adam_eps)->capture_default_str();
  c->add_option("--seed", t.seed)->capture_default_str();
  c->add_option("--grad-clip", a.grad_clip, "Clip the update gradient to this norm");
  c->add_flag("--per-utterance-average", t.per_utterance_average);
  c->add_option("--loss-trace", a.loss_trace, "Loss trace path (default <out>.loss.txt)");
}

struct Prepared {
  Pipeline pipeline;
  EmbeddingSet train{1};
};

Prepared PrepareTraining(const TrainArgs &a) {
  RequireFile(a.train, "--train");
  Require(a.out, "--out");
  RequireWritableDir(a.out);
  EmbeddingSet train = ReadEmbeddingSet(a.train);
  PipelineConfig pc{a.center, a.length_norm, a.lda_dim, a.length_norm_after_lda};
  Pipeline pipeline = Pipeline::Fit(train, pc);
  EmbeddingSet prepared = pipeline.Apply(train);
  if (a.truncate_dim > prepared.dim())
    throw InputError("--truncate-dim " + std::to_string(a.truncate_dim) +
                     " exceeds the model dimension " + std::to_string(prepared.dim()));
  return {std::move(pipeline), std::move(prepared)};
}

int RunTrainPlda(const TrainArgs &a) {
  Prepared p = PrepareTraining(a);
  PldaModel model = FitPlda(p.train);
  if (a.truncate_dim != 0) model = TruncateDims(model, a.truncate_dim);
  ModelBundle bundle{std::move(p.pipeline), std::move(model)};
  bundle.Validate();
  WriteBundle(bundle, a.out);
  std::cout << "wrote PLDA model (" << std::get<PldaModel>(bundle.model).dim() << " dims) to "
            << a.out << "\n";
  return 0;
}

int RunTrainNda(const TrainArgs &a) {
  TrainConfig config = a.train_config;
  config.grad_clip_norm = a.grad_clip;
  config.Validate();
  if (a.layers < 1) throw InputError("--layers must be >= 1");
  if (a.hidden < 1) throw InputError("--hidden must be >= 1");
  if (!(a.scale_cap > 0.0)) throw InputError("--scale-cap must be > 0");
  const std::string trace_path = a.loss_trace.empty() ? a.out + ".loss.txt" : a.loss_trace;
  Prepared p = PrepareTraining(a);
  RequireWritableDir(trace_path);

  FlowOptions options;
  options.hidden_layers = a.hidden_layers;
  options.scale_cap = a.scale_cap;
  FlowModel init = InitFlow(p.train.dim(), a.layers, a.hidden, config.seed, options);
  TrainResult result = FitNda(p.train, std::move(init), config, [](std::size_t epoch, double obj) {
    std::cerr << "epoch " << epoch + 1 << " objective " << obj << "\n";
  });
  NdaModel model = std::move(result.model);
  if (a.truncate_dim != 0) model = TruncateLatentDims(model, a.truncate_dim);
  ModelBundle bundle{std::move(p.pipeline), std::move(model)};
  bundle.Validate();

  std::ostringstream trace;
  for (std::size_t e = 0; e < result.loss_trace.size(); ++e)
    trace << e + 1 << " " << Shortest(result.loss_trace[e]) << "\n";
  WriteBundle(bundle, a.out);
  WriteText(trace_path, trace.str());
  std::cout << "wrote NDA model to " << a.out << " and loss trace to " << trace_path << "\n";
  return 0;
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
  std::string config;
  std::string model;
  std::string embeddings;
  std::string trials;
  std::string out;
  unsigned threads = 0;
};

void SetupScore(CLI::App &app, ScoreArgs &a) {
  auto *c = app.add_subcommand("score", "Score a trial list");
  c->add_option("--config", a.config, "JSON config file");
  c->add_option("--model", a.model, "Model bundle from train-plda or train-nda");
  c->add_option("--embeddings", a.embeddings, "Embeddings referenced by the trials");
  c->add_option("--trials", a.trials, "Trial list: 'enroll[,enroll...] test target|nontarget'");
  c->add_option("--out", a.out, "Score file (default stdout)");
  c->add_option("--threads", a.threads, "Worker threads, 0 = all cores")->capture_default_str();
}

int RunScore(const ScoreArgs &a) {
  RequireFile(a.model, "--model");
  RequireFile(a.embeddings, "--embeddings");
  RequireFile(a.trials, "--trials");
  if (!a.out.empty()) RequireWritableDir(a.out);
  ModelBundle bundle = ReadBundle(a.model);
  EmbeddingSet set = ReadEmbeddingSet(a.embeddings);
  TrialList trials = ReadTrialList(a.trials);
  std::vector<double> scores = ScoreTrials(bundle, set, trials, a.threads);

  std::string text;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const Trial &t = trials[i];
    for (std::size_t e = 0; e < t.enroll.size(); ++e) {
      if (e) text += ',';
      text += t.enroll[e];
    }
    text += ' ' + t.test + ' ' + Shortest(scores[i]) + ' ' +
            (t.is_target ? "target" : "nontarget") + '\n';
  }
  if (a.out.empty())
    std::cout << text;
  else
    WriteText(a.out, text);
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string config;
  std::string scores;
  std::vector<double> p_tars{0.01, 0.001};
  std::string out;
  std::string det;
};

void SetupEval(CLI::App &app, EvalArgs &a) {
  auto *c = app.add_subcommand("eval", "EER and minDCF of a score file");
  c->add_option("--config", a.config, "JSON config file");
  c->add_option("--scores", a.scores, "Score file from the score subcommand");
  c->add_option("--p-tar", a.p_tars, "Target priors for minDCF")->delimiter(',')->capture_default_str();
  c->add_option("--out", a.out, "JSON report path");
  c->add_option("--det", a.det, "CSV of (threshold, p_miss, p_fa) operating points");
}

ScoreSet ReadScoreFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  ScoreSet s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string enroll, test, score, label, extra;
    if (!(ls >> enroll)) continue;  // blank
    const std::string where = "'" + path + "' line " + std::to_string(lineno);
    if (!(ls >> test >> score >> label) || (ls >> extra))
      throw InputError(where + ": expected 'enrolls test score label'");
    double v = 0.0;
    auto res = std::from_chars(score.data(), score.data() + score.size(), v);
    if (res.ec != std::errc() || res.ptr != score.data() + score.size() || !std::isfinite(v))
      throw InputError(where + ": bad score '" + score + "'");
    if (label != "target" && label != "nontarget")
      throw InputError(where + ": label must be target or nontarget");
    s.scores.push_back(v);
    s.labels.push_back(label == "target");
  }
  if (s.scores.empty()) throw InputError("'" + path + "' has no scores");
  return s;
}

std::string DcfKey(double p) {
  const double k = -std::log10(p);
  if (std::abs(k - std::round(k)) < 1e-12 && k >= 1)
    return "min_dcf_1e-" + std::to_string(static_cast<int>(std::round(k)));
  return "min_dcf_" + Shortest(p);
}

int RunEval(const EvalArgs &a) {
  RequireFile(a.scores, "--scores");
  if (a.p_tars.empty()) throw InputError("--p-tar needs at least one value");
  for (double p : a.p_tars)
    if (!(p > 0.0 && p < 1.0)) throw InputError("--p-tar values must lie in (0, 1)");
  if (!a.out.empty()) RequireWritableDir(a.out);
  if (!a.det.empty()) RequireWritableDir(a.det);
  ScoreSet s = ReadScoreFile(a.scores);
  s.Validate();

  Json report;
  report["eer"] = ComputeEer(s);
  char line[128];
  std::string table;
  std::snprintf(line, sizeof(line), "%-16s %zu\n%-16s %zu\n", "targets", s.num_targets(),
                "nontargets", s.num_nontargets());
  table += line;
  std::snprintf(line, sizeof(line), "%-16s %.3f%%\n", "EER", 100.0 * report["eer"].get<double>());
  table += line;
  for (double p : a.p_tars) {
    const double dcf = ComputeMinDcf(s, p);
    report[DcfKey(p)] = dcf;
    std::snprintf(line, sizeof(line), "%-16s %.3f\n", ("minDCF(" + Shortest(p) + ")").c_str(), dcf);
    table += line;
  }
  report["n_target"] = s.num_targets();
  report["n_nontarget"] = s.num_nontargets();

  std::string det;
  if (!a.det.empty()) {
    det = "threshold,p_miss,p_fa\n";
    for (const auto &op : OperatingPoints(s))
      det += Shortest(op.threshold) + "," + Shortest(op.p_miss) + "," + Shortest(op.p_fa) + "\n";
  }
  std::cout << table;
  if (!a.out.empty()) WriteJsonFile(report, a.out);
  if (!a.det.empty()) WriteText(a.det, det);
  return 0;
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseArgs {
  std::string config;
  std::string embeddings;
  std::string model;
  std::string out;
};

void SetupDiagnose(CLI::App &app, DiagnoseArgs &a) {
  auto *c = app.add_subcommand("diagnose", "Skewness and kurtosis before/after a back-end transform");
  c->add_option("--config", a.config, "JSON config file");
  c->add_option("--embeddings", a.embeddings, "Speaker-labeled embeddings");
  c->add_option("--model", a.model, "Optional model bundle; adds the transformed report");
  c->add_option("--out", a.out, "JSON report path (default stdout)");
}

int RunDiagnose(const DiagnoseArgs &a) {
  RequireFile(a.embeddings, "--embeddings");
  if (!a.model.empty()) RequireFile(a.model, "--model");
  if (!a.out.empty()) RequireWritableDir(a.out);
  EmbeddingSet set = ReadEmbeddingSet(a.embeddings);
  Json report;
  report["before"] = Json::parse(ReportToJson(GaussianalityReport(set)));
  if (!a.model.empty()) {
    ModelBundle bundle = ReadBundle(a.model);
    EmbeddingSet after = set.WithVectors(BackendLatents(bundle, set));
    report["after"] = Json::parse(ReportToJson(GaussianalityReport(after)));
    report["backend"] = bundle.is_nda() ? "nda" : "plda";
  }
  if (a.out.empty())
    std::cout << DumpJson(report);
  else
    WriteJsonFile(report, a.out);
  return 0;
}

// ---------------------------------------------------------------- transform

struct TransformArgs {
  std::string config;
  std::string model;
  std::string embeddings;
  std::string out;
};

void SetupTransform(CLI::App &app, TransformArgs &a) {
  auto *c = app.add_subcommand("transform", "Map embeddings into the back-end latent space");
  c->add_option("--config", a.config, "JSON config file");
  c->add_option("--model", a.model, "Model bundle");
  c->add_option("--embeddings", a.embeddings, "Input embeddings");
  c->add_option("--out", a.out, "Output embeddings (.csv or binary)");
}

int RunTransform(const TransformArgs &a) {
  RequireFile(a.model, "--model");
  RequireFile(a.embeddings, "--embeddings");
  Require(a.out, "--out");
  RequireWritableDir(a.out);
  ModelBundle bundle = ReadBundle(a.model);
  EmbeddingSet set = ReadEmbeddingSet(a.embeddings);
  EmbeddingSet latent = set.WithVectors(BackendLatents(bundle, set));
  WriteEmbeddingSet(latent, a.out);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Speaker verification back-ends: PLDA and neural discriminant analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nda 1.0");

  GenArgs gen;
  TrainArgs plda_args, nda_args;
  plda_args.length_norm = true;  // NDA can learn radial warps itself
  ScoreArgs score;
  EvalArgs eval;
  DiagnoseArgs diagnose;
  TransformArgs transform;
  SetupGen(app, gen);
  SetupTrainPlda(app, plda_args);
  SetupTrainNda(app, nda_args);
  SetupScore(app, score);
  SetupEval(app, eval);
  SetupDiagnose(app, diagnose);
  SetupTransform(app, transform);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  CLI::App *cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  try {
    if (name == "gen") {
      ApplyConfig(cmd, gen.config);
      return RunGen(gen);
    }
    if (name == "train-plda") {
      ApplyConfig(cmd, plda_args.config);
      return RunTrainPlda(plda_args);
    }
    if (name == "train-nda") {
      ApplyConfig(cmd, nda_args.config);
      return RunTrainNda(nda_args);
    }
    if (name == "score") {
      ApplyConfig(cmd, score.config);
      return RunScore(score);
    }
    if (name == "eval") {
      ApplyConfig(cmd, eval.config);
      return RunEval(eval);
    }
    if (name == "diagnose") {
      ApplyConfig(cmd, diagnose.config);
      return RunDiagnose(diagnose);
    }
    if (name == "transform") {
      ApplyConfig(cmd, transform.config);
      return RunTransform(transform);
    }
  } catch (const InputError &e) {
    std::cerr << "nda " << name << ": error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ParseError &e) {
    std::cerr << "nda " << name << ": error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError &e) {
    std::cerr << "nda " << name << ": numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "nda " << name << ": failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
