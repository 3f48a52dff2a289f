// Copyright 2026 The sylq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sylq/corpus.h"
#include "sylq/dataset.h"
#include "sylq/error.h"
#include "sylq/model.h"
#include "sylq/report.h"
#include "sylq/scoring.h"
#include "sylq/synth.h"

namespace sylq::cli {
namespace {

namespace fs = std::filesystem;

struct SynthFlags {
  std::string out_dir;
  SynthSpec spec;
  std::string syllable_set = "Problem90";
  bool no_noise = false;
  std::vector<double> trajectory;
  int trajectory_patient = 1;
  std::optional<double> expert_threshold;
};

struct DspFlags {
  DspConfig cfg;
  std::string window = "hann";
  bool no_log = false;

  DspConfig resolve() const {
    DspConfig c = cfg;
    c.window = window == "rect" ? Window::kRect : Window::kHann;
    c.log_compress = !no_log;
    return c;
  }
};

struct OutputFlags {
  std::string format = "text";
  std::string out;
};

struct TrainFlags {
  std::string manifest;
  std::string model_out;
  std::string cohort = "all";
  bool drop_incomplete = false;
  TrainConfig tc;
  double split_ratio = 0.8;
  std::string split_by = "fragment";
  DspFlags dsp;
  std::string trace_out;
  OutputFlags output;
};

struct EvalFlags {
  std::string manifest;
  std::vector<std::string> models;
  bool drop_incomplete = false;
  OutputFlags output;
};

struct ScoreFlags {
  std::string manifest;
  std::string model;
  std::string cohort;
  std::vector<int> sessions;
  bool expert_marks = false;
  bool fragment_mean = false;
  bool drop_incomplete = false;
  OutputFlags output;
};

struct ReportFlags {
  std::vector<std::string> inputs;
  OutputFlags output;
};

// Status messages go to err; -v adds per-recording detail.
struct Log {
  std::ostream& err;
  bool verbose = false;

  void info(const std::string& msg) const {
    if (verbose) err << msg << '\n';
  }
  void warn(const std::string& msg) const { err << "warning: " << msg << '\n'; }
};

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("write failed for " + path);
}

Format format_for_path(const std::string& path) {
  const auto ext = fs::path(path).extension().string();
  if (ext == ".json") return Format::kJson;
  if (ext == ".txt") return Format::kText;
  return Format::kCsv;
}

Manifest load_checked(const std::string& path, bool drop_incomplete, const Log& log) {
  LoadOptions opts;
  opts.drop_incomplete = drop_incomplete;
  LoadReport report;
  Manifest m = load_manifest(path, opts, &report);
  for (const auto& w : report.warnings) log.warn(w);
  return m;
}

void log_corpus(const Corpus& c, const Log& log) {
  for (const auto& tag : c.empty_recordings) {
    log.info("recording (" + tag.patient_id + ", " + std::to_string(tag.session_index) + ", \"" +
             tag.syllable_id + "\") yielded no fragment");
  }
  log.info(std::to_string(c.fragments.size()) + " fragments from " +
           std::to_string(c.recordings.size()) + " recordings");
}

SplitAssignment make_split(const Corpus& c, double ratio, const std::string& split_by,
                           std::uint64_t seed) {
  if (split_by == "syllable") return split_groups(c.recording, c.labels, ratio, seed);
  return split_fragments(c.fragments.size(), c.labels, ratio, seed);
}

// The labelled corpus a model was trained on, rebuilt from its metadata.
struct TrainingData {
  Corpus corpus;
  SplitAssignment split;
};

TrainingData rebuild_training_data(const Manifest& m, const Model& model, const Log& log) {
  const Manifest cohort = filter_cohort(m, Cohort::parse(model.meta.cohort));
  TrainingData d;
  d.corpus = build_corpus(cohort, model.dsp, is_training_session);
  log_corpus(d.corpus, log);
  d.split = make_split(d.corpus, model.meta.split_ratio, model.meta.split_by, model.meta.seed);
  return d;
}

int cmd_synth(const SynthFlags& f, std::ostream& out, const Log& log) {
  SynthSpec spec = f.spec;
  spec.syllable_set = parse_syllable_set(f.syllable_set);
  spec.add_noise = !f.no_noise;
  Manifest m = generate_corpus(spec, f.out_dir);
  if (!f.trajectory.empty()) {
    if (f.trajectory_patient < 1 || f.trajectory_patient > spec.n_patients) {
      throw ValidationError("--trajectory-patient must name one of the generated patients");
    }
    generate_trajectory(spec, m, f.out_dir, f.trajectory_patient, f.trajectory, f.expert_threshold);
  }
  log.info("wrote " + std::to_string(m.records.size()) + " recordings");
  out << "corpus: " << (fs::path(f.out_dir) / "manifest.csv").string() << " (" << m.records.size()
      << " recordings, " << spec.n_patients << " patients)\n";
  return kOk;
}

int cmd_train(const TrainFlags& f, std::ostream& out, const Log& log) {
  const Manifest all = load_checked(f.manifest, f.drop_incomplete, log);
  const Cohort cohort = Cohort::parse(f.cohort);
  const Manifest m = filter_cohort(all, cohort);
  const DspConfig dsp = f.dsp.resolve();
  dsp.validate();
  const Corpus c = build_corpus(m, dsp, is_training_session);
  log_corpus(c, log);
  const SplitAssignment split = make_split(c, f.split_ratio, f.split_by, f.tc.seed);

  Architecture arch;
  TrainResult result = train(c.fragments, c.labels, split, f.tc, arch, dsp);
  result.model.meta.cohort = cohort.to_string();
  result.model.meta.split_ratio = f.split_ratio;
  result.model.meta.split_by = f.split_by;
  save_model(result.model, f.model_out);
  if (!f.trace_out.empty()) {
    write_output(render(result.trace, format_for_path(f.trace_out)), f.trace_out, out);
  }
  const std::string trace_text = render(result.trace, parse_format(f.output.format));
  write_output(trace_text, f.output.out, out);
  return kOk;
}

int cmd_eval(const EvalFlags& f, std::ostream& out, const Log& log) {
  const Manifest m = load_checked(f.manifest, f.drop_incomplete, log);
  EvalDocument doc;
  for (const auto& path : f.models) {
    const Model model = load_model(path);
    const TrainingData d = rebuild_training_data(m, model, log);
    for (SplitPart part : {SplitPart::kTrain, SplitPart::kTest}) {
      doc.reports.push_back(evaluate(model, d.corpus.fragments, d.corpus.labels, d.split, part));
    }
  }
  write_output(render(doc, parse_format(f.output.format)), f.output.out, out);
  return kOk;
}

int cmd_score(const ScoreFlags& f, std::ostream& out, const Log& log) {
  const Manifest all = load_checked(f.manifest, f.drop_incomplete, log);
  const Model model = load_model(f.model);
  const Cohort cohort = Cohort::parse(f.cohort.empty() ? model.meta.cohort : f.cohort);
  const Manifest m = filter_cohort(all, cohort);
  const auto keep = [&](const SyllableRecord& r) {
    if (f.sessions.empty()) return is_rehabilitation_session(r);
    return std::find(f.sessions.begin(), f.sessions.end(), r.session_index) != f.sessions.end();
  };
  const Corpus c = build_corpus(m, model.dsp, keep);
  log_corpus(c, log);
  if (c.recordings.empty() && c.empty_recordings.empty()) {
    throw EmptySession("no recordings in the selected sessions of cohort " + cohort.to_string());
  }

  const SessionScores scores = score_corpus(
      model, m, c, f.fragment_mean ? Aggregation::kFragmentMean : Aggregation::kSyllableMean);
  ScoreDocument doc;
  doc.sessions = scores.sessions;
  doc.missing_sessions = scores.missing;
  for (const auto& [p, s] : scores.missing) {
    log.warn("patient " + p + " session " + std::to_string(s) +
             " has no fragment after silence gating; listed as missing");
  }
  if (f.expert_marks) {
    std::vector<double> xs, ys;
    for (const auto& s : doc.sessions) {
      for (const auto& y : s.syllables) {
        if (!y.expert_mark) continue;
        xs.push_back(y.score);
        ys.push_back(*y.expert_mark);
      }
    }
    ExpertCorrelation ec;
    ec.n = xs.size();
    try {
      ec.coefficient = pearson(xs, ys);
    } catch (const DegenerateInput& e) {
      ec.error = e.what();
      log.warn(std::string("expert correlation unavailable: ") + e.what());
    }
    doc.expert = ec;
  }
  write_output(render(doc, parse_format(f.output.format)), f.output.out, out);
  return kOk;
}

int cmd_report(const ReportFlags& f, std::ostream& out) {
  const Format format = parse_format(f.output.format);
  EvalDocument merged;
  std::string text;
  bool any_eval = false;
  for (const auto& path : f.inputs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open report " + path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
    if (doc.value("kind", "") == "eval") {
      const EvalDocument e = eval_from_json(doc);
      merged.reports.insert(merged.reports.end(), e.reports.begin(), e.reports.end());
      any_eval = true;
    } else {
      text += render_document(doc, format);
    }
  }
  if (any_eval) text += render(merged, format);
  write_output(text, f.output.out, out);
  return kOk;
}

void add_output(CLI::App* cmd, OutputFlags& o) {
  cmd->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  cmd->add_option("--out", o.out, "Write the report here instead of stdout");
}

void add_dsp(CLI::App* cmd, DspFlags& d) {
  cmd->add_option("--hop", d.cfg.hop, "STFT hop in samples")->check(CLI::Range(1, kFrameLen));
  cmd->add_option("--window", d.window, "Analysis window")->check(CLI::IsMember({"hann", "rect"}));
  cmd->add_option("--gate-ratio", d.cfg.gate_ratio,
                  "Drop frames below this fraction of the loudest frame's energy")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--log-floor", d.cfg.log_floor, "Floor added before log10")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--fragment-hop", d.cfg.fragment_hop, "Frames between fragment starts")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--no-log", d.no_log, "Keep raw magnitudes");
  cmd->add_flag("--standardize", d.cfg.standardize,
                "Standardize bins with training-split statistics");
}

int to_exit_code(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const CorruptFile*>(&e) ||
      dynamic_cast<const VersionMismatch*>(&e)) {
    return kIo;
  }
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const EmptyCohort*>(&e) || dynamic_cast<const ShapeMismatch*>(&e)) {
    return kValidation;
  }
  if (dynamic_cast<const DegenerateInput*>(&e) || dynamic_cast<const EmptySplit*>(&e) ||
      dynamic_cast<const EmptySession*>(&e) || dynamic_cast<const TooShort*>(&e)) {
    return kDegenerate;
  }
  return kIo;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Syllable pronunciation quality scoring with an LSTM classifier"};
  app.name("sylq");
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with the same keys as the flags");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Per-recording diagnostics on stderr");

  SynthFlags synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic corpus");
  s->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  s->add_option("--patients", synth.spec.n_patients, "Number of patients")
      ->check(CLI::PositiveNumber);
  s->add_option("--syllables", synth.spec.syllables_per_set, "Syllables per session")
      ->check(CLI::PositiveNumber);
  s->add_option("--sample-rate", synth.spec.sample_rate_hz, "Sample rate in Hz")
      ->check(CLI::Range(8000, 192000));
  s->add_option("--duration", synth.spec.duration_s, "Seconds per syllable")
      ->check(CLI::Range(0.31, 10.0));
  s->add_option("--syllable-set", synth.syllable_set, "Syllable set label")
      ->check(CLI::IsMember({"Gost100", "Problem90", "Other"}));
  s->add_option("--formant-shift", synth.spec.formant_shift_hz,
                "Second-formant shift in Hz at severity 1");
  s->add_option("--tilt", synth.spec.tilt_db_per_octave, "Spectral tilt in dB/octave at severity 1")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--snr-clean", synth.spec.snr_clean_db, "SNR in dB at severity 0");
  s->add_option("--snr-degraded", synth.spec.snr_degraded_db, "SNR in dB at severity 1");
  s->add_flag("--no-noise", synth.no_noise, "Disable additive noise");
  s->add_option("--susceptibility-spread", synth.spec.susceptibility_spread,
                "Log-range of per-syllable severity exponents (0 = uniform)");
  s->add_option("--trajectory", synth.trajectory,
                "Severities of rehabilitation sessions 3, 4, ... (comma-separated)")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  s->add_option("--trajectory-patient", synth.trajectory_patient,
                "1-based patient the trajectory is generated for");
  s->add_option("--expert-threshold", synth.expert_threshold,
                "Write expert_mark = 1 iff severity < threshold for trajectory sessions")
      ->check(CLI::Range(0.0, 1.0));
  s->add_option("--seed", synth.spec.seed, "Corpus seed");

  TrainFlags tr;
  auto* t = app.add_subcommand("train", "Train a classifier on sessions 1 and 2");
  t->add_option("--manifest", tr.manifest, "Corpus manifest")->required();
  t->add_option("--model-out", tr.model_out, "Model file to write")->required();
  t->add_option("--cohort", tr.cohort, "all, sex:m, sex:f or patient:<id>");
  t->add_flag("--drop-incomplete", tr.drop_incomplete,
              "Drop patients with unpaired session-1/2 syllables instead of failing");
  t->add_option("--epochs", tr.tc.epochs, "Training epochs")->check(CLI::PositiveNumber);
  t->add_option("--batch-size", tr.tc.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
  t->add_option("--learning-rate", tr.tc.adam.learning_rate, "Adam step size")
      ->check(CLI::PositiveNumber);
  t->add_option("--beta1", tr.tc.adam.beta1, "Adam beta1")->check(CLI::Range(0.0, 1.0));
  t->add_option("--beta2", tr.tc.adam.beta2, "Adam beta2")->check(CLI::Range(0.0, 1.0));
  t->add_option("--adam-eps", tr.tc.adam.epsilon, "Adam epsilon")->check(CLI::PositiveNumber);
  t->add_option("--clip-norm", tr.tc.clip_norm, "Gradient norm cap, 0 to disable")
      ->check(CLI::NonNegativeNumber);
  t->add_option("--seed", tr.tc.seed, "Seed for initialization, split and shuffling");
  t->add_option("--split-ratio", tr.split_ratio, "Training share")->check(CLI::Range(0.01, 0.99));
  t->add_option("--split-by", tr.split_by, "Split granularity")
      ->check(CLI::IsMember({"fragment", "syllable"}));
  t->add_option("--trace-out", tr.trace_out, "Per-epoch trace file (.csv or .json)");
  add_dsp(t, tr.dsp);
  add_output(t, tr.output);

  EvalFlags ev;
  auto* e = app.add_subcommand("eval", "Recompute train/test accuracy of trained models");
  e->add_option("--manifest", ev.manifest, "Corpus manifest")->required();
  e->add_option("--model", ev.models, "Model file (repeat for a cohort grid)")->required();
  e->add_flag("--drop-incomplete", ev.drop_incomplete, "As for train");
  add_output(e, ev.output);

  ScoreFlags sc;
  auto* c = app.add_subcommand("score", "Score rehabilitation sessions");
  c->add_option("--manifest", sc.manifest, "Corpus manifest")->required();
  c->add_option("--model", sc.model, "Model file")->required();
  c->add_option("--cohort", sc.cohort, "Cohort to score (default: the model's)");
  c->add_option("--sessions", sc.sessions, "Sessions to score (default: all >= 3)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  c->add_flag("--expert-marks", sc.expert_marks,
              "Correlate syllable scores with the manifest's expert marks");
  c->add_flag("--fragment-mean", sc.fragment_mean,
              "Session score as the mean over fragments instead of syllables");
  c->add_flag("--drop-incomplete", sc.drop_incomplete, "As for train");
  add_output(c, sc.output);

  ReportFlags rp;
  auto* r = app.add_subcommand("report", "Re-render saved json reports");
  r->add_option("--input", rp.inputs, "Report json file (repeatable)")->required();
  add_output(r, rp.output);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const Log log{err, verbose};
  try {
    if (s->parsed()) return cmd_synth(synth, out, log);
    if (t->parsed()) return cmd_train(tr, out, log);
    if (e->parsed()) return cmd_eval(ev, out, log);
    if (c->parsed()) return cmd_score(sc, out, log);
    if (r->parsed()) return cmd_report(rp, out);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return to_exit_code(ex);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kIo;
  }
  return kUsage;
}

}  // namespace sylq::cli
