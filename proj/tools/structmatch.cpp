// Copyright 2026 The structmatch Authors
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

// structmatch: build-model | refine | evaluate | synth
//
// Exit status: 0 success, 1 I/O or format error, 2 a model class has no
// candidate region (image discarded), 3 candidate budget exceeded.

#include <glob.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "structmatch/error.hpp"
#include "structmatch/graph.hpp"
#include "structmatch/metrics.hpp"
#include "structmatch/pipeline.hpp"
#include "structmatch/profile.hpp"
#include "structmatch/synth.hpp"
#include "structmatch/tensor_io.hpp"

namespace sm = structmatch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitDiscard = 2;
constexpr int kExitBudget = 3;

std::vector<std::string> expand_globs(const std::vector<std::string>& patterns) {
  std::vector<std::string> out;
  for (const auto& pattern : patterns) {
    glob_t g{};
    if (glob(pattern.c_str(), 0, nullptr, &g) == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
    } else {
      out.push_back(pattern);  // let the loader report the missing file
    }
    globfree(&g);
  }
  return out;
}

unsigned default_threads() {
  if (const char* env = std::getenv("STRUCTMATCH_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct ProfileFlags {
  std::string profile;
  std::string config;
  std::optional<double> lambda, lambda_v, lambda_e, threshold, budget;
  std::optional<std::size_t> top_k, min_region_size;
  std::string connectivity;
  std::optional<unsigned> threads;

  void add_to(CLI::App* app) {
    app->add_option("--profile", profile, "Preset: distance or direction");
    app->add_option("--config", config, "Flat key = value profile file");
    app->add_option("--lambda", lambda, "Vertex/edge blend weight");
    app->add_option("--lambda-v", lambda_v, "Probability/diameter blend weight");
    app->add_option("--lambda-e", lambda_e, "Edge sub-term blend weight");
    app->add_option("--threshold", threshold, "Refinement threshold T");
    app->add_option("--budget", budget, "Candidate product budget");
    app->add_option("--top-k", top_k, "Keep the k most probable candidates per class");
    app->add_option("--min-region-size", min_region_size, "Drop smaller regions");
    app->add_option("--connectivity", connectivity, "face or full");
    app->add_option("--threads", threads, "Worker threads (env STRUCTMATCH_THREADS)");
  }

  // Preset, then config file, then flags.
  sm::Profile resolve(const std::string& fallback_preset) const {
    sm::Profile p = sm::profile_preset(profile.empty() ? fallback_preset : profile);
    p.threads = default_threads();
    if (!config.empty()) {
      const auto kv = sm::read_key_values(config);
      for (const auto& [key, value] : kv) {
        if (key == "profile" && profile.empty()) {
          p = sm::profile_preset(value);
          p.threads = default_threads();
        }
      }
      sm::apply_profile_overrides(p, kv);
    }
    if (!connectivity.empty()) sm::apply_profile_overrides(p, {{"connectivity", connectivity}});
    if (lambda) p.weights.lambda = *lambda;
    if (lambda_v) p.weights.lambda_v = *lambda_v;
    if (lambda_e) p.weights.lambda_e = *lambda_e;
    if (threshold) p.threshold = *threshold;
    if (budget) p.candidate_budget = *budget;
    if (top_k) p.top_k = *top_k;
    if (min_region_size) p.min_region_size = *min_region_size;
    if (threads) p.threads = *threads;
    p.validate();
    return p;
  }
};

int cmd_build_model(const std::vector<std::string>& patterns, const ProfileFlags& flags,
                    std::optional<std::size_t> num_classes, const std::string& out) {
  const sm::Profile profile = flags.resolve("distance");
  const auto paths = expand_globs(patterns);
  if (paths.empty()) throw sm::Error(sm::ErrorKind::InvalidArgument, "cli", "no annotation files");
  std::vector<sm::LabelMap> maps;
  std::uint32_t max_label = 0;
  for (const auto& path : paths) {
    maps.push_back(sm::load_label_map(path));
    max_label = std::max(max_label, maps.back().max_label());
  }
  const std::size_t n = num_classes.value_or(max_label);
  // Name the offending file when a class is missing.
  for (std::size_t a = 0; a < maps.size(); ++a) {
    std::vector<bool> seen(n + 1, false);
    for (const auto label : maps[a].labels()) {
      if (label <= n) seen[label] = true;
    }
    for (std::size_t c = 1; c <= n; ++c) {
      if (!seen[c]) {
        throw sm::Error(sm::ErrorKind::InvalidArgument, "graph",
                        "annotation " + paths[a] + " is missing class " + std::to_string(c));
      }
    }
  }
  const sm::ModelGraph model = sm::train_model_graph(maps, profile.family, n);
  sm::save_model(model, out);

  std::cout << "model: " << model.num_vertices() << " vertices, " << model.num_edges()
            << " directed edges, family " << sm::to_string(model.family()) << ", "
            << model.num_samples << " annotation(s)\n";
  for (std::size_t i = 0; i < model.num_vertices(); ++i) {
    for (std::size_t j = 0; j < model.num_vertices(); ++j) {
      if (i == j) continue;
      std::cout << "  " << i + 1 << " -> " << j + 1 << ": ";
      if (const auto* d = std::get_if<sm::DistancePair>(&model.edge(i, j))) {
        std::cout << "d_min=" << d->d_min << " d_max=" << d->d_max << "\n";
      } else {
        const auto& v = std::get<sm::DirectionVector>(model.edge(i, j));
        std::cout << "v=(";
        for (std::size_t k = 0; k < v.v.size(); ++k) std::cout << (k ? ", " : "") << v.v[k];
        std::cout << ") |v|=" << v.norm << "\n";
      }
    }
  }
  return kExitOk;
}

int cmd_refine(const std::string& tensor_path, const std::string& model_path,
               const ProfileFlags& flags, const std::string& out, const std::string& log) {
  const sm::ProbabilityTensor tensor = sm::load_tensor(tensor_path);
  const sm::ModelGraph model = sm::load_model(model_path);
  const sm::Profile profile = flags.resolve(std::string(sm::to_string(model.family())));
  const sm::PipelineResult r = sm::run_pipeline(tensor, model, profile);
  sm::save_label_map(r.output, out);
  if (!log.empty()) {
    std::ofstream f(log, std::ios::trunc);
    if (!f) throw sm::Error(sm::ErrorKind::Io, "cli", "cannot write " + log);
    f << sm::decision_log_to_json(r.refined).dump(2) << "\n";
  }
  std::size_t merged = 0, discarded = 0;
  for (const auto& d : r.refined.decisions) (d.merged ? merged : discarded)++;
  std::cerr << "regions " << r.regions.regions.size() << ", initial cost " << r.refined.initial_cost
            << ", final cost " << r.refined.assignment.cost << ", merged " << merged
            << ", discarded " << discarded << "\n";
  return kExitOk;
}

int cmd_evaluate(const std::string& pred_path, const std::string& gt_path,
                 std::vector<std::uint32_t> classes) {
  const sm::LabelMap pred = sm::load_label_map(pred_path);
  const sm::LabelMap gt = sm::load_label_map(gt_path);
  if (classes.empty()) {
    const std::uint32_t top = std::max(pred.max_label(), gt.max_label());
    for (std::uint32_t c = 1; c <= top; ++c) classes.push_back(c);
  }
  const auto report = sm::evaluate(pred, gt, classes);
  std::cout << sm::report_to_json(report).dump(2) << "\n";
  return kExitOk;
}

int cmd_synth(const std::string& spec_path, std::optional<std::uint64_t> seed,
              const std::string& out_tensor, const std::string& out_gt) {
  sm::SyntheticSceneSpec spec = sm::scene_spec_from_key_values(sm::read_key_values(spec_path));
  if (seed) spec.seed = *seed;
  const sm::SyntheticScene scene = sm::generate_scene(spec);
  sm::save_tensor(scene.tensor, out_tensor);
  sm::save_label_map(scene.ground_truth, out_gt);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  // Accept the single-dash long forms -o-tensor / -o-gt.
  std::vector<std::string> args(argv, argv + argc);
  for (auto& a : args) {
    if (a == "-o-tensor" || a == "-o-gt") a = "-" + a;
  }
  std::vector<char*> cargs;
  for (auto& a : args) cargs.push_back(a.data());

  CLI::App app{"Structural post-processing of semantic segmentations by inexact graph matching"};
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build-model", "Train a model graph from annotation maps");
  std::vector<std::string> annotations;
  std::string model_out;
  std::optional<std::size_t> num_classes;
  ProfileFlags build_flags;
  build->add_option("--annotations", annotations, "Annotation label maps (globs allowed)")->required();
  build->add_option("--classes", num_classes, "Number of non-background classes (default: max label)");
  build->add_option("-o,--out", model_out, "Output model JSON")->required();
  build_flags.add_to(build);

  auto* refine = app.add_subcommand("refine", "Refine a probability tensor against a model");
  std::string tensor_path, model_path, refine_out, log_path;
  ProfileFlags refine_flags;
  refine->add_option("--tensor", tensor_path, "Probability tensor (.npy, <f4)")->required();
  refine->add_option("--model", model_path, "Model graph JSON")->required();
  refine->add_option("-o,--out", refine_out, "Output label map (.npy, <u4)")->required();
  refine->add_option("--log", log_path, "Decision log JSON");
  refine_flags.add_to(refine);

  auto* eval = app.add_subcommand("evaluate", "Dice and Hausdorff per class as JSON");
  std::string pred_path, gt_path;
  std::vector<std::uint32_t> classes;
  eval->add_option("--pred", pred_path, "Predicted label map")->required();
  eval->add_option("--gt", gt_path, "Ground-truth label map")->required();
  eval->add_option("--classes", classes, "Classes to evaluate (default: all non-background)")
      ->delimiter(',');

  auto* synth = app.add_subcommand("synth", "Generate a synthetic tensor and ground truth");
  std::string spec_path, out_tensor, out_gt;
  std::optional<std::uint64_t> seed;
  synth->add_option("--spec", spec_path, "Scene description (key = value)")->required();
  synth->add_option("--seed", seed, "Override the scene seed");
  synth->add_option("--o-tensor,--out-tensor", out_tensor, "Output tensor")->required();
  synth->add_option("--o-gt,--out-gt", out_gt, "Output ground truth")->required();

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*build) return cmd_build_model(annotations, build_flags, num_classes, model_out);
    if (*refine) return cmd_refine(tensor_path, model_path, refine_flags, refine_out, log_path);
    if (*eval) return cmd_evaluate(pred_path, gt_path, classes);
    if (*synth) return cmd_synth(spec_path, seed, out_tensor, out_gt);
  } catch (const sm::EmptyCandidateClassError& e) {
    std::cerr << "discarded: " << e.what() << "\n";
    return kExitDiscard;
  } catch (const sm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == sm::ErrorKind::CandidateExplosion ? kExitBudget : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
