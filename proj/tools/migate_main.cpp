//
// Copyright 2026 The migate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "migate/cli/commands.hpp"
#include "migate/cli/config.hpp"
#include "migate/error.hpp"

namespace {

using migate::cli::RunConfig;

template <typename T>
void override_if(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

void override_path(const std::string& flag, std::filesystem::path& target) {
  if (!flag.empty()) target = flag;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"migate: multimodal interaction estimation, gating and robustness scoring"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<int> jobs;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "root seed (overrides config)");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "sample a synthetic logic-gate dataset");
  std::optional<std::string> gate_name;
  std::optional<std::size_t> n;
  std::optional<double> jitter;
  std::optional<std::uint32_t> embed_dim;
  synth->add_option("--gate", gate_name, "xor | copy | unique_v | unique_v_noise");
  synth->add_option("--n", n, "number of samples");
  synth->add_option("--jitter", jitter, "jitter standard deviation");
  synth->add_option("--embed-dim", embed_dim, "one-hot embedding width");

  std::string features, texts, decomposition, captions, images, responses, baseline, augmented;
  auto* estimate = app.add_subcommand("estimate", "estimate pointwise interactions");
  estimate->add_option("--features", features, "MIFS feature table");

  auto* gate = app.add_subcommand("gate", "build a caption-augmented manifest");
  std::optional<double> tau;
  std::optional<std::string> mode, provider;
  gate->add_option("--features", features, "MIFS feature table");
  gate->add_option("--texts", texts, "text manifest JSONL");
  gate->add_option("--decomposition", decomposition, "decomposition CSV");
  gate->add_option("--captions", captions, "caption JSONL");
  gate->add_option("--tau", tau, "caption budget fraction");
  gate->add_option("--mode", mode, "interaction_gated | uniform_tier");
  gate->add_option("--provider", provider, "manifest | synthetic-argmax");

  auto* corrupt = app.add_subcommand("corrupt", "corrupt images and texts");
  corrupt->add_option("--images", images, "directory of PNG images");
  corrupt->add_option("--texts", texts, "text manifest JSONL");

  auto* score = app.add_subcommand("score", "grade response logs and stability");
  score->add_option("--responses", responses, "response log JSONL");

  auto* report = app.add_subcommand("report", "compare two aggregates files");
  report->add_option("--baseline", baseline, "baseline aggregates.json");
  report->add_option("--augmented", augmented, "augmented aggregates.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    migate::ConfigError err(e.what());
    std::cerr << migate::cli::error_json(err) << '\n';
    return migate::cli::kExitConfig;
  }

  try {
    RunConfig cfg = config_path.empty() ? migate::cli::parse_config(nlohmann::json::object())
                                        : migate::cli::load_config(config_path);
    if (seed) migate::cli::apply_seed(cfg, *seed);
    override_path(out_dir, cfg.output_dir);
    override_if(jobs, cfg.jobs);
    override_if(gate_name, cfg.data.synth.gate);
    override_if(n, cfg.data.synth.n);
    override_if(jitter, cfg.data.synth.jitter);
    override_if(embed_dim, cfg.data.synth.embed_dim);
    override_path(features, cfg.data.features);
    override_path(texts, cfg.data.texts);
    override_path(images, cfg.data.images);
    override_path(decomposition, cfg.gate.decomposition);
    override_path(captions, cfg.gate.captions);
    override_if(tau, cfg.gate.gate.tau);
    override_if(provider, cfg.gate.provider);
    if (mode) {
      const auto parsed = migate::gate::parse_gate_mode(*mode);
      if (!parsed) throw migate::ConfigError("unknown gate mode '" + *mode + "'");
      cfg.gate.gate.mode = *parsed;
    }
    override_path(responses, cfg.metrics.responses);
    override_path(baseline, cfg.metrics.baseline_aggregates);
    override_path(augmented, cfg.metrics.augmented_aggregates);
    cfg.gate.gate.validate();

    nlohmann::ordered_json summary;
    if (*synth) summary = migate::cli::cmd_synth(cfg);
    if (*estimate) summary = migate::cli::cmd_estimate(cfg);
    if (*gate) summary = migate::cli::cmd_gate(cfg);
    if (*corrupt) summary = migate::cli::cmd_corrupt(cfg);
    if (*score) summary = migate::cli::cmd_score(cfg);
    if (*report) summary = migate::cli::cmd_report(cfg);
    std::cout << summary.dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << migate::cli::error_json(e) << '\n';
    return migate::cli::exit_code(e);
  }
  return migate::cli::kExitOk;
}
