/*
   Copyright 2026 The octc authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "octc/config.hpp"

#include <fstream>
#include <sstream>

namespace octc {

namespace {

/* Pulls known keys out of a section object, throwing on leftovers so
   typos do not silently fall back to defaults. */
class Section {
 public:
  Section(const nlohmann::json& parent, const std::string& name) {
    if (parent.contains(name)) {
      check(parent[name].is_object(), "config section '" + name +
                                          "' must be an object");
      obj_ = parent[name];
    }
    name_ = name;
  }

  template <typename T>
  void get(const char* key, T* out) {
    if (!obj_.contains(key)) return;
    try {
      *out = obj_[key].get<T>();
    } catch (const nlohmann::json::exception&) {
      throw Error("config: bad value for " + name_ + "." + key);
    }
    obj_.erase(key);
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      throw Error("config: unknown key " + name_ + "." + key);
  }

 private:
  nlohmann::json obj_ = nlohmann::json::object();
  std::string name_;
};

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j) {
  check(j.is_object(), "config root must be a JSON object");
  RunConfig c;
  nlohmann::json root = j;
  if (root.contains("alphabet")) {
    try {
      c.alphabet = root["alphabet"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception&) {
      throw Error("config: alphabet must be an array of strings");
    }
    root.erase("alphabet");
  }

  Section network(root, "network");
  network.get("input_dim", &c.input_dim);
  network.get("layers", &c.layers);
  network.get("cells", &c.cells);
  network.get("dropout", &c.dropout);
  network.get("seed", &c.net_seed);
  network.finish();
  root.erase("network");

  Section window(root, "window");
  window.get("unroll", &c.unroll);
  window.get("step", &c.step);
  window.get("streams", &c.n_streams);
  window.finish();
  root.erase("window");

  Section optimizer(root, "optimizer");
  std::string kind = c.optimizer.kind == OptimizerKind::kSgd ? "sgd"
                                                             : "adadelta";
  optimizer.get("kind", &kind);
  optimizer.get("learning_rate", &c.optimizer.learning_rate);
  optimizer.get("momentum", &c.optimizer.momentum);
  optimizer.get("rms_decay", &c.optimizer.rms_decay);
  optimizer.get("epsilon", &c.optimizer.epsilon);
  optimizer.get("max_grad_norm", &c.optimizer.max_grad_norm);
  optimizer.finish();
  root.erase("optimizer");
  if (kind == "sgd") {
    c.optimizer.kind = OptimizerKind::kSgd;
  } else if (kind == "adadelta") {
    c.optimizer.kind = OptimizerKind::kAdadelta;
  } else {
    throw Error("config: unknown optimizer kind '" + kind + "'");
  }

  Section anneal(root, "anneal");
  anneal.get("patience", &c.anneal.patience);
  anneal.get("lr_decay_factor", &c.anneal.lr_decay_factor);
  anneal.get("lr_floor", &c.anneal.lr_floor);
  anneal.finish();
  root.erase("anneal");

  Section train(root, "train");
  train.get("allow_em", &c.allow_em);
  train.get("pretrain_frames", &c.pretrain_frames);
  train.get("average_streams", &c.average_streams);
  train.get("workers", &c.n_workers);
  train.get("max_passes", &c.max_passes);
  train.get("eval_interval_frames", &c.eval_interval_frames);
  train.get("gap_frames", &c.gap_frames);
  train.get("order_seed", &c.order_seed);
  train.get("carry_state", &c.carry_state);
  train.finish();
  root.erase("train");

  Section data(root, "data");
  data.get("train_manifest", &c.train_manifest);
  data.get("dev_manifest", &c.dev_manifest);
  data.get("normalize", &c.normalize);
  data.finish();
  root.erase("data");

  Section paths(root, "paths");
  paths.get("checkpoint", &c.checkpoint_path);
  paths.get("metrics", &c.metrics_path);
  paths.finish();
  root.erase("paths");

  for (const auto& [key, value] : root.items())
    throw Error("config: unknown section '" + key + "'");

  check(c.input_dim >= 0, "config: input_dim must be nonnegative");
  check(c.layers >= 1 && c.cells >= 1, "config: need layers >= 1, cells >= 1");
  check(c.dropout >= 0.0 && c.dropout < 1.0, "config: dropout in [0, 1)");
  check(c.step >= 1, "config: step (h') must be at least 1");
  check(c.unroll >= c.step, "config: unroll (h) must be at least step (h')");
  check(c.n_streams >= 1, "config: need at least one stream");
  check(c.optimizer.learning_rate > 0.0, "config: learning rate must be > 0");
  check(c.n_workers >= 1, "config: need at least one worker");
  check(c.max_passes >= 1, "config: need at least one pass");
  check(c.gap_frames >= 0, "config: gap_frames must be nonnegative");
  check(c.pretrain_frames >= 0, "config: pretrain_frames must be nonnegative");
  return c;
}

nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["alphabet"] = c.alphabet;
  j["network"] = {{"input_dim", c.input_dim},
                  {"layers", c.layers},
                  {"cells", c.cells},
                  {"dropout", c.dropout},
                  {"seed", c.net_seed}};
  j["window"] = {{"unroll", c.unroll}, {"step", c.step},
                 {"streams", c.n_streams}};
  j["optimizer"] = {
      {"kind", c.optimizer.kind == OptimizerKind::kSgd ? "sgd" : "adadelta"},
      {"learning_rate", c.optimizer.learning_rate},
      {"momentum", c.optimizer.momentum},
      {"rms_decay", c.optimizer.rms_decay},
      {"epsilon", c.optimizer.epsilon},
      {"max_grad_norm", c.optimizer.max_grad_norm}};
  j["anneal"] = {{"patience", c.anneal.patience},
                 {"lr_decay_factor", c.anneal.lr_decay_factor},
                 {"lr_floor", c.anneal.lr_floor}};
  j["train"] = {{"allow_em", c.allow_em},
                {"pretrain_frames", c.pretrain_frames},
                {"average_streams", c.average_streams},
                {"workers", c.n_workers},
                {"max_passes", c.max_passes},
                {"eval_interval_frames", c.eval_interval_frames},
                {"gap_frames", c.gap_frames},
                {"order_seed", c.order_seed},
                {"carry_state", c.carry_state}};
  j["data"] = {{"train_manifest", c.train_manifest},
               {"dev_manifest", c.dev_manifest},
               {"normalize", c.normalize}};
  j["paths"] = {{"checkpoint", c.checkpoint_path},
                {"metrics", c.metrics_path}};
  return j;
}

void apply_override(nlohmann::json* j, const std::string& spec) {
  const size_t eq = spec.find('=');
  check(eq != std::string::npos && eq > 0,
        "override must look like key.path=value: " + spec);
  const std::string value = spec.substr(eq + 1);

  nlohmann::json* node = j;
  std::istringstream path(spec.substr(0, eq));
  std::string part, next;
  check(static_cast<bool>(std::getline(path, part, '.')),
        "override has an empty key: " + spec);
  while (std::getline(path, next, '.')) {
    check(!next.empty(), "override has an empty path component: " + spec);
    if (!node->contains(part)) (*node)[part] = nlohmann::json::object();
    node = &(*node)[part];
    check(node->is_object(), "override descends into a non-object: " + spec);
    part = next;
  }

  nlohmann::json parsed = nlohmann::json::parse(value, nullptr,
                                                /*allow_exceptions=*/false);
  (*node)[part] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
}

RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides) {
  nlohmann::json j = nlohmann::json::object();
  if (!path.empty()) {
    std::ifstream f(path);
    check(f.good(), "cannot open config: " + path);
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw Error("bad config " + path + ": " + e.what());
    }
  }
  for (const std::string& o : overrides) apply_override(&j, o);
  return run_config_from_json(j);
}

}  // namespace octc
