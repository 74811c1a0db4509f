#include "quadlab/harness/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "quadlab/errors.hpp"

namespace quadlab::harness {

using nlohmann::json;

RunConfig Checkpoint::run_config() const {
  RunConfig cfg;
  apply_config_entries(cfg, config);
  return cfg;
}

namespace {

json spec_to_json(const net::NetworkSpec& spec) {
  json layers = json::array();
  for (const auto& l : spec.layers) {
    layers.push_back({{"input", l.input_size},
                      {"output", l.output_size},
                      {"activation", net::to_string(l.activation)},
                      {"bound", l.bound}});
  }
  return layers;
}

net::NetworkSpec spec_from_json(const json& j) {
  net::NetworkSpec spec;
  for (const auto& l : j.at("layers")) {
    net::LayerSpec layer;
    layer.input_size = l.at("input").get<std::size_t>();
    layer.output_size = l.at("output").get<std::size_t>();
    layer.activation = net::activation_from_string(l.at("activation").get<std::string>());
    layer.bound = l.at("bound").get<double>();
    spec.layers.push_back(layer);
  }
  spec.validate();
  return spec;
}

json network_to_json(const net::ParamVector& p) {
  return {{"layers", spec_to_json(p.spec)}, {"params", p.values}};
}

net::ParamVector network_from_json(const json& j, const std::string& name) {
  net::ParamVector p;
  p.spec = spec_from_json(j);
  p.values = j.at("params").get<std::vector<double>>();
  if (p.values.size() != p.spec.parameter_count()) {
    throw LoadError("checkpoint: parameter length mismatch for " + name + " (expected " +
                    std::to_string(p.spec.parameter_count()) + ", found " +
                    std::to_string(p.values.size()) + ")");
  }
  return p;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& c) {
  json critics = json::array();
  for (const auto& [name, params] : c.critics) {
    json entry = network_to_json(params);
    entry["name"] = name;
    critics.push_back(entry);
  }
  json doc = {
      {"format_version", c.format_version},
      {"algorithm", to_string(c.algorithm)},
      {"actor", network_to_json(c.actor)},
      {"critics", critics},
      {"config", c.config},
      {"progress",
       {{"completed", c.progress.completed},
        {"env_steps", c.progress.env_steps},
        {"actor_updates", c.progress.actor_updates},
        {"best_return", std::isfinite(c.progress.best_return) ? json(c.progress.best_return) : json()},
        {"aborted", c.progress.aborted}}},
  };
  return doc.dump(1) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw LoadError(std::string("checkpoint: malformed document: ") + e.what());
  }
  try {
    if (!doc.is_object()) throw LoadError("checkpoint: malformed document: not an object");
    Checkpoint c;
    c.format_version = doc.at("format_version").get<int>();
    if (c.format_version != kCheckpointVersion) {
      throw LoadError("checkpoint: unsupported format_version " + std::to_string(c.format_version) +
                      " (expected " + std::to_string(kCheckpointVersion) + ")");
    }
    c.algorithm = algorithm_from_string(doc.at("algorithm").get<std::string>());
    c.actor = network_from_json(doc.at("actor"), "actor");
    for (const auto& entry : doc.at("critics")) {
      const auto name = entry.at("name").get<std::string>();
      c.critics.emplace_back(name, network_from_json(entry, name));
    }
    c.config = doc.at("config").get<std::map<std::string, std::string>>();
    const auto& p = doc.at("progress");
    c.progress.completed = p.at("completed").get<std::uint64_t>();
    c.progress.env_steps = p.at("env_steps").get<std::uint64_t>();
    c.progress.actor_updates = p.at("actor_updates").get<std::uint64_t>();
    c.progress.best_return = p.at("best_return").is_null() ? -INFINITY : p.at("best_return").get<double>();
    c.progress.aborted = p.at("aborted").get<bool>();
    return c;
  } catch (const LoadError&) {
    throw;
  } catch (const json::exception& e) {
    throw LoadError(std::string("checkpoint: malformed document: ") + e.what());
  } catch (const Error& e) {
    throw LoadError(std::string("checkpoint: malformed document: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(checkpoint);
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("checkpoint: cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return checkpoint_from_json(buffer.str());
}

}  // namespace quadlab::harness
