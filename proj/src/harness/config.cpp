#include "quadlab/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "quadlab/errors.hpp"

namespace quadlab::harness {

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "ddpg") return Algorithm::ddpg;
  if (name == "td3") return Algorithm::td3;
  if (name == "cem-ddpg" || name == "cem_ddpg") return Algorithm::cem_ddpg;
  if (name == "cem-td3" || name == "cem_td3") return Algorithm::cem_td3;
  throw ConfigError("unknown algorithm '" + name + "'");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::ddpg:
      return "ddpg";
    case Algorithm::td3:
      return "td3";
    case Algorithm::cem_ddpg:
      return "cem-ddpg";
    case Algorithm::cem_td3:
      return "cem-td3";
  }
  return "td3";
}

bool is_evolutionary(Algorithm algorithm) {
  return algorithm == Algorithm::cem_ddpg || algorithm == Algorithm::cem_td3;
}

void RunConfig::validate() const {
  if (budget < 1) throw ConfigError("budget must be >= 1");
  if (t_max < 1) throw ConfigError("env.t_max must be >= 1");
  if (hidden.empty()) throw ConfigError("net.hidden needs at least one layer");
  for (const auto h : hidden)
    if (h == 0) throw ConfigError("net.hidden widths must be positive");
  if (buffer_capacity == 0) throw ConfigError("rl.buffer_capacity must be positive");
  if (!(rough_amplitude >= 0.0)) throw ConfigError("env.rough_amplitude must be >= 0");
  if (!(terrain_cell_size > 0.0)) throw ConfigError("env.terrain_cell_size must be positive");
  if (cem.population < 2) throw ConfigError("cem.population must be >= 2");
  if (cem.elites < 1 || cem.elites > cem.population)
    throw ConfigError("cem.elites must be in [1, cem.population]");
  if (!(cem.initial_variance >= 0.0) || !(cem.noise_initial >= 0.0) || !(cem.noise_final >= 0.0))
    throw ConfigError("cem variances must be >= 0");
  if (!(cem.noise_decay > 0.0 && cem.noise_decay <= 1.0))
    throw ConfigError("cem.noise_decay must be in (0, 1]");
  if (!(cem.grad_steps_ratio >= 0.0)) throw ConfigError("cem.grad_steps_ratio must be >= 0");
  try {
    robot.validate();
    rl.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (rl.action_bound != robot.action_bound)
    throw ConfigError("rl action bound must equal the robot action bound");
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ConfigError("config key '" + key + "': '" + text + "' is not a non-negative integer");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("config key '" + key + "': '" + text + "' is not a boolean");
}

std::string format_list(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + std::to_string(v[k]);
  return out;
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("config key '" + key + "': empty list item");
    out.push_back(parse_uint(key, item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

struct Field {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

Field real(std::string key, double RunConfig::*m) {
  return {key, [m](const RunConfig& c) { return format_double(c.*m); },
          [m, key](RunConfig& c, const std::string& v) { c.*m = parse_double(key, v); }};
}

template <typename Getter>
Field real_at(std::string key, Getter ref) {
  return {key, [ref](const RunConfig& c) { return format_double(ref(const_cast<RunConfig&>(c))); },
          [ref, key](RunConfig& c, const std::string& v) { ref(c) = parse_double(key, v); }};
}

template <typename Getter>
Field count_at(std::string key, Getter ref) {
  return {key,
          [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); },
          [ref, key](RunConfig& c, const std::string& v) {
            using T = std::remove_reference_t<decltype(ref(c))>;
            ref(c) = static_cast<T>(parse_uint(key, v));
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"algorithm", [](const RunConfig& c) { return to_string(c.algorithm); },
                 [](RunConfig& c, const std::string& v) { c.algorithm = algorithm_from_string(v); }});
    f.push_back(count_at("seed", [](RunConfig& c) -> std::uint64_t& { return c.master_seed; }));
    f.push_back(count_at("budget", [](RunConfig& c) -> std::uint64_t& { return c.budget; }));
    f.push_back(count_at("max_env_steps", [](RunConfig& c) -> std::uint64_t& { return c.max_env_steps; }));
    f.push_back(count_at("env.t_max", [](RunConfig& c) -> std::uint64_t& { return c.t_max; }));
    f.push_back(real_at("env.body_width", [](RunConfig& c) -> double& { return c.robot.body_width; }));
    f.push_back(real_at("env.body_height", [](RunConfig& c) -> double& { return c.robot.body_height; }));
    f.push_back(real_at("env.upper_leg_length",
                        [](RunConfig& c) -> double& { return c.robot.upper_leg_length; }));
    f.push_back(real_at("env.lower_leg_length",
                        [](RunConfig& c) -> double& { return c.robot.lower_leg_length; }));
    f.push_back(real_at("env.pd_kp", [](RunConfig& c) -> double& { return c.robot.pd_kp; }));
    f.push_back(real_at("env.pd_kd", [](RunConfig& c) -> double& { return c.robot.pd_kd; }));
    f.push_back(real_at("env.joint_inertia", [](RunConfig& c) -> double& { return c.robot.joint_inertia; }));
    f.push_back(real_at("env.dt", [](RunConfig& c) -> double& { return c.robot.dt; }));
    f.push_back(count_at("env.substeps", [](RunConfig& c) -> int& { return c.robot.substeps; }));
    f.push_back(real_at("env.contact_stiffness",
                        [](RunConfig& c) -> double& { return c.robot.contact_stiffness; }));
    f.push_back(real_at("env.contact_damping",
                        [](RunConfig& c) -> double& { return c.robot.contact_damping; }));
    f.push_back(real_at("env.friction", [](RunConfig& c) -> double& { return c.robot.friction; }));
    f.push_back(real_at("env.tangential_damping",
                        [](RunConfig& c) -> double& { return c.robot.tangential_damping; }));
    f.push_back(real_at("env.gravity", [](RunConfig& c) -> double& { return c.robot.gravity; }));
    f.push_back(real_at("env.nominal_hip", [](RunConfig& c) -> double& { return c.robot.nominal_hip; }));
    f.push_back(real_at("env.nominal_knee", [](RunConfig& c) -> double& { return c.robot.nominal_knee; }));
    f.push_back(real_at("env.fall_height_fraction",
                        [](RunConfig& c) -> double& { return c.robot.fall_height_fraction; }));
    f.push_back(real_at("env.tilt_limit", [](RunConfig& c) -> double& { return c.robot.tilt_limit; }));
    f.push_back(real_at("env.reset_joint_noise",
                        [](RunConfig& c) -> double& { return c.robot.reset_joint_noise; }));
    f.push_back(real("env.rough_amplitude", &RunConfig::rough_amplitude));
    f.push_back(real("env.terrain_cell_size", &RunConfig::terrain_cell_size));
    f.push_back({"net.hidden", [](const RunConfig& c) { return format_list(c.hidden); },
                 [](RunConfig& c, const std::string& v) { c.hidden = parse_list("net.hidden", v); }});
    f.push_back(real_at("rl.gamma", [](RunConfig& c) -> double& { return c.rl.gamma; }));
    f.push_back(real_at("rl.tau", [](RunConfig& c) -> double& { return c.rl.tau; }));
    f.push_back(real_at("rl.actor_lr", [](RunConfig& c) -> double& { return c.rl.actor_lr; }));
    f.push_back(real_at("rl.critic_lr", [](RunConfig& c) -> double& { return c.rl.critic_lr; }));
    f.push_back(count_at("rl.batch_size", [](RunConfig& c) -> std::size_t& { return c.rl.batch_size; }));
    f.push_back(real_at("rl.exploration_sigma",
                        [](RunConfig& c) -> double& { return c.rl.exploration_sigma; }));
    f.push_back(count_at("rl.policy_delay", [](RunConfig& c) -> std::size_t& { return c.rl.policy_delay; }));
    f.push_back(real_at("rl.target_noise_sigma",
                        [](RunConfig& c) -> double& { return c.rl.target_noise_sigma; }));
    f.push_back(real_at("rl.target_noise_clip",
                        [](RunConfig& c) -> double& { return c.rl.target_noise_clip; }));
    f.push_back(count_at("rl.buffer_capacity",
                         [](RunConfig& c) -> std::size_t& { return c.buffer_capacity; }));
    f.push_back(count_at("rl.warmup_steps", [](RunConfig& c) -> std::uint64_t& { return c.warmup_steps; }));
    f.push_back(count_at("cem.population", [](RunConfig& c) -> std::size_t& { return c.cem.population; }));
    f.push_back(count_at("cem.elites", [](RunConfig& c) -> std::size_t& { return c.cem.elites; }));
    f.push_back(real_at("cem.initial_variance",
                        [](RunConfig& c) -> double& { return c.cem.initial_variance; }));
    f.push_back(real_at("cem.noise_initial", [](RunConfig& c) -> double& { return c.cem.noise_initial; }));
    f.push_back(real_at("cem.noise_decay", [](RunConfig& c) -> double& { return c.cem.noise_decay; }));
    f.push_back(real_at("cem.noise_final", [](RunConfig& c) -> double& { return c.cem.noise_final; }));
    f.push_back(real_at("cem.grad_steps_ratio",
                        [](RunConfig& c) -> double& { return c.cem.grad_steps_ratio; }));
    f.push_back(count_at("cem.max_grad_steps",
                         [](RunConfig& c) -> std::uint64_t& { return c.cem.max_grad_steps; }));
    f.push_back({"log.wall_time", [](const RunConfig& c) { return std::string(c.record_wall_time ? "true" : "false"); },
                 [](RunConfig& c, const std::string& v) { c.record_wall_time = parse_bool("log.wall_time", v); }});
    return f;
  }();
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::map<std::string, std::string> config_entries(const RunConfig& config) {
  std::map<std::string, std::string> out;
  for (const auto& f : fields()) out[f.key] = f.get(config);
  return out;
}

void apply_config_entries(RunConfig& config, const std::map<std::string, std::string>& entries) {
  for (const auto& [key, value] : entries) {
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->set(config, value);
  }
  // the action bound is a platform constant shared by env and learners
  config.rl.action_bound = config.robot.action_bound;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> entries;
  std::stringstream ss(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(number) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(number) + ": empty key or value");
    if (!entries.emplace(key, value).second)
      throw ConfigError("config line " + std::to_string(number) + ": repeated key '" + key + "'");
  }
  return entries;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  apply_config_entries(base, parse_config_text(buffer.str()));
  base.validate();
  return base;
}

env::TerrainSettings terrain_settings(const RunConfig& config, env::TerrainKind kind) {
  env::TerrainSettings t;
  t.kind = kind;
  t.amplitude = config.rough_amplitude;
  t.cell_size = config.terrain_cell_size;
  return t;
}

}  // namespace quadlab::harness
