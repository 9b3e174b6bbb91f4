#include "ceurl/bench/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace ceurl::bench {

ConfigError::ConfigError(const std::string& origin, int line, const std::string& message)
    : std::runtime_error(origin + ":" + std::to_string(line) + ": " + message), line_(line) {}

std::string to_string(Conditioning mode) {
  switch (mode) {
    case Conditioning::State: return "state";
    case Conditioning::StateSkill: return "state-skill";
    case Conditioning::StateContext: return "state-context";
    case Conditioning::StateSkillContext: return "state-skill-context";
  }
  return "state";
}

Conditioning parse_conditioning(const std::string& name) {
  for (auto m : {Conditioning::State, Conditioning::StateSkill, Conditioning::StateContext,
                 Conditioning::StateSkillContext})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown conditioning '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

long parse_long(const std::string& s) {
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  const long v = parse_long(s);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw std::invalid_argument("integer out of range: " + s);
  return static_cast<int>(v);
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("expected a finite number, got '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::pair<int, int> parse_cell(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw std::invalid_argument("expected 'row,col', got '" + s + "'");
  return {parse_int(parts[0]), parse_int(parts[1])};
}

std::string real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, const std::string& sep, F f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + f(v[i]);
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"env",
       {
           {"family", [](auto& c, const auto& v) { c.env.family = parse_family(v); }},
           {"rows", [](auto& c, const auto& v) { c.env.rows = parse_int(v); }},
           {"cols", [](auto& c, const auto& v) { c.env.cols = parse_int(v); }},
           {"layout", [](auto& c, const auto& v) { c.env.layout = parse_layout(v); }},
           {"disabled_actions",
            [](auto& c, const auto& v) {
              c.env.disabled_actions.clear();
              for (const auto& x : split(v, ',')) c.env.disabled_actions.push_back(parse_int(x));
            }},
           {"slip_probs",
            [](auto& c, const auto& v) {
              c.env.slip_probs.clear();
              for (const auto& x : split(v, ',')) c.env.slip_probs.push_back(parse_real(x));
            }},
           {"permutations",
            [](auto& c, const auto& v) {
              c.env.permutations.clear();
              for (const auto& group : split(v, ';')) {
                std::vector<int> perm;
                for (const auto& x : split(group, ' '))
                  if (!x.empty()) perm.push_back(parse_int(x));
                c.env.permutations.push_back(perm);
              }
            }},
           {"prior",
            [](auto& c, const auto& v) {
              c.env.prior.clear();
              for (const auto& x : split(v, ',')) c.env.prior.push_back(parse_real(x));
            }},
           {"start", [](auto& c, const auto& v) { c.env.start_cell = parse_cell(v); }},
           {"goal", [](auto& c, const auto& v) { c.env.goal_cell = parse_cell(v); }},
           {"discount", [](auto& c, const auto& v) { c.env.discount = parse_real(v); }},
           {"held_out", [](auto& c, const auto& v) { c.held_out = parse_bool(v); }},
       }},
      {"pretrain",
       {
           {"steps", [](auto& c, const auto& v) { c.train.pretrain_steps = parse_long(v); }},
           {"horizon", [](auto& c, const auto& v) { c.train.horizon = parse_int(v); }},
           {"reward", [](auto& c, const auto& v) { c.train.reward.kind = parse_reward_kind(v); }},
           {"conditioning", [](auto& c, const auto& v) { c.train.conditioning = parse_conditioning(v); }},
           {"num_skills", [](auto& c, const auto& v) { c.train.reward.num_skills = parse_int(v); }},
           {"ce_weight", [](auto& c, const auto& v) { c.train.reward.ce_weight = parse_real(v); }},
           {"lbs_weight", [](auto& c, const auto& v) { c.train.reward.lbs_weight = parse_real(v); }},
           {"diayn_weight", [](auto& c, const auto& v) { c.train.reward.diayn_weight = parse_real(v); }},
           {"actor_lr", [](auto& c, const auto& v) { c.train.actor_lr = parse_real(v); }},
           {"critic_lr", [](auto& c, const auto& v) { c.train.critic_lr = parse_real(v); }},
           {"disc_lr", [](auto& c, const auto& v) { c.train.disc_lr = parse_real(v); }},
           {"disc_l2", [](auto& c, const auto& v) { c.train.disc_l2 = parse_real(v); }},
           {"entropy", [](auto& c, const auto& v) { c.train.entropy = parse_real(v); }},
           {"gamma", [](auto& c, const auto& v) { c.train.gamma = parse_real(v); }},
           {"history_length", [](auto& c, const auto& v) { c.train.history_length = parse_int(v); }},
           {"transition_bag", [](auto& c, const auto& v) { c.train.transition_bag = parse_bool(v); }},
           {"buffer_capacity", [](auto& c, const auto& v) { c.train.buffer_capacity = parse_int(v); }},
           {"disc_updates", [](auto& c, const auto& v) { c.train.disc_updates = parse_int(v); }},
           {"disc_batch", [](auto& c, const auto& v) { c.train.disc_batch = parse_int(v); }},
           {"context_threshold", [](auto& c, const auto& v) { c.train.context_threshold = parse_real(v); }},
           {"episodes_per_round", [](auto& c, const auto& v) { c.train.episodes_per_round = parse_int(v); }},
           {"surprise_alpha", [](auto& c, const auto& v) { c.train.surprise_alpha = parse_real(v); }},
           {"log_interval", [](auto& c, const auto& v) { c.train.log_interval = parse_long(v); }},
       }},
      {"finetune",
       {
           {"tasks", [](auto& c, const auto& v) { c.tasks = split(v, ','); }},
           {"steps", [](auto& c, const auto& v) { c.train.finetune_steps = parse_long(v); }},
           {"mode", [](auto& c, const auto& v) { c.finetune_mode = parse_finetune_mode(v); }},
           {"beta", [](auto& c, const auto& v) { c.train.beta = parse_real(v); }},
           {"scratch_baseline", [](auto& c, const auto& v) { c.scratch_baseline = parse_bool(v); }},
           {"meta_sub_horizon", [](auto& c, const auto& v) { c.train.meta_sub_horizon = parse_int(v); }},
       }},
      {"eval",
       {
           {"episodes", [](auto& c, const auto& v) { c.eval.episodes = parse_int(v); }},
           {"horizon", [](auto& c, const auto& v) { c.eval.horizon = parse_int(v); }},
           {"gamma", [](auto& c, const auto& v) { c.eval.gamma = parse_real(v); }},
       }},
      {"run",
       {
           {"seed",
            [](auto& c, const auto& v) {
              const long s = parse_long(v);
              if (s < 0) throw std::invalid_argument("seed must be nonnegative");
              c.train.seed = static_cast<std::uint64_t>(s);
            }},
           {"threads", [](auto& c, const auto& v) { c.train.threads = parse_int(v); }},
       }},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  env.validate(held_out ? 3 : 2);
  train.validate();
  const bool skills = train.reward.has_diayn();
  const bool skill_cond =
      train.conditioning == Conditioning::StateSkill || train.conditioning == Conditioning::StateSkillContext;
  if (skills != skill_cond)
    throw std::invalid_argument("the diayn rewards go with skill conditioning and the others without it");
  if (!train.reward.has_ce()) throw std::invalid_argument("pre-training needs the ce term (ce, ce+lbs or ce+diayn)");
  if (skills && train.reward.num_skills < 2) throw std::invalid_argument("skill pre-training needs num_skills >= 2");
  if (tasks.empty()) throw std::invalid_argument("at least one fine-tuning task is required");
  std::set<std::string> seen;
  for (const auto& t : tasks) {
    make_task(env, t);
    if (!seen.insert(t).second) throw std::invalid_argument("task '" + t + "' listed twice");
  }
  if (eval.episodes < 1 || eval.horizon < 1) throw std::invalid_argument("eval needs positive episodes and horizon");
  if (!(eval.gamma > 0.0 && eval.gamma < 1.0)) throw std::invalid_argument("eval gamma must lie in (0, 1)");
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  const auto& table = schema();
  std::istringstream in(text);
  std::string raw, section;
  std::set<std::string> assigned;
  int line_no = 0, last_line = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    last_line = line_no;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(origin, line_no, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!table.count(section)) throw ConfigError(origin, line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin, line_no, "expected 'key = value'");
    if (section.empty()) throw ConfigError(origin, line_no, "key outside of any section");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const auto& keys = table.at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError(origin, line_no, "unknown key '" + key + "' in [" + section + "]");
    if (!assigned.insert(section + "." + key).second)
      throw ConfigError(origin, line_no, "duplicate key '" + key + "' in [" + section + "]");
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      throw ConfigError(origin, line_no, key + ": " + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(origin, last_line, std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string to_config_text(const ExperimentConfig& c) {
  auto cell = [](const std::optional<std::pair<int, int>>& x) {
    return x ? std::to_string(x->first) + "," + std::to_string(x->second) : std::string();
  };
  auto integer = [](int x) { return std::to_string(x); };
  auto boolean = [](bool b) { return std::string(b ? "true" : "false"); };
  std::ostringstream o;
  const auto& e = c.env;
  const auto& t = c.train;
  o << "[env]\n"
    << "family = " << to_string(e.family) << "\n"
    << "rows = " << e.rows << "\n"
    << "cols = " << e.cols << "\n"
    << "layout = " << to_string(e.layout) << "\n"
    << "disabled_actions = " << join(e.disabled_actions, ", ", integer) << "\n"
    << "slip_probs = " << join(e.slip_probs, ", ", real) << "\n"
    << "permutations = "
    << join(e.permutations, "; ", [&](const std::vector<int>& p) { return join(p, " ", integer); }) << "\n"
    << "prior = " << join(e.prior, ", ", real) << "\n";
  if (e.start_cell) o << "start = " << cell(e.start_cell) << "\n";
  if (e.goal_cell) o << "goal = " << cell(e.goal_cell) << "\n";
  o << "discount = " << real(e.discount) << "\n"
    << "held_out = " << boolean(c.held_out) << "\n\n"
    << "[pretrain]\n"
    << "steps = " << t.pretrain_steps << "\n"
    << "horizon = " << t.horizon << "\n"
    << "reward = " << to_string(t.reward.kind) << "\n"
    << "conditioning = " << to_string(t.conditioning) << "\n"
    << "num_skills = " << t.reward.num_skills << "\n"
    << "ce_weight = " << real(t.reward.ce_weight) << "\n"
    << "lbs_weight = " << real(t.reward.lbs_weight) << "\n"
    << "diayn_weight = " << real(t.reward.diayn_weight) << "\n"
    << "actor_lr = " << real(t.actor_lr) << "\n"
    << "critic_lr = " << real(t.critic_lr) << "\n"
    << "disc_lr = " << real(t.disc_lr) << "\n"
    << "disc_l2 = " << real(t.disc_l2) << "\n"
    << "entropy = " << real(t.entropy) << "\n"
    << "gamma = " << real(t.gamma) << "\n"
    << "history_length = " << t.history_length << "\n"
    << "transition_bag = " << boolean(t.transition_bag) << "\n"
    << "buffer_capacity = " << t.buffer_capacity << "\n"
    << "disc_updates = " << t.disc_updates << "\n"
    << "disc_batch = " << t.disc_batch << "\n"
    << "context_threshold = " << real(t.context_threshold) << "\n"
    << "episodes_per_round = " << t.episodes_per_round << "\n"
    << "surprise_alpha = " << real(t.surprise_alpha) << "\n"
    << "log_interval = " << t.log_interval << "\n\n"
    << "[finetune]\n"
    << "tasks = " << join(c.tasks, ", ", [](const std::string& s) { return s; }) << "\n"
    << "steps = " << t.finetune_steps << "\n"
    << "mode = " << to_string(c.finetune_mode) << "\n"
    << "beta = " << real(t.beta) << "\n"
    << "scratch_baseline = " << boolean(c.scratch_baseline) << "\n"
    << "meta_sub_horizon = " << t.meta_sub_horizon << "\n\n"
    << "[eval]\n"
    << "episodes = " << c.eval.episodes << "\n"
    << "horizon = " << c.eval.horizon << "\n"
    << "gamma = " << real(c.eval.gamma) << "\n\n"
    << "[run]\n"
    << "seed = " << t.seed << "\n";
  return o.str();
}

}  // namespace ceurl::bench
