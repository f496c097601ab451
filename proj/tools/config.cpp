#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "itmcmc/errors.hpp"

namespace itmcmc::cli {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Entries = std::map<std::string, Entry>;

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const Entry& e, const std::string& key) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last)
    fail(e.line, "key '" + key + "': cannot parse '" + e.value + "' as a number");
  return v;
}

template <typename Int>
Int to_int(const Entry& e, const std::string& key) {
  Int v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last)
    fail(e.line, "key '" + key + "': cannot parse '" + e.value + "' as an integer");
  return v;
}

std::vector<double> to_vector(const Entry& e, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    double v = 0.0;
    const char* first = tok.data();
    const char* last = first + tok.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (tok.empty() || ec != std::errc() || p != last)
      fail(e.line, "key '" + key + "': cannot parse list entry '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) fail(e.line, "key '" + key + "': empty list");
  return out;
}

Entries tokenize(const std::string& text) {
  Entries entries;
  std::stringstream ss(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(line_no, "expected 'key = value', got '" + trim(raw) + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    if (value.empty()) fail(line_no, "key '" + key + "': empty value");
    if (entries.count(key))
      fail(line_no, "duplicate key '" + key + "' (first on line " +
                        std::to_string(entries[key].line) + ")");
    entries[key] = {value, line_no, false};
  }
  return entries;
}

const std::set<std::string>& allowed_keys(Command c) {
  static const std::set<std::string> common = {
      "command", "steps", "burn_in", "thinning",
      "seed",    "replicates", "out"};
  static const std::set<std::string> target_keys = {
      "target", "target.dim", "target.mean", "target.sd", "target.mode", "x0"};
  auto make = [](std::initializer_list<std::string> extra,
                 bool with_target) {
    std::set<std::string> s = common;
    if (with_target) s.insert(target_keys.begin(), target_keys.end());
    s.insert(extra);
    return s;
  };
  static const std::set<std::string> am = make({"kappa", "gamma0"}, true);
  static const std::set<std::string> it =
      make({"temperatures", "upsilon", "proposal_sds"}, true);
  static const std::set<std::string> toy =
      make({"target", "schedule", "eps", "toy_x0"}, false);
  static const std::set<std::string> diagnose =
      make({"checks", "instances", "mc_reps"}, false);
  switch (c) {
    case Command::kRunAm: return am;
    case Command::kRunIt: return it;
    case Command::kToy: return toy;
    case Command::kDiagnose: return diagnose;
  }
  return am;  // unreachable
}

// Constraint checks that name the key and line.
void require(bool ok, const Entries& entries, const std::string& key,
             const std::string& what) {
  if (ok) return;
  const auto it = entries.find(key);
  const int line = it == entries.end() ? 0 : it->second.line;
  if (line > 0) fail(line, "key '" + key + "': " + what);
  throw ConfigError("config: key '" + key + "': " + what);
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::kRunAm: return "run-am";
    case Command::kRunIt: return "run-it";
    case Command::kToy: return "toy";
    case Command::kDiagnose: return "diagnose";
  }
  return "?";
}

Command command_from_string(const std::string& s) {
  if (s == "run-am") return Command::kRunAm;
  if (s == "run-it") return Command::kRunIt;
  if (s == "toy") return Command::kToy;
  if (s == "diagnose") return Command::kDiagnose;
  throw ConfigError("unknown command '" + s +
                    "' (expected run-am, run-it, toy, or diagnose)");
}

RunConfig parse_config(const std::string& text) {
  Entries entries = tokenize(text);

  const auto cmd_it = entries.find("command");
  if (cmd_it == entries.end())
    throw ConfigError("config: missing required key 'command'");
  RunConfig cfg;
  try {
    cfg.command = command_from_string(cmd_it->second.value);
  } catch (const ConfigError& e) {
    fail(cmd_it->second.line, e.what());
  }

  const auto& allowed = allowed_keys(cfg.command);
  for (const auto& [key, entry] : entries)
    if (!allowed.count(key))
      fail(entry.line, "unknown key '" + key + "' for command '" +
                           std::string(to_string(cfg.command)) + "'");

  auto has = [&](const std::string& k) { return entries.count(k) != 0; };
  auto get = [&](const std::string& k) -> const Entry& { return entries.at(k); };

  // Common scalars.
  if (has("steps")) cfg.steps = to_int<long long>(get("steps"), "steps");
  if (has("burn_in")) cfg.burn_in = to_int<long long>(get("burn_in"), "burn_in");
  if (has("thinning")) cfg.thinning = to_int<long long>(get("thinning"), "thinning");
  if (has("seed")) cfg.seed = to_int<std::uint64_t>(get("seed"), "seed");
  if (has("replicates")) cfg.replicates = to_int<int>(get("replicates"), "replicates");
  if (has("out")) cfg.output_path = get("out").value;

  require(cfg.steps >= 1, entries, "steps", "must be >= 1");
  require(cfg.burn_in >= 0, entries, "burn_in", "must be >= 0");
  require(cfg.burn_in < cfg.steps, entries, "burn_in",
          "must be smaller than steps");
  require(cfg.thinning >= 1, entries, "thinning", "must be >= 1");
  require(cfg.replicates >= 1, entries, "replicates", "must be >= 1");

  // Target block (sampling commands only).
  const bool sampling =
      cfg.command == Command::kRunAm || cfg.command == Command::kRunIt;
  if (sampling) {
    require(has("target"), entries, "target",
            "required for run-am/run-it (gaussian or gaussian_mixture)");
    cfg.target_name = get("target").value;
    require(cfg.target_name == "gaussian" ||
                cfg.target_name == "gaussian_mixture",
            entries, "target",
            "must be 'gaussian' or 'gaussian_mixture' for sampling commands");
    if (has("target.dim")) cfg.dim = to_int<int>(get("target.dim"), "target.dim");
    require(cfg.dim >= 1, entries, "target.dim", "must be >= 1");

    if (cfg.target_name == "gaussian") {
      cfg.target_mean.assign(cfg.dim, 0.0);
      cfg.target_sd.assign(cfg.dim, 1.0);
      if (has("target.mean")) {
        auto v = to_vector(get("target.mean"), "target.mean");
        if (v.size() == 1) v.assign(cfg.dim, v[0]);
        require(static_cast<int>(v.size()) == cfg.dim, entries, "target.mean",
                "needs 1 or target.dim entries");
        cfg.target_mean = v;
      }
      if (has("target.sd")) {
        auto v = to_vector(get("target.sd"), "target.sd");
        if (v.size() == 1) v.assign(cfg.dim, v[0]);
        require(static_cast<int>(v.size()) == cfg.dim, entries, "target.sd",
                "needs 1 or target.dim entries");
        cfg.target_sd = v;
      }
      for (double s : cfg.target_sd)
        require(s > 0.0, entries, "target.sd", "entries must be > 0");
      require(!has("target.mode"), entries, "target.mode",
              "is not a parameter of target 'gaussian'");
    } else {  // gaussian_mixture
      require(!has("target.mean"), entries, "target.mean",
              "is not a parameter of target 'gaussian_mixture'");
      if (has("target.mode"))
        cfg.mixture_mode = to_double(get("target.mode"), "target.mode");
      require(cfg.mixture_mode > 0.0, entries, "target.mode", "must be > 0");
      cfg.target_sd.assign(1, 1.0);
      if (has("target.sd")) {
        auto v = to_vector(get("target.sd"), "target.sd");
        require(v.size() == 1, entries, "target.sd",
                "mixture components share one scalar sd");
        cfg.target_sd = v;
      }
      require(cfg.target_sd[0] > 0.0, entries, "target.sd", "must be > 0");
      cfg.target_mean.clear();
    }

    cfg.x0.assign(cfg.dim, 0.0);
    if (has("x0")) {
      auto v = to_vector(get("x0"), "x0");
      if (v.size() == 1) v.assign(cfg.dim, v[0]);
      require(static_cast<int>(v.size()) == cfg.dim, entries, "x0",
              "needs 1 or target.dim entries");
      cfg.x0 = v;
    }
  }

  switch (cfg.command) {
    case Command::kRunAm: {
      if (has("kappa")) cfg.kappa = to_double(get("kappa"), "kappa");
      require(cfg.kappa > 0.0, entries, "kappa", "must be > 0");
      if (has("gamma0"))
        cfg.gamma0_scale = to_double(get("gamma0"), "gamma0");
      require(cfg.gamma0_scale >= 0.0, entries, "gamma0", "must be >= 0");
      break;
    }
    case Command::kRunIt: {
      require(has("temperatures"), entries, "temperatures",
              "required for run-it");
      cfg.temperatures = to_vector(get("temperatures"), "temperatures");
      require(cfg.temperatures.front() == 1.0, entries, "temperatures",
              "first temperature must be exactly 1");
      for (std::size_t i = 1; i < cfg.temperatures.size(); ++i)
        require(cfg.temperatures[i] > cfg.temperatures[i - 1], entries,
                "temperatures", "must be strictly ascending");
      require(has("upsilon"), entries, "upsilon", "required for run-it");
      cfg.upsilon = to_double(get("upsilon"), "upsilon");
      require(cfg.upsilon > 0.0 && cfg.upsilon < 1.0, entries, "upsilon",
              "must lie strictly inside the open interval (0,1)");
      require(has("proposal_sds"), entries, "proposal_sds",
              "required for run-it");
      cfg.proposal_sds = to_vector(get("proposal_sds"), "proposal_sds");
      require(cfg.proposal_sds.size() == cfg.temperatures.size(), entries,
              "proposal_sds", "needs one entry per temperature level");
      for (double s : cfg.proposal_sds)
        require(s > 0.0, entries, "proposal_sds", "entries must be > 0");
      break;
    }
    case Command::kToy: {
      cfg.target_name = "toy_uniform";
      if (has("target"))
        require(get("target").value == "toy_uniform", entries, "target",
                "the toy command always targets 'toy_uniform'");
      cfg.dim = 1;
      if (has("schedule")) cfg.schedule = get("schedule").value;
      const bool known_schedule =
          cfg.schedule == "default" || cfg.schedule.starts_with("constant:") ||
          cfg.schedule.starts_with("power:");
      require(known_schedule, entries, "schedule",
              "must be 'default', 'constant:<theta>' or 'power:<p>'");
      if (cfg.schedule.starts_with("constant:")) {
        Entry v{cfg.schedule.substr(9), has("schedule") ? get("schedule").line : 0,
                false};
        const double th = to_double(v, "schedule");
        require(th >= 0.0 && th <= 1.0, entries, "schedule",
                "constant theta must lie in [0,1]");
      }
      if (cfg.schedule.starts_with("power:")) {
        Entry v{cfg.schedule.substr(6), has("schedule") ? get("schedule").line : 0,
                false};
        const double p = to_double(v, "schedule");
        require(p > 0.0, entries, "schedule", "power exponent must be > 0");
      }
      if (has("eps")) cfg.toy_eps = to_double(get("eps"), "eps");
      require(cfg.toy_eps > 0.0 && cfg.toy_eps < 1.0, entries, "eps",
              "must lie in (0,1)");
      if (has("toy_x0")) cfg.toy_x0 = to_int<int>(get("toy_x0"), "toy_x0");
      require(cfg.toy_x0 == 0 || cfg.toy_x0 == 1, entries, "toy_x0",
              "must be 0 or 1");
      break;
    }
    case Command::kDiagnose: {
      if (has("checks")) cfg.checks = get("checks").value;
      static const std::set<std::string> known = {
          "brute5", "toy-grid", "empirical-bound", "drift", "am-series"};
      if (cfg.checks != "all") {
        std::stringstream ss(cfg.checks);
        std::string tok;
        while (std::getline(ss, tok, ','))
          require(known.count(trim(tok)) != 0, entries, "checks",
                  "unknown check '" + trim(tok) + "'");
      }
      if (has("instances"))
        cfg.instances = to_int<int>(get("instances"), "instances");
      require(cfg.instances >= 1, entries, "instances", "must be >= 1");
      if (has("mc_reps"))
        cfg.mc_reps = to_int<long long>(get("mc_reps"), "mc_reps");
      require(cfg.mc_reps >= 1000, entries, "mc_reps", "must be >= 1000");
      break;
    }
  }
  return cfg;
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

namespace {
std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}
}  // namespace

std::string emit_config(const RunConfig& cfg) {
  std::string out;
  auto kv = [&out](const std::string& k, const std::string& v) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  };
  kv("command", to_string(cfg.command));
  const bool sampling =
      cfg.command == Command::kRunAm || cfg.command == Command::kRunIt;
  if (sampling) {
    kv("target", cfg.target_name);
    kv("target.dim", std::to_string(cfg.dim));
    if (cfg.target_name == "gaussian") {
      kv("target.mean", join(cfg.target_mean));
      kv("target.sd", join(cfg.target_sd));
    } else {
      kv("target.mode", format_double(cfg.mixture_mode));
      kv("target.sd", join(cfg.target_sd));
    }
    kv("x0", join(cfg.x0));
  }
  switch (cfg.command) {
    case Command::kRunAm:
      kv("kappa", format_double(cfg.kappa));
      kv("gamma0", format_double(cfg.gamma0_scale));
      break;
    case Command::kRunIt:
      kv("temperatures", join(cfg.temperatures));
      kv("upsilon", format_double(cfg.upsilon));
      kv("proposal_sds", join(cfg.proposal_sds));
      break;
    case Command::kToy:
      kv("schedule", cfg.schedule);
      kv("eps", format_double(cfg.toy_eps));
      kv("toy_x0", std::to_string(cfg.toy_x0));
      break;
    case Command::kDiagnose:
      kv("checks", cfg.checks);
      kv("instances", std::to_string(cfg.instances));
      kv("mc_reps", std::to_string(cfg.mc_reps));
      break;
  }
  kv("steps", std::to_string(cfg.steps));
  kv("burn_in", std::to_string(cfg.burn_in));
  kv("thinning", std::to_string(cfg.thinning));
  kv("seed", std::to_string(cfg.seed));
  kv("replicates", std::to_string(cfg.replicates));
  kv("out", cfg.output_path);
  return out;
}

std::string config_hash(const RunConfig& cfg) {
  const std::string canon = emit_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf, 16);
}

}  // namespace itmcmc::cli
