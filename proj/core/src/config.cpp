#include <dgavg/config.hpp>
#include <dgavg/errors.hpp>

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#ifndef DGAVG_VERSION
#define DGAVG_VERSION "unknown"
#endif

namespace dgavg {

const char* version() { return DGAVG_VERSION; }

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(key + ": expected a number, got '" + text + "'", key);
  }
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'", key);
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const long long v = parse_integer(key, text);
  if (v < -1000000000LL || v > 1000000000LL) throw ConfigError(key + ": value out of range", key);
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'", key);
}

std::vector<int> parse_sizes(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list of mesh sizes", key);
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"command", [](RunConfig& c, const std::string& v) { c.command = v; }},
      {"problem", [](RunConfig& c, const std::string& v) { c.problem = v; }},
      {"method", [](RunConfig& c, const std::string& v) { c.method = method_by_name(v); }},
      {"k", [](RunConfig& c, const std::string& v) { c.k = parse_int("k", v); }},
      {"s", [](RunConfig& c, const std::string& v) { c.s = parse_real("s", v); }},
      {"sigma0", [](RunConfig& c, const std::string& v) { c.sigma0 = parse_real("sigma0", v); }},
      {"mesh_sizes", [](RunConfig& c, const std::string& v) { c.mesh_sizes = parse_sizes("mesh_sizes", v); }},
      {"ball",
       [](RunConfig& c, const std::string& v) {
         if (v == "exact") {
           c.ball = BallMode::exact;
         } else if (v == "polygonal") {
           c.ball = BallMode::polygonal;
         } else {
           throw ConfigError("ball: expected exact or polygonal, got '" + v + "'", "ball");
         }
       }},
      {"n_circ", [](RunConfig& c, const std::string& v) { c.n_circ = parse_int("n_circ", v); }},
      {"tube_refinement",
       [](RunConfig& c, const std::string& v) { c.tube_refinement = parse_int("tube_refinement", v); }},
      {"tol", [](RunConfig& c, const std::string& v) { c.tol = parse_real("tol", v); }},
      {"max_iter", [](RunConfig& c, const std::string& v) { c.max_iter = parse_int("max_iter", v); }},
      {"seed",
       [](RunConfig& c, const std::string& v) {
         const long long s = parse_integer("seed", v);
         if (s < 0) throw ConfigError("seed must be non-negative", "seed");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"output", [](RunConfig& c, const std::string& v) { c.output = v; }},
      {"threads", [](RunConfig& c, const std::string& v) { c.threads = parse_int("threads", v); }},
      {"name", [](RunConfig& c, const std::string& v) { c.name = v; }},
      {"export_matrix", [](RunConfig& c, const std::string& v) { c.export_matrix = parse_bool("export_matrix", v); }},
      {"eoc_threshold", [](RunConfig& c, const std::string& v) { c.eoc_threshold = parse_real("eoc_threshold", v); }},
      {"h_choice",
       [](RunConfig& c, const std::string& v) {
         if (v == "global") {
           c.h_choice = HChoice::global;
         } else if (v == "per_face") {
           c.h_choice = HChoice::per_face;
         } else {
           throw ConfigError("h_choice: expected global or per_face, got '" + v + "'", "h_choice");
         }
       }},
      {"max_oracle_n", [](RunConfig& c, const std::string& v) { c.max_oracle_n = parse_int("max_oracle_n", v); }},
      {"quad_tol", [](RunConfig& c, const std::string& v) { c.quad_tol = parse_real("quad_tol", v); }},
  };
  return table;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string without_separators(std::string s) {
  std::erase(s, '_');
  return s;
}

[[noreturn]] void unknown_key(const std::string& key) {
  std::string best;
  std::size_t best_distance = 3;
  for (const auto& [known, setter] : setters()) {
    const std::size_t d = without_separators(known) == without_separators(key) ? 0 : edit_distance(known, key);
    if (d < best_distance) {
      best_distance = d;
      best = known;
    }
  }
  std::string message = "unknown key '" + key + "'";
  if (!best.empty()) message += " (did you mean '" + best + "'?)";
  throw ConfigError(message, key);
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

void apply(RunConfig& config, const std::string& raw_key, const std::string& value) {
  const std::string key = normalize_key(raw_key);
  const auto it = setters().find(key);
  if (it == setters().end()) unknown_key(key);
  it->second(config, value);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::string sizes;
  for (std::size_t i = 0; i < mesh_sizes.size(); ++i) sizes += (i ? "," : "") + std::to_string(mesh_sizes[i]);
  return {{"command", command},
          {"problem", problem},
          {"method", method_name(method)},
          {"k", std::to_string(k)},
          {"s", number(s)},
          {"sigma0", number(sigma0)},
          {"mesh_sizes", sizes},
          {"ball", ball == BallMode::exact ? "exact" : "polygonal"},
          {"n_circ", std::to_string(n_circ)},
          {"tube_refinement", std::to_string(tube_refinement)},
          {"tol", number(tol)},
          {"max_iter", std::to_string(max_iter)},
          {"seed", std::to_string(seed)},
          {"output", output},
          {"threads", std::to_string(threads)},
          {"name", name},
          {"export_matrix", export_matrix ? "true" : "false"},
          {"eoc_threshold", number(eoc_threshold)},
          {"h_choice", h_choice == HChoice::global ? "global" : "per_face"},
          {"max_oracle_n", std::to_string(max_oracle_n)},
          {"quad_tol", number(quad_tol)}};
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, setter] : setters()) keys.push_back(key);
  return keys;
}

RunConfig parse_config(std::string_view file_text, const std::vector<std::string>& args) {
  RunConfig config;
  std::istringstream in{std::string(file_text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value", trim(text));
    }
    apply(config, trim(std::string_view(text).substr(0, eq)), trim(std::string_view(text).substr(eq + 1)));
  }

  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& arg = args[i];
    if (arg.rfind("--", 0) != 0) {
      if (i == 0) {
        config.command = arg;
        continue;
      }
      throw ConfigError("unexpected argument '" + arg + "'", arg);
    }
    std::string key = arg.substr(2), value;
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.erase(eq);
    } else {
      if (i + 1 >= args.size()) throw ConfigError("flag --" + key + " needs a value", normalize_key(key));
      value = args[++i];
    }
    apply(config, key, value);
  }
  return config;
}

void validate(const RunConfig& c) {
  if (c.command.empty()) throw ConfigError("no command given (expected mesh, solve, study or probe)", "command");
  if (c.command != "mesh" && c.command != "solve" && c.command != "study" && c.command != "probe") {
    throw ConfigError("unknown command '" + c.command + "' (expected mesh, solve, study or probe)", "command");
  }
  problem_by_name(c.problem);
  if (c.k < 0 || c.k > kMaxElementDegree) {
    throw ConfigError("k must lie in [0, " + std::to_string(kMaxElementDegree) + "]", "k");
  }
  if (c.method == Method::oipg && !(c.s > 1.5)) {
    throw ConfigError("s must exceed 1.5: the overpenalized form is coercive only for s > 3/2", "s");
  }
  if (!(c.s > 1.0)) throw ConfigError("s must exceed 1 for the mollifier radius h^s", "s");
  if (!(c.sigma0 > 0.0)) throw ConfigError("sigma0 must be positive", "sigma0");
  if (c.mesh_sizes.empty()) throw ConfigError("mesh_sizes must not be empty", "mesh_sizes");
  for (std::size_t i = 0; i < c.mesh_sizes.size(); ++i) {
    if (c.mesh_sizes[i] < 1 || (i > 0 && c.mesh_sizes[i] <= c.mesh_sizes[i - 1])) {
      throw ConfigError("mesh_sizes must be positive and strictly increasing", "mesh_sizes");
    }
  }
  if (c.command == "study" && c.mesh_sizes.size() < 3) {
    throw ConfigError("a study needs at least 3 mesh sizes", "mesh_sizes");
  }
  if (c.n_circ < 3) throw ConfigError("n_circ must be at least 3", "n_circ");
  if (c.tube_refinement < 1) throw ConfigError("tube_refinement must be at least 1", "tube_refinement");
  if (!(c.tol > 0.0 && c.tol < 1.0)) throw ConfigError("tol must lie in (0, 1)", "tol");
  if (c.max_iter < 1) throw ConfigError("max_iter must be positive", "max_iter");
  if (c.threads < 1) throw ConfigError("threads must be at least 1", "threads");
  if (c.output.empty()) throw ConfigError("output must not be empty", "output");
  if (!(c.quad_tol > 0.0 && c.quad_tol < 1.0)) throw ConfigError("quad_tol must lie in (0, 1)", "quad_tol");
  if (c.max_oracle_n < 1) throw ConfigError("max_oracle_n must be positive", "max_oracle_n");
  if (c.command == "probe" && c.name.empty()) throw ConfigError("probe needs a name", "name");
}

}  // namespace dgavg
