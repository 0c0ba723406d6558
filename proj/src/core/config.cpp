#include "lbkan/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lbkan/errors.hpp"
#include "lbkan/spline.hpp"

namespace lbkan {

namespace {

using json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw UsageError(key, "invalid value for '" + key + "': " + why);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  errno = 0;
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(out)) {
    bad(key, "expected a finite number, got '" + text + "'");
  }
  return out;
}

long long parse_integer(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  errno = 0;
  char* end = nullptr;
  const long long out = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) {
    bad(key, "expected an integer, got '" + text + "'");
  }
  return out;
}

std::uint64_t parse_seed(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  errno = 0;
  char* end = nullptr;
  if (v.empty() || v.front() == '-') bad(key, "expected a non-negative integer");
  const unsigned long long out = std::strtoull(v.c_str(), &end, 10);
  if (*end != '\0' || errno == ERANGE) bad(key, "expected a non-negative integer");
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  std::string v = trim(text);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, "expected true/false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) bad(key, "expected a comma-separated list");
  return out;
}

std::vector<int> parse_widths(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const long long w = parse_integer(key, item);
    if (w < 1 || w > 4096) bad(key, "widths must be in [1, 4096]");
    out.push_back(static_cast<int>(w));
  }
  if (out.size() < 2) bad(key, "need at least input and output widths");
  if (out.front() != 4 || out.back() != 4) bad(key, "first and last widths must equal the state dimension 4");
  return out;
}

double positive(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (!(v > 0.0)) bad(key, "must be > 0");
  return v;
}

double non_negative(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (!(v >= 0.0)) bad(key, "must be >= 0");
  return v;
}

std::size_t at_least(const std::string& key, const std::string& text, long long lo) {
  const long long v = parse_integer(key, text);
  if (v < lo) bad(key, "must be >= " + std::to_string(lo));
  return static_cast<std::size_t>(v);
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

struct KeyDef {
  const char* name;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<json(const RunConfig&)> get;
};

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      {"approximator",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const std::string t = trim(v);
         if (t == "kan") c.approximator = ApproximatorKind::Kan;
         else if (t == "dnn") c.approximator = ApproximatorKind::Dnn;
         else bad(k, "expected kan or dnn");
       },
       [](const RunConfig& c) { return json(c.approximator == ApproximatorKind::Kan ? "kan" : "dnn"); }},
      {"dt", [](RunConfig& c, const std::string& k, const std::string& v) { c.dt = positive(k, v); },
       [](const RunConfig& c) { return json(c.dt); }},
      {"t_final", [](RunConfig& c, const std::string& k, const std::string& v) { c.t_final = positive(k, v); },
       [](const RunConfig& c) { return json(c.t_final); }},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = parse_seed(k, v); },
       [](const RunConfig& c) { return json(c.seed); }},
      {"integrator",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const std::string t = trim(v);
         if (t == "euler") c.integrator = Integrator::Euler;
         else if (t == "rk4") c.integrator = Integrator::Rk4;
         else bad(k, "expected euler or rk4");
       },
       [](const RunConfig& c) { return json(c.integrator == Integrator::Euler ? "euler" : "rk4"); }},
      {"kan_shape", [](RunConfig& c, const std::string& k, const std::string& v) { c.kan_shape = parse_widths(k, v); },
       [](const RunConfig& c) { return json(c.kan_shape); }},
      {"grid_size", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.grid_size = static_cast<int>(at_least(k, v, 1)); },
       [](const RunConfig& c) { return json(c.grid_size); }},
      {"spline_order", [](RunConfig& c, const std::string& k, const std::string& v) {
         const std::size_t order = at_least(k, v, 1);
         if (order > 15) bad(k, "must be <= 15");
         c.spline_order = static_cast<int>(order); },
       [](const RunConfig& c) { return json(c.spline_order); }},
      {"grid_lo", [](RunConfig& c, const std::string& k, const std::string& v) { c.grid_lo = parse_double(k, v); },
       [](const RunConfig& c) { return json(c.grid_lo); }},
      {"grid_hi", [](RunConfig& c, const std::string& k, const std::string& v) { c.grid_hi = parse_double(k, v); },
       [](const RunConfig& c) { return json(c.grid_hi); }},
      {"dnn_widths", [](RunConfig& c, const std::string& k, const std::string& v) { c.dnn_widths = parse_widths(k, v); },
       [](const RunConfig& c) { return json(c.dnn_widths); }},
      {"k_e", [](RunConfig& c, const std::string& k, const std::string& v) { c.ctrl.k_e = positive(k, v); },
       [](const RunConfig& c) { return json(c.ctrl.k_e); }},
      {"k_s", [](RunConfig& c, const std::string& k, const std::string& v) { c.ctrl.k_s = non_negative(k, v); },
       [](const RunConfig& c) { return json(c.ctrl.k_s); }},
      {"gamma", [](RunConfig& c, const std::string& k, const std::string& v) { c.ctrl.gamma = positive(k, v); },
       [](const RunConfig& c) { return json(c.ctrl.gamma); }},
      {"gamma_dnn", [](RunConfig& c, const std::string& k, const std::string& v) { c.gamma_dnn = positive(k, v); },
       [](const RunConfig& c) { return json(c.gamma_dnn); }},
      {"theta_bar", [](RunConfig& c, const std::string& k, const std::string& v) { c.ctrl.theta_bar = positive(k, v); },
       [](const RunConfig& c) { return json(c.ctrl.theta_bar); }},
      {"proj_eps", [](RunConfig& c, const std::string& k, const std::string& v) { c.ctrl.proj_eps = positive(k, v); },
       [](const RunConfig& c) { return json(c.ctrl.proj_eps); }},
      {"sgn_smoothing", [](RunConfig& c, const std::string& k, const std::string& v) { c.ctrl.sgn_smoothing = parse_bool(k, v); },
       [](const RunConfig& c) { return json(c.ctrl.sgn_smoothing); }},
      {"sgn_smoothing_delta", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.ctrl.sgn_smoothing_delta = positive(k, v); },
       [](const RunConfig& c) { return json(c.ctrl.sgn_smoothing_delta); }},
      {"x0",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const auto vals = parse_list(k, v);
         if (vals.size() != 4) bad(k, "expected 4 comma-separated values");
         c.x0 = Eigen::Vector4d(vals[0], vals[1], vals[2], vals[3]);
       },
       [](const RunConfig& c) {
         return c.x0 ? json(std::vector<double>{(*c.x0)[0], (*c.x0)[1], (*c.x0)[2], (*c.x0)[3]})
                     : json(nullptr);
       }},
      {"traj_a", [](RunConfig& c, const std::string& k, const std::string& v) { c.traj_a = parse_double(k, v); },
       [](const RunConfig& c) { return optional_number(c.traj_a); }},
      {"traj_b", [](RunConfig& c, const std::string& k, const std::string& v) { c.traj_b = parse_double(k, v); },
       [](const RunConfig& c) { return optional_number(c.traj_b); }},
      {"traj_c", [](RunConfig& c, const std::string& k, const std::string& v) { c.traj_c = parse_double(k, v); },
       [](const RunConfig& c) { return optional_number(c.traj_c); }},
      {"theta0_file", [](RunConfig& c, const std::string&, const std::string& v) { c.theta0_file = trim(v); },
       [](const RunConfig& c) { return json(c.theta0_file); }},
      {"theta0_dnn_file", [](RunConfig& c, const std::string&, const std::string& v) { c.theta0_dnn_file = trim(v); },
       [](const RunConfig& c) { return json(c.theta0_dnn_file); }},
      {"init_range", [](RunConfig& c, const std::string& k, const std::string& v) { c.init_range = positive(k, v); },
       [](const RunConfig& c) { return json(c.init_range); }},
      {"mc_candidates", [](RunConfig& c, const std::string& k, const std::string& v) { c.mc_candidates = at_least(k, v, 1); },
       [](const RunConfig& c) { return json(c.mc_candidates); }},
      {"full", [](RunConfig& c, const std::string& k, const std::string& v) { c.full = parse_bool(k, v); },
       [](const RunConfig& c) { return json(c.full); }},
      {"mc_horizon", [](RunConfig& c, const std::string& k, const std::string& v) { c.mc_horizon = positive(k, v); },
       [](const RunConfig& c) { return json(c.mc_horizon); }},
      {"runs", [](RunConfig& c, const std::string& k, const std::string& v) { c.runs = at_least(k, v, 1); },
       [](const RunConfig& c) { return json(c.runs); }},
      {"skip_transient", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.skip_transient = non_negative(k, v); },
       [](const RunConfig& c) { return json(c.skip_transient); }},
      {"csv_stride", [](RunConfig& c, const std::string& k, const std::string& v) { c.csv_stride = at_least(k, v, 1); },
       [](const RunConfig& c) { return json(c.csv_stride); }},
      {"threads", [](RunConfig& c, const std::string& k, const std::string& v) {
         const std::size_t t = at_least(k, v, 0);
         if (t > 1024) bad(k, "must be <= 1024");
         c.threads = static_cast<unsigned>(t); },
       [](const RunConfig& c) { return json(c.threads); }},
      {"decompose_points", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.decompose_points = at_least(k, v, 2); },
       [](const RunConfig& c) { return json(c.decompose_points); }},
      {"out_dir", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.out_dir = trim(v);
         if (c.out_dir.empty()) bad(k, "must not be empty"); },
       [](const RunConfig& c) { return json(c.out_dir); }},
  };
  return table;
}

std::string normalize(std::string key) {
  key = trim(key);
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  const std::string name = normalize(key);
  for (const KeyDef& def : key_table()) {
    if (name == def.name) {
      def.set(*this, name, value);
      return;
    }
  }
  throw UsageError(name, "unknown configuration key '" + name + "'");
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(line, path.string() + ":" + std::to_string(line_no) +
                                 ": expected key=value, got '" + line + "'");
    }
    set(line.substr(0, eq), line.substr(eq + 1));
  }
}

void RunConfig::validate_for(const std::string& command) const {
  if (!(grid_lo < grid_hi)) throw UsageError("grid_lo", "grid_lo must be < grid_hi");
  if (t_final < dt) throw UsageError("t_final", "t_final must be >= dt");
  if (skip_transient > t_final) {
    throw UsageError("skip_transient", "skip_transient must not exceed t_final");
  }
  if (integrator == Integrator::Rk4 && !ctrl.sgn_smoothing) {
    throw UsageError("integrator", "rk4 requires sgn_smoothing=true");
  }
  if (command == "mc-init" || command == "compare") {
    if (mc_horizon < dt) throw UsageError("mc_horizon", "mc_horizon must be >= dt");
  }
  if (command == "compare" && mc_horizon > t_final) {
    throw UsageError("mc_horizon", "mc_horizon must not exceed t_final");
  }
}

std::string RunConfig::to_json() const {
  json j = json::object();
  for (const KeyDef& def : key_table()) j[def.name] = def.get(*this);
  return j.dump(2);
}

unsigned RunConfig::effective_threads() const {
  if (threads > 0) return threads;
  return std::max(1U, std::thread::hardware_concurrency());
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const KeyDef& def : key_table()) out.emplace_back(def.name);
    return out;
  }();
  return names;
}

}  // namespace lbkan
