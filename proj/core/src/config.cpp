#include "metronome/config.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "metronome/error.hpp"

namespace metronome {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  s = trim(s);
  Int v{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<bool> parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
  if (s == "off" || s == "false" || s == "0" || s == "no") return false;
  return std::nullopt;
}

// Splits "12.5us" into number and suffix.
std::pair<std::string_view, std::string_view> number_and_suffix(std::string_view s) {
  s = trim(s);
  std::size_t i = 0;
  while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) ||
                          s[i] == '.' || s[i] == 'e' || s[i] == 'E' ||
                          s[i] == '+' || s[i] == '-')) {
    // an 'e' followed by a letter other than a digit/sign belongs to a suffix
    if ((s[i] == 'e' || s[i] == 'E') &&
        (i + 1 >= s.size() ||
         !(std::isdigit(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '+' ||
           s[i + 1] == '-'))) {
      break;
    }
    ++i;
  }
  return {s.substr(0, i), trim(s.substr(i))};
}

std::string fmt_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string fmt_rate(double pps) { return fmt_double(pps) + "pps"; }

std::string fmt_bool(bool b) { return b ? "on" : "off"; }

// Everything the handlers need to know beyond the config itself.
struct ParseState {
  ScenarioConfig cfg;
  std::optional<double> load;
  std::set<std::string> seen;
  std::map<std::string, std::string> where;  // key -> "line N" of its last assignment
};

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool mentions(std::string_view text, std::string_view word) {
  for (auto pos = text.find(word); pos != std::string_view::npos;
       pos = text.find(word, pos + 1)) {
    const bool left = pos == 0 || !is_word_char(text[pos - 1]);
    const auto end = pos + word.size();
    const bool right = end >= text.size() || !is_word_char(text[end]);
    if (left && right) return true;
  }
  return false;
}

using Handler = std::function<std::optional<std::string>(ParseState&, std::string_view)>;

Handler duration_key(SimDuration ScenarioConfig::*field) {
  return [field](ParseState& st, std::string_view v) -> std::optional<std::string> {
    const auto d = parse_duration(v);
    if (!d) return "expected a duration with unit ns/us/ms/s";
    st.cfg.*field = *d;
    return std::nullopt;
  };
}

template <typename Setter>
Handler duration_with(Setter set) {
  return [set](ParseState& st, std::string_view v) -> std::optional<std::string> {
    const auto d = parse_duration(v);
    if (!d) return "expected a duration with unit ns/us/ms/s";
    set(st.cfg, *d);
    return std::nullopt;
  };
}

template <typename Int, typename Setter>
Handler int_with(Setter set) {
  return [set](ParseState& st, std::string_view v) -> std::optional<std::string> {
    const auto i = parse_int<Int>(v);
    if (!i) return "expected an integer";
    set(st.cfg, *i);
    return std::nullopt;
  };
}

template <typename Setter>
Handler double_with(Setter set) {
  return [set](ParseState& st, std::string_view v) -> std::optional<std::string> {
    const auto d = parse_double(v);
    if (!d) return "expected a number";
    set(st.cfg, *d);
    return std::nullopt;
  };
}

template <typename Setter>
Handler bool_with(Setter set) {
  return [set](ParseState& st, std::string_view v) -> std::optional<std::string> {
    const auto b = parse_bool(v);
    if (!b) return "expected on/off";
    set(st.cfg, *b);
    return std::nullopt;
  };
}

template <typename Setter>
Handler rate_with(Setter set) {
  return [set](ParseState& st, std::string_view v) -> std::optional<std::string> {
    const auto r = parse_rate(v);
    if (!r) return "expected a rate with unit pps/kpps/mpps/gpps";
    set(st.cfg, *r);
    return std::nullopt;
  };
}

struct KeyDef {
  std::string help;
  Handler handler;
};

const std::map<std::string, KeyDef>& key_table() {
  static const std::map<std::string, KeyDef> table = [] {
    std::map<std::string, KeyDef> t;
    t["name"] = {"scenario label echoed in reports",
                 [](ParseState& st, std::string_view v) -> std::optional<std::string> {
                   st.cfg.name = std::string(trim(v));
                   return std::nullopt;
                 }};
    t["m_threads"] = {"number of retrieval threads M",
                      int_with<int>([](ScenarioConfig& c, int v) { c.m_threads = v; })};
    t["n_queues"] = {"number of receive queues N",
                     int_with<int>([](ScenarioConfig& c, int v) { c.n_queues = v; })};
    t["t_short"] = {"short timer (fixed, or initial when adapting)",
                    duration_key(&ScenarioConfig::t_short)};
    t["t_long"] = {"long timer used by backup threads", duration_key(&ScenarioConfig::t_long)};
    t["target_vacation"] = {"target mean vacation period",
                            duration_key(&ScenarioConfig::target_vacation)};
    t["mu"] = {"per-queue retrieval rate",
               rate_with([](ScenarioConfig& c, double v) { c.drain.mu_rate = v; })};
    t["batch_size"] = {"packets per receive call", int_with<std::uint32_t>([](ScenarioConfig& c, std::uint32_t v) {
                         c.drain.batch_size = v;
                       })};
    t["wake_overhead"] = {"awake time charged per wake", duration_with([](ScenarioConfig& c, SimDuration d) {
                            c.drain.wake_overhead = d;
                          })};
    t["lock_overhead"] = {"awake time charged per trylock", duration_with([](ScenarioConfig& c, SimDuration d) {
                            c.drain.lock_overhead = d;
                          })};
    t["capacity"] = {"receive ring size in packets", int_with<std::uint32_t>([](ScenarioConfig& c, std::uint32_t v) {
                       c.queue_capacity = v;
                     })};
    t["arrival_kind"] = {"poisson | cbr | ramp | flowmix",
                         [](ParseState& st, std::string_view v) -> std::optional<std::string> {
                           const auto k = parse_arrival_kind(std::string(trim(v)));
                           if (!k) return "expected poisson, cbr, ramp or flowmix";
                           st.cfg.arrivals.kind = *k;
                           return std::nullopt;
                         }};
    t["rate"] = {"aggregate offered rate",
                 rate_with([](ScenarioConfig& c, double v) { c.arrivals.rate = v; })};
    t["load"] = {"offered rate as a fraction of mu (overrides rate)",
                 [](ParseState& st, std::string_view v) -> std::optional<std::string> {
                   const auto d = parse_double(v);
                   if (!d || *d < 0.0) return "expected a non-negative number";
                   st.load = *d;
                   return std::nullopt;
                 }};
    t["ramp_steps"] = {"comma list of duration:rate steps",
                       [](ParseState& st, std::string_view v) -> std::optional<std::string> {
                         std::vector<RampStep> steps;
                         for (auto item : split(v, ',')) {
                           const auto parts = split(item, ':');
                           if (parts.size() != 2) return "expected duration:rate items";
                           const auto d = parse_duration(parts[0]);
                           const auto r = parse_rate(parts[1]);
                           if (!d || !r) return "bad ramp step '" + std::string(item) + "'";
                           steps.push_back({*d, *r});
                         }
                         st.cfg.arrivals.ramp_steps = std::move(steps);
                         return std::nullopt;
                       }};
    t["flows"] = {"comma list of weight:flow_id (or weight:random)",
                  [](ParseState& st, std::string_view v) -> std::optional<std::string> {
                    std::vector<FlowShare> flows;
                    for (auto item : split(v, ',')) {
                      const auto parts = split(item, ':');
                      if (parts.size() != 2) return "expected weight:flow items";
                      const auto w = parse_double(parts[0]);
                      if (!w) return "bad flow weight '" + std::string(parts[0]) + "'";
                      FlowShare f{*w, std::nullopt};
                      if (parts[1] != "random") {
                        const auto id = parse_int<std::uint64_t>(parts[1]);
                        if (!id) return "bad flow id '" + std::string(parts[1]) + "'";
                        f.flow_id = *id;
                      }
                      flows.push_back(f);
                    }
                    st.cfg.arrivals.flows = std::move(flows);
                    return std::nullopt;
                  }};
    t["queue_weights"] = {"comma list of per-queue traffic shares",
                          [](ParseState& st, std::string_view v) -> std::optional<std::string> {
                            std::vector<double> w;
                            if (!trim(v).empty()) {
                              for (auto item : split(v, ',')) {
                                const auto d = parse_double(item);
                                if (!d) return "bad queue weight '" + std::string(item) + "'";
                                w.push_back(*d);
                              }
                            }
                            st.cfg.arrivals.queue_weights = std::move(w);
                            return std::nullopt;
                          }};
    t["seed_arrivals"] = {"arrival stream and flow hash seed",
                          int_with<std::uint64_t>([](ScenarioConfig& c, std::uint64_t v) {
                            c.arrivals.seed = v;
                          })};
    t["seed_jitter"] = {"wake jitter seed", int_with<std::uint64_t>([](ScenarioConfig& c, std::uint64_t v) {
                          c.jitter.seed = v;
                        })};
    t["seed_queue"] = {"initial phases and backup queue choice seed",
                       int_with<std::uint64_t>([](ScenarioConfig& c, std::uint64_t v) { c.seed_queue = v; })};
    t["jitter_kind"] = {"none | constant | uniform | heavy_tail",
                        [](ParseState& st, std::string_view v) -> std::optional<std::string> {
                          const auto s = trim(v);
                          if (s == "none") st.cfg.jitter.kind = JitterKind::none;
                          else if (s == "constant") st.cfg.jitter.kind = JitterKind::constant;
                          else if (s == "uniform") st.cfg.jitter.kind = JitterKind::uniform;
                          else if (s == "heavy_tail") st.cfg.jitter.kind = JitterKind::heavy_tail;
                          else return "expected none, constant, uniform or heavy_tail";
                          return std::nullopt;
                        }};
    t["jitter_prob"] = {"fraction of wakes that are delayed",
                        double_with([](ScenarioConfig& c, double v) { c.jitter.probability = v; })};
    t["jitter_a"] = {"constant delay, uniform lower bound, or Pareto scale",
                     duration_with([](ScenarioConfig& c, SimDuration d) { c.jitter.a = d; })};
    t["jitter_b"] = {"uniform upper bound",
                     duration_with([](ScenarioConfig& c, SimDuration d) { c.jitter.b = d; })};
    t["jitter_shape"] = {"Pareto tail index",
                         double_with([](ScenarioConfig& c, double v) { c.jitter.shape = v; })};
    t["adaptation"] = {"adapt t_short from the load estimate (on/off)",
                       bool_with([](ScenarioConfig& c, bool b) { c.adaptation.enabled = b; })};
    t["alpha"] = {"EWMA weight of the newest cycle",
                  double_with([](ScenarioConfig& c, double v) { c.adaptation.alpha = v; })};
    t["rho_init"] = {"initial load estimate",
                     double_with([](ScenarioConfig& c, double v) { c.adaptation.rho_init = v; })};
    t["t_short_min"] = {"lower clamp on the adapted short timer",
                        duration_with([](ScenarioConfig& c, SimDuration d) { c.adaptation.t_short_min = d; })};
    t["t_short_max"] = {"upper clamp on the adapted short timer (0ns: (M/N)*target*1.1)",
                        duration_with([](ScenarioConfig& c, SimDuration d) { c.adaptation.t_short_max = d; })};
    t["feed_empty_cycles"] = {"feed B=0 samples from empty acquisitions (on/off)",
                              bool_with([](ScenarioConfig& c, bool b) {
                                c.adaptation.feed_empty_cycles = b;
                              })};
    t["mode"] = {"metronome | always_poll",
                 [](ParseState& st, std::string_view v) -> std::optional<std::string> {
                   const auto s = trim(v);
                   if (s == "metronome") st.cfg.mode = PollMode::metronome;
                   else if (s == "always_poll") st.cfg.mode = PollMode::always_poll;
                   else return "expected metronome or always_poll";
                   return std::nullopt;
                 }};
    t["horizon"] = {"simulated duration", duration_key(&ScenarioConfig::horizon)};
    t["warmup"] = {"initial span excluded from statistics", duration_key(&ScenarioConfig::warmup)};
    t["output_dir"] = {"report directory",
                       [](ParseState& st, std::string_view v) -> std::optional<std::string> {
                         st.cfg.output_dir = std::string(trim(v));
                         return std::nullopt;
                       }};
    t["record_cycles"] = {"keep every cycle record (on/off)",
                          bool_with([](ScenarioConfig& c, bool b) { c.record_cycles = b; })};
    t["trace_interval"] = {"controller trace sampling period (0ns: every cycle)",
                           duration_key(&ScenarioConfig::trace_interval)};
    t["window"] = {"width of offered/served counting windows (0ns: off)",
                   duration_key(&ScenarioConfig::window)};
    t["vacation_bin"] = {"vacation histogram bin width", duration_key(&ScenarioConfig::vacation_bin)};
    t["vacation_hist_max"] = {"vacation histogram range (0ns: 2 * t_long)",
                              duration_key(&ScenarioConfig::vacation_hist_max)};
    t["verify_invariants"] = {"check lock and ring invariants after every event",
                              bool_with([](ScenarioConfig& c, bool b) { c.verify_invariants = b; })};
    return t;
  }();
  return table;
}

void check_required(const ParseState& st, std::vector<std::string>& issues) {
  auto need = [&](const char* key, const char* why) {
    if (!st.seen.count(key)) {
      issues.push_back(std::string("missing required key '") + key + "'" + why);
    }
  };
  need("m_threads", "");
  need("t_long", "");
  need("mu", "");
  need("horizon", "");
  need("arrival_kind", "");
  const auto kind = st.cfg.arrivals.kind;
  if (kind == ArrivalKind::ramp) {
    need("ramp_steps", " for ramp arrivals");
  } else if (!st.seen.count("load")) {
    need("rate", " (or 'load')");
  }
  if (kind == ArrivalKind::flowmix) need("flows", " for flowmix arrivals");
  if (st.cfg.adaptation.enabled) {
    need("target_vacation", " when adaptation is on");
  } else {
    need("t_short", " when adaptation is off");
  }
}

}  // namespace

std::optional<SimDuration> parse_duration(std::string_view text) {
  const auto [num, suffix] = number_and_suffix(text);
  const auto v = parse_double(num);
  if (!v || *v < 0.0) return std::nullopt;
  double scale = 0.0;
  if (suffix == "ns") scale = 1.0;
  else if (suffix == "us" || suffix == "\xC2\xB5s") scale = 1e3;
  else if (suffix == "ms") scale = 1e6;
  else if (suffix == "s") scale = 1e9;
  else return std::nullopt;
  const double ns = *v * scale;
  if (ns > 1.8e19) return std::nullopt;
  return static_cast<SimDuration>(std::llround(ns));
}

std::optional<double> parse_rate(std::string_view text) {
  const auto [num, suffix] = number_and_suffix(text);
  const auto v = parse_double(num);
  if (!v || *v < 0.0) return std::nullopt;
  if (suffix == "pps") return *v;
  if (suffix == "kpps") return *v * 1e3;
  if (suffix == "mpps" || suffix == "Mpps") return *v * 1e6;
  if (suffix == "gpps") return *v * 1e9;
  return std::nullopt;
}

std::string format_duration(SimDuration d) { return std::to_string(d) + "ns"; }

ScenarioConfig parse_config(std::string_view text, const std::vector<KeyValue>& overrides) {
  ParseState st;
  std::vector<std::string> issues;
  const auto& table = key_table();

  auto apply = [&](const std::string& where, std::string_view key, std::string_view value) {
    const auto it = table.find(std::string(key));
    if (it == table.end()) {
      issues.push_back(where + ": unknown key '" + std::string(key) + "'");
      return;
    }
    if (auto err = it->second.handler(st, value)) {
      issues.push_back(where + ": " + std::string(key) + ": " + *err);
      return;
    }
    st.seen.insert(std::string(key));
    st.where[std::string(key)] = where;
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      issues.push_back(where + ": expected key=value");
      continue;
    }
    apply(where, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  for (const auto& [k, v] : overrides) {
    apply("override --" + k, trim(k), trim(v));
  }

  if (st.load) st.cfg.arrivals.rate = *st.load * st.cfg.drain.mu_rate;
  check_required(st, issues);
  // Invariant violations point at the lines that set the keys involved.
  for (auto& p : st.cfg.problems()) {
    std::string at;
    for (const auto& [key, loc] : st.where) {
      if (!mentions(p, key)) continue;
      if (!at.empty()) at += ", ";
      at += loc;
    }
    issues.push_back((at.empty() ? "" : at + ": ") + "invalid scenario: " + p);
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return st.cfg;
}

std::string to_config_text(const ScenarioConfig& c) {
  std::ostringstream out;
  auto kv = [&](const char* key, const std::string& v) { out << key << '=' << v << '\n'; };
  kv("name", c.name);
  kv("m_threads", std::to_string(c.m_threads));
  kv("n_queues", std::to_string(c.n_queues));
  kv("t_short", format_duration(c.t_short));
  kv("t_long", format_duration(c.t_long));
  kv("target_vacation", format_duration(c.target_vacation));
  kv("mu", fmt_rate(c.drain.mu_rate));
  kv("batch_size", std::to_string(c.drain.batch_size));
  kv("wake_overhead", format_duration(c.drain.wake_overhead));
  kv("lock_overhead", format_duration(c.drain.lock_overhead));
  kv("capacity", std::to_string(c.queue_capacity));
  kv("arrival_kind", to_string(c.arrivals.kind));
  kv("rate", fmt_rate(c.arrivals.rate));
  if (!c.arrivals.ramp_steps.empty()) {
    std::string s;
    for (const auto& step : c.arrivals.ramp_steps) {
      if (!s.empty()) s += ',';
      s += format_duration(step.duration) + ':' + fmt_rate(step.rate);
    }
    kv("ramp_steps", s);
  }
  if (!c.arrivals.flows.empty()) {
    std::string s;
    for (const auto& f : c.arrivals.flows) {
      if (!s.empty()) s += ',';
      s += fmt_double(f.weight) + ':' + (f.flow_id ? std::to_string(*f.flow_id) : "random");
    }
    kv("flows", s);
  }
  if (!c.arrivals.queue_weights.empty()) {
    std::string s;
    for (double w : c.arrivals.queue_weights) {
      if (!s.empty()) s += ',';
      s += fmt_double(w);
    }
    kv("queue_weights", s);
  }
  kv("seed_arrivals", std::to_string(c.arrivals.seed));
  kv("seed_jitter", std::to_string(c.jitter.seed));
  kv("seed_queue", std::to_string(c.seed_queue));
  kv("jitter_kind", to_string(c.jitter.kind));
  kv("jitter_prob", fmt_double(c.jitter.probability));
  kv("jitter_a", format_duration(c.jitter.a));
  kv("jitter_b", format_duration(c.jitter.b));
  kv("jitter_shape", fmt_double(c.jitter.shape));
  kv("adaptation", fmt_bool(c.adaptation.enabled));
  kv("alpha", fmt_double(c.adaptation.alpha));
  kv("rho_init", fmt_double(c.adaptation.rho_init));
  kv("t_short_min", format_duration(c.adaptation.t_short_min));
  kv("t_short_max", format_duration(c.adaptation.t_short_max));
  kv("feed_empty_cycles", fmt_bool(c.adaptation.feed_empty_cycles));
  kv("mode", to_string(c.mode));
  kv("horizon", format_duration(c.horizon));
  kv("warmup", format_duration(c.warmup));
  kv("output_dir", c.output_dir);
  kv("record_cycles", fmt_bool(c.record_cycles));
  kv("trace_interval", format_duration(c.trace_interval));
  kv("window", format_duration(c.window));
  kv("vacation_bin", format_duration(c.vacation_bin));
  kv("vacation_hist_max", format_duration(c.vacation_hist_max));
  kv("verify_invariants", fmt_bool(c.verify_invariants));
  return out.str();
}

const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> keys = [] {
    std::vector<KeyInfo> out;
    for (const auto& [name, def] : key_table()) out.push_back({name, def.help});
    return out;
  }();
  return keys;
}

}  // namespace metronome
