#include <cstdio>
#include <map>

#include "metronome/config.hpp"
#include "metronome/error.hpp"

namespace metronome {
namespace {

// Defaults shared by every preset: three threads, 10 us target, 500 us
// long timer, and a 29.25 Mpps drain rate calibrated so that 14.88 Mpps
// of offered load gives rho ~= 0.5087 (the measured B/(V+B) at a 10 us
// target).
constexpr const char* kBase = R"(m_threads=3
n_queues=1
t_short=10us
t_long=500us
target_vacation=10us
mu=29.25mpps
batch_size=32
wake_overhead=1us
lock_overhead=0ns
capacity=4096
adaptation=on
alpha=0.1
rho_init=0.5
t_short_min=1us
feed_empty_cycles=on
jitter_kind=none
seed_arrivals=1
seed_jitter=2
seed_queue=3
mode=metronome
record_cycles=on
trace_interval=1ms
)";

std::string table1_row(const char* target) {
  return std::string(kBase) + "name=table1\ntarget_vacation=" + target +
         "\narrival_kind=cbr\nrate=14.88mpps\nhorizon=1s\nwarmup=50ms\n";
}

// Equal short and long timers with adaptation off: the vacation law is
// the same at any load. The drain rate is lowered to keep the event count
// small; the vacation distribution does not depend on mu.
std::string fig3(int m) {
  return std::string(kBase) + "name=fig3\nm_threads=" + std::to_string(m) +
         R"(
t_short=50us
t_long=50us
adaptation=off
mu=2mpps
arrival_kind=poisson
load=0.8
horizon=15s
warmup=100ms
vacation_bin=1us
vacation_hist_max=100us
trace_interval=100ms
)";
}

struct Preset {
  std::string description;
  std::string text;
};

std::string ramp_steps_text() {
  std::string s;
  for (const auto& step : standard_ramp_profile().ramp_steps) {
    if (!s.empty()) s += ',';
    char rate[40];
    std::snprintf(rate, sizeof rate, "%.17gpps", step.rate);
    s += format_duration(step.duration) + ':' + rate;
  }
  return s;
}

const std::map<std::string, Preset, std::less<>>& preset_table() {
  static const std::map<std::string, Preset, std::less<>> table = [] {
    std::map<std::string, Preset, std::less<>> t;
    t["fig3"] = {"vacation PDF vs model, M=3, t_short=t_long=50us, rho=0.8", fig3(3)};
    t["fig3-m2"] = {"vacation PDF vs model, M=2", fig3(2)};
    t["fig3-m5"] = {"vacation PDF vs model, M=5", fig3(5)};
    t["fig4"] = {"base point for the t_long sweep at 14.88 Mpps",
                 std::string(kBase) + R"(name=fig4
arrival_kind=poisson
rate=14.88mpps
horizon=1s
warmup=50ms
)"};
    t["fig5"] = {"base point for the thread-count sweep at 14.88 Mpps",
                 std::string(kBase) + R"(name=fig5
arrival_kind=poisson
rate=14.88mpps
horizon=1s
warmup=50ms
)"};
    t["fig7-ramp"] = {"60 s step ramp to 14 Mpps and back, adaptation on",
                      std::string(kBase) + "name=fig7-ramp\narrival_kind=ramp\nramp_steps=" +
                          ramp_steps_text() + R"(
horizon=60s
window=2s
trace_interval=10ms
record_cycles=off
)"};
    t["table1"] = {"target vacation 10 us at 14.88 Mpps", table1_row("10us")};
    t["table1-row1"] = {"target vacation 5 us at 14.88 Mpps", table1_row("5us")};
    t["table1-row2"] = {"target vacation 10 us at 14.88 Mpps", table1_row("10us")};
    t["table1-row3"] = {"target vacation 12 us at 14.88 Mpps", table1_row("12us")};
    t["table1-row4"] = {"target vacation 15 us at 14.88 Mpps", table1_row("15us")};
    t["table1-row5"] = {"target vacation 20 us at 14.88 Mpps", table1_row("20us")};
    // Flow 5 hashes to queue index 2 under seed_arrivals=1 with 3 queues.
    t["table4-unbalanced"] = {"3 queues, one flow carrying 30% of 37 Mpps",
                              std::string(kBase) + R"(name=table4-unbalanced
m_threads=6
n_queues=3
target_vacation=15us
arrival_kind=flowmix
rate=37mpps
flows=0.3:5,0.7:random
horizon=1s
warmup=50ms
)"};
    t["multiqueue"] = {"8 threads on 4 queues at loads 0.2/0.4/0.6/0.8",
                       std::string(kBase) + R"(name=multiqueue
m_threads=8
n_queues=4
arrival_kind=poisson
load=2.0
queue_weights=0.1,0.2,0.3,0.4
horizon=1s
warmup=100ms
)"};
    t["always-poll"] = {"static busy-polling baseline at 14.88 Mpps",
                        std::string(kBase) + R"(name=always-poll
mode=always_poll
m_threads=1
arrival_kind=poisson
rate=14.88mpps
horizon=200ms
)"};
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<PresetInfo>& presets() {
  static const std::vector<PresetInfo> list = [] {
    std::vector<PresetInfo> out;
    for (const auto& [name, p] : preset_table()) out.push_back({name, p.description});
    return out;
  }();
  return list;
}

std::optional<std::string> preset_text(std::string_view name) {
  const auto& t = preset_table();
  const auto it = t.find(name);
  if (it == t.end()) return std::nullopt;
  return it->second.text;
}

ScenarioConfig preset_config(std::string_view name, const std::vector<KeyValue>& overrides) {
  const auto text = preset_text(name);
  if (!text) throw ConfigError({"unknown preset '" + std::string(name) + "'"});
  return parse_config(*text, overrides);
}

}  // namespace metronome
