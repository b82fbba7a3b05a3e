#include "icd/workpiece.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>

namespace icd {

namespace {

constexpr int kStations = 12;

std::string ctrl_id(int k) { return "ctrl" + std::to_string(k); }
std::string ej_id(int k) { return "ej" + std::to_string(k); }

ComponentModel make_controller(int k) {
  ComponentModel m;
  m.id = ctrl_id(k);
  m.inputs = {"EjStart", "EjEnd", "WpIn", "TokenIn"};
  m.outputs = {"Push", "Pull", "TokenOut"};
  m.modes["idle"] = {};
  m.modes["push_phase"] = {
      {"EjStart", "Push"}, {"WpIn", "Push"}, {"EjEnd", "Push"}};
  m.modes["pull_phase"] = {{"EjEnd", "Pull"}, {"EjStart", "Pull"}};
  m.modes["binfull_token"] = {{"TokenIn", "TokenOut"}};
  m.modes["safe"] = {};
  m.initial_mode = "idle";
  m.safe_mode = "safe";
  return m;
}

ComponentModel make_ejector(int k) {
  ComponentModel m;
  m.id = ej_id(k);
  m.inputs = {"Push", "Pull"};
  m.outputs = {"EjStart", "EjEnd"};
  m.modes["normal"] = {};
  m.modes["binfull"] = {{"Push", "EjStart"}};
  m.modes["safe"] = {};
  m.initial_mode = "normal";
  m.safe_mode = "safe";
  return m;
}

ComponentModel make_conveyor() {
  ComponentModel m;
  m.id = "conveyor";
  for (int k = 1; k <= kStations; ++k)
    m.outputs.push_back("Wp" + std::to_string(k));
  m.modes["run"] = {};
  m.initial_mode = "run";
  return m;
}

// Lowers mode switches to edge ops along the verdict trajectory it
// itself predicts, so every emitted op is valid when replayed.
struct ScheduleBuilder {
  CompositeModel model = build_workpiece_model();
  std::map<std::string, std::string> cur;
  std::int64_t tick = 0;
  std::vector<ScheduleEntry> entries;
  std::vector<bool> expected;

  ScheduleBuilder() {
    for (const ComponentModel& m : model.models()) cur[m.id] = m.initial_mode;
  }

  void mode_switch(const std::string& id, const std::string& target,
                   bool accept) {
    const ComponentModel& m = model.models()[model.model_index(id)];
    std::set<std::pair<std::string, std::string>> from(
        m.modes.at(cur.at(id)).begin(), m.modes.at(cur.at(id)).end());
    std::set<std::pair<std::string, std::string>> to(
        m.modes.at(target).begin(), m.modes.at(target).end());
    ScheduleEntry e;
    e.tick = (tick += 5);
    e.models = {id};
    e.target_modes = {{id, target}};
    for (const auto& [in, out] : from)
      if (!to.count({in, out}))
        e.ops.push_back(
            {EdgeOp::Kind::erase, id + "." + in, id + "." + out});
    for (const auto& [in, out] : to)
      if (!from.count({in, out}))
        e.ops.push_back(
            {EdgeOp::Kind::insert, id + "." + in, id + "." + out});
    entries.push_back(std::move(e));
    expected.push_back(accept);
    if (accept) cur[id] = target;
  }

  void safe_fallback(const std::string& id) {
    ScheduleEntry e;
    e.tick = (tick += 5);
    e.safe_mode = id;
    entries.push_back(std::move(e));
    expected.push_back(true);
    cur[id] = model.models()[model.model_index(id)].safe_mode;
  }
};

}  // namespace

CompositeModel build_workpiece_model() {
  std::vector<ComponentModel> models;
  for (int k = 1; k <= kStations; ++k) {
    models.push_back(make_controller(k));
    models.push_back(make_ejector(k));
  }
  models.push_back(make_conveyor());

  std::vector<std::pair<std::string, std::string>> signals;
  for (int k = 1; k <= kStations; ++k) {
    const std::string c = ctrl_id(k);
    const std::string e = ej_id(k);
    signals.emplace_back(c + ".Push", e + ".Push");
    signals.emplace_back(c + ".Pull", e + ".Pull");
    signals.emplace_back(e + ".EjStart", c + ".EjStart");
    signals.emplace_back(e + ".EjEnd", c + ".EjEnd");
    signals.emplace_back("conveyor.Wp" + std::to_string(k), c + ".WpIn");
    const int next = k % kStations + 1;
    signals.emplace_back(c + ".TokenOut", ctrl_id(next) + ".TokenIn");
  }
  return CompositeModel(std::move(models), std::move(signals));
}

namespace {

ScheduleBuilder build_schedule() {
  ScheduleBuilder b;

  // Normal station cycles: idle -> push -> pull -> idle, one station
  // at a time.
  for (int k = 1; k <= kStations; ++k) {
    b.mode_switch(ctrl_id(k), "push_phase", true);
    b.mode_switch(ctrl_id(k), "pull_phase", true);
    b.mode_switch(ctrl_id(k), "idle", true);
  }

  // Bin fills at station 1 while its controller is mid-push: the
  // Push -> EjStart coupling would loop through the controller's
  // EjStart -> Push dependency, so the request is rejected and the
  // ejector falls back to its (empty, trivially acceptable) safe
  // mode.
  b.mode_switch(ctrl_id(1), "push_phase", true);
  b.mode_switch(ej_id(1), "binfull", false);
  b.safe_fallback(ej_id(1));
  b.mode_switch(ctrl_id(1), "idle", true);

  // Every bin full: controllers 1..11 switch to token passthrough;
  // station 12, still mid-push, would close the token ring and is
  // rejected, leaving it a non-empty delete-only safe fallback.
  b.mode_switch(ctrl_id(kStations), "push_phase", true);
  for (int k = 1; k < kStations; ++k)
    b.mode_switch(ctrl_id(k), "binfull_token", true);
  b.mode_switch(ctrl_id(kStations), "binfull_token", false);
  b.safe_fallback(ctrl_id(kStations));

  return b;
}

}  // namespace

std::vector<ScheduleEntry> workpiece_schedule() {
  return build_schedule().entries;
}

std::vector<bool> workpiece_expected_verdicts() {
  return build_schedule().expected;
}

}  // namespace icd
