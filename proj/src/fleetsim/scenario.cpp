#include "chainfleet/fleetsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chainfleet/chaincode/contracts.hpp"

namespace chainfleet::fleetsim {

using nlohmann::json;

const char* to_string(RobotKind kind) { return kind == RobotKind::Ugv ? "ugv" : "uav"; }

namespace {

const RobotSpec& robot_of_kind(const std::vector<RobotSpec>& robots, RobotKind kind) {
  auto it = std::find_if(robots.begin(), robots.end(), [&](const RobotSpec& r) { return r.kind == kind; });
  if (it == robots.end()) throw ScenarioError("robots", std::string("no ") + to_string(kind));
  return *it;
}

}  // namespace

const RobotSpec& Scenario::ugv() const { return robot_of_kind(robots, RobotKind::Ugv); }
const RobotSpec& Scenario::uav() const { return robot_of_kind(robots, RobotKind::Uav); }

Scenario default_scenario() {
  Scenario s;
  s.ledger.channels = {s.channel};

  RobotSpec ugv{"dashgo", RobotKind::Ugv, "Org1", Vec3(0.5, 1.0, 0.0), 0.5, {}};
  for (int loop = 0; loop < 2; ++loop) {
    ugv.waypoints.insert(ugv.waypoints.end(),
                         {Vec3(7.5, 1.0, 0), Vec3(7.5, 4.0, 0), Vec3(0.5, 4.0, 0), Vec3(0.5, 1.0, 0)});
  }
  RobotSpec uav{"tello", RobotKind::Uav, "Org2", Vec3(1.0, 2.5, 0.0), 1.0, {}};
  for (int loop = 0; loop < 5; ++loop) {
    uav.waypoints.insert(uav.waypoints.end(),
                         {Vec3(1.0, 2.0, 1.0), Vec3(7.0, 2.0, 1.0), Vec3(7.0, 3.0, 1.0), Vec3(1.0, 3.0, 1.0)});
  }
  s.robots = {ugv, uav};

  const char* ground[] = {"chair", "suitcase", "backpack", "potted plant", "bench", "umbrella"};
  const double xs[] = {2.0, 4.0, 6.0};
  for (int i = 0; i < 6; ++i) {
    s.objects.push_back({ground[i], Vec3(xs[i % 3], i < 3 ? 0.5 : 4.5, 0.5)});
  }
  const char* shelf[] = {"cup", "bottle", "laptop", "book", "clock", "vase"};
  for (int i = 0; i < 6; ++i) s.objects.push_back({shelf[i], Vec3(1.5 + i, 2.5, 1.0)});

  s.rendezvous = Vec3(4.0, 2.0, 0.0);
  for (const auto& a : localization::default_global_anchors(s.room.width, s.room.depth)) {
    s.uwb.global_anchors.push_back({a.id, a.position});
  }
  for (const auto& a : localization::default_mounted_anchors("dashgo", 0.4, s.docking.deck_height)) {
    s.uwb.mounted_anchors.push_back({a.id, a.body_offset});
  }
  return s;
}

namespace {

// Reads fields from one JSON object, tracking the dotted path for error messages.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ScenarioError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }

  const json* find(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void number(std::string_view key, double& out) {
    if (auto* v = find(key)) {
      if (!v->is_number()) throw ScenarioError(field(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ScenarioError(field(key), "must be finite");
    }
  }

  template <typename Int>
  void integer(std::string_view key, Int& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_integer()) throw ScenarioError(field(key), "expected an integer");
      if (v->is_number_unsigned()) {
        out = static_cast<Int>(v->get<std::uint64_t>());
      } else {
        const auto raw = v->get<std::int64_t>();
        if (std::is_unsigned_v<Int> && raw < 0) throw ScenarioError(field(key), "must be >= 0");
        out = static_cast<Int>(raw);
      }
    }
  }

  void millis(std::string_view key, Millis& out) {
    std::int64_t raw = out.count();
    integer(key, raw);
    out = Millis{raw};
  }

  void text(std::string_view key, std::string& out) {
    if (auto* v = find(key)) {
      if (!v->is_string()) throw ScenarioError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void vec(std::string_view key, Vec3& out) {
    if (auto* v = find(key)) out = parse_vec(*v, field(key));
  }

  static Vec3 parse_vec(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3 || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
      throw ScenarioError(where, "expected [x, y, z]");
    }
    return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  }

  void finish() const {
    for (const auto& [key, _] : node_.items()) {
      if (!seen_.contains(key)) throw ScenarioError(field(key), "unknown field");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

template <typename Fn>
void section(Reader& parent, std::string_view key, Fn&& fn) {
  if (auto* v = parent.find(key)) {
    Reader child(*v, parent.field(key));
    fn(child);
    child.finish();
  }
}

template <typename Fn>
void array(Reader& parent, std::string_view key, Fn&& fn) {
  if (auto* v = parent.find(key)) {
    if (!v->is_array()) throw ScenarioError(parent.field(key), "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) fn((*v)[i], parent.field(key) + "[" + std::to_string(i) + "]");
  }
}

std::vector<AnchorSpec> parse_anchors(const json& v, const std::string& where, std::string_view coord_key) {
  if (!v.is_array()) throw ScenarioError(where, "expected an array");
  std::vector<AnchorSpec> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Reader r(v[i], where + "[" + std::to_string(i) + "]");
    AnchorSpec a;
    r.text("id", a.id);
    r.vec(coord_key, a.position);
    r.finish();
    out.push_back(a);
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("<root>", std::string("malformed JSON: ") + e.what());
  }

  Scenario s = default_scenario();
  Reader root(doc, "");
  root.integer("seed", s.seed);
  root.millis("dt_ms", s.dt);
  root.millis("duration_ms", s.duration);
  section(root, "room", [&](Reader& r) {
    r.number("width", s.room.width);
    r.number("depth", s.room.depth);
    r.number("height", s.room.height);
  });
  if (root.find("robots")) {
    s.robots.clear();
    array(root, "robots", [&](const json& v, const std::string& where) {
      Reader r(v, where);
      RobotSpec spec;
      std::string kind = "ugv";
      r.text("id", spec.id);
      r.text("kind", kind);
      if (kind == "ugv") {
        spec.kind = RobotKind::Ugv;
      } else if (kind == "uav") {
        spec.kind = RobotKind::Uav;
      } else {
        throw ScenarioError(r.field("kind"), "expected \"ugv\" or \"uav\"");
      }
      r.text("org", spec.org);
      r.vec("start", spec.start);
      r.number("v_max", spec.v_max);
      array(r, "waypoints", [&](const json& w, const std::string& at) { spec.waypoints.push_back(Reader::parse_vec(w, at)); });
      r.finish();
      s.robots.push_back(std::move(spec));
    });
  }
  if (root.find("objects")) {
    s.objects.clear();
    array(root, "objects", [&](const json& v, const std::string& where) {
      Reader r(v, where);
      PlacedObject obj;
      r.text("category", obj.category);
      r.vec("position", obj.position);
      r.finish();
      s.objects.push_back(std::move(obj));
    });
  }
  section(root, "detection", [&](Reader& r) {
    r.number("range_m", s.detection.range_m);
    r.number("fov_rad", s.detection.fov_rad);
    r.number("noise_sigma", s.detection.noise_sigma);
    r.millis("cooldown_ms", s.detection.cooldown);
  });
  section(root, "rates", [&](Reader& r) {
    r.number("path_hz", s.rates.path_hz);
    r.number("battery_hz", s.rates.battery_hz);
    r.number("detect_forward_hz", s.rates.detect_forward_hz);
  });
  section(root, "battery", [&](Reader& r) {
    r.number("initial", s.battery.initial);
    r.number("drain_per_s", s.battery.drain_per_s);
    r.number("threshold", s.battery.threshold);
    r.number("charge_per_s", s.battery.charge_per_s);
  });
  root.vec("rendezvous", s.rendezvous);
  section(root, "docking", [&](Reader& r) {
    r.number("r_rdv", s.docking.r_rdv);
    r.number("d_dock", s.docking.d_dock);
    r.number("deck_height", s.docking.deck_height);
    r.number("land_clearance", s.docking.land_clearance);
    r.number("approach_height", s.docking.approach_height);
    r.number("descent_speed", s.docking.descent_speed);
  });
  section(root, "ledger", [&](Reader& r) {
    r.integer("batch_size", s.ledger.batch_size);
    r.millis("batch_timeout_ms", s.ledger.batch_timeout);
    r.millis("validation_budget_ms", s.ledger.validation_budget);
    r.text("channel", s.channel);
    std::string endorsement = s.ledger.endorsement == ledger::Endorsement::AnyOrg ? "any" : "all";
    r.text("endorsement", endorsement);
    if (endorsement == "any") {
      s.ledger.endorsement = ledger::Endorsement::AnyOrg;
    } else if (endorsement == "all") {
      s.ledger.endorsement = ledger::Endorsement::AllOrgs;
    } else {
      throw ScenarioError(r.field("endorsement"), "expected \"any\" or \"all\"");
    }
  });
  s.ledger.channels = {s.channel};
  section(root, "uwb", [&](Reader& r) {
    r.number("sigma", s.uwb.sigma);
    r.number("filter_alpha", s.uwb.filter_alpha);
    if (auto* v = r.find("global_anchors")) s.uwb.global_anchors = parse_anchors(*v, r.field("global_anchors"), "position");
    if (auto* v = r.find("mounted_anchors")) s.uwb.mounted_anchors = parse_anchors(*v, r.field("mounted_anchors"), "offset");
  });
  root.finish();

  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("<file>", "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json robots = json::array();
  for (const auto& r : s.robots) {
    json waypoints = json::array();
    for (const auto& w : r.waypoints) waypoints.push_back(vec_json(w));
    robots.push_back({{"id", r.id}, {"kind", to_string(r.kind)}, {"org", r.org}, {"start", vec_json(r.start)},
                      {"v_max", r.v_max}, {"waypoints", waypoints}});
  }
  json objects = json::array();
  for (const auto& o : s.objects) objects.push_back({{"category", o.category}, {"position", vec_json(o.position)}});
  auto anchors = [](const std::vector<AnchorSpec>& list, const char* key) {
    json out = json::array();
    for (const auto& a : list) out.push_back({{"id", a.id}, {key, vec_json(a.position)}});
    return out;
  };

  json doc = {
      {"seed", s.seed},
      {"dt_ms", s.dt.count()},
      {"duration_ms", s.duration.count()},
      {"room", {{"width", s.room.width}, {"depth", s.room.depth}, {"height", s.room.height}}},
      {"robots", robots},
      {"objects", objects},
      {"detection",
       {{"range_m", s.detection.range_m},
        {"fov_rad", s.detection.fov_rad},
        {"noise_sigma", s.detection.noise_sigma},
        {"cooldown_ms", s.detection.cooldown.count()}}},
      {"rates",
       {{"path_hz", s.rates.path_hz}, {"battery_hz", s.rates.battery_hz}, {"detect_forward_hz", s.rates.detect_forward_hz}}},
      {"battery",
       {{"initial", s.battery.initial},
        {"drain_per_s", s.battery.drain_per_s},
        {"threshold", s.battery.threshold},
        {"charge_per_s", s.battery.charge_per_s}}},
      {"rendezvous", vec_json(s.rendezvous)},
      {"docking",
       {{"r_rdv", s.docking.r_rdv},
        {"d_dock", s.docking.d_dock},
        {"deck_height", s.docking.deck_height},
        {"land_clearance", s.docking.land_clearance},
        {"approach_height", s.docking.approach_height},
        {"descent_speed", s.docking.descent_speed}}},
      {"ledger",
       {{"batch_size", s.ledger.batch_size},
        {"batch_timeout_ms", s.ledger.batch_timeout.count()},
        {"validation_budget_ms", s.ledger.validation_budget.count()},
        {"channel", s.channel},
        {"endorsement", s.ledger.endorsement == ledger::Endorsement::AnyOrg ? "any" : "all"}}},
      {"uwb",
       {{"sigma", s.uwb.sigma},
        {"filter_alpha", s.uwb.filter_alpha},
        {"global_anchors", anchors(s.uwb.global_anchors, "position")},
        {"mounted_anchors", anchors(s.uwb.mounted_anchors, "offset")}}},
  };
  return doc.dump(2) + "\n";
}

namespace {

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ScenarioError(field, message);
}

}  // namespace

void validate(const Scenario& s) {
  require(s.dt.count() > 0, "dt_ms", "must be > 0");
  require(s.duration.count() > 0, "duration_ms", "must be > 0");
  require(s.duration.count() % s.dt.count() == 0, "duration_ms", "must be a multiple of dt_ms");
  require(s.room.width > 0, "room.width", "must be > 0");
  require(s.room.depth > 0, "room.depth", "must be > 0");
  require(s.room.height > 0, "room.height", "must be > 0");

  std::set<std::string> ids;
  int ugvs = 0;
  int uavs = 0;
  for (std::size_t i = 0; i < s.robots.size(); ++i) {
    const auto& r = s.robots[i];
    const std::string at = "robots[" + std::to_string(i) + "]";
    require(!r.id.empty(), at + ".id", "must not be empty");
    require(ids.insert(r.id).second, at + ".id", "duplicate robot id " + r.id);
    require(!r.org.empty(), at + ".org", "must not be empty");
    require(r.v_max > 0, at + ".v_max", "must be > 0");
    require(s.room.contains(r.start), at + ".start", "outside the room");
    for (std::size_t w = 0; w < r.waypoints.size(); ++w) {
      const std::string wat = at + ".waypoints[" + std::to_string(w) + "]";
      require(s.room.contains(r.waypoints[w]), wat, "outside the room");
      if (r.kind == RobotKind::Ugv) require(r.waypoints[w].z() == 0, wat, "ground robot waypoint needs z = 0");
    }
    if (r.kind == RobotKind::Ugv) {
      require(r.start.z() == 0, at + ".start", "ground robot needs z = 0");
      ++ugvs;
    } else {
      ++uavs;
    }
  }
  require(ugvs == 1 && uavs == 1, "robots", "need exactly one ugv and one uav");

  const auto categories = chaincode::coco_categories();
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const std::string at = "objects[" + std::to_string(i) + "]";
    require(categories.contains(s.objects[i].category), at + ".category", "not a known category");
    require(s.room.contains(s.objects[i].position), at + ".position", "outside the room");
  }

  require(s.detection.range_m > 0, "detection.range_m", "must be > 0");
  require(s.detection.fov_rad > 0 && s.detection.fov_rad <= 2 * 3.141592653589793, "detection.fov_rad",
          "must be in (0, 2 pi]");
  require(s.detection.noise_sigma >= 0, "detection.noise_sigma", "must be >= 0");
  require(s.detection.cooldown.count() >= 0, "detection.cooldown_ms", "must be >= 0");
  require(s.rates.path_hz > 0, "rates.path_hz", "must be > 0");
  require(s.rates.battery_hz > 0, "rates.battery_hz", "must be > 0");
  require(s.rates.detect_forward_hz > 0, "rates.detect_forward_hz", "must be > 0");
  require(s.battery.initial >= 0 && s.battery.initial <= 1, "battery.initial", "must be in [0, 1]");
  require(s.battery.drain_per_s >= 0, "battery.drain_per_s", "must be >= 0");
  require(s.battery.threshold > 0 && s.battery.threshold < 1, "battery.threshold", "must be in (0, 1)");
  require(s.battery.charge_per_s >= 0, "battery.charge_per_s", "must be >= 0");
  require(s.room.contains(s.rendezvous), "rendezvous", "outside the room");
  require(s.rendezvous.z() == 0, "rendezvous", "needs z = 0");
  require(s.docking.r_rdv > 0, "docking.r_rdv", "must be > 0");
  require(s.docking.d_dock > 0, "docking.d_dock", "must be > 0");
  require(s.docking.deck_height >= 0, "docking.deck_height", "must be >= 0");
  require(s.docking.land_clearance > 0, "docking.land_clearance", "must be > 0");
  require(s.docking.approach_height > s.docking.deck_height + s.docking.land_clearance &&
              s.docking.approach_height <= s.room.height,
          "docking.approach_height", "must lie between the landing height and the ceiling");
  require(s.docking.descent_speed > 0, "docking.descent_speed", "must be > 0");
  require(s.uwb.sigma >= 0, "uwb.sigma", "must be >= 0");
  require(s.uwb.filter_alpha > 0 && s.uwb.filter_alpha <= 1, "uwb.filter_alpha", "must be in (0, 1]");
  require(s.uwb.global_anchors.size() >= 4, "uwb.global_anchors", "need at least 4 anchors");
  require(s.uwb.mounted_anchors.size() >= 4, "uwb.mounted_anchors", "need at least 4 anchors");
  std::set<std::string> anchor_ids;
  for (const auto* list : {&s.uwb.global_anchors, &s.uwb.mounted_anchors}) {
    for (const auto& a : *list) {
      require(!a.id.empty() && anchor_ids.insert(a.id).second, "uwb", "anchor ids must be unique and non-empty");
    }
  }
  require(!s.channel.empty(), "ledger.channel", "must not be empty");
  try {
    s.ledger.validate();
  } catch (const std::exception& e) {
    throw ScenarioError("ledger", e.what());
  }
}

}  // namespace chainfleet::fleetsim
