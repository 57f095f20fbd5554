#include "chainfleet/chaincode/contracts.hpp"

#include <algorithm>

#include "chainfleet/chaincode/errors.hpp"
#include "chainfleet/common/text.hpp"

namespace chainfleet::chaincode {

namespace {

void require_args(std::string_view function, std::span<const std::string> args, std::size_t min, std::size_t max) {
  if (args.size() < min || args.size() > max) {
    throw ContractError(ContractErrc::InvalidArgument,
                        std::string(function) + " takes " + std::to_string(min) +
                            (min == max ? "" : ".." + std::to_string(max)) + " arguments, got " +
                            std::to_string(args.size()));
  }
}

double number_arg(const std::string& arg, std::string_view name) {
  try {
    return parse_double(arg);
  } catch (const std::invalid_argument&) {
    throw ContractError(ContractErrc::InvalidArgument, std::string(name) + " is not a number: '" + arg + "'");
  }
}

std::int64_t time_arg(const std::string& arg) {
  try {
    return parse_int(arg);
  } catch (const std::invalid_argument&) {
    throw ContractError(ContractErrc::InvalidArgument, "t_ms is not an integer: '" + arg + "'");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void AssetContract::require_namespace(const std::string& key) const {
  const bool ok = std::any_of(namespaces_.begin(), namespaces_.end(),
                              [&](const std::string& ns) { return key.starts_with(ns); });
  if (!ok) throw ContractError(ContractErrc::InvalidArgument, "key outside contract namespace: " + key);
}

std::string AssetContract::invoke(TxContext& ctx, std::string_view function, std::span<const std::string> args) const {
  if (function == "CreateAsset") {
    require_args(function, args, 2, 2);
    require_namespace(args[0]);
    create_asset(ctx, args[0], parse_document(args[1]));
    return {};
  }
  if (function == "UpdateAsset") {
    require_args(function, args, 2, 2);
    require_namespace(args[0]);
    update_asset(ctx, args[0], parse_document(args[1]));
    return {};
  }
  if (function == "ReadAsset") {
    require_args(function, args, 1, 1);
    return canonical(read_asset(ctx, args[0]));
  }
  if (function == "QueryAll") {
    require_args(function, args, 1, 1);
    Document out = Document::array();
    for (auto& asset : query_all(ctx, args[0])) {
      out.push_back(Document{{"key", asset.key}, {"value", std::move(asset.value)}, {"version", asset.version}});
    }
    return canonical(out);
  }
  throw ContractError(ContractErrc::UnknownFunction, std::string(function));
}

// ---------------------------------------------------------------------------

PathRecorder::PathRecorder(std::string robot_id)
    : AssetContract({path_prefix(robot_id), path_meta_key(robot_id)}), robot_id_(std::move(robot_id)) {}

std::string PathRecorder::record_path(TxContext& ctx, const PoseRecord& pose) const {
  if (pose.robot_id != robot_id_) {
    throw ContractError(ContractErrc::InvalidArgument, "path recorder for " + robot_id_ + " got " + pose.robot_id);
  }
  const auto meta_key = path_meta_key(robot_id_);
  std::uint64_t seq = 0;
  if (auto raw = ctx.get_state(meta_key)) {
    const auto meta = Document::parse(*raw);
    const auto last_t = meta.at("last_t").get<std::int64_t>();
    if (pose.t < last_t) {
      throw ContractError(ContractErrc::TimestampRegression, robot_id_ + " pose at " + std::to_string(pose.t) +
                                                                 " ms after " + std::to_string(last_t) + " ms");
    }
    seq = meta.at("next_seq").get<std::uint64_t>();
  }
  const auto key = path_key(robot_id_, seq);
  create_asset(ctx, key, Document(pose));
  ctx.put_state(meta_key, canonical(Document{{"next_seq", seq + 1}, {"last_t", pose.t}}));
  return key;
}

std::string PathRecorder::invoke(TxContext& ctx, std::string_view function, std::span<const std::string> args) const {
  if (function == "RecordPath") {
    require_args(function, args, 4, 4);
    PoseRecord pose{robot_id_, time_arg(args[0]), number_arg(args[1], "x"), number_arg(args[2], "y"),
                    number_arg(args[3], "z")};
    return record_path(ctx, pose);
  }
  return AssetContract::invoke(ctx, function, args);
}

// ---------------------------------------------------------------------------

ObjectRecorder::ObjectRecorder(std::string detector_id, std::set<std::string> categories)
    : AssetContract({std::string(kObjectPrefix)}),
      detector_id_(std::move(detector_id)),
      categories_(std::move(categories)) {}

void ObjectRecorder::record_object(TxContext& ctx, const ObjectRecord& record) const {
  if (record.object_id.empty()) throw ContractError(ContractErrc::InvalidArgument, "empty object_id");
  if (!categories_.contains(record.category)) {
    throw ContractError(ContractErrc::InvalidArgument, "unknown category: " + record.category);
  }
  const auto key = object_key(record.object_id);
  if (auto existing = ctx.get_state(key)) {
    auto merged = record;
    const auto prior = Document::parse(*existing).get<ObjectRecord>();
    if (prior.category != record.category) {
      throw ContractError(ContractErrc::InvalidArgument, "category mismatch for " + record.object_id);
    }
    const double n = prior.sightings;
    merged.x = (prior.x * n + record.x) / (n + 1);
    merged.y = (prior.y * n + record.y) / (n + 1);
    merged.z = (prior.z * n + record.z) / (n + 1);
    merged.sightings = prior.sightings + 1;
    update_asset(ctx, key, Document(merged));
  } else {
    create_asset(ctx, key, Document(record));
  }
}

std::string ObjectRecorder::invoke(TxContext& ctx, std::string_view function,
                                   std::span<const std::string> args) const {
  if (function == "RecordObject") {
    require_args(function, args, 6, 6);
    ObjectRecord record{args[0],          args[1], number_arg(args[2], "x"), number_arg(args[3], "y"),
                        number_arg(args[4], "z"), detector_id_, time_arg(args[5])};
    record_object(ctx, record);
    return {};
  }
  return AssetContract::invoke(ctx, function, args);
}

// ---------------------------------------------------------------------------

BatteryContract::BatteryContract(BatteryPolicy policy)
    : AssetContract({std::string(kBatteryPrefix), std::string(kDockingOrderKey)}), policy_(policy) {}

DockingOrder BatteryContract::docking_order(TxContext& ctx) const {
  auto raw = ctx.get_state(std::string(kDockingOrderKey));
  if (!raw) return DockingOrder{};
  return Document::parse(*raw).get<DockingOrder>();
}

void BatteryContract::update_battery(TxContext& ctx, const BatteryAsset& battery) const {
  if (!(battery.level >= 0.0 && battery.level <= 1.0)) {
    throw ContractError(ContractErrc::OutOfRange, "battery level " + format_double(battery.level));
  }
  ctx.put_state(battery_key(battery.robot_id), canonical(Document(battery)));

  const auto order = docking_order(ctx);
  if (battery.level < policy_.threshold && order.status == DockingStatus::None) {
    DockingOrder issued{DockingStatus::Ordered, policy_.rendezvous, battery.t};
    ctx.put_state(std::string(kDockingOrderKey), canonical(Document(issued)));
  }
}

void BatteryContract::advance_docking(TxContext& ctx, DockingStatus next, std::int64_t t) const {
  auto order = docking_order(ctx);
  if (static_cast<int>(next) != static_cast<int>(order.status) + 1) {
    throw ContractError(ContractErrc::InvalidTransition,
                        std::string(to_string(order.status)) + " -> " + to_string(next));
  }
  if (order.status == DockingStatus::None) {
    order.rendezvous = policy_.rendezvous;
    order.issued_at = t;
  }
  order.status = next;
  ctx.put_state(std::string(kDockingOrderKey), canonical(Document(order)));
}

std::string BatteryContract::invoke(TxContext& ctx, std::string_view function,
                                    std::span<const std::string> args) const {
  if (function == "UpdateBattery") {
    require_args(function, args, 2, 3);
    BatteryAsset battery{args[0], number_arg(args[1], "level"), args.size() > 2 ? time_arg(args[2]) : 0};
    update_battery(ctx, battery);
    return {};
  }
  if (function == "AdvanceDocking") {
    require_args(function, args, 1, 2);
    const auto next = parse_docking_status(args[0]);
    if (!next) throw ContractError(ContractErrc::InvalidArgument, "unknown docking status: " + args[0]);
    advance_docking(ctx, *next, args.size() > 1 ? time_arg(args[1]) : 0);
    return {};
  }
  if (function == "ReadDockingOrder") {
    require_args(function, args, 0, 0);
    return canonical(Document(docking_order(ctx)));
  }
  return AssetContract::invoke(ctx, function, args);
}

std::set<std::string> coco_categories() {
  return {"person",        "bicycle",      "car",          "motorcycle",  "airplane",     "bus",
          "train",         "truck",        "boat",         "traffic light", "fire hydrant", "stop sign",
          "parking meter", "bench",        "bird",         "cat",         "dog",          "horse",
          "sheep",         "cow",          "elephant",     "bear",        "zebra",        "giraffe",
          "backpack",      "umbrella",     "handbag",      "tie",         "suitcase",     "frisbee",
          "skis",          "snowboard",    "sports ball",  "kite",        "baseball bat", "baseball glove",
          "skateboard",    "surfboard",    "tennis racket", "bottle",     "wine glass",   "cup",
          "fork",          "knife",        "spoon",        "bowl",        "banana",       "apple",
          "sandwich",      "orange",       "broccoli",     "carrot",      "hot dog",      "pizza",
          "donut",         "cake",         "chair",        "couch",       "potted plant", "bed",
          "dining table",  "toilet",       "tv",           "laptop",      "mouse",        "remote",
          "keyboard",      "cell phone",   "microwave",    "oven",        "toaster",      "sink",
          "refrigerator",  "book",         "clock",        "vase",        "scissors",     "teddy bear",
          "hair drier",    "toothbrush"};
}

}  // namespace chainfleet::chaincode
