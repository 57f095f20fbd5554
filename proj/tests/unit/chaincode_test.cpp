#include <gtest/gtest.h>

#include "chainfleet/chaincode/contracts.hpp"
#include "chainfleet/chaincode/errors.hpp"
#include "chainfleet/ledger/ledger.hpp"

namespace chainfleet::chaincode {
namespace {

using namespace std::chrono_literals;
using ledger::WorldState;

ContractErrc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ContractError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected ContractError";
  return ContractErrc::UnknownFunction;
}

// Applies a context's write set as if it had committed.
void commit(WorldState& state, const TxContext& ctx) {
  for (const auto& w : ctx.write_set()) state.apply(w);
}

TEST(AssetCrud, CreateReadUpdate) {
  WorldState state;
  const Document pose{{"t", 1}, {"x", 0.5}};
  {
    TxContext ctx(state);
    create_asset(ctx, "pose/dashgo/0001", pose);
    ASSERT_EQ(ctx.write_set().size(), 1u);
    EXPECT_EQ(ctx.write_set()[0].value, R"({"t":1,"x":0.5})");
    EXPECT_EQ(ctx.read_set(), (std::vector<ledger::ReadEntry>{{"pose/dashgo/0001", 0}}));
    commit(state, ctx);
  }
  {
    TxContext ctx(state);
    EXPECT_EQ(code_of([&] { create_asset(ctx, "pose/dashgo/0001", pose); }), ContractErrc::AlreadyExists);
    EXPECT_EQ(read_asset(ctx, "pose/dashgo/0001"), pose);
    EXPECT_EQ(read_asset(ctx, "pose/dashgo/0001"), read_asset(ctx, "pose/dashgo/0001"));
    EXPECT_TRUE(ctx.write_set().empty());
    EXPECT_EQ(ctx.read_set(), (std::vector<ledger::ReadEntry>{{"pose/dashgo/0001", 1}}));
    EXPECT_EQ(code_of([&] { read_asset(ctx, "absent"); }), ContractErrc::NotFound);
    EXPECT_EQ(code_of([&] { update_asset(ctx, "absent", pose); }), ContractErrc::NotFound);
    EXPECT_EQ(code_of([&] { create_asset(ctx, "", pose); }), ContractErrc::InvalidArgument);
    update_asset(ctx, "pose/dashgo/0001", pose);
    commit(state, ctx);
  }
  EXPECT_EQ(state.version("pose/dashgo/0001"), 2u);
}

TEST(AssetCrud, CanonicalDocumentsSortKeys) {
  EXPECT_EQ(canonical(parse_document(R"({"b":1,"a":[true,"x",{"d":2,"c":null}]})")),
            R"({"a":[true,"x",{"c":null,"d":2}],"b":1})");
  EXPECT_EQ(code_of([] { parse_document("{nope"); }), ContractErrc::InvalidArgument);
}

TEST(AssetCrud, QueryAllByPrefix) {
  WorldState state;
  state.apply({"object/b", "2"});
  state.apply({"object/a", "1"});
  state.apply({"objects", "x"});
  TxContext ctx(state);
  EXPECT_TRUE(query_all(ctx, "path/").empty());
  ctx.put_state("object/c", "3");
  const auto all = query_all(ctx, "object/");
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].key, "object/a");
  EXPECT_EQ(all[0].version, 1u);
  EXPECT_EQ(all[2].key, "object/c");
  EXPECT_EQ(all[2].value, Document(3));
}

TEST(AssetContractTest, NamespacesAndDispatch) {
  WorldState state;
  AssetContract contract({"battery/"});
  TxContext ctx(state);
  const std::vector<std::string> ok{"battery/x", "{}"};
  EXPECT_NO_THROW(contract.invoke(ctx, "CreateAsset", ok));
  const std::vector<std::string> outside{"path/x", "{}"};
  EXPECT_EQ(code_of([&] { contract.invoke(ctx, "CreateAsset", outside); }), ContractErrc::InvalidArgument);
  EXPECT_EQ(code_of([&] { contract.invoke(ctx, "Fly", {}); }), ContractErrc::UnknownFunction);
  const std::vector<std::string> too_few{"battery/x"};
  EXPECT_EQ(code_of([&] { contract.invoke(ctx, "CreateAsset", too_few); }), ContractErrc::InvalidArgument);
}

// --- path recorder -------------------------------------------------------------

TEST(PathRecorderTest, SequencesAndTimestampGuard) {
  WorldState state;
  PathRecorder recorder("dashgo");
  {
    TxContext ctx(state);
    EXPECT_EQ(recorder.record_path(ctx, {"dashgo", 100, 1, 2, 0}), "path/dashgo/00000000");
    commit(state, ctx);
  }
  {
    TxContext ctx(state);
    EXPECT_EQ(code_of([&] { recorder.record_path(ctx, {"dashgo", 99, 1, 2, 0}); }),
              ContractErrc::TimestampRegression);
  }
  {
    // Equal timestamps are allowed.
    TxContext ctx(state);
    EXPECT_EQ(recorder.record_path(ctx, {"dashgo", 100, 1, 2, 0}), "path/dashgo/00000001");
    commit(state, ctx);
  }
  {
    TxContext ctx(state);
    EXPECT_EQ(code_of([&] { recorder.record_path(ctx, {"tello", 200, 0, 0, 1}); }), ContractErrc::InvalidArgument);
    const std::vector<std::string> args{"200", "1.5", "2", "0"};
    EXPECT_EQ(recorder.invoke(ctx, "RecordPath", args), "path/dashgo/00000002");
    const std::vector<std::string> junk{"200", "x", "2", "0"};
    EXPECT_EQ(code_of([&] { recorder.invoke(ctx, "RecordPath", junk); }), ContractErrc::InvalidArgument);
  }
}

TEST(PathRecorderTest, ThreeHundredPosesThroughLedger) {
  ledger::Ledger ledger(ledger::LedgerConfig{});
  const auto id = ledger.register_identity("Org1", "dashgo", ledger::Role::Robot);
  ledger.create_channel("inventory", {"Org1"});
  ledger.install_chaincode("inventory", "dashgo-path", std::make_shared<PathRecorder>("dashgo"));
  for (int i = 0; i < 300; ++i) {
    const auto t = Millis{i * 20};
    ledger.submit(id, "inventory", "dashgo-path", "RecordPath", {std::to_string(t.count()), "1", "1", "0"}, t);
    ledger.advance(t);
  }
  ledger.advance(10s);
  const auto out =
      Document::parse(ledger.evaluate(id, "inventory", "dashgo-path", "QueryAll", {std::string("path/dashgo/")}));
  ASSERT_EQ(out.size(), 300u);
  for (int i = 0; i < 300; ++i) {
    EXPECT_EQ(out[i]["key"], path_key("dashgo", static_cast<std::uint64_t>(i)));
    EXPECT_EQ(out[i]["value"]["t"], i * 20);
  }
}

// --- object recorder ---------------------------------------------------------

TEST(ObjectRecorderTest, UpsertKeepsOneRow) {
  WorldState state;
  ObjectRecorder tello("tello", coco_categories());
  ObjectRecorder dashgo("dashgo", coco_categories());
  {
    TxContext ctx(state);
    tello.record_object(ctx, {"cup_2_3_1", "cup", 1.0, 1.5, 0.6, "", 10});
    commit(state, ctx);
  }
  {
    TxContext ctx(state);
    dashgo.invoke(ctx, "RecordObject", std::vector<std::string>{"cup_2_3_1", "cup", "1.04", "1.46", "0.61", "900"});
    commit(state, ctx);
  }
  TxContext ctx(state);
  const auto rows = query_all(ctx, "object/");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].version, 2u);
  const auto rec = rows[0].value.get<ObjectRecord>();
  EXPECT_EQ(rec.detector, "dashgo");
  EXPECT_EQ(rec.t, 900);
  EXPECT_EQ(rec.sightings, 2u);
  EXPECT_DOUBLE_EQ(rec.x, 1.02);
  EXPECT_DOUBLE_EQ(rec.y, 1.48);

  EXPECT_EQ(code_of([&] { tello.record_object(ctx, {"", "cup", 0, 0, 0, "", 0}); }), ContractErrc::InvalidArgument);
  EXPECT_EQ(code_of([&] { tello.record_object(ctx, {"x", "spaceship", 0, 0, 0, "", 0}); }),
            ContractErrc::InvalidArgument);
  EXPECT_EQ(code_of([&] { tello.record_object(ctx, {"cup_2_3_1", "bowl", 0, 0, 0, "", 0}); }),
            ContractErrc::InvalidArgument);
}

// --- battery and docking -------------------------------------------------------

class BatteryFixture : public ::testing::Test {
 protected:
  DockingOrder order() {
    TxContext ctx(state);
    return contract.docking_order(ctx);
  }
  void battery(double level, std::int64_t t) {
    TxContext ctx(state);
    contract.update_battery(ctx, {"tello", level, t});
    commit(state, ctx);
  }
  void advance(DockingStatus s) {
    TxContext ctx(state);
    contract.advance_docking(ctx, s, 0);
    commit(state, ctx);
  }

  WorldState state;
  BatteryContract contract{BatteryPolicy{0.30, {4.0, 2.5, 0.0}}};
};

TEST_F(BatteryFixture, BelowThresholdOrdersDocking) {
  battery(0.29, 7000);
  const auto o = order();
  EXPECT_EQ(o.status, DockingStatus::Ordered);
  EXPECT_EQ(o.issued_at, 7000);
  EXPECT_EQ(o.rendezvous, (Point3{4.0, 2.5, 0.0}));
}

TEST_F(BatteryFixture, ThresholdIsStrict) {
  battery(0.30, 1);
  EXPECT_EQ(order().status, DockingStatus::None);
  EXPECT_FALSE(state.get("docking/order"));
  EXPECT_EQ(state.version("battery/tello"), 1u);
}

TEST_F(BatteryFixture, SecondLowReadingDoesNotReorder) {
  battery(0.29, 1);
  battery(0.25, 2);
  EXPECT_EQ(state.version("docking/order"), 1u);
  EXPECT_EQ(state.version("battery/tello"), 2u);
  EXPECT_EQ(order().issued_at, 1);
}

TEST_F(BatteryFixture, LevelOutOfRange) {
  TxContext ctx(state);
  EXPECT_EQ(code_of([&] { contract.update_battery(ctx, {"tello", 1.01, 0}); }), ContractErrc::OutOfRange);
  EXPECT_EQ(code_of([&] { contract.update_battery(ctx, {"tello", -0.01, 0}); }), ContractErrc::OutOfRange);
  EXPECT_NO_THROW(contract.update_battery(ctx, {"tello", 0.0, 0}));
  EXPECT_NO_THROW(contract.update_battery(ctx, {"tello", 1.0, 0}));
}

TEST_F(BatteryFixture, TransitionsFollowTheChain) {
  battery(0.2, 0);
  EXPECT_EQ(code_of([&] { advance(DockingStatus::Docked); }), ContractErrc::InvalidTransition);
  EXPECT_EQ(code_of([&] { advance(DockingStatus::Ordered); }), ContractErrc::InvalidTransition);
  advance(DockingStatus::Accepted);
  EXPECT_EQ(code_of([&] { advance(DockingStatus::Accepted); }), ContractErrc::InvalidTransition);
  advance(DockingStatus::Docking);
  advance(DockingStatus::Docked);
  EXPECT_EQ(order().status, DockingStatus::Docked);
  EXPECT_EQ(code_of([&] { advance(DockingStatus::None); }), ContractErrc::InvalidTransition);
  // A docked order never re-arms.
  battery(0.1, 5);
  EXPECT_EQ(order().status, DockingStatus::Docked);
}

TEST_F(BatteryFixture, StringInterface) {
  TxContext ctx(state);
  EXPECT_EQ(contract.invoke(ctx, "ReadDockingOrder", {}), R"({"issued_at":0,"rendezvous":[0.0,0.0,0.0],"status":"none"})");
  contract.invoke(ctx, "UpdateBattery", std::vector<std::string>{"tello", "0.85"});
  commit(state, ctx);
  EXPECT_EQ(state.get("battery/tello")->value, R"({"level":0.85,"robot_id":"tello","t":0})");
  TxContext ctx2(state);
  EXPECT_EQ(code_of([&] { contract.invoke(ctx2, "AdvanceDocking", std::vector<std::string>{"landed"}); }),
            ContractErrc::InvalidArgument);
  EXPECT_EQ(code_of([&] { contract.invoke(ctx2, "UpdateBattery", std::vector<std::string>{"tello", "lots"}); }),
            ContractErrc::InvalidArgument);
}

// Same snapshot and args give identical read/write sets.
TEST(ContractPurity, RepeatedExecutionIsIdentical) {
  WorldState state;
  state.apply({"battery/tello", R"({"level":0.5,"robot_id":"tello","t":0})"});
  state.apply({"pathmeta/tello", R"({"last_t":5,"next_seq":3})"});
  const BatteryContract battery(BatteryPolicy{0.3, {1, 2, 0}});
  const PathRecorder path("tello");
  const ObjectRecorder objects("tello", coco_categories());
  struct Call {
    const Contract* contract;
    std::string fn;
    std::vector<std::string> args;
  };
  const std::vector<Call> calls{{&battery, "UpdateBattery", {"tello", "0.1", "9"}},
                                {&path, "RecordPath", {"10", "1", "2", "3"}},
                                {&objects, "RecordObject", {"cup_1_1_1", "cup", "0.5", "0.5", "0.5", "10"}}};
  for (const auto& call : calls) {
    TxContext a(state);
    TxContext b(state);
    const auto pa = call.contract->invoke(a, call.fn, call.args);
    const auto pb = call.contract->invoke(b, call.fn, call.args);
    EXPECT_EQ(pa, pb);
    EXPECT_EQ(a.read_set(), b.read_set());
    EXPECT_EQ(a.write_set(), b.write_set());
  }
}

}  // namespace
}  // namespace chainfleet::chaincode
