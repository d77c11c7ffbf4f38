#include <cmath>
#include <fstream>
#include <future>
#include <random>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "api_harness.h"
#include "json_schema.h"
#include "narrate_fixture.h"
#include "riskx/api/service.h"
#include "riskx/common/checksum.h"

namespace riskx::api {
namespace {

using nlohmann::json;
using riskx::testing::ApiHarness;
using riskx::testing::HarnessOptions;
using riskx::testing::ReferenceRecordJson;

constexpr char kModel[] = RISKX_FIXTURE_DIR "/model_5tree.json";

HarnessOptions Defaults() {
  HarnessOptions options;
  options.model_path = kModel;
  return options;
}

json Body(const json& record) { return {{"record", record}}; }

void ExpectError(const ApiResponse& response, int status,
                 const std::string& code, const std::string& field_path) {
  EXPECT_EQ(response.status, status) << response.body.dump();
  EXPECT_EQ(response.body.value("code", ""), code) << response.body.dump();
  EXPECT_EQ(response.body.value("field_path", "?"), field_path);
  EXPECT_TRUE(response.body.contains("message"));
}

class SlowClient : public narrate::CompletionClient {
 public:
  std::string Complete(const narrate::PromptDocument&) override {
    std::this_thread::sleep_for(std::chrono::seconds(2));
    return testing::GoodCompletion().dump();
  }
};

class GoodClient : public narrate::CompletionClient {
 public:
  std::string Complete(const narrate::PromptDocument&) override {
    return reply;
  }
  std::string reply;
};

TEST(EnvelopeTest, CodesAreUpperSnake) {
  EXPECT_EQ(EnvelopeCode(ErrorCode::kUncontrollableFeature),
            "UNCONTROLLABLE_FEATURE");
  EXPECT_EQ(EnvelopeCode(ErrorCode::kOutOfBounds), "OUT_OF_BOUNDS");
  EXPECT_EQ(EnvelopeCode(ErrorCode::kIoError), "IO_ERROR");
}

TEST(ApiServiceTest, HealthAndSchema) {
  ApiHarness harness(Defaults());
  const ApiResponse health = harness.Call("GET", "/v1/health");
  ASSERT_EQ(health.status, 200);
  EXPECT_EQ(health.body["status"], "ok");
  EXPECT_EQ(health.body["schema_version"], "diabetes-v1");
  EXPECT_EQ(health.body["narrative_mode"], "TEMPLATE");
  std::ifstream in(kModel, std::ios::binary);
  std::ostringstream bytes;
  bytes << in.rdbuf();
  EXPECT_EQ(health.body["model_checksum"], Sha256Hex(bytes.str()));

  const ApiResponse schema = harness.Call("GET", "/v1/schema");
  ASSERT_EQ(schema.status, 200);
  EXPECT_EQ(schema.body["features"].size(), 8u);
}

TEST(ApiServiceTest, RoutingErrors) {
  ApiHarness harness(Defaults());
  ExpectError(harness.Call("GET", "/v1/nope"), 404, "NOT_FOUND", "");
  ExpectError(harness.Call("GET", "/v1/estimate"), 405, "METHOD_NOT_ALLOWED",
              "");
  ExpectError(harness.Call("POST", "/v1/health"), 405, "METHOD_NOT_ALLOWED", "");
}

TEST(ApiServiceTest, EstimateMatchesLibrary) {
  ApiHarness harness(Defaults());
  const ApiResponse response =
      harness.Call("POST", "/v1/estimate", Body(ReferenceRecordJson()).dump());
  ASSERT_EQ(response.status, 200) << response.body.dump();
  EXPECT_DOUBLE_EQ(response.body["margin"].get<double>(), 0.6181970336188518);
  EXPECT_EQ(response.body["level"], "MEDIUM");
}

TEST(ApiServiceTest, EstimateValidation) {
  ApiHarness harness(Defaults());
  ExpectError(harness.Call("POST", "/v1/estimate", "{not json"), 400,
              "MALFORMED_JSON", "");
  ExpectError(harness.Call("POST", "/v1/estimate", "[]"), 422,
              "INVALID_ARGUMENT", "/");
  ExpectError(harness.Call("POST", "/v1/estimate", "{}"), 422,
              "INVALID_ARGUMENT", "/record");
  json record = ReferenceRecordJson();
  ExpectError(harness.Call("POST", "/v1/estimate",
                           json{{"record", record}, {"extra", 1}}.dump()),
              422, "INVALID_ARGUMENT", "/extra");
  record["bmi"] = 120;
  ExpectError(harness.Call("POST", "/v1/estimate", Body(record).dump()), 422,
              "OUT_OF_BOUNDS", "/record/bmi");
  record = ReferenceRecordJson();
  record.erase("smoking");
  ExpectError(harness.Call("POST", "/v1/estimate", Body(record).dump()), 422,
              "MISSING_FEATURE", "/record/smoking");
  record = ReferenceRecordJson();
  record["waist"] = 80;
  ExpectError(harness.Call("POST", "/v1/estimate", Body(record).dump()), 422,
              "UNKNOWN_FEATURE", "/record/waist");
  record = ReferenceRecordJson();
  record["age"] = "52";
  ExpectError(harness.Call("POST", "/v1/estimate", Body(record).dump()), 422,
              "INVALID_VALUE", "/record/age");
}

TEST(ApiServiceTest, ExplainTemplate) {
  ApiHarness harness(Defaults());
  const ApiResponse response =
      harness.Call("POST", "/v1/explain", Body(ReferenceRecordJson()).dump());
  ASSERT_EQ(response.status, 200) << response.body.dump();
  EXPECT_EQ(response.body["narrative_mode_used"], "TEMPLATE");
  EXPECT_EQ(response.body["cards"].size(), 8u);
  double sum = 0.0;
  for (const json& factor : response.body["view"]["factors"]) {
    sum += factor["percent"].get<double>();
  }
  EXPECT_NEAR(sum, 100.0, 1e-9);
  EXPECT_NEAR(response.body["estimate"]["margin"].get<double>(),
              response.body["view"]["margin"].get<double>(), 1e-9);
}

TEST(ApiServiceTest, ExplainOptionsValidation) {
  ApiHarness harness(Defaults());
  json body = Body(ReferenceRecordJson());
  body["options"] = {{"narrative_mode", "poetry"}};
  ExpectError(harness.Call("POST", "/v1/explain", body.dump()), 422,
              "INVALID_VALUE", "/options/narrative_mode");
  body["options"] = {{"colour", "red"}};
  ExpectError(harness.Call("POST", "/v1/explain", body.dump()), 422,
              "INVALID_ARGUMENT", "/options/colour");
}

TEST(ApiServiceTest, ExplainLlmWithoutEndpointFallsBack) {
  ApiHarness harness(Defaults());
  json body = Body(ReferenceRecordJson());
  body["options"] = {{"narrative_mode", "llm"}};
  const ApiResponse response = harness.Call("POST", "/v1/explain", body.dump());
  ASSERT_EQ(response.status, 200);
  EXPECT_EQ(response.body["narrative_mode_used"], "FALLBACK");
  EXPECT_EQ(response.body["cards"].size(), 8u);
}

TEST(ApiServiceTest, SlowNarrativeBranchTimesOutToTemplateCards) {
  HarnessOptions options = Defaults();
  options.default_mode = narrate::NarrativeMode::kLlm;
  options.client = std::make_shared<SlowClient>();
  options.narrative_timeout = std::chrono::milliseconds(100);
  ApiHarness harness(options);
  const auto start = std::chrono::steady_clock::now();
  const ApiResponse response =
      harness.Call("POST", "/v1/explain", Body(ReferenceRecordJson()).dump());
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));
  ASSERT_EQ(response.status, 200);
  EXPECT_EQ(response.body["narrative_mode_used"], "FALLBACK");
  EXPECT_EQ(response.body["cards"].size(), 8u);
}

TEST(ApiServiceTest, LogsBuildHistory) {
  ApiHarness harness(Defaults());
  json baseline = {{"kind", "NONDAILY"},
                   {"date", "2024-03-01"},
                   {"values", ReferenceRecordJson()}};
  const ApiResponse first = harness.Call("POST", "/v1/logs", baseline.dump());
  ASSERT_EQ(first.status, 200) << first.body.dump();
  EXPECT_TRUE(first.body["ack"].get<bool>());
  EXPECT_EQ(first.body["history_point"]["date"], "2024-03-01");

  const json daily = {{"kind", "DAILY"},
                      {"date", "2024-03-02"},
                      {"values", {{"bmi", 22.0}, {"smoking", 0}}}};
  const ApiResponse second = harness.Call("POST", "/v1/logs", daily.dump());
  ASSERT_EQ(second.status, 200);

  const ApiResponse history = harness.Call("GET", "/v1/history?days=30");
  ASSERT_EQ(history.status, 200);
  ASSERT_EQ(history.body["points"].size(), 2u);
  EXPECT_EQ(history.body["points"][1]["date"], "2024-03-02");
  EXPECT_EQ(history.body["points"][1]["probability"],
            second.body["history_point"]["probability"]);
  EXPECT_EQ(harness.Call("GET", "/v1/history?days=1").body["points"].size(), 1u);
  // Another user sees nothing.
  EXPECT_TRUE(
      harness.Call("GET", "/v1/history", "", "bob").body["points"].empty());
}

TEST(ApiServiceTest, PartialBaselineAcksWithoutHistory) {
  ApiHarness harness(Defaults());
  const json partial = {{"kind", "NONDAILY"}, {"values", {{"age", 40}}}};
  const ApiResponse response = harness.Call("POST", "/v1/logs", partial.dump());
  ASSERT_EQ(response.status, 200);
  EXPECT_TRUE(response.body["history_point"].is_null());
}

TEST(ApiServiceTest, LogsValidation) {
  ApiHarness harness(Defaults());
  ExpectError(harness.Call("POST", "/v1/logs",
                           R"({"kind":"DAILY","values":{"family_history":0}})"),
              422, "UNCONTROLLABLE_IN_DAILY", "/values/family_history");
  ExpectError(harness.Call("POST", "/v1/logs",
                           R"({"kind":"WEEKLY","values":{"bmi":22}})"),
              422, "INVALID_VALUE", "/kind");
  ExpectError(harness.Call("POST", "/v1/logs", R"({"kind":"DAILY"})"), 422,
              "INVALID_ARGUMENT", "/values");
  ExpectError(harness.Call("POST", "/v1/logs",
                           R"({"kind":"DAILY","date":"2024-02-30",)"
                           R"("values":{"bmi":22}})"),
              422, "INVALID_ARGUMENT", "/date");
  ExpectError(harness.Call("POST", "/v1/logs",
                           R"({"kind":"DAILY","values":{"bmi":22}})", "../x"),
              422, "INVALID_ARGUMENT", "/user_id");
}

TEST(ApiServiceTest, SimulateWithRecordAndFromStore) {
  ApiHarness harness(Defaults());
  json body = Body(ReferenceRecordJson());
  body["overrides"] = json::object();
  const ApiResponse identity = harness.Call("POST", "/v1/simulate", body.dump());
  ASSERT_EQ(identity.status, 200) << identity.body.dump();
  EXPECT_EQ(identity.body["delta_probability"].get<double>(), 0.0);

  body["overrides"] = {{"sex", 0}};
  ExpectError(harness.Call("POST", "/v1/simulate", body.dump()), 422,
              "UNCONTROLLABLE_FEATURE", "/overrides/sex");

  // Without a record the stored state is used, which must be complete.
  ExpectError(harness.Call("POST", "/v1/simulate",
                           R"({"overrides":{"bmi":22}})"),
              422, "INCOMPLETE_BASELINE", "/age");
  harness.Call("POST", "/v1/logs",
               json{{"kind", "NONDAILY"}, {"values", ReferenceRecordJson()}}
                   .dump());
  const ApiResponse stored =
      harness.Call("POST", "/v1/simulate", R"({"overrides":{"bmi":22}})");
  ASSERT_EQ(stored.status, 200) << stored.body.dump();
  EXPECT_EQ(stored.body["after_record"]["bmi"], 22.0);
}

TEST(ApiServiceTest, HistoryDaysValidation) {
  ApiHarness harness(Defaults());
  for (const char* days : {"0", "-1", "abc", "3651", "1.5", ""}) {
    ExpectError(harness.Call("GET", std::string("/v1/history?days=") + days), 422,
                "INVALID_ARGUMENT", "/days");
  }
  EXPECT_EQ(harness.Call("GET", "/v1/history").body["days"], 30);
}

TEST(ApiServiceTest, ParallelExplainMatchesSerial) {
  ApiHarness harness(Defaults());
  std::vector<std::string> bodies;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> bmi(17, 40);
  std::uniform_real_distribution<double> glucose(70, 200);
  for (int i = 0; i < 16; ++i) {
    json record = ReferenceRecordJson();
    record["bmi"] = std::round(bmi(rng) * 10) / 10;
    record["fasting_glucose"] = std::round(glucose(rng));
    bodies.push_back(Body(record).dump());
  }
  std::vector<json> serial;
  for (const std::string& body : bodies) {
    serial.push_back(harness.Call("POST", "/v1/explain", body).body);
  }
  std::vector<std::future<json>> parallel;
  for (const std::string& body : bodies) {
    parallel.push_back(std::async(std::launch::async, [&harness, body] {
      return harness.Call("POST", "/v1/explain", body).body;
    }));
  }
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    EXPECT_EQ(parallel[i].get(), serial[i]) << "request " << i;
  }
}

TEST(ApiHttpTest, CorsAndTransport) {
  HarnessOptions options = Defaults();
  options.ui_origin = "http://ui.example";
  ApiHarness harness(options);
  httplib::Client client = harness.Client();

  const auto preflight = client.Options("/v1/explain");
  ASSERT_TRUE(preflight);
  EXPECT_EQ(preflight->status, 204);
  EXPECT_EQ(preflight->get_header_value("Access-Control-Allow-Origin"),
            "http://ui.example");
  EXPECT_NE(preflight->get_header_value("Access-Control-Allow-Headers")
                .find("X-User"),
            std::string::npos);

  const auto health = client.Get("/v1/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"),
            "http://ui.example");
  EXPECT_EQ(health->get_header_value("Content-Type"), "application/json");

  const auto logged = client.Post(
      "/v1/logs", httplib::Headers{{"X-User", "dana"}},
      json{{"kind", "NONDAILY"}, {"date", "2024-06-01"},
           {"values", ReferenceRecordJson()}}
          .dump(),
      "application/json");
  ASSERT_TRUE(logged);
  EXPECT_EQ(logged->status, 200) << logged->body;
  const auto history =
      client.Get("/v1/history?days=7", httplib::Headers{{"X-User", "dana"}});
  ASSERT_TRUE(history);
  EXPECT_EQ(json::parse(history->body)["points"].size(), 1u);

  const auto unprocessable =
      client.Post("/v1/estimate", "{}", "application/json");
  ASSERT_TRUE(unprocessable);
  EXPECT_EQ(unprocessable->status, 422);
  EXPECT_EQ(json::parse(unprocessable->body)["field_path"], "/record");

  const auto huge = client.Post("/v1/estimate", std::string(2 << 20, ' '),
                                "application/json");
  ASSERT_TRUE(huge);
  EXPECT_EQ(huge->status, 413);
  EXPECT_EQ(json::parse(huge->body)["code"], "PAYLOAD_TOO_LARGE");
}

TEST(ApiServiceTest, GroundedLlmRepliesAreServed) {
  HarnessOptions options = Defaults();
  auto client = std::make_shared<GoodClient>();
  options.client = client;
  ApiHarness harness(options);
  const json record_body = Body(ReferenceRecordJson());
  const ApiResponse plain =
      harness.Call("POST", "/v1/explain", record_body.dump());
  ASSERT_EQ(plain.status, 200);

  // Echo the grounded cards back in reverse order as the model's reply.
  json cards = json::array();
  for (const json& card : plain.body["cards"]) {
    cards.insert(cards.begin(),
                 json::object({{"feature_id", card["feature_id"]},
                               {"direction", card["direction"]},
                               {"contribution_percent",
                                card["contribution_percent"]},
                               {"sentences", card["sentences"]}}));
  }
  client->reply = json::object({{"cards", cards}}).dump();
  json body = record_body;
  body["options"] = {{"narrative_mode", "llm"}};
  const ApiResponse llm = harness.Call("POST", "/v1/explain", body.dump());
  ASSERT_EQ(llm.status, 200);
  EXPECT_EQ(llm.body["narrative_mode_used"], "LLM");
  EXPECT_EQ(llm.body["cards"], plain.body["cards"]);

  // An ungrounded reply (the reference few-shot, for other numbers) is
  // rejected and replaced.
  client->reply = testing::GoodCompletion().dump();
  const ApiResponse rejected = harness.Call("POST", "/v1/explain", body.dump());
  EXPECT_EQ(rejected.body["narrative_mode_used"], "FALLBACK");
  EXPECT_EQ(rejected.body["cards"], plain.body["cards"]);
}

TEST(ApiSchemaTest, EveryBodyMatchesPublishedSchema) {
  ApiHarness harness(Defaults());
  auto expect_valid = [](const std::string& name, const ApiResponse& response) {
    const std::vector<std::string> errors =
        testing::ValidateApiBody(name, response.body);
    EXPECT_TRUE(errors.empty())
        << name << ": " << ::testing::PrintToString(errors) << "\n"
        << response.body.dump();
  };
  expect_valid("Health", harness.Call("GET", "/v1/health"));
  expect_valid("Schema", harness.Call("GET", "/v1/schema"));
  const std::string record = Body(ReferenceRecordJson()).dump();
  expect_valid("Estimate", harness.Call("POST", "/v1/estimate", record));
  expect_valid("Explain", harness.Call("POST", "/v1/explain", record));
  json llm = Body(ReferenceRecordJson());
  llm["options"] = {{"narrative_mode", "llm"}};
  expect_valid("Explain", harness.Call("POST", "/v1/explain", llm.dump()));
  expect_valid("Simulation",
               harness.Call("POST", "/v1/simulate",
                            json::object({{"record", ReferenceRecordJson()},
                                          {"overrides", {{"bmi", 21}}}})
                                .dump()));
  expect_valid("LogAck",
               harness.Call("POST", "/v1/logs",
                            R"({"kind":"NONDAILY","values":{"age":40}})"));
  expect_valid("LogAck",
               harness.Call("POST", "/v1/logs",
                            json::object({{"kind", "NONDAILY"},
                                          {"values", ReferenceRecordJson()}})
                                .dump()));
  expect_valid("History", harness.Call("GET", "/v1/history?days=7"));
  for (const ApiResponse& error :
       {harness.Call("GET", "/v1/nope"), harness.Call("POST", "/v1/logs", "x"),
        harness.Call("POST", "/v1/estimate", "{}")}) {
    EXPECT_GE(error.status, 400);
    expect_valid("Error", error);
  }
}

TEST(ApiSchemaTest, ValidatorRejectsDrift) {
  ApiHarness harness(Defaults());
  json body =
      harness.Call("POST", "/v1/explain", Body(ReferenceRecordJson()).dump())
          .body;
  ASSERT_TRUE(testing::ValidateApiBody("Explain", body).empty());
  json drifted = body;
  drifted["view"]["factors"][0]["color"] = "BLUE";
  EXPECT_FALSE(testing::ValidateApiBody("Explain", drifted).empty());
  drifted = body;
  drifted["cards"][0].erase("sentences");
  EXPECT_FALSE(testing::ValidateApiBody("Explain", drifted).empty());
  drifted = body;
  drifted["extra"] = 1;
  EXPECT_FALSE(testing::ValidateApiBody("Explain", drifted).empty());
  drifted = body;
  drifted["estimate"]["probability"] = 1.5;
  EXPECT_FALSE(testing::ValidateApiBody("Explain", drifted).empty());
  EXPECT_FALSE(testing::ValidateApiBody("History", {{"days", 30},
                                                   {"points",
                                                    {{{"date", "24-1-1"},
                                                      {"probability", 0.1},
                                                      {"level", "LOW"}}}}})
                   .empty());
}

}  // namespace
}  // namespace riskx::api
