#include "riskx/api/service.h"

#include <cctype>
#include <charconv>
#include <future>
#include <iostream>
#include <set>
#include <thread>

#include "riskx/explain/explanation_view.h"
#include "riskx/explain/shap.h"
#include "riskx/model/risk.h"
#include "riskx/simulate/simulate.h"

namespace riskx::api {
namespace {

using nlohmann::json;

json ParseObject(std::string_view body) {
  json document = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (document.is_discarded()) {
    throw Error(ErrorCode::kMalformedDocument, "request body is not valid JSON");
  }
  if (!document.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object",
                "/");
  }
  return document;
}

void AllowOnly(const json& object, const std::set<std::string>& keys,
               const std::string& prefix = "") {
  for (const auto& [key, value] : object.items()) {
    if (!keys.count(key)) {
      throw Error(ErrorCode::kInvalidArgument, "unexpected field '" + key + "'",
                  prefix + "/" + key);
    }
  }
}

const json& Require(const json& object, const std::string& key) {
  const auto it = object.find(key);
  if (it == object.end()) {
    throw Error(ErrorCode::kInvalidArgument, "'" + key + "' is required",
                "/" + key);
  }
  return *it;
}

std::map<std::string, double> NumberMap(const json& object,
                                        const std::string& path) {
  if (!object.is_object()) {
    throw Error(ErrorCode::kInvalidValue, path.substr(1) + " must be an object",
                path);
  }
  std::map<std::string, double> out;
  for (const auto& [key, value] : object.items()) {
    if (!value.is_number()) {
      throw Error(ErrorCode::kInvalidValue, key + " must be a number",
                  path + "/" + key);
    }
    out[key] = value.get<double>();
  }
  return out;
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedDocument:
      return 400;
    case ErrorCode::kIoError:
      return 500;
    default:
      return 422;
  }
}

template <typename Fn>
ApiResponse Guard(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    const std::string code = e.code() == ErrorCode::kMalformedDocument
                                 ? "MALFORMED_JSON"
                                 : EnvelopeCode(e.code());
    return ErrorResponse(StatusFor(e.code()), code, e.what(), e.field_path());
  } catch (const std::exception& e) {
    std::clog << "api: internal error: " << e.what() << "\n";
    return ErrorResponse(500, "INTERNAL", "internal error");
  }
}

}  // namespace

std::string EnvelopeCode(ErrorCode code) {
  std::string out;
  for (char c : ErrorCodeName(code)) {
    if (std::isupper(static_cast<unsigned char>(c)) && !out.empty()) out += '_';
    out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

ApiResponse ErrorResponse(int status, std::string code, std::string message,
                          std::string field_path) {
  return {status,
          {{"code", std::move(code)},
           {"message", std::move(message)},
           {"field_path", std::move(field_path)}}};
}

Service::Service(std::shared_ptr<const model::TreeEnsemble> ensemble,
                 const model::FeatureSchema& schema,
                 std::shared_ptr<const narrate::NarrativeGenerator> generator,
                 std::shared_ptr<store::Store> store, ServiceOptions options)
    : ensemble_(std::move(ensemble)),
      schema_(schema),
      generator_(std::move(generator)),
      store_(std::move(store)),
      options_(std::move(options)) {}

ApiResponse Service::Handle(const ApiRequest& request) const {
  struct Route {
    const char* method;
    const char* path;
  };
  static constexpr Route kRoutes[] = {
      {"GET", "/v1/health"},    {"GET", "/v1/schema"},
      {"POST", "/v1/estimate"}, {"POST", "/v1/explain"},
      {"POST", "/v1/logs"},     {"POST", "/v1/simulate"},
      {"GET", "/v1/history"},
  };
  bool path_known = false;
  for (const Route& route : kRoutes) {
    if (request.path != route.path) continue;
    path_known = true;
    if (request.method != route.method) continue;
    const std::string path = route.path;
    if (path == "/v1/health") return Health();
    if (path == "/v1/schema") return Schema();
    if (path == "/v1/estimate") return Estimate(request.body);
    if (path == "/v1/explain") return Explain(request.body);
    if (path == "/v1/logs") return Logs(request.user_id, request.body);
    if (path == "/v1/simulate") return Simulate(request.user_id, request.body);
    std::optional<std::string> days;
    if (auto it = request.query.find("days"); it != request.query.end()) {
      days = it->second;
    }
    return History(request.user_id, days);
  }
  if (path_known) {
    return ErrorResponse(405, "METHOD_NOT_ALLOWED",
                         request.method + " is not supported on " + request.path);
  }
  return ErrorResponse(404, "NOT_FOUND", "no endpoint at " + request.path);
}

ApiResponse Service::Health() const {
  return {200,
          {{"status", "ok"},
           {"version", options_.version},
           {"model_checksum", options_.model_checksum},
           {"schema_version", schema_.version()},
           {"narrative_mode",
            narrate::NarrativeModeName(options_.default_narrative_mode)}}};
}

ApiResponse Service::Schema() const {
  return {200, model::SchemaToJson(schema_)};
}

ApiResponse Service::Estimate(std::string_view body) const {
  return Guard([&] {
    const json request = ParseObject(body);
    AllowOnly(request, {"record"});
    const model::PatientRecord record =
        model::RecordFromJson(schema_, Require(request, "record"), "/record");
    return ApiResponse{
        200, model::EstimateToJson(model::Predict(*ensemble_, schema_, record))};
  });
}

ApiResponse Service::Explain(std::string_view body) const {
  return Guard([&] {
    const json request = ParseObject(body);
    AllowOnly(request, {"record", "options"});
    const model::PatientRecord record =
        model::RecordFromJson(schema_, Require(request, "record"), "/record");
    narrate::NarrativeMode mode = options_.default_narrative_mode;
    if (auto it = request.find("options"); it != request.end()) {
      if (!it->is_object()) {
        throw Error(ErrorCode::kInvalidValue, "options must be an object",
                    "/options");
      }
      AllowOnly(*it, {"narrative_mode"}, "/options");
      if (auto m = it->find("narrative_mode"); m != it->end()) {
        const auto parsed = m->is_string()
                                ? narrate::ParseNarrativeMode(m->get<std::string>())
                                : std::nullopt;
        if (!parsed) {
          throw Error(ErrorCode::kInvalidValue,
                      "narrative_mode must be 'template' or 'llm'",
                      "/options/narrative_mode");
        }
        mode = *parsed;
      }
    }

    const model::RiskEstimate estimate =
        model::Predict(*ensemble_, schema_, record);
    const explain::ExplanationView view =
        explain::ToPercentages(explain::TreeShap(*ensemble_, record), schema_);

    // Narrative branch runs beside the numeric payload. The thread owns
    // copies of everything it reads, so an abandoned branch is harmless.
    auto task = std::make_shared<std::packaged_task<narrate::NarrativeResult()>>(
        [generator = generator_, mode, view, record] {
          return generator->Generate(mode, view, record);
        });
    std::future<narrate::NarrativeResult> pending = task->get_future();
    std::thread([task] { (*task)(); }).detach();

    json response = {{"estimate", model::EstimateToJson(estimate)},
                     {"view", explain::ViewToJson(view)}};

    narrate::NarrativeResult narrative;
    if (pending.wait_for(options_.narrative_timeout) ==
        std::future_status::ready) {
      try {
        narrative = pending.get();
      } catch (const std::exception& e) {
        std::clog << "api: narrative branch failed: " << e.what() << "\n";
        narrative.mode_used = narrate::NarrativeMode::kFallback;
      }
    } else {
      std::clog << "api: narrative branch timed out\n";
      narrative.mode_used = narrate::NarrativeMode::kFallback;
    }
    if (narrative.cards.empty()) {
      narrative.cards = narrate::RenderTemplateNarrative(
          view, record, generator_->knowledge_base());
    }
    response["cards"] = narrate::CardsToJson(narrative.cards);
    response["narrative_mode_used"] =
        narrate::NarrativeModeName(narrative.mode_used);
    return ApiResponse{200, std::move(response)};
  });
}

ApiResponse Service::Logs(const std::string& user_id,
                          std::string_view body) const {
  return Guard([&] {
    const json request = ParseObject(body);
    AllowOnly(request, {"kind", "date", "values"});
    const json& kind = Require(request, "kind");
    const auto parsed_kind = kind.is_string()
                                 ? store::ParseLogKind(kind.get<std::string>())
                                 : std::nullopt;
    if (!parsed_kind) {
      throw Error(ErrorCode::kInvalidValue, "kind must be DAILY or NONDAILY",
                  "/kind");
    }
    store::LogEntry entry;
    entry.user_id = user_id;
    entry.kind = *parsed_kind;
    entry.date = store::TodayUtc();
    if (auto it = request.find("date"); it != request.end()) {
      if (!it->is_string()) {
        throw Error(ErrorCode::kInvalidValue, "date must be YYYY-MM-DD", "/date");
      }
      entry.date = it->get<std::string>();
    }
    entry.values = NumberMap(Require(request, "values"), "/values");
    store_->PutLog(entry);

    json point = nullptr;
    try {
      const model::PatientRecord record =
          store_->CurrentRecord(user_id, entry.date);
      const model::RiskEstimate estimate =
          model::Predict(*ensemble_, schema_, record);
      const store::RiskHistoryPoint history_point{
          user_id, entry.date, estimate.probability, estimate.level};
      store_->PutHistoryPoint(history_point);
      point = store::HistoryPointToJson(history_point);
    } catch (const Error& e) {
      // Until every factor has been logged there is nothing to score.
      if (e.code() != ErrorCode::kIncompleteBaseline) throw;
    }
    return ApiResponse{200, {{"ack", true}, {"history_point", point}}};
  });
}

ApiResponse Service::Simulate(const std::string& user_id,
                              std::string_view body) const {
  return Guard([&] {
    const json request = ParseObject(body);
    AllowOnly(request, {"record", "overrides"});
    simulate::SimulationRequest simulation;
    if (auto it = request.find("record"); it != request.end()) {
      simulation.base_record = model::RecordFromJson(schema_, *it, "/record");
    } else {
      simulation.base_record = store_->CurrentRecord(user_id);
    }
    if (auto it = request.find("overrides"); it != request.end()) {
      simulation.overrides = NumberMap(*it, "/overrides");
    }
    return ApiResponse{200, simulate::SimulationToJson(
                                schema_, simulate::Simulate(*ensemble_, schema_,
                                                            simulation))};
  });
}

ApiResponse Service::History(const std::string& user_id,
                             const std::optional<std::string>& days) const {
  return Guard([&] {
    int count = 30;
    if (days) {
      const char* begin = days->data();
      const char* end = begin + days->size();
      const auto [ptr, ec] = std::from_chars(begin, end, count);
      if (ec != std::errc() || ptr != end || count < 1 || count > 3650) {
        throw Error(ErrorCode::kInvalidArgument,
                    "days must be an integer between 1 and 3650", "/days");
      }
    }
    json points = json::array();
    for (const store::RiskHistoryPoint& point : store_->History(user_id, count)) {
      points.push_back(store::HistoryPointToJson(point));
    }
    return ApiResponse{200, {{"days", count}, {"points", std::move(points)}}};
  });
}

}  // namespace riskx::api
