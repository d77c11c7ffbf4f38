#include "narrate_fixture.h"

#include <functional>

#include "riskx/narrate/prompt.h"

namespace riskx::testing {
namespace {

using narrate::Reason;
using nlohmann::json;

const std::vector<std::string>& AllIds() {
  static const auto* const kIds = new std::vector<std::string>{
      "age",         "sex",         "bmi",       "fasting_glucose",
      "systolic_bp", "family_history", "physical_activity", "smoking"};
  return *kIds;
}

json& CardFor(json& doc, const std::string& id) {
  for (json& card : doc["cards"]) {
    if (card["feature_id"] == id) return card;
  }
  throw std::runtime_error("no card " + id);
}

void Replace(std::string& text, const std::string& from, const std::string& to) {
  const std::size_t at = text.find(from);
  if (at == std::string::npos) throw std::runtime_error("missing " + from);
  text.replace(at, from.size(), to);
}

// First sentence of `id`'s card with `from` replaced by `to`.
std::function<void(json&)> EditOpening(std::string id, std::string from,
                                       std::string to) {
  return [=](json& doc) {
    std::string text = CardFor(doc, id)["sentences"][0];
    Replace(text, from, to);
    CardFor(doc, id)["sentences"][0] = text;
  };
}

std::vector<std::pair<std::string, Reason>> Everyone(Reason reason) {
  std::vector<std::pair<std::string, Reason>> out;
  for (const std::string& id : AllIds()) out.emplace_back(id, reason);
  return out;
}

}  // namespace

model::PatientRecord ReferenceRecord() {
  return {{52, 1, 24.7, 104, 131, 1, 60, 1}};
}

explain::Attribution ReferenceAttribution() {
  return {-0.6, {-0.12, 0.03, 0.17, 0.15, 0.08, 0.30, -0.10, 0.05}};
}

explain::ExplanationView ReferenceView() {
  return explain::ToPercentages(ReferenceAttribution(), model::DefaultSchema());
}

narrate::KnowledgeBase ReferenceKnowledgeBase() {
  return narrate::BuildKnowledgeBase(model::DefaultSchema(),
                                     std::vector<double>(8, 12.5));
}

json GoodCompletion() {
  return json::parse(narrate::MakeFewShot(ReferenceView(), ReferenceRecord(),
                                          ReferenceKnowledgeBase())
                         .response_text);
}

std::vector<CorruptedResponse> CorruptedResponses() {
  struct Mutation {
    std::string name;
    std::function<void(json&)> edit;
    std::vector<std::pair<std::string, Reason>> expected;
  };
  const std::vector<Mutation> mutations = {
      {"bmi says decreases",
       EditOpening("bmi", "increases", "decreases"),
       {{"bmi", Reason::kDirectionMismatch}}},
      {"age says increases",
       EditOpening("age", "decreases", "increases"),
       {{"age", Reason::kDirectionMismatch}}},
      {"family history direction field flipped",
       [](json& d) { CardFor(d, "family_history")["direction"] = "DECREASES"; },
       {{"family_history", Reason::kDirectionMismatch}}},
      {"glucose described as no influence",
       EditOpening("fasting_glucose", "increases your diabetes risk",
                   "has no influence on your diabetes risk"),
       {{"fasting_glucose", Reason::kDirectionMismatch}}},
      {"bp claims both directions",
       EditOpening("systolic_bp", "increases your diabetes risk",
                   "increases and then reduces your diabetes risk"),
       {{"systolic_bp", Reason::kDirectionMismatch}}},
      {"indonesian wrong direction",
       [](json& d) {
         CardFor(d, "bmi")["sentences"][0] =
             "BMI Anda 24.7 kg/m² menurunkan risiko diabetes Anda sebesar "
             "17.0%.";
       },
       {{"bmi", Reason::kDirectionMismatch}}},
      {"bmi digits transposed",
       EditOpening("bmi", "24.7", "27.4"),
       {{"bmi", Reason::kValueMismatch}}},
      {"bmi percentage transposed",
       EditOpening("bmi", "17.0%", "71.0%"),
       {{"bmi", Reason::kValueMismatch}}},
      {"contribution field off by one tenth",
       [](json& d) { CardFor(d, "bmi")["contribution_percent"] = 17.1; },
       {{"bmi", Reason::kValueMismatch}}},
      {"glucose value invented",
       EditOpening("fasting_glucose", "104", "140"),
       {{"fasting_glucose", Reason::kValueMismatch}}},
      {"age statistic invented",
       [](json& d) {
         CardFor(d, "age")["sentences"][1] =
             "People over 62 are much more likely to develop diabetes.";
       },
       {{"age", Reason::kValueMismatch}}},
      {"smoking card missing",
       [](json& d) {
         json kept = json::array();
         for (json& c : d["cards"]) {
           if (c["feature_id"] != "smoking") kept.push_back(c);
         }
         d["cards"] = kept;
       },
       {{"smoking", Reason::kMissingFeature}}},
      {"two cards missing",
       [](json& d) {
         json kept = json::array();
         for (json& c : d["cards"]) {
           if (c["feature_id"] != "sex" && c["feature_id"] != "systolic_bp") {
             kept.push_back(c);
           }
         }
         d["cards"] = kept;
       },
       {{"sex", Reason::kMissingFeature},
        {"systolic_bp", Reason::kMissingFeature}}},
      {"one sentence card",
       [](json& d) {
         json& card = CardFor(d, "bmi");
         card["sentences"] = json::array({card["sentences"][0]});
       },
       {{"bmi", Reason::kSentenceCount}}},
      {"four sentence card",
       [](json& d) {
         CardFor(d, "bmi")["sentences"].push_back("Small changes add up.");
       },
       {{"bmi", Reason::kSentenceCount}}},
      {"four sentences in one string",
       [](json& d) {
         json& card = CardFor(d, "systolic_bp");
         std::string joined;
         for (const json& s : card["sentences"]) {
           joined += s.get<std::string>() + " ";
         }
         card["sentences"] = json::array({joined + "Check it yearly."});
       },
       {{"systolic_bp", Reason::kSentenceCount}}},
      {"blank sentences",
       [](json& d) { CardFor(d, "sex")["sentences"] = {"", " "}; },
       {{"sex", Reason::kSentenceCount}}},
      {"duplicate card",
       [](json& d) { d["cards"].push_back(CardFor(d, "bmi")); },
       {{"bmi", Reason::kSchemaError}}},
  };

  std::vector<CorruptedResponse> out;
  for (const Mutation& m : mutations) {
    json doc = GoodCompletion();
    m.edit(doc);
    out.push_back({m.name, doc.dump(2), m.expected});
  }

  const std::string good = GoodCompletion().dump(2);
  json no_sentences = GoodCompletion();
  CardFor(no_sentences, "bmi").erase("sentences");
  json extra_key = GoodCompletion();
  CardFor(extra_key, "sex")["confidence"] = 0.9;
  json bad_direction = GoodCompletion();
  CardFor(bad_direction, "age")["direction"] = "UP";
  json string_percent = GoodCompletion();
  CardFor(string_percent, "bmi")["contribution_percent"] = "17.0";
  json string_sentences = GoodCompletion();
  CardFor(string_sentences, "bmi")["sentences"] = "One. Two.";
  json wrapped = {{"result", GoodCompletion()}};

  const std::vector<std::pair<std::string, std::string>> schema_breaks = {
      {"missing sentences field", no_sentences.dump(2)},
      {"unknown card field", extra_key.dump(2)},
      {"unknown direction", bad_direction.dump(2)},
      {"percent as string", string_percent.dump(2)},
      {"sentences as string", string_sentences.dump(2)},
      {"wrapped in extra object", wrapped.dump(2)},
      {"truncated document", good.substr(0, good.size() / 2)},
      {"bare card array", GoodCompletion()["cards"].dump(2)},
      {"prose before json", "Here are your cards:\n" + good},
      {"empty reply", ""},
  };
  for (const auto& [name, text] : schema_breaks) {
    out.push_back({name, text, Everyone(Reason::kSchemaError)});
  }
  return out;
}

}  // namespace riskx::testing
