#pragma once

#include <string>
#include <vector>

#include "riskx/explain/explanation_view.h"
#include "riskx/model/feature_schema.h"
#include "riskx/narrate/knowledge_base.h"

namespace riskx::narrate {

struct PromptDocument {
  std::string system_text;
  std::string user_text;

  bool operator==(const PromptDocument&) const = default;
};

// A worked example: the user table for one patient and the JSON answer.
struct FewShotExample {
  std::string user_text;
  std::string response_text;
};

// Markdown table of this patient's factors: value, category, SHAP value,
// direction, one-decimal contribution and rank.
std::string RenderPatientTable(const explain::ExplanationView& view,
                               const model::PatientRecord& record,
                               const KnowledgeBase& kb);

// Example answer built from grounded template cards for `record`.
FewShotExample MakeFewShot(const explain::ExplanationView& view,
                           const model::PatientRecord& record,
                           const KnowledgeBase& kb);

// One worked example for `schema`: a reference patient for the default
// diabetes schema, or mid-range values with alternating attributions for
// any other schema.
std::vector<FewShotExample> DefaultFewShots(const model::FeatureSchema& schema,
                                            const KnowledgeBase& kb);

// System prompt (persona, task, rules, knowledge-base table, output schema,
// examples) and user prompt (this patient's table). Throws
// kEmptyKnowledgeBase for an empty knowledge base and kInvalidArgument when
// `few_shots` is empty.
PromptDocument BuildLlmPrompt(const explain::ExplanationView& view,
                              const model::PatientRecord& record,
                              const KnowledgeBase& kb,
                              const std::vector<FewShotExample>& few_shots);

}  // namespace riskx::narrate
