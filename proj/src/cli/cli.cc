#include "riskx/cli/cli.h"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "riskx/api/server.h"
#include "riskx/common/checksum.h"
#include "riskx/common/error.h"
#include "riskx/explain/explanation_view.h"
#include "riskx/explain/shap.h"
#include "riskx/model/dataset.h"
#include "riskx/model/risk.h"
#include "riskx/model/trainer.h"
#include "riskx/narrate/knowledge_base.h"
#include "riskx/narrate/narrative_card.h"
#include "riskx/simulate/simulate.h"

namespace riskx::cli {
namespace {

using nlohmann::json;

struct Options {
  std::string model_path;
  std::string input_path;
  std::string output_path;
  std::string reference_path;
  std::string data_dir;
  std::string host = "0.0.0.0";
  std::string record_json;
  std::vector<std::string> overrides;
  std::optional<int> port;
  bool cards = false;
  model::TrainingParams params;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// Writes to the -o file when given, otherwise to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw Error(ErrorCode::kIoError, "cannot write " + path);
    stream_ = &file_;
  }
  std::ostream& operator*() { return *stream_; }
  void Close(const std::string& path) {
    if (!file_.is_open()) return;
    file_.close();
    if (!file_) throw Error(ErrorCode::kIoError, "cannot write " + path);
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void Train(const Options& options, std::ostream& out) {
  const model::FeatureSchema& schema = model::DefaultSchema();
  const model::Dataset data =
      model::LoadDatasetCsv(options.input_path, schema, /*require_label=*/true);
  std::vector<double> losses;
  const model::TreeEnsemble ensemble =
      model::FitGbdt(data, schema, options.params, &losses);
  const std::string document = model::SaveModel(ensemble);
  Sink sink(options.output_path, out);
  *sink << document;
  sink.Close(options.output_path);
  if (!options.output_path.empty()) {
    out << json{{"model", options.output_path},
                {"rows", data.size()},
                {"trees", ensemble.trees().size()},
                {"initial_log_loss", losses.front()},
                {"final_log_loss", losses.back()},
                {"sha256", Sha256Hex(document)}}
               .dump()
        << "\n";
  }
}

void ValidateModel(const Options& options, std::ostream& out) {
  const std::string bytes = ReadFile(options.model_path);
  const model::TreeEnsemble ensemble =
      model::LoadModel(bytes, model::DefaultSchema());
  std::size_t nodes = 0;
  std::size_t leaves = 0;
  std::size_t depth = 0;
  for (const model::Tree& tree : ensemble.trees()) {
    nodes += tree.nodes.size();
    for (const model::TreeNode& node : tree.nodes) leaves += node.is_leaf();
    depth = std::max(depth, tree.Depth());
  }
  out << json{{"valid", true},
              {"schema_version", ensemble.schema_version()},
              {"num_features", ensemble.num_features()},
              {"trees", ensemble.trees().size()},
              {"nodes", nodes},
              {"leaves", leaves},
              {"max_depth", depth},
              {"base_margin", ensemble.base_margin()},
              {"sha256", Sha256Hex(bytes)}}
             .dump()
      << "\n";
}

void Explain(const Options& options, std::ostream& out) {
  const model::FeatureSchema& schema = model::DefaultSchema();
  const model::TreeEnsemble ensemble =
      model::LoadModelFile(options.model_path, schema);
  const model::Dataset data =
      model::LoadDatasetCsv(options.input_path, schema, /*require_label=*/false);

  std::optional<narrate::KnowledgeBase> kb;
  if (options.cards) {
    const std::vector<model::PatientRecord> reference =
        options.reference_path.empty()
            ? data.rows
            : model::LoadDatasetCsv(options.reference_path, schema, false).rows;
    kb = narrate::BuildKnowledgeBase(
        schema, narrate::ComputeGlobalImportance(ensemble, reference));
  }

  Sink sink(options.output_path, out);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const model::PatientRecord& record = data.rows[i];
    const explain::ExplanationView view =
        explain::ToPercentages(explain::TreeShap(ensemble, record), schema);
    json line = {{"row", i},
                 {"estimate",
                  model::EstimateToJson(model::Predict(ensemble, schema, record))},
                 {"view", explain::ViewToJson(view)}};
    if (kb) {
      line["cards"] = narrate::CardsToJson(
          narrate::RenderTemplateNarrative(view, record, *kb));
    }
    *sink << line.dump() << "\n";
  }
  sink.Close(options.output_path);
}

std::map<std::string, double> ParseOverrides(
    const std::vector<std::string>& assignments) {
  std::map<std::string, double> overrides;
  for (const std::string& assignment : assignments) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw CLI::ValidationError("--set", "expected id=value, got '" +
                                              assignment + "'");
    }
    const std::string id = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) {
      throw CLI::ValidationError("--set", "'" + text + "' is not a number");
    }
    overrides[id] = value;
  }
  return overrides;
}

void Simulate(const Options& options, std::ostream& out) {
  const model::FeatureSchema& schema = model::DefaultSchema();
  const std::map<std::string, double> overrides =
      ParseOverrides(options.overrides);
  const model::TreeEnsemble ensemble =
      model::LoadModelFile(options.model_path, schema);
  std::vector<model::PatientRecord> rows;
  if (!options.record_json.empty()) {
    json document = json::parse(options.record_json, nullptr, false);
    if (document.is_discarded()) {
      throw Error(ErrorCode::kMalformedDocument, "--record is not valid JSON");
    }
    rows.push_back(model::RecordFromJson(schema, document));
  } else {
    rows = model::LoadDatasetCsv(options.input_path, schema, false).rows;
  }

  Sink sink(options.output_path, out);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    json line = simulate::SimulationToJson(
        schema, simulate::Simulate(ensemble, schema, {rows[i], overrides}));
    line["row"] = i;
    *sink << line.dump() << "\n";
  }
  sink.Close(options.output_path);
}

int Serve(const Options& options) {
  api::ServerConfig config;
  api::ApplyEnvironment(config);
  config.model_path = options.model_path;
  config.reference_path = options.reference_path;
  config.host = options.host;
  if (options.port) config.port = *options.port;
  if (!options.data_dir.empty()) config.data_dir = options.data_dir;
  return api::Serve(config);
}

void ReportError(std::ostream& err, const std::string& code,
                 const std::string& message, const std::string& field_path) {
  err << json{{"error", code}, {"message", message}, {"field_path", field_path}}
             .dump()
      << "\n";
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Options options;
  CLI::App app{"Diabetes risk model tooling", "riskx"};
  app.require_subcommand(1);

  CLI::App* train = app.add_subcommand("train", "Fit a model on a labeled CSV");
  train->add_option("-i,--input", options.input_path, "Labeled training CSV")
      ->required();
  train->add_option("-o,--output", options.output_path, "Model file to write");
  train->add_option("--seed", options.params.seed, "Random seed")->required();
  train->add_option("--rounds", options.params.rounds)
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
  train->add_option("--max-depth", options.params.max_depth)
      ->check(CLI::Range(1, 16))
      ->capture_default_str();
  train->add_option("--learning-rate", options.params.learning_rate)
      ->check(CLI::Range(1e-6, 1.0))
      ->capture_default_str();
  train->add_option("--l2", options.params.l2)
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train->add_option("--min-cover", options.params.min_cover)
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  train->add_option("--subsample", options.params.subsample)
      ->check(CLI::Range(1e-6, 1.0))
      ->capture_default_str();

  CLI::App* validate =
      app.add_subcommand("validate-model", "Check a model file's structure");
  validate->add_option("-m,--model,model", options.model_path, "Model file")
      ->required();

  CLI::App* explain =
      app.add_subcommand("explain", "Explain every CSV row as a JSON line");
  explain->add_option("-m,--model", options.model_path)->required();
  explain->add_option("-i,--input", options.input_path)->required();
  explain->add_option("-o,--output", options.output_path);
  explain->add_flag("--cards", options.cards, "Include template cards");
  explain->add_option("--reference", options.reference_path,
                      "Rows for global importance (default: the input)");

  CLI::App* simulate =
      app.add_subcommand("simulate", "Apply what-if overrides to records");
  simulate->add_option("-m,--model", options.model_path)->required();
  CLI::Option* input = simulate->add_option("-i,--input", options.input_path);
  CLI::Option* record =
      simulate->add_option("--record", options.record_json, "Record as JSON");
  input->excludes(record);
  simulate->add_option("-o,--output", options.output_path);
  simulate->add_option("--set", options.overrides, "Override as id=value");

  CLI::App* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("-m,--model", options.model_path)->required();
  serve->add_option("--port", options.port, "Default: $PORT or 8080")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--host", options.host)->capture_default_str();
  serve->add_option("--reference", options.reference_path);
  serve->add_option("--data-dir", options.data_dir,
                    "Default: $RISKX_DATA_DIR or ./riskx-data");

  std::vector<const char*> argv = {"riskx"};
  for (const std::string& arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (simulate->parsed() && input->count() == 0 && record->count() == 0) {
      throw CLI::RequiredError("-i,--input or --record");
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    ReportError(err, "Usage", e.what(), "");
    return kExitUsage;
  }

  try {
    if (train->parsed()) Train(options, out);
    if (validate->parsed()) ValidateModel(options, out);
    if (explain->parsed()) Explain(options, out);
    if (simulate->parsed()) Simulate(options, out);
    if (serve->parsed()) return Serve(options);
  } catch (const CLI::ParseError& e) {
    ReportError(err, "Usage", e.what(), "");
    return kExitUsage;
  } catch (const Error& e) {
    ReportError(err, std::string(ErrorCodeName(e.code())), e.what(),
                e.field_path());
    return kExitDataError;
  } catch (const std::exception& e) {
    ReportError(err, "Internal", e.what(), "");
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace riskx::cli
