#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "chartkit/chart_types.hpp"
#include "chartkit/llm_client.hpp"

namespace chartkit::benchgen {

// Sampling pools for benchmark generation: the 18 chart types (general
// types carry extra draw weight) and 22 topics spanning commerce, industry,
// society, culture and lifestyle.
struct GenerationPools {
  struct TypeEntry {
    ChartTypeId type;
    double weight;
    std::string hint;  // type-specific plotting/diversity guidance
  };

  std::vector<TypeEntry> chart_types;
  std::vector<std::string> topics;

  static GenerationPools defaults();
  static GenerationPools load(const std::string& path);

  const TypeEntry& entry(ChartTypeId t) const;
};

// General chart types are drawn at this multiple of the fine-grained weight.
inline constexpr double kGeneralTypeWeight = 3.0;

// One deterministic weighted draw from both pools.
std::pair<ChartTypeId, std::string> sample_pools(const GenerationPools& pools,
                                                 std::uint64_t seed);

enum class Stage { perception, cognition };

struct MissingSlotError : std::runtime_error {
  explicit MissingSlotError(const std::string& slot)
      : std::runtime_error("unfilled template slot: " + slot) {}
};

// A generation prompt template with {slot} markers plus per-chart-type
// insert text.
struct PromptTemplate {
  std::string template_id;
  Stage stage = Stage::perception;
  std::string body;
  std::map<ChartTypeId, std::string> type_specific_inserts;
};

// Built-in templates: "perception" plus one cognition template per task
// ("qa", "description", "summarization", "redrawing"). A directory of
// <template_id>.txt files overrides bodies.
class TemplateLibrary {
 public:
  static TemplateLibrary defaults();
  void load_dir(const std::string& dir);

  const PromptTemplate& get(const std::string& template_id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, PromptTemplate> templates_;
};

// Renders the template with the slot mapping; every {marker} must be
// covered or MissingSlotError is thrown. The rendered prompt never contains
// an unfilled marker.
std::string build_prompt(const PromptTemplate& tmpl,
                         const std::map<std::string, std::string>& slots);

// Convenience: fills chart_type/topic/type_specific_insert from the pools
// plus any extra slots.
std::string render_for(const PromptTemplate& tmpl, const GenerationPools& pools,
                       ChartTypeId chart_type, const std::string& topic,
                       std::map<std::string, std::string> extra = {});

struct QaPair {
  std::string question;
  std::string answer;
};

enum class Split { val, test };

// One generated benchmark sample across all modalities.
struct SampleBundle {
  std::string id;
  std::optional<ChartTypeId> chart_type;
  std::string topic;
  std::string csv;
  std::string title;
  std::vector<QaPair> qa;  // exactly 2 expected
  std::string description;
  std::string summarization;
  std::string redraw_code;
  std::string image_path;  // optional; checked for existence when set
  Split split = Split::val;
};

struct Violation {
  enum class Kind {
    null_file,
    csv_unparseable,
    non_positive_length,
    missing_cognition_field,
  };
  Kind kind;
  std::string detail;
};

std::string_view violation_name(Violation::Kind k);

// Format validation: reports every rule the bundle breaks. Violations are
// data, not exceptions.
std::vector<Violation> validate_format(const SampleBundle& bundle);

// Forwards the prompt to the generation backend with retries; every
// exchange is audited. Throws BackendUnavailable after the final retry.
std::string submit_generation(const std::string& prompt, ChatClient& client,
                              const RetryPolicy& retry = {}, AuditLog* audit = nullptr,
                              const std::string& sample_id = "");

// Loads bundles from a JSON-lines index; each record carries the sample
// fields inline or as paths relative to the index file. Loader failures
// become Violation records instead of aborting.
struct LoadResult {
  std::vector<SampleBundle> bundles;
  std::vector<Violation> violations;
};

LoadResult load_bundles(const std::string& index_path);

// Review worksheet for the human validation steps that follow the
// programmatic one; one entry per bundle with unfilled check slots.
nlohmann::json review_worksheet(const std::vector<SampleBundle>& bundles);

}  // namespace chartkit::benchgen
