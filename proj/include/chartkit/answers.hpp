#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "chartkit/chart_types.hpp"

namespace chartkit::answers {

struct Verdict {
  enum class Method { numeric_margin, string_exact, judge_delegated };

  bool correct = false;
  Method method = Method::string_exact;
  std::string detail;
};

std::string_view method_name(Verdict::Method m);

// QA accuracy rule: when both sides parse under the canonical number
// grammar, accept within a 5% relative margin (exact match when the ground
// truth is 0); otherwise compare normalized strings. The margin is
// inclusive with a 1e-9 relative guard against float rounding.
Verdict gpt_acc_local(std::string_view pred, std::string_view gt);

// Same rule as gpt_acc_local, exposed as the bare-boolean entry point used
// for relaxed-accuracy QA evaluation.
bool relaxed_acc(std::string_view pred, std::string_view gt);

enum class MatchField { title, chart_type };

// Maps free-form chart-type names ("3D bar chart", "Pie Chart", ...) to
// canonical ids. Unknown strings stay unmapped and fail exact match.
class SynonymTable {
 public:
  // Built-in defaults covering the 18 canonical types.
  static SynonymTable defaults();
  // Loads a {"synonym": "canonical_id", ...} JSON object file.
  static SynonymTable load(const std::string& path);

  void add(std::string_view synonym, ChartTypeId target);
  std::optional<ChartTypeId> lookup(std::string_view text) const;
  int version() const { return version_; }

 private:
  std::map<std::string, ChartTypeId> entries_;
  int version_ = 1;
};

// Exact match for title (normalized string equality) and chart type
// (synonym-mapped prediction against a canonical ground-truth id).
bool exact_match(std::string_view pred, std::string_view gt, MatchField field,
                 const SynonymTable& synonyms = SynonymTable::defaults());

}  // namespace chartkit::answers
