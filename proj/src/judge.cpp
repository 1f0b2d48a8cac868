#include "chartkit/judge.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace chartkit::judge {

namespace {

constexpr const char* kRubricIds[] = {"description", "summarization",
                                      "redrawing", "qa_fallback"};

std::string default_rubric(std::string_view id) {
  std::string header;
  if (id == "description") {
    header =
        "You are grading the output of a system asked to describe a chart in "
        "detail.";
  } else if (id == "summarization") {
    header =
        "You are grading the output of a system asked to summarize the key "
        "trends of a chart.";
  } else if (id == "redrawing") {
    header =
        "You are grading plotting code written to redraw a chart from its "
        "data, preserving the chart type.";
  } else {
    header =
        "You are grading a free-form answer to a question about a chart. The "
        "reference answer is authoritative.";
  }
  std::string body = header + "\n\n";
  body +=
      "Ground-truth chart data (CSV):\n{gt_csv}\nChart title: {title}\n"
      "Chart type: {chart_type}\n\n";
  if (id == "qa_fallback")
    body += "Question: {question}\nReference answer: {reference}\n\n";
  body += "Candidate output:\n{candidate}\n\n";
  body +=
      "Rate the candidate from 0 to 5 considering completeness, relevance, "
      "accuracy and creativity, where 5 matches the ground truth perfectly "
      "and 0 is unusable.\nReply with the integer score first, then a "
      "one-sentence rationale.";
  return body;
}

}  // namespace

RubricRegistry RubricRegistry::defaults() {
  RubricRegistry r;
  for (const char* id : kRubricIds) r.set(id, default_rubric(id));
  return r;
}

void RubricRegistry::set(const std::string& rubric_id, std::string body) {
  rubrics_[rubric_id] = std::move(body);
}

void RubricRegistry::load_dir(const std::string& dir) {
  for (const char* id : kRubricIds) {
    std::filesystem::path p = std::filesystem::path(dir) / (std::string(id) + ".txt");
    std::ifstream in(p);
    if (!in) continue;
    std::ostringstream body;
    body << in.rdbuf();
    set(id, body.str());
  }
}

const std::string& RubricRegistry::get(const std::string& rubric_id) const {
  auto it = rubrics_.find(rubric_id);
  if (it == rubrics_.end())
    throw std::out_of_range("unknown rubric: " + rubric_id);
  return it->second;
}

bool RubricRegistry::has(const std::string& rubric_id) const {
  return rubrics_.count(rubric_id) > 0;
}

std::string RubricRegistry::render(const JudgeRequest& request) const {
  const std::string& body = get(request.rubric_id);
  std::string out;
  out.reserve(body.size());
  for (std::size_t i = 0; i < body.size();) {
    if (body[i] == '{') {
      std::size_t close = body.find('}', i);
      if (close != std::string::npos) {
        std::string slot = body.substr(i + 1, close - i - 1);
        auto it = request.payload.find(slot);
        if (it == request.payload.end()) throw MissingSlotError(slot);
        out += it->second;
        i = close + 1;
        continue;
      }
    }
    out.push_back(body[i]);
    ++i;
  }
  return out;
}

std::optional<int> parse_score(std::string_view response) {
  for (std::size_t i = 0; i < response.size();) {
    if (std::isdigit(static_cast<unsigned char>(response[i]))) {
      std::size_t j = i;
      while (j < response.size() &&
             std::isdigit(static_cast<unsigned char>(response[j])))
        ++j;
      if (j - i == 1) {
        int v = response[i] - '0';
        if (v <= 5) return v;
      }
      i = j;
    } else {
      ++i;
    }
  }
  return std::nullopt;
}

Judge::Judge(ChatClient& client, RubricRegistry rubrics, JudgeConfig config,
             AuditLog* audit)
    : client_(client), rubrics_(std::move(rubrics)), config_(config), audit_(audit) {}

std::string Judge::submit(const std::string& prompt, const std::string& sample_id) {
  // In-flight bound and request-rate ceiling; both optional.
  if (config_.max_in_flight > 0 || config_.rate_per_sec > 0) {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] {
      return config_.max_in_flight == 0 || in_flight_ < config_.max_in_flight;
    });
    ++in_flight_;
    if (config_.rate_per_sec > 0) {
      auto now = std::chrono::steady_clock::now();
      if (next_slot_ > now) {
        auto wait_until = next_slot_;
        lock.unlock();
        std::this_thread::sleep_until(wait_until);
        lock.lock();
      }
      next_slot_ = std::max(next_slot_, std::chrono::steady_clock::now()) +
                   std::chrono::milliseconds(1000 / config_.rate_per_sec);
    }
  }
  struct Release {
    Judge* j;
    ~Release() {
      if (j->config_.max_in_flight > 0 || j->config_.rate_per_sec > 0) {
        std::lock_guard<std::mutex> lock(j->mu_);
        --j->in_flight_;
        j->cv_.notify_one();
      }
    }
  } release{this};

  std::string response =
      retry_with_backoff(config_.retry, [&] { return client_.complete(prompt); });
  if (audit_) audit_->record(sample_id, prompt, response);
  return response;
}

JudgeScore Judge::score(const JudgeRequest& request, const std::string& sample_id) {
  std::string prompt = rubrics_.render(request);
  std::string response = submit(prompt, sample_id);
  auto parsed = parse_score(response);
  if (!parsed) {
    std::string reask = prompt +
                        "\n\nYour previous reply did not contain a score. "
                        "Respond with a single integer between 0 and 5.";
    response = submit(reask, sample_id);
    parsed = parse_score(response);
  }
  if (!parsed)
    throw UnparseableVerdict("no integer 0-5 in judge response: " + response);

  JudgeScore s;
  s.score = *parsed;
  s.raw_response = response;
  // Rationale: whatever follows the score token, minus leading separators.
  std::size_t at = response.find(static_cast<char>('0' + *parsed));
  if (at != std::string::npos) {
    std::size_t rest = at + 1;
    while (rest < response.size() &&
           !std::isalnum(static_cast<unsigned char>(response[rest])))
      ++rest;
    s.rationale = response.substr(rest);
  }
  return s;
}

JudgeScore judge_score(const JudgeRequest& request, Judge& judge,
                       const std::string& sample_id) {
  return judge.score(request, sample_id);
}

}  // namespace chartkit::judge
