#pragma once

#include "getin/util.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace getin {

enum class FormId { Pre, Post };
enum class QuestionKind { YesNo, Likert, FreeText };

std::string_view to_string(FormId form);
std::optional<FormId> form_from_string(std::string_view text);
std::string_view to_string(QuestionKind kind);

inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 5;

struct Question {
    std::string id;
    std::string text;
    QuestionKind kind = QuestionKind::Likert;
    bool authored = false;  // filler question, not one of the published captions
};

struct SurveyForm {
    FormId id = FormId::Pre;
    std::string title;
    std::vector<Question> questions;
    [[nodiscard]] const Question* find(std::string_view question_id) const;
};

const SurveyForm& survey_form(FormId form);
json to_json(const SurveyForm& form);

// Answers are stored normalized: "yes"/"no", an integer 1..5, or text.
struct SurveyResponse {
    std::optional<std::string> token;  // null in unlinked mode
    FormId form = FormId::Pre;
    std::map<std::string, json> answers;
    std::string submitted_at;
    bool operator==(const SurveyResponse&) const = default;
};

// The storage schema: exactly token, form_id, answers, submitted_at.
json to_json(const SurveyResponse& response);
SurveyResponse response_from_json(const json& j);

// Checks and normalizes raw answers. Throws Error(ValidationFailed) whose
// details are the offending question ids. Unanswered questions are allowed.
std::map<std::string, json> validate_answers(const SurveyForm& form, const json& answers);

struct SubmitReceipt {
    FormId form = FormId::Pre;
    std::optional<std::string> token;
    bool replaced = false;  // an earlier (token, form) response was superseded
    bool unpaired = false;  // post response with no pre response for its token
};

json to_json(const SubmitReceipt& receipt);

// Append-only response store, optionally backed by a line-delimited file.
// The latest record per (token, form) wins; replacements are reported to the
// replacement log, never written into records.
class SurveyStore {
public:
    explicit SurveyStore(std::optional<std::string> path = std::nullopt, bool unlinked = false);

    SubmitReceipt submit(FormId form, std::optional<std::string> token, const json& answers);

    // Effective responses for a form, in submission order.
    [[nodiscard]] std::vector<SurveyResponse> responses(FormId form) const;
    [[nodiscard]] std::vector<std::string> replacement_log() const;
    [[nodiscard]] bool unlinked() const { return unlinked_; }

private:
    void add(SurveyResponse response, SubmitReceipt* receipt);

    mutable std::mutex mutex_;
    std::optional<std::string> path_;
    bool unlinked_ = false;
    std::vector<SurveyResponse> records_;                  // effective ones
    std::map<std::pair<int, std::string>, std::size_t> index_;  // (form, token) -> record
    std::vector<std::string> replacements_;
};

// Effective responses read from a store file; missing file means none.
std::vector<SurveyResponse> load_responses(const std::string& path);

struct QuestionCounts {
    std::string question_id;
    std::vector<std::pair<json, std::size_t>> counts;  // answer value ascending
    std::size_t answered = 0;
};

struct AggregateReport {
    FormId form = FormId::Pre;
    std::size_t responses = 0;
    std::size_t unpaired = 0;  // post only
    std::vector<QuestionCounts> questions;  // form order
};

// Pure fold; YesNo and Likert questions list every possible value, zero or not.
AggregateReport aggregate(const SurveyForm& form, const std::vector<SurveyResponse>& responses,
                          const std::vector<SurveyResponse>* pre_for_pairing = nullptr);
json to_json(const AggregateReport& report);

struct PairedRow {
    std::string token;
    std::map<std::string, json> pre;
    std::map<std::string, json> post;
};

struct PairedReport {
    std::vector<PairedRow> rows;  // tokens in both forms, ascending
    // Per shared question: (pre value, post value) -> count.
    std::map<std::string, std::map<std::pair<std::string, std::string>, std::size_t>> distribution;
};

PairedReport paired(const std::vector<SurveyResponse>& pre, const std::vector<SurveyResponse>& post);
json to_json(const PairedReport& report);

// question_id,answer_value,count; rows with a zero count are left out.
std::string aggregate_csv(const AggregateReport& report);
// token, then pre.<id> and post.<id> per shared question.
std::string paired_csv(const PairedReport& report);
// One row per response, one column per question id.
std::string responses_csv(const SurveyForm& form, const std::vector<SurveyResponse>& responses);

}  // namespace getin
