#include "getin/survey.hpp"

#include "getin/error.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace getin {

namespace {

SurveyForm build_form(FormId id) {
    using K = QuestionKind;
    SurveyForm f;
    f.id = id;
    f.title = id == FormId::Pre ? "Before you play" : "After you played";
    // Shared core: identical ids and texts on both forms.
    f.questions = {
        {"phishing-mail", "Do you know what a phishing mail is?", K::YesNo, false},
        {"phishing-rollout", "Do you know how a phishing attack is rolled out?", K::Likert, false},
        {"email-acquisition", "Do you know, how a phishing attacker acquires your email address?", K::Likert, false},
        {"sql-injection", "Do you know what an SQL injection is?", K::Likert, true},
        {"exploit-framework", "Do you know how attackers use known vulnerabilities of unpatched systems?",
         K::Likert, true},
        {"found-usb", "Would you plug in a USB stick you found in your office?", K::YesNo, true},
    };
    if (id == FormId::Pre) {
        f.questions.push_back({"plays-games", "How often do you play video games?", K::Likert, true});
    } else {
        f.questions.push_back({"better-understanding",
                               "Do you think the game \"The get in\" helped you to develop a better understanding "
                               "about cyber attacks and cyberrisks?",
                               K::Likert, false});
        f.questions.push_back({"comments", "Anything you would like to tell us about the game?", K::FreeText, true});
    }
    return f;
}

inline constexpr std::size_t kMaxTokenLength = 128;
inline constexpr std::size_t kMaxFreeText = 4000;

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string value_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return dump_json(v);
}

// Answer order: integers numerically, strings lexicographically.
bool value_less(const json& a, const json& b) {
    if (a.is_number_integer() && b.is_number_integer()) return a.get<long long>() < b.get<long long>();
    if (a.is_number_integer() != b.is_number_integer()) return a.is_number_integer();
    return value_text(a) < value_text(b);
}

void validate_token(const std::optional<std::string>& token) {
    if (!token) return;
    const bool ok = !token->empty() && token->size() <= kMaxTokenLength &&
                    std::all_of(token->begin(), token->end(), [](unsigned char c) { return c > 0x20 && c < 0x7f; });
    if (!ok) throw Error(ErrorCode::ValidationFailed, "malformed survey token", {"token"});
}

}  // namespace

std::string_view to_string(FormId form) { return form == FormId::Pre ? "pre" : "post"; }

std::optional<FormId> form_from_string(std::string_view text) {
    if (text == "pre") return FormId::Pre;
    if (text == "post") return FormId::Post;
    return std::nullopt;
}

std::string_view to_string(QuestionKind kind) {
    switch (kind) {
        case QuestionKind::YesNo: return "yes-no";
        case QuestionKind::Likert: return "likert";
        case QuestionKind::FreeText: return "free-text";
    }
    return "likert";
}

const Question* SurveyForm::find(std::string_view question_id) const {
    for (const auto& q : questions) {
        if (q.id == question_id) return &q;
    }
    return nullptr;
}

const SurveyForm& survey_form(FormId form) {
    static const SurveyForm pre = build_form(FormId::Pre);
    static const SurveyForm post = build_form(FormId::Post);
    return form == FormId::Pre ? pre : post;
}

json to_json(const SurveyForm& form) {
    json qs = json::array();
    for (const auto& q : form.questions) {
        json j = {{"id", q.id}, {"text", q.text}, {"kind", to_string(q.kind)}};
        if (q.kind == QuestionKind::Likert) {
            j["min"] = kLikertMin;
            j["max"] = kLikertMax;
        }
        if (q.kind == QuestionKind::YesNo) j["options"] = {"yes", "no"};
        qs.push_back(std::move(j));
    }
    return {{"form", to_string(form.id)}, {"title", form.title}, {"questions", std::move(qs)}};
}

json to_json(const SurveyResponse& r) {
    json answers = json::object();
    for (const auto& [k, v] : r.answers) answers[k] = v;
    return {{"token", r.token ? json(*r.token) : json(nullptr)},
            {"form_id", to_string(r.form)},
            {"answers", std::move(answers)},
            {"submitted_at", r.submitted_at}};
}

SurveyResponse response_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::CorruptLog, "response record must be an object");
    check_keys(j, {"token", "form_id", "answers", "submitted_at"}, "response", true);
    SurveyResponse r;
    const auto& token = j.at("token");
    if (token.is_string()) {
        r.token = token.get<std::string>();
    } else if (!token.is_null()) {
        throw Error(ErrorCode::CorruptLog, "response token must be a string or null");
    }
    const auto form = form_from_string(j.at("form_id").get<std::string>());
    if (!form) throw Error(ErrorCode::CorruptLog, "unknown form in response record");
    r.form = *form;
    r.answers = validate_answers(survey_form(r.form), j.at("answers"));
    r.submitted_at = j.at("submitted_at").get<std::string>();
    return r;
}

std::map<std::string, json> validate_answers(const SurveyForm& form, const json& answers) {
    if (!answers.is_object()) throw Error(ErrorCode::ValidationFailed, "answers must be an object", {"answers"});
    std::map<std::string, json> out;
    std::vector<std::string> bad;
    for (const auto& [id, value] : answers.items()) {
        const auto* q = form.find(id);
        if (!q) {
            bad.push_back(id);
            continue;
        }
        if (value.is_null()) continue;  // explicit omission
        switch (q->kind) {
            case QuestionKind::YesNo:
                if (value.is_boolean()) {
                    out[id] = value.get<bool>() ? "yes" : "no";
                } else if (value.is_string() && (to_lower(value.get<std::string>()) == "yes" ||
                                                 to_lower(value.get<std::string>()) == "no")) {
                    out[id] = to_lower(value.get<std::string>());
                } else {
                    bad.push_back(id);
                }
                break;
            case QuestionKind::Likert:
                if (value.is_number_integer() && value.get<long long>() >= kLikertMin &&
                    value.get<long long>() <= kLikertMax) {
                    out[id] = value.get<int>();
                } else {
                    bad.push_back(id);
                }
                break;
            case QuestionKind::FreeText:
                if (value.is_string() && value.get<std::string>().size() <= kMaxFreeText) {
                    out[id] = sanitize_utf8(value.get<std::string>());
                } else {
                    bad.push_back(id);
                }
                break;
        }
    }
    if (!bad.empty()) {
        std::string list;
        for (const auto& b : bad) list += (list.empty() ? "" : ", ") + b;
        throw Error(ErrorCode::ValidationFailed, "invalid answers: " + list, bad);
    }
    return out;
}

json to_json(const SubmitReceipt& r) {
    return {{"form", to_string(r.form)},
            {"token", r.token ? json(*r.token) : json(nullptr)},
            {"replaced", r.replaced},
            {"unpaired", r.unpaired}};
}

// ---------------------------------------------------------------------------

SurveyStore::SurveyStore(std::optional<std::string> path, bool unlinked)
    : path_(std::move(path)), unlinked_(unlinked) {
    if (!path_) return;
    std::ifstream in(*path_);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        try {
            add(response_from_json(json::parse(line)), nullptr);
        } catch (const std::exception& e) {
            replacements_.push_back("line " + std::to_string(n) + " skipped: " + e.what());
        }
    }
}

void SurveyStore::add(SurveyResponse response, SubmitReceipt* receipt) {
    bool replaced = false;
    if (response.token) {
        const auto key = std::make_pair(static_cast<int>(response.form), *response.token);
        if (auto it = index_.find(key); it != index_.end()) {
            records_[it->second] = std::move(response);
            replaced = true;
            replacements_.push_back("replaced " + std::string(to_string(key.first == 0 ? FormId::Pre : FormId::Post)) +
                                    " response for token " + key.second);
        } else {
            index_[key] = records_.size();
            records_.push_back(std::move(response));
        }
    } else {
        records_.push_back(std::move(response));
    }
    if (receipt) receipt->replaced = replaced;
}

SubmitReceipt SurveyStore::submit(FormId form, std::optional<std::string> token, const json& answers) {
    if (unlinked_) {
        token.reset();
    } else if (!token) {
        throw Error(ErrorCode::ValidationFailed, "a survey token is required", {"token"});
    }
    validate_token(token);
    SurveyResponse r;
    r.token = token;
    r.form = form;
    r.answers = validate_answers(survey_form(form), answers);
    r.submitted_at = now_iso8601();

    std::lock_guard lock(mutex_);
    if (path_) {
        std::ofstream out(*path_, std::ios::app | std::ios::binary);
        const std::string line = dump_json(to_json(r)) + "\n";
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
        out.flush();
        if (!out) throw Error(ErrorCode::IoError, "cannot append to " + *path_);
    }
    SubmitReceipt receipt;
    receipt.form = form;
    receipt.token = token;
    receipt.unpaired = form == FormId::Post &&
                       (!token || !index_.contains(std::make_pair(static_cast<int>(FormId::Pre), *token)));
    add(std::move(r), &receipt);
    return receipt;
}

std::vector<SurveyResponse> SurveyStore::responses(FormId form) const {
    std::lock_guard lock(mutex_);
    std::vector<SurveyResponse> out;
    for (const auto& r : records_) {
        if (r.form == form) out.push_back(r);
    }
    return out;
}

std::vector<std::string> SurveyStore::replacement_log() const {
    std::lock_guard lock(mutex_);
    return replacements_;
}

std::vector<SurveyResponse> load_responses(const std::string& path) {
    SurveyStore store(path);
    auto out = store.responses(FormId::Pre);
    auto post = store.responses(FormId::Post);
    out.insert(out.end(), post.begin(), post.end());
    return out;
}

// ---------------------------------------------------------------------------

AggregateReport aggregate(const SurveyForm& form, const std::vector<SurveyResponse>& responses,
                          const std::vector<SurveyResponse>* pre_for_pairing) {
    AggregateReport report;
    report.form = form.id;
    std::set<std::string> pre_tokens;
    if (pre_for_pairing) {
        for (const auto& r : *pre_for_pairing) {
            if (r.form == FormId::Pre && r.token) pre_tokens.insert(*r.token);
        }
    }
    for (const auto& q : form.questions) {
        QuestionCounts qc;
        qc.question_id = q.id;
        std::vector<json> domain;
        if (q.kind == QuestionKind::YesNo) domain = {"no", "yes"};
        if (q.kind == QuestionKind::Likert) {
            for (int v = kLikertMin; v <= kLikertMax; ++v) domain.emplace_back(v);
        }
        std::map<std::string, std::pair<json, std::size_t>> tally;
        for (const auto& v : domain) tally[dump_json(v)] = {v, 0};
        for (const auto& r : responses) {
            if (r.form != form.id) continue;
            auto it = r.answers.find(q.id);
            if (it == r.answers.end()) continue;
            auto& slot = tally[dump_json(it->second)];
            slot.first = it->second;
            ++slot.second;
            ++qc.answered;
        }
        for (auto& [_, entry] : tally) qc.counts.push_back(entry);
        std::sort(qc.counts.begin(), qc.counts.end(),
                  [](const auto& a, const auto& b) { return value_less(a.first, b.first); });
        report.questions.push_back(std::move(qc));
    }
    for (const auto& r : responses) {
        if (r.form != form.id) continue;
        ++report.responses;
        if (form.id == FormId::Post && pre_for_pairing && (!r.token || !pre_tokens.contains(*r.token))) {
            ++report.unpaired;
        }
    }
    return report;
}

json to_json(const AggregateReport& report) {
    json qs = json::array();
    for (const auto& q : report.questions) {
        json counts = json::array();
        for (const auto& [v, n] : q.counts) counts.push_back({{"value", v}, {"count", n}});
        qs.push_back({{"id", q.question_id}, {"answered", q.answered}, {"counts", std::move(counts)}});
    }
    json j = {{"form", to_string(report.form)}, {"responses", report.responses}, {"questions", std::move(qs)}};
    if (report.form == FormId::Post) j["unpaired"] = report.unpaired;
    return j;
}

PairedReport paired(const std::vector<SurveyResponse>& pre, const std::vector<SurveyResponse>& post) {
    std::map<std::string, const SurveyResponse*> pre_by_token;
    std::map<std::string, const SurveyResponse*> post_by_token;
    // Later records win, matching the store's replacement rule.
    for (const auto& r : pre) {
        if (r.form == FormId::Pre && r.token) pre_by_token[*r.token] = &r;
    }
    for (const auto& r : post) {
        if (r.form == FormId::Post && r.token) post_by_token[*r.token] = &r;
    }
    const auto& pre_form = survey_form(FormId::Pre);
    const auto& post_form = survey_form(FormId::Post);

    PairedReport report;
    for (const auto& [token, a] : pre_by_token) {
        auto it = post_by_token.find(token);
        if (it == post_by_token.end()) continue;
        const auto* b = it->second;
        report.rows.push_back({token, a->answers, b->answers});
        for (const auto& q : pre_form.questions) {
            if (!post_form.find(q.id)) continue;
            auto pa = a->answers.find(q.id);
            auto pb = b->answers.find(q.id);
            if (pa == a->answers.end() || pb == b->answers.end()) continue;
            ++report.distribution[q.id][{value_text(pa->second), value_text(pb->second)}];
        }
    }
    return report;
}

json to_json(const PairedReport& report) {
    json dist = json::object();
    for (const auto& [qid, pairs] : report.distribution) {
        json arr = json::array();
        for (const auto& [pv, n] : pairs) arr.push_back({{"pre", pv.first}, {"post", pv.second}, {"count", n}});
        dist[qid] = std::move(arr);
    }
    return {{"pairs", report.rows.size()}, {"distribution", std::move(dist)}};
}

std::string aggregate_csv(const AggregateReport& report) {
    std::string out = "question_id,answer_value,count\n";
    for (const auto& q : report.questions) {
        for (const auto& [v, n] : q.counts) {
            if (n == 0) continue;
            out += csv_field(q.question_id) + "," + csv_field(value_text(v)) + "," + std::to_string(n) + "\n";
        }
    }
    return out;
}

std::string paired_csv(const PairedReport& report) {
    const auto& pre_form = survey_form(FormId::Pre);
    const auto& post_form = survey_form(FormId::Post);
    std::vector<std::string> shared;
    for (const auto& q : pre_form.questions) {
        if (post_form.find(q.id)) shared.push_back(q.id);
    }
    std::string out = "token";
    for (const auto& id : shared) out += ",pre." + id;
    for (const auto& id : shared) out += ",post." + id;
    out += "\n";
    auto cell = [](const std::map<std::string, json>& answers, const std::string& id) {
        auto it = answers.find(id);
        return it == answers.end() ? std::string() : csv_field(value_text(it->second));
    };
    for (const auto& row : report.rows) {
        out += csv_field(row.token);
        for (const auto& id : shared) out += "," + cell(row.pre, id);
        for (const auto& id : shared) out += "," + cell(row.post, id);
        out += "\n";
    }
    return out;
}

std::string responses_csv(const SurveyForm& form, const std::vector<SurveyResponse>& responses) {
    std::string out = "token,submitted_at";
    for (const auto& q : form.questions) out += "," + csv_field(q.id);
    out += "\n";
    for (const auto& r : responses) {
        if (r.form != form.id) continue;
        out += csv_field(r.token.value_or("")) + "," + csv_field(r.submitted_at);
        for (const auto& q : form.questions) {
            auto it = r.answers.find(q.id);
            out += "," + (it == r.answers.end() ? std::string() : csv_field(value_text(it->second)));
        }
        out += "\n";
    }
    return out;
}

}  // namespace getin
