#include "drivers.hpp"
#include "oracles.hpp"

#include "getin/error.hpp"
#include "getin/survey.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace getin;

namespace {

std::string temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("getin-survey-" + random_hex(6));
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST(Survey, PublishedQuestionsAreVerbatim) {
    const auto& pre = survey_form(FormId::Pre);
    const auto& post = survey_form(FormId::Post);
    const auto& q = oracle::published_questions();
    for (std::size_t i = 0; i < 3; ++i) {
        bool in_pre = false, in_post = false;
        for (const auto& x : pre.questions) in_pre = in_pre || x.text == q[i];
        for (const auto& x : post.questions) in_post = in_post || x.text == q[i];
        EXPECT_TRUE(in_pre && in_post) << q[i];
    }
    bool final_q = false;
    for (const auto& x : post.questions) final_q = final_q || x.text == q[3];
    EXPECT_TRUE(final_q);
}

TEST(Survey, QuestionKinds) {
    const auto& pre = survey_form(FormId::Pre);
    EXPECT_EQ(pre.find("phishing-mail")->kind, QuestionKind::YesNo);
    EXPECT_EQ(pre.find("phishing-rollout")->kind, QuestionKind::Likert);
    EXPECT_EQ(survey_form(FormId::Post).find("better-understanding")->kind, QuestionKind::Likert);
}

TEST(Survey, ValidationNamesOffendingQuestions) {
    try {
        validate_answers(survey_form(FormId::Pre), {{"phishing-mail", "maybe"}, {"nope", 1}, {"phishing-rollout", 3}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ValidationFailed);
        auto d = e.details();
        std::sort(d.begin(), d.end());
        EXPECT_EQ(d, (std::vector<std::string>{"nope", "phishing-mail"}));
    }
    const auto ok = validate_answers(survey_form(FormId::Pre), {{"phishing-mail", true}, {"phishing-rollout", 2}});
    EXPECT_EQ(ok.at("phishing-mail"), "yes");
    EXPECT_THROW(validate_answers(survey_form(FormId::Post), {{"comments", std::string(4001, 'x')}}), Error);
    EXPECT_THROW(validate_answers(survey_form(FormId::Pre), json::array()), Error);
}

TEST(Survey, SyntheticCorpusMatchesBruteForce) {
    const auto r = drivers::check_survey(500, 350, 42);
    EXPECT_TRUE(r.counts.ok()) << r.counts.detail;
    EXPECT_TRUE(r.pairing.ok()) << r.pairing.detail;
    EXPECT_TRUE(r.likert.ok()) << r.likert.detail;
}

TEST(Survey, EmptyReportsHaveZeroCounts) {
    const auto rep = aggregate(survey_form(FormId::Pre), {});
    EXPECT_EQ(rep.responses, 0u);
    for (const auto& q : rep.questions) {
        for (const auto& [_, n] : q.counts) EXPECT_EQ(n, 0u);
    }
    EXPECT_EQ(aggregate_csv(rep), "question_id,answer_value,count\n");
}

TEST(Survey, LatestResponseWinsAndIsLogged) {
    SurveyStore store;
    EXPECT_FALSE(store.submit(FormId::Pre, "t1", {{"phishing-rollout", 1}}).replaced);
    EXPECT_TRUE(store.submit(FormId::Pre, "t1", {{"phishing-rollout", 4}}).replaced);
    const auto pre = store.responses(FormId::Pre);
    ASSERT_EQ(pre.size(), 1u);
    EXPECT_EQ(pre[0].answers.at("phishing-rollout"), 4);
    EXPECT_EQ(store.replacement_log().size(), 1u);
    EXPECT_TRUE(store.submit(FormId::Post, "t2", json::object()).unpaired);
    EXPECT_FALSE(store.submit(FormId::Post, "t1", json::object()).unpaired);
}

TEST(Survey, TokenRules) {
    SurveyStore linked;
    EXPECT_THROW(linked.submit(FormId::Pre, std::nullopt, json::object()), Error);
    EXPECT_THROW(linked.submit(FormId::Pre, std::string(129, 'a'), json::object()), Error);
    SurveyStore unlinked(std::nullopt, true);
    EXPECT_NO_THROW(unlinked.submit(FormId::Pre, std::nullopt, json::object()));
    EXPECT_TRUE(paired(unlinked.responses(FormId::Pre), unlinked.responses(FormId::Post)).rows.empty());
}

TEST(Survey, FileStoreKeepsTheSchemaAndReloads) {
    const auto path = temp_file("responses.jsonl");
    {
        SurveyStore store(path);
        store.submit(FormId::Pre, "a", {{"phishing-mail", "yes"}});
        store.submit(FormId::Post, "a", {{"better-understanding", 5}});
        store.submit(FormId::Post, "a", {{"better-understanding", 4}});
    }
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        const auto j = json::parse(line);
        std::vector<std::string> keys;
        for (const auto& [k, _] : j.items()) keys.push_back(k);
        EXPECT_EQ(keys, (std::vector<std::string>{"answers", "form_id", "submitted_at", "token"}));
    }
    SurveyStore again(path);
    const auto post = again.responses(FormId::Post);
    ASSERT_EQ(post.size(), 1u);
    EXPECT_EQ(post[0].answers.at("better-understanding"), 4);
    EXPECT_EQ(load_responses(path).size(), 2u);
}

TEST(Survey, CsvExports) {
    SurveyStore store;
    store.submit(FormId::Pre, "a", {{"phishing-mail", "yes"}, {"phishing-rollout", 2}});
    store.submit(FormId::Pre, "b", {{"phishing-mail", "no"}});
    store.submit(FormId::Post, "a", {{"phishing-rollout", 5}});
    const auto pre = store.responses(FormId::Pre);
    const auto post = store.responses(FormId::Post);
    const auto csv = aggregate_csv(aggregate(survey_form(FormId::Pre), pre));
    EXPECT_NE(csv.find("phishing-mail,yes,1\n"), std::string::npos);
    EXPECT_NE(csv.find("phishing-mail,no,1\n"), std::string::npos);
    EXPECT_NE(csv.find("phishing-rollout,2,1\n"), std::string::npos);
    const auto pcsv = paired_csv(paired(pre, post));
    EXPECT_EQ(std::count(pcsv.begin(), pcsv.end(), '\n'), 2);
    EXPECT_EQ(pcsv.rfind("token,", 0), 0u);
    const auto rcsv = responses_csv(survey_form(FormId::Pre), pre);
    EXPECT_EQ(std::count(rcsv.begin(), rcsv.end(), '\n'), 3);
}
