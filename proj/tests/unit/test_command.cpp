#include "getin/command.hpp"
#include "getin/error.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace getin;

namespace {

Command parsed(std::string_view line) {
    auto r = parse_command(line);
    if (auto* e = std::get_if<ParseError>(&r)) {
        ADD_FAILURE() << line << ": " << e->message;
        return {};
    }
    return std::get<Command>(r);
}

ParseError failed(std::string_view line) {
    auto r = parse_command(line);
    if (!std::holds_alternative<ParseError>(r)) {
        ADD_FAILURE() << line << " parsed";
        return {};
    }
    return std::get<ParseError>(r);
}

}  // namespace

TEST(Command, SetAndRun) {
    EXPECT_EQ(parsed("set TARGET 10.13.37.2"), (Command{"set", "", {"TARGET", "10.13.37.2"}}));
    EXPECT_EQ(parsed("run"), (Command{"run", "", {}}));
}

TEST(Command, VerbsAreCaseInsensitiveArgumentsArePreserved) {
    EXPECT_EQ(parsed("PHISH Select-Template Facebook-Expiry"),
              (Command{"phish", "select-template", {"Facebook-Expiry"}}));
}

TEST(Command, QuotesGroupWords) {
    const auto c = parsed(R"(login "' OR '1'='1" "a \"b\"")");
    ASSERT_EQ(c.args.size(), 2u);
    EXPECT_EQ(c.args[0], "' OR '1'='1");
    EXPECT_EQ(c.args[1], "a \"b\"");
}

TEST(Command, UnknownVerbListsVerbs) {
    const auto e = failed("frobnicate --yes");
    EXPECT_EQ(e.token, "frobnicate");
    for (const auto& v : command_verbs()) EXPECT_NE(e.hint.find(v), std::string::npos) << v;
}

TEST(Command, Arity) {
    EXPECT_NE(failed("set TARGET").hint.find("set"), std::string::npos);
    EXPECT_FALSE(failed("run now").message.empty());
    EXPECT_FALSE(failed("phish").message.empty());
    EXPECT_EQ(failed("phish dance").token, "dance");
    EXPECT_FALSE(failed("login \"unterminated").message.empty());
    EXPECT_FALSE(failed("").message.empty());
    EXPECT_FALSE(failed(std::string(5000, 'a')).message.empty());
}

TEST(Command, ClosedVerbSet) {
    const std::vector<std::string> want = {"search", "breach-check", "phish", "scan", "use", "set", "run", "ls",
                                           "cd", "cat", "download", "login", "darknet", "usb", "help"};
    auto got = command_verbs();
    std::sort(got.begin(), got.end());
    auto sorted = want;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(got, sorted);
}

TEST(Command, RenderRoundTripOverGeneratedCommands) {
    std::mt19937_64 rng(11);
    const std::vector<std::string> words = {"a", "10.13.37.2", "x y", "q\"uote", "back\\slash", "' OR '1'='1", "ÄÖ",
                                            "", "tab\there"};
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    int checked = 0;
    for (const auto& form : command_forms()) {
        for (int i = 0; i < 200; ++i) {
            Command c{form.verb, form.sub, {}};
            const std::size_t n = form.args.size();
            std::uniform_int_distribution<std::size_t> count(form.required, n);
            const std::size_t k = count(rng);
            for (std::size_t j = 0; j < k; ++j) {
                auto w = words[pick(rng)];
                if (w.empty()) w = "e";
                c.args.push_back(w);
            }
            const auto back = parse_command(render(c));
            ASSERT_TRUE(std::holds_alternative<Command>(back)) << render(c);
            EXPECT_EQ(std::get<Command>(back), c) << render(c);
            ++checked;
        }
    }
    EXPECT_GT(checked, 1000);
}

TEST(Command, FuzzNeverThrows) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<std::size_t> len(0, 4096);
    for (int i = 0; i < 100000; ++i) {
        std::string s(len(rng) % (i % 10 == 0 ? 4097 : 64), '\0');
        for (auto& ch : s) ch = static_cast<char>(byte(rng));
        EXPECT_NO_THROW((void)parse_command(s));
    }
}

TEST(Command, Patterns) {
    const auto p = parse_pattern("set TARGET *");
    EXPECT_TRUE(p.matches(parsed("set target 10.13.37.2")) || p.matches(parsed("set TARGET 10.13.37.2")));
    EXPECT_TRUE(p.matches(parsed("set TARGET 10.13.37.2")));
    EXPECT_FALSE(p.matches(parsed("set PAYLOAD x")));
    EXPECT_FALSE(p.matches(parsed("run")));
    EXPECT_THROW(parse_pattern("frob *"), Error);
}

TEST(Command, GrammarDescribesEveryForm) {
    const auto g = grammar_json();
    ASSERT_TRUE(g.contains("forms"));
    EXPECT_EQ(g["forms"].size(), command_forms().size());
}
