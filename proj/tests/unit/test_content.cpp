#include "drivers.hpp"
#include "oracles.hpp"

#include "getin/content.hpp"
#include "getin/error.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

using namespace getin;

namespace {

const WorldState& world() { return drivers::shipped_engine().initial_world(); }
const LoginGate& gate() { return *world().login_gate; }

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Phishing, FacebookTemplateUsesUrgency) {
    const auto* t = find_template(world(), "facebook-expiry");
    ASSERT_NE(t, nullptr);
    EXPECT_EQ(t->principle, InfluencePrinciple::Urgency);
    EXPECT_EQ(kInfluencePrincipleCount, 6u);
}

TEST(Phishing, UrgencyLureCapturesStoredCredentials) {
    const std::string target = "a.brenner@hollowbrook-freight.example";
    PhishingCampaign c = select_template({}, world(), "facebook-expiry");
    c.target_email = target;
    const auto [sent, reaction] = send_phish(c, world(), {target});
    ASSERT_TRUE(sent.captured.has_value());
    EXPECT_TRUE(sent.sent);
    EXPECT_EQ(*sent.captured, find_email_account(world(), target)->credentials);
    EXPECT_TRUE(reaction.submitted);
}

TEST(Phishing, OtherPrinciplesOrUnknownRecipientsAreIgnored) {
    const std::string target = "a.brenner@hollowbrook-freight.example";
    PhishingCampaign c = select_template({}, world(), "limited-voucher");
    c.target_email = target;
    EXPECT_FALSE(send_phish(c, world(), {target}).first.captured);
    c = select_template({}, world(), "facebook-expiry");
    c.target_email = target;
    EXPECT_FALSE(send_phish(c, world(), {}).first.captured);  // address not found by recon
}

TEST(Phishing, Errors) {
    PhishingCampaign c;
    c.target_email = "a.brenner@hollowbrook-freight.example";
    EXPECT_EQ(code_of([&] { send_phish(c, world(), {}); }), ErrorCode::TemplateNotSelected);
    c = select_template({}, world(), "facebook-expiry");
    c.target_email = "m.novak@mailbox.example";
    EXPECT_EQ(code_of([&] { send_phish(c, world(), {}); }), ErrorCode::UnknownTarget);
}

TEST(Phishing, CapturedOnlyWhenSent) {
    for (const auto& t : world().templates) {
        for (const auto& a : world().email_accounts) {
            PhishingCampaign c = select_template({}, world(), t.id);
            EXPECT_FALSE(c.captured);
            c.target_email = a.address;
            const auto sent = send_phish(c, world(), {a.address}).first;
            if (sent.captured) EXPECT_TRUE(sent.sent);
        }
    }
}

TEST(Login, ValidCredentialsAndTautology) {
    EXPECT_EQ(evaluate_login(gate(), "admin", "Tr0ub4dor&3").outcome, LoginOutcome::Accepted);
    EXPECT_EQ(evaluate_login(gate(), "admin", "wrong").outcome, LoginOutcome::Rejected);
    const auto bypass = evaluate_login(gate(), "' OR '1'='1", "' OR '1'='1");
    EXPECT_EQ(bypass.outcome, LoginOutcome::Accepted);
    EXPECT_EQ(evaluate_login(gate(), "admin'", "x").malformed, true);
}

TEST(Login, PureTautologyFlag) {
    LoginGate g = gate();
    g.query_template = "'{user}' = '{pass}'";
    const auto e = evaluate_login(g, "x", "x");
    EXPECT_TRUE(e.tautology);
    EXPECT_EQ(e.outcome, LoginOutcome::Accepted);
}

TEST(Login, CuratedCorpusMatchesOracle) {
    const auto c = drivers::check_login(drivers::login_corpus());
    EXPECT_EQ(c.cases, 20u);
    EXPECT_TRUE(c.ok()) << c.detail;
}

TEST(Login, FuzzMatchesOracle) {
    const auto c = drivers::check_login(drivers::login_fuzz(10000, 17));
    EXPECT_TRUE(c.ok()) << c.failures << " mismatches, first: " << c.detail;
}

TEST(Login, QuoteFreeTextIsRejected) {
    // 500 generated inputs without quotes never get in.
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> ch('a', 'z');
    for (int i = 0; i < 500; ++i) {
        std::string u(1 + i % 12, 'a'), p(1 + i % 9, 'a');
        for (auto& c : u) c = static_cast<char>(ch(rng));
        for (auto& c : p) c = static_cast<char>(ch(rng));
        EXPECT_EQ(evaluate_login(gate(), u, p).outcome, LoginOutcome::Rejected);
    }
}

TEST(Login, TotalOnHugeAndNestedInput) {
    EXPECT_TRUE(evaluate_login(gate(), std::string(5000, 'a'), "x").malformed);
    EXPECT_NO_THROW(evaluate_login(gate(), std::string(4096, '('), std::string(4096, ')')));
    const auto c = drivers::check_login({{std::string(300, '(') + "'1'='1" + std::string(300, ')'), "x"},
                                         {"' OR " + std::string(255, '(') + "'1'='1" + std::string(255, ')') + " OR '", "x"}});
    EXPECT_TRUE(c.ok()) << c.detail;
}

TEST(Exploit, ConfigureErrors) {
    const auto& cat = world().exploits;
    const std::string name = "exploit/windows/smb/simblue";
    EXPECT_EQ(code_of([&] { configure_exploit(cat, "exploit/none", {}); }), ErrorCode::UnknownExploit);
    try {
        configure_exploit(cat, name, {{"PAYLOAD", "meterpreter/reverse_tcp"}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingOption);
        EXPECT_EQ(e.details(), std::vector<std::string>{"TARGET"});
    }
    EXPECT_EQ(code_of([&] { configure_exploit(cat, name, {{"TARGET", "10.13.37.2"}, {"PAYLOAD", "calc.exe"}}); }),
              ErrorCode::InvalidPayload);
    const auto ok = configure_exploit(cat, name, {{"target", "10.13.37.2"}, {"payload", "shell/reverse_tcp"}});
    EXPECT_EQ(ok.target, "10.13.37.2");
}

TEST(Exploit, OutcomeEqualsSetIntersection) {
    const auto c = drivers::check_exploit_product();
    EXPECT_EQ(c.cases, world().exploits.size() * world().network.size());
    EXPECT_TRUE(c.ok()) << c.detail;
}

TEST(Exploit, PatchedHostFailsUnknownHostThrows) {
    const auto cfg = configure_exploit(world().exploits, "exploit/windows/smb/simblue",
                                       {{"TARGET", "10.13.37.3"}, {"PAYLOAD", "meterpreter/reverse_tcp"}});
    const auto out = run_exploit(cfg, world());
    EXPECT_FALSE(out.session_opened);
    EXPECT_EQ(out.failure, "NotVulnerable");
    auto missing = cfg;
    missing.target = "10.13.37.9";
    EXPECT_EQ(code_of([&] { run_exploit(missing, world()); }), ErrorCode::UnknownHost);
}

TEST(Exploit, DownloadsNeedOpenSessionAndExistingFile) {
    RemoteSession s{"10.13.37.2", true, {}};
    s = download_file(s, world(), "/secrets/plans.txt");
    EXPECT_EQ(s.downloads, std::vector<std::string>{"/secrets/plans.txt"});
    EXPECT_EQ(code_of([&] { download_file(s, world(), "/nope"); }), ErrorCode::NoSuchPath);
    RemoteSession closed{"10.13.37.2", false, {}};
    EXPECT_ANY_THROW(download_file(closed, world(), "/secrets/plans.txt"));
}

TEST(Exploit, EveryHostVulnerabilityIsCatalogued) {
    std::set<std::string> known;
    for (const auto& e : world().exploits) known.insert(e.vulnerability_ids.begin(), e.vulnerability_ids.end());
    for (const auto& h : world().network) {
        for (const auto& s : h.services) {
            for (const auto& v : s.vulnerability_ids) EXPECT_TRUE(known.count(v)) << v;
        }
    }
}

TEST(Usb, FlashAndLabel) {
    Prop p{"usb-stick", "", PropState::Found, Payload::None};
    EXPECT_EQ(code_of([&] { flash_usb(p, Payload::ZeroDay, {}); }), ErrorCode::ZeroDayNotOwned);
    EXPECT_EQ(code_of([&] { label_usb(p, "x"); }), ErrorCode::NotFlashed);
    const auto flashed = flash_usb(p, Payload::ZeroDay, {std::string(kZeroDayItem)});
    EXPECT_EQ(flashed.payload, Payload::ZeroDay);
    EXPECT_EQ(label_usb(flashed, "lunch menu").label, "lunch menu");
    Prop hidden = p;
    hidden.state = PropState::Hidden;
    EXPECT_EQ(code_of([&] { flash_usb(hidden, Payload::WordPrankScript, {}); }), ErrorCode::PropNotFound);
}

TEST(Usb, PrankOpensWordProcessorFiveTimes) {
    const auto actions = simulate_payload(Payload::WordPrankScript);
    ASSERT_EQ(actions.size(), 5u);
    for (const auto& a : actions) EXPECT_EQ(a, actions.front());
    EXPECT_NE(actions.front().find("open word-processor"), std::string::npos);
}
