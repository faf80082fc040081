#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "oip/errors.hpp"
#include "oip/http_client.hpp"
#include "oip/item_bank.hpp"
#include "oip/likert_parse.hpp"
#include "oip/mock_client.hpp"
#include "oip/provider.hpp"

using namespace oip;

namespace {

const std::filesystem::path kDataDir = OIP_DATA_DIR;

const ItemBank& bank() {
  static ItemBank b = ItemBank::load(kDataDir / "oip_items.csv");
  return b;
}

ProviderParams params(const std::string& id = "mock-a") {
  ProviderParams p;
  p.model_id = id;
  p.version_tag = "v1";
  p.max_attempts = 10;
  return p;
}

const Item& item_of(RiasecCategory cat) {
  for (const auto& item : bank().items())
    if (item.category == cat) return item;
  throw std::runtime_error("unreachable");
}

/// Scripted test double: replays a fixed list of responses.
class ScriptedClient : public ChatClient {
 public:
  explicit ScriptedClient(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}
  std::string complete(const PromptText&, const ProviderParams&, const AdministrationKey&,
                       int) override {
    const size_t i = std::min(next_++, responses_.size() - 1);
    return responses_[i];
  }

 private:
  std::vector<std::string> responses_;
  size_t next_ = 0;
};

}  // namespace

TEST_CASE("mock with zero noise maps means to labels exactly") {
  MockSpec spec;
  spec.interest.means = {3.0, 3.0, 3.0, 5.0, 3.0, 3.0};  // Social = 5
  MockClient client(spec, bank());
  const auto& social = item_of(RiasecCategory::Social);
  CHECK(client.respond(params(), social, Mode::Interest, Language::English, 1, 1) ==
        "Strongly Like");

  MockSpec spec2;
  spec2.interest.means = {3.2, 3.2, 3.2, 3.2, 3.2, 3.2};  // rounds to 3
  MockClient client2(spec2, bank());
  CHECK(client2.respond(params(), social, Mode::Interest, Language::English, 1, 1) == "Unsure");
  CHECK(client2.respond(params(), social, Mode::Interest, Language::Chinese, 1, 1) ==
        std::string(likert_label(3, Language::Chinese)));
}

TEST_CASE("mock competence mode answers with the digit") {
  MockSpec spec;
  spec.competence.means = {2.0, 2.0, 2.0, 2.0, 2.0, 2.0};
  MockClient client(spec, bank());
  CHECK(client.respond(params(), bank().by_id(1), Mode::Competence, Language::English, 1, 1) ==
        "2");
}

TEST_CASE("mock draws are reproducible and keyed by every coordinate") {
  MockSpec spec;
  spec.seed = 77;
  spec.interest.noise = 0.8;
  spec.interest.means = {3.5, 3.5, 3.5, 3.5, 3.5, 3.5};
  MockClient a(spec, bank());
  MockClient b(spec, bank());
  const auto& item = bank().by_id(17);

  int differing = 0;
  for (int rep = 1; rep <= 20; ++rep) {
    const auto ra = a.respond(params(), item, Mode::Interest, Language::English, rep, 1);
    const auto rb = b.respond(params(), item, Mode::Interest, Language::English, rep, 1);
    CHECK(ra == rb);  // same coordinates, same text
    if (rep > 1 &&
        ra != a.respond(params(), item, Mode::Interest, Language::English, rep - 1, 1))
      ++differing;
  }
  CHECK(differing > 0);  // replications are not constant

  // A different attempt index draws a fresh response.
  bool attempt_changes = false;
  for (int rep = 1; rep <= 20 && !attempt_changes; ++rep)
    attempt_changes = a.respond(params(), item, Mode::Interest, Language::English, rep, 1) !=
                      a.respond(params(), item, Mode::Interest, Language::English, rep, 2);
  CHECK(attempt_changes);
}

TEST_CASE("mock with a high Artistic mean prefers the top labels on Artistic items") {
  MockSpec spec;
  spec.seed = 3;
  spec.interest.means = {3.0, 3.0, 4.6, 3.0, 3.0, 3.0};
  spec.interest.noise = 0.3;
  MockClient client(spec, bank());
  double total = 0.0;
  int n = 0;
  for (const auto& item : bank().items()) {
    if (item.category != RiasecCategory::Artistic) continue;
    for (int rep = 1; rep <= 20; ++rep) {
      const auto text = client.respond(params(), item, Mode::Interest, Language::English, rep, 1);
      const auto v = parse_likert(text, Language::English);
      REQUIRE(v.has_value());
      total += v->numeric();
      ++n;
    }
  }
  CHECK(n == 200);
  CHECK(total / n > 4.25);
  CHECK(total / n < 5.0);
}

TEST_CASE("mock near-certain refusal emits the boilerplate") {
  MockSpec spec;
  spec.seed = 5;
  spec.interest.refusal_probability = 0.999;
  MockClient client(spec, bank());
  const auto text = client.respond(params(), bank().by_id(1), Mode::Interest,
                                   Language::English, 1, 1);
  CHECK(text == refusal_text(Language::English));
  CHECK_FALSE(parse_likert(text, Language::English));
  CHECK_FALSE(parse_likert(refusal_text(Language::Chinese), Language::Chinese));
}

TEST_CASE("profile bounds are enforced") {
  MockSpec bad;
  bad.interest.means[0] = 5.5;
  CHECK_THROWS_AS(MockClient(bad, bank()), ConfigError);
  MockSpec bad2;
  bad2.interest.refusal_probability = 1.0;  // outside [0, 1)
  CHECK_THROWS_AS(MockClient(bad2, bank()), ConfigError);
  ProviderParams p = params();
  p.max_attempts = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("administer_item stops at the first successful parse") {
  ScriptedClient client({"Like"});
  const auto rec = administer_item(client, PromptTemplates::builtin(), bank().by_id(1),
                                   Mode::Interest, Language::English, params(), 1);
  REQUIRE(rec.attempts.size() == 1);
  CHECK(rec.attempts[0].raw_text == "Like");
  CHECK(rec.attempts[0].parsed == 4);
  CHECK(rec.final_value == 4);
  CHECK(rec.key.item_id == 1);
  CHECK(rec.key.replication == 1);
}

TEST_CASE("administer_item retries a refusal and keeps the full history") {
  ScriptedClient client({"As an AI model I cannot answer.", "Dislike"});
  const auto rec = administer_item(client, PromptTemplates::builtin(), bank().by_id(2),
                                   Mode::Interest, Language::English, params(), 3);
  REQUIRE(rec.attempts.size() == 2);
  CHECK_FALSE(rec.attempts[0].parsed.has_value());
  CHECK(rec.attempts[1].parsed == 2);
  CHECK(rec.final_value == 2);
}

TEST_CASE("administer_item exhausts attempts into a Missing value") {
  ScriptedClient client({"I cannot answer that."});
  ProviderParams p = params();
  p.max_attempts = 4;
  const auto rec = administer_item(client, PromptTemplates::builtin(), bank().by_id(3),
                                   Mode::Interest, Language::English, p, 1);
  CHECK(rec.attempts.size() == 4);
  CHECK_FALSE(rec.final_value.has_value());
}

TEST_CASE("final value always equals the last successful parse") {
  const std::vector<std::vector<std::string>> scripts = {
      {"??", "3"},
      {"no", "no", "Strongly Dislike"},
      {"Unsure"},
      {"bad", "bad", "bad", "bad"},
      {"2 or 3", "5"},
  };
  for (const auto& script : scripts) {
    ScriptedClient client(script);
    ProviderParams p = params();
    p.max_attempts = int(script.size());
    const auto rec = administer_item(client, PromptTemplates::builtin(), bank().by_id(10),
                                     Mode::Interest, Language::English, p, 1);
    std::optional<int> last_parse;
    for (const auto& a : rec.attempts)
      if (a.parsed) last_parse = a.parsed;
    CHECK(rec.final_value == last_parse);
    CHECK(int(rec.attempts.size()) <= p.max_attempts);
  }
}

TEST_CASE("transport errors consume attempts; auth errors propagate") {
  class FlakyClient : public ChatClient {
   public:
    std::string complete(const PromptText&, const ProviderParams&, const AdministrationKey&,
                         int attempt) override {
      if (attempt == 1) throw TransportError("connection reset");
      return "Like";
    }
  };
  FlakyClient flaky;
  const auto rec = administer_item(flaky, PromptTemplates::builtin(), bank().by_id(1),
                                   Mode::Interest, Language::English, params(), 1);
  CHECK(rec.attempts.size() == 2);
  CHECK(rec.final_value == 4);
  CHECK(rec.attempts[0].raw_text.find("provider error") != std::string::npos);

  class RevokedClient : public ChatClient {
   public:
    std::string complete(const PromptText&, const ProviderParams&, const AdministrationKey&,
                         int) override {
      throw AuthError("revoked credential");
    }
  };
  RevokedClient revoked;
  CHECK_THROWS_AS(administer_item(revoked, PromptTemplates::builtin(), bank().by_id(1),
                                  Mode::Interest, Language::English, params(), 1),
                  AuthError);
}

TEST_CASE("http client speaks a generic chat-completion endpoint") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    hits++;
    if (req.get_header_value("Authorization") != "Bearer test-key-123") {
      res.status = 401;
      return;
    }
    const auto body = nlohmann::json::parse(req.body);
    const std::string prompt = body["messages"][0]["content"].get<std::string>();
    nlohmann::json reply{
        {"choices",
         {{{"message",
            {{"content", prompt.find("kitchen") != std::string::npos ? "Like" : "Unsure"}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  server.Post("/throttled", [&](const httplib::Request&, httplib::Response& res) {
    if (hits++ < 2)
      res.status = 429;
    else
      res.set_content(R"({"choices":[{"message":{"content":"3"}}]})", "application/json");
  });
  server.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("not json", "application/json");
  });

  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpProviderConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
  cfg.api_key_env = "OIP_TEST_KEY";
  cfg.body_template =
      R"({"model": "{model}", "temperature": {temperature}, "messages": [{"role": "user", "content": "{prompt}"}]})";

  setenv("OIP_TEST_KEY", "test-key-123", 1);
  {
    HttpChatClient client(cfg);
    const auto prompt = render_prompt(bank().by_id(1), Mode::Interest, Language::English);
    AdministrationKey key{"m", "v", Language::English, Mode::Interest, 1, 1};
    CHECK(client.complete(prompt, params("m"), key, 1) == "Like");
  }
  {
    setenv("OIP_TEST_KEY", "wrong-key", 1);
    HttpChatClient client(cfg);
    const auto prompt = render_prompt(bank().by_id(1), Mode::Interest, Language::English);
    AdministrationKey key{"m", "v", Language::English, Mode::Interest, 1, 1};
    CHECK_THROWS_AS(client.complete(prompt, params("m"), key, 1), AuthError);
    setenv("OIP_TEST_KEY", "test-key-123", 1);
  }
  {
    HttpProviderConfig throttled = cfg;
    throttled.path = "/throttled";
    throttled.rate_limit_retries = 3;
    hits = 0;
    HttpChatClient client(throttled);
    const auto prompt = render_prompt(bank().by_id(1), Mode::Interest, Language::English);
    AdministrationKey key{"m", "v", Language::English, Mode::Interest, 1, 1};
    CHECK(client.complete(prompt, params("m"), key, 1) == "3");  // after two 429s
    CHECK(hits >= 3);
  }
  {
    HttpProviderConfig broken = cfg;
    broken.path = "/broken";
    HttpChatClient client(broken);
    const auto prompt = render_prompt(bank().by_id(1), Mode::Interest, Language::English);
    AdministrationKey key{"m", "v", Language::English, Mode::Interest, 1, 1};
    CHECK_THROWS_AS(client.complete(prompt, params("m"), key, 1), TransportError);
  }
  {
    unsetenv("OIP_TEST_KEY");
    HttpChatClient client(cfg);
    const auto prompt = render_prompt(bank().by_id(1), Mode::Interest, Language::English);
    AdministrationKey key{"m", "v", Language::English, Mode::Interest, 1, 1};
    CHECK_THROWS_AS(client.complete(prompt, params("m"), key, 1), AuthError);
  }

  server.stop();
  server_thread.join();
}
