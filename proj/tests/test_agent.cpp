#include <doctest.h>

#include <atomic>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "findbench/agent.hpp"
#include "findbench/generator.hpp"
#include "findbench/http_chat.hpp"

using namespace findbench;

namespace {

// Local OpenAI-style endpoint that replays a fixed list of replies.
class StubEndpoint {
 public:
  explicit StubEndpoint(std::vector<std::string> replies) : replies_(std::move(replies)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      last_request_ = req.body;
      const std::size_t i = std::min(index_.fetch_add(1), replies_.size() - 1);
      nlohmann::json out;
      out["choices"] = {{{"message", {{"role", "assistant"}, {"content", replies_[i]}}}}};
      res.set_content(out.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int requests() const { return static_cast<int>(index_.load()); }
  std::string last_request() const { return last_request_; }

 private:
  std::vector<std::string> replies_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<std::size_t> index_{0};
  std::string last_request_;
};

FunctionSpec linear_spec() {
  FunctionSpec spec;
  spec.id = "a1";
  spec.category = Category::Numeric;
  spec.numeric = NumericExpr::atomic(Family::Linear, 2, 3);
  spec.seed = 12;
  return spec;
}

AgentConfig config_for(const StubEndpoint& stub) {
  AgentConfig config;
  config.endpoint_url = stub.url() + "/v1/chat/completions";
  config.model = "stub-model";
  return config;
}

}  // namespace

TEST_CASE("command extraction only fires on the exact wire pattern") {
  CHECK(*extract_command("COMMAND: PYTHON(function.py 1 2)") == "function.py 1 2");
  CHECK(*extract_command("text before\nCOMMAND: PYTHON(function.py abc)") == "function.py abc");
  CHECK(!extract_command("PYTHON(function.py 1)"));              // no COMMAND: marker
  CHECK(!extract_command("COMMAND: BASH(rm -rf /)"));            // wrong tool
  CHECK(!extract_command("COMMAND: python(function.py 1)"));     // case-sensitive
  CHECK(!extract_command("run `rm -rf /` now"));
  CHECK(!extract_command("COMMAND: PYTHON(function.py 1"));      // unterminated

  CHECK(command_inputs("function.py 1 2 3") == std::vector<std::string>{"1", "2", "3"});
  CHECK(command_inputs("function.py").empty());
  CHECK(command_inputs("").empty());
}

TEST_CASE("fuzzing shell-looking replies never executes anything") {
  Rng rng(77);
  const std::vector<std::string> fragments = {
      "rm -rf /", "PYTHON(", ")", "COMMAND:", "$(curl evil)", "`ls`", "exec(", "os.system",
      "PYTHON function.py 1", "COMMAND PYTHON", ";;", "&&", "sudo",
  };
  for (int trial = 0; trial < 200; ++trial) {
    std::string reply;
    const int parts = 1 + static_cast<int>(rng.uniform_int(0, 4));
    for (int i = 0; i < parts; ++i)
      reply += fragments[rng.uniform_int(0, static_cast<std::int64_t>(fragments.size()) - 1)] +
               " ";
    const auto cmd = extract_command(reply);
    if (cmd) {
      // Only the literal COMMAND: ... PYTHON(...) pattern may fire.
      const auto c = reply.find("COMMAND:");
      REQUIRE(c != std::string::npos);
      REQUIRE(reply.find("PYTHON(", c) != std::string::npos);
    }
  }
}

TEST_CASE("section parsing handles full and partial answers") {
  const auto full = parse_sections(
      "[DESCRIPTION]: doubles x and adds three\n[DOMAIN]: all reals\n[CODE]: def f(x): return "
      "2*x+3");
  CHECK(full.has_description);
  CHECK(full.description == "doubles x and adds three");
  CHECK(full.domain == "all reals");
  CHECK(full.code == "def f(x): return 2*x+3");

  const auto partial = parse_sections("[DESCRIPTION] reverses strings");
  CHECK(partial.has_description);
  CHECK(partial.description == "reverses strings");
  CHECK(partial.domain.empty());

  CHECK(!parse_sections("no sections here").has_description);
}

TEST_CASE("a scripted dialogue executes its command and parses the answer") {
  StubEndpoint stub({
      "Let me test it. COMMAND: PYTHON(function.py 1 2)",
      "[DESCRIPTION]: a linear function 2x+3\n[DOMAIN]: all reals\n[CODE]: lambda x: 2*x+3",
  });
  HttpChatClient client(stub.url() + "/v1/chat/completions", "stub-model", "", 0.0);
  auto session = open_session_from_spec(linear_spec(), {});
  const auto t = run_agent(config_for(stub), client, session);
  CHECK(t.completed);
  CHECK(t.interaction_count() == 1);
  CHECK(t.commands[0].inputs == std::vector<std::string>{"1", "2"});
  CHECK(t.commands[0].response_line == "Function input - output pairs: (1, 5)(2, 7)");
  CHECK(t.interpretation.description == "a linear function 2x+3");
  CHECK(t.interpretation.domain_note == "all reals");
  CHECK(t.interpretation.code_text == "lambda x: 2*x+3");
  // The request body carried the chat schema.
  const auto body = nlohmann::json::parse(stub.last_request());
  CHECK(body.at("model") == "stub-model");
  CHECK(body.at("messages").is_array());
}

TEST_CASE("turn limits produce a partial transcript") {
  StubEndpoint stub({"COMMAND: PYTHON(function.py 1)"});
  HttpChatClient client(stub.url() + "/v1/chat/completions", "stub-model", "", 0.0);
  AgentConfig config = config_for(stub);
  config.max_turns = 1;
  auto session = open_session_from_spec(linear_spec(), {});
  const auto t = run_agent(config, client, session);
  CHECK(!t.completed);
  CHECK(t.interpretation.partial);
  CHECK(t.interaction_count() == 1);
}

TEST_CASE("milan mode runs zero commands and still yields a description") {
  StubEndpoint stub({
      "COMMAND: PYTHON(function.py 9)\n[DESCRIPTION]: produced from the exemplars alone",
  });
  HttpChatClient client(stub.url() + "/v1/chat/completions", "stub-model", "", 0.0);
  AgentConfig config = config_for(stub);
  config.mode = AgentMode::Milan;
  const std::vector<std::string> exemplars = {"1", "2", "3", "4", "5",
                                              "6", "7", "8", "9", "10"};
  auto session = open_session_from_spec(linear_spec(), {});
  const auto t = run_agent(config, client, session, &exemplars);
  CHECK(t.interaction_count() == 0);
  CHECK(t.completed);
  CHECK(t.interpretation.description == "produced from the exemplars alone");
  // The engine itself evaluated the exemplars once.
  CHECK(session.query_count() == 10);
}

TEST_CASE("malformed commands get one usage hint and are then skipped") {
  StubEndpoint stub({
      "COMMAND: PYTHON(function.py)",  // no inputs
      "COMMAND: PYTHON(function.py)",
      "[DESCRIPTION]: gave up on experiments",
  });
  HttpChatClient client(stub.url() + "/v1/chat/completions", "stub-model", "", 0.0);
  auto session = open_session_from_spec(linear_spec(), {});
  const auto t = run_agent(config_for(stub), client, session);
  CHECK(t.completed);
  CHECK(t.interaction_count() == 0);
  int hints = 0;
  for (const auto& m : t.messages)
    if (m.role == "user" && m.content.find("usage:") != std::string::npos) ++hints;
  CHECK(hints == 1);
}

TEST_CASE("replay reproduces every response line byte for byte") {
  StubEndpoint stub({
      "COMMAND: PYTHON(function.py -3 0 12.5)",
      "COMMAND: PYTHON(function.py 7 7)",
      "[DESCRIPTION]: linear",
  });
  HttpChatClient client(stub.url() + "/v1/chat/completions", "stub-model", "", 0.0);
  // A noisy spec: replays only match because draws are keyed by counter.
  auto spec = sample_numeric_spec(31415, "n", kRoleNoise);
  auto session = open_session_from_spec(spec, {}, 0);
  const auto t = run_agent(config_for(stub), client, session);
  REQUIRE(t.interaction_count() == 2);
  auto fresh = open_session_from_spec(spec, {}, 0);
  CHECK(replay_matches(t, fresh));
  auto other_nonce = open_session_from_spec(spec, {}, 1);
  CHECK(!replay_matches(t, other_nonce));
}

TEST_CASE("endpoint failures abort with a partial transcript after retries") {
  AgentConfig config;
  config.endpoint_url = "http://127.0.0.1:1/v1/chat/completions";  // nothing listens
  config.model = "stub";
  HttpChatClient client(config.endpoint_url, config.model, "", 0.0);
  auto session = open_session_from_spec(linear_spec(), {});
  const auto t = run_agent(config, client, session);
  CHECK(!t.completed);
  CHECK(t.interpretation.partial);
  CHECK(t.interpretation.description.find("endpoint failure") != std::string::npos);
}

TEST_CASE("exemplar files validate cardinality") {
  const std::string good = "/tmp/fb_exemplars_good.json";
  {
    std::ofstream out(good);
    out << R"({"f00000": ["a","b","c","d","e","f","g","h","i","j"]})";
  }
  const auto loaded = load_exemplars(good);
  CHECK(loaded.at("f00000").size() == 10);

  const std::string bad = "/tmp/fb_exemplars_bad.json";
  {
    std::ofstream out(bad);
    out << R"({"f00000": ["a","b","c","d","e","f","g","h","i"]})";
  }
  CHECK_THROWS(load_exemplars(bad));

  const std::string empty = "/tmp/fb_exemplars_empty.json";
  {
    std::ofstream out(empty);
    out << "{}";
  }
  CHECK(load_exemplars(empty).empty());
  // Milan mode refuses to start without exemplars.
  StubEndpoint stub({"[DESCRIPTION]: x"});
  HttpChatClient client(stub.url() + "/v1/chat/completions", "stub", "", 0.0);
  AgentConfig config = config_for(stub);
  config.mode = AgentMode::Milan;
  auto session = open_session_from_spec(linear_spec(), {});
  CHECK_THROWS_AS(run_agent(config, client, session, nullptr), usage_error);
}
