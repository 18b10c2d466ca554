#include "findbench/agent.hpp"

#include <fstream>
#include <sstream>

#include "findbench/serialization.hpp"

namespace findbench {

const char* agent_mode_name(AgentMode m) {
  switch (m) {
    case AgentMode::Aia: return "aia";
    case AgentMode::Milan: return "milan";
    case AgentMode::AiaMilan: return "aia+milan";
  }
  return "unknown";
}

std::optional<AgentMode> agent_mode_from_name(const std::string& name) {
  if (name == "aia") return AgentMode::Aia;
  if (name == "milan") return AgentMode::Milan;
  if (name == "aia+milan") return AgentMode::AiaMilan;
  return std::nullopt;
}

const std::string& PromptSet::for_category(Category c) const {
  switch (c) {
    case Category::Numeric: return numeric;
    case Category::Strings: return strings;
    case Category::Relations: return relations;
  }
  return numeric;
}

PromptSet default_prompts() {
  PromptSet p;
  p.system =
      "You now have access to some commands to help complete the user's request. You are able to "
      "access the user's machine with these commands. In every message you send, include "
      "'COMMAND:' with your command at the end. Here is a list of commands with explanations of "
      "how they are used:\n\nCommand: [PYTHON(function.py)]\nExplanation: [Run a python script "
      "with the given file name. Use quotes for the filename argument. Do not use quotes in the "
      "function command itself.]\n\nWhen you use a command, the user will respond with "
      "'Response:' followed by the output of the command. Use this output to help the user "
      "complete their request.";
  p.numeric =
      "Hi, your job is to interpret a function f(x) that is implemented in the function.py "
      "script. f(x) takes numerical inputs. All you can do is call f(x) on a value of x by "
      "running PYTHON(function.py value). Try to describe the function implemented by f(x) by "
      "running experiments on it. You can call the function on multiple inputs at a time by "
      "running PYTHON(function.py value1 value2 value3...). You can run the function multiple "
      "times on the same input. We encourage testing a large range of values before writing a "
      "description. You can test values between [-128 and 128]. The output could be noisy and "
      "your goal is to find a good simple description of f(x) that explains most of the function "
      "behavior. f(x) may combine multiple different operations. There may be an interval inside "
      "the domain where the function behaves differently. If that is the case, describe that "
      "interval. Your description of the function should have three parts. First, "
      "[DESCRIPTION]: Describe what the function is doing in language.\n[DOMAIN]: What is the "
      "domain of the function? Is there an interval where the function displays unexpected "
      "behavior? What are the numeric bounds of that interval? What is going on there?\n[CODE]: "
      "Write Python code that approximates the behavior of the function.";
  p.strings =
      "Hi, your job is to interpret a function f(x) that is implemented in the function.py "
      "script. f(x) takes string inputs. All you can do is call f(x) on an input string by "
      "running PYTHON(function.py string). Try to describe the function implemented by f(x) by "
      "running experiments on it. You can call the function on multiple inputs at a time by "
      "running PYTHON(function.py string1 string2 string3...). We encourage testing a large "
      "range of inputs before writing a description. The goal is to find a good simple "
      "description of f(x) that explains most of the function behavior. f(x) may combine "
      "multiple different operations. Your description of the function should be in the "
      "following form. [DESCRIPTION]: Describe what the function is doing in language.\n[CODE]: "
      "Write Python code that approximates the behavior of the function";
  p.relations =
      "Hi, your job is to interpret a function f(x) that is implemented in the function.py "
      "script. f(x) takes word inputs, and applies a rule to the input word. Try to describe the "
      "rule implemented by f(x) by running experiments on it. We encourage you to test a diverse "
      "selection of words spanning real-world concepts like places, events, and people. You can "
      "call the function on multiple inputs at a time by running PYTHON(function.py word1 word2 "
      "word3 ...). We encourage running many tests before writing a description. The goal is to "
      "find a good simple description of f(x) that explains most of the function behavior. There "
      "may be some inputs where you expect the function to behave a certain way, but it does "
      "not. If that is the case, describe the part of the domain where the rule the function "
      "normally applies, does not hold. Your description of the function should have two parts. "
      "[DESCRIPTION]: Describe in language the rule applied by the function.\n[DOMAIN]: Is there "
      "part of the domain where the rule the function normally applies, does not hold? If so, "
      "describe that corruption. If not, describe the domain of the function where the rule "
      "applies.";
  return p;
}

std::optional<std::string> extract_command(const std::string& reply) {
  const std::size_t marker = reply.find("COMMAND:");
  if (marker == std::string::npos) return std::nullopt;
  const std::size_t open = reply.find("PYTHON(", marker);
  if (open == std::string::npos) return std::nullopt;
  const std::size_t start = open + 7;
  const std::size_t close = reply.find(')', start);
  if (close == std::string::npos) return std::nullopt;
  return reply.substr(start, close - start);
}

std::vector<std::string> command_inputs(const std::string& command_text) {
  std::istringstream stream(command_text);
  std::vector<std::string> tokens;
  std::string tok;
  while (stream >> tok) tokens.push_back(tok);
  if (tokens.size() <= 1) return {};  // script name alone (or nothing)
  return {tokens.begin() + 1, tokens.end()};
}

namespace {

std::size_t find_marker(const std::string& text, const char* name, std::size_t from = 0) {
  return text.find(name, from);
}

std::string slice_section(const std::string& text, std::size_t content_start) {
  std::size_t end = text.size();
  for (const char* m : {"[DESCRIPTION]", "[DOMAIN]", "[CODE]"}) {
    const std::size_t p = text.find(m, content_start);
    if (p != std::string::npos) end = std::min(end, p);
  }
  std::string out = text.substr(content_start, end - content_start);
  // Trim surrounding whitespace and a leading colon.
  const auto first = out.find_first_not_of(" \t\r\n:");
  if (first == std::string::npos) return "";
  const auto last = out.find_last_not_of(" \t\r\n");
  return out.substr(first, last - first + 1);
}

}  // namespace

ParsedSections parse_sections(const std::string& reply) {
  ParsedSections out;
  const std::size_t d = find_marker(reply, "[DESCRIPTION]");
  if (d != std::string::npos) {
    out.has_description = true;
    out.description = slice_section(reply, d + 13);
  }
  const std::size_t dom = find_marker(reply, "[DOMAIN]");
  if (dom != std::string::npos) out.domain = slice_section(reply, dom + 8);
  const std::size_t code = find_marker(reply, "[CODE]");
  if (code != std::string::npos) out.code = slice_section(reply, code + 6);
  return out;
}

DialogueTranscript run_agent(const AgentConfig& config, ChatClient& client,
                             BlackBoxSession& session,
                             const std::vector<std::string>* exemplars) {
  DialogueTranscript t;
  t.function_id = session.function_id();
  t.interpretation.function_id = session.function_id();

  const bool uses_exemplars = config.mode != AgentMode::Aia;
  if (uses_exemplars && (!exemplars || exemplars->empty()))
    throw usage_error("mode " + std::string(agent_mode_name(config.mode)) +
                      " requires an exemplar set");

  std::string opening = config.prompts.for_category(session.category());
  if (uses_exemplars) {
    const std::string line = session.query(*exemplars);
    opening += "\n\nHere are outputs of the function for a fixed set of exemplar inputs:\n"
               "Response: " + line;
    if (config.mode == AgentMode::Milan)
      opening += "\n\nBased only on these exemplars, write your final description now. "
                 "Do not issue any commands.";
  }

  t.messages.push_back({"system", config.prompts.system});
  t.messages.push_back({"user", opening});

  auto finish = [&](const ParsedSections& sections) {
    t.interpretation.description = sections.description;
    t.interpretation.domain_note = sections.domain.empty() ? "none" : sections.domain;
    t.interpretation.code_text = sections.code;
    t.interpretation.query_count = session.query_count();
    t.completed = true;
  };

  const int turns = config.mode == AgentMode::Milan ? 1 : config.max_turns;
  bool hinted = false;
  for (int turn = 0; turn < turns; ++turn) {
    std::string error;
    const auto reply = client.complete(t.messages, &error);
    if (!reply) {
      t.interpretation.partial = true;
      t.interpretation.description = "endpoint failure: " + error;
      t.interpretation.query_count = session.query_count();
      return t;
    }
    t.messages.push_back({"assistant", *reply});

    const auto command = config.mode == AgentMode::Milan ? std::nullopt : extract_command(*reply);
    const auto sections = parse_sections(*reply);
    if (!command) {
      if (sections.has_description) {
        finish(sections);
        return t;
      }
      if (config.mode == AgentMode::Milan) break;
      t.messages.push_back(
          {"user", "Response: please either run a command or give your final [DESCRIPTION]."});
      continue;
    }

    const auto inputs = command_inputs(*command);
    if (inputs.empty()) {
      if (!hinted) {
        hinted = true;
        t.messages.push_back({"user",
                              "Response: usage: PYTHON(function.py input1 input2 ...) - include "
                              "the script name followed by the inputs."});
      } else {
        t.messages.push_back({"user", "Response: malformed command skipped."});
      }
      continue;
    }

    std::string line;
    try {
      line = session.query(inputs);
    } catch (const std::exception& e) {
      t.messages.push_back({"user", std::string("Response: error: ") + e.what()});
      continue;
    }
    t.commands.push_back({*command, inputs, line});
    t.messages.push_back({"user", "Response: " + line});
  }

  // Turn limit (or single milan turn) without a final description.
  t.interpretation.partial = true;
  t.interpretation.query_count = session.query_count();
  return t;
}

bool replay_matches(const DialogueTranscript& transcript, BlackBoxSession& session) {
  for (const auto& cmd : transcript.commands) {
    const std::string line = session.query(cmd.inputs);
    if (line != cmd.response_line) return false;
  }
  return true;
}

std::map<std::string, std::vector<std::string>> load_exemplars(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read exemplar file: " + path);
  nlohmann::json j;
  in >> j;
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [id, items] : j.items()) {
    auto list = items.get<std::vector<std::string>>();
    if (list.size() != 10)
      throw std::runtime_error("exemplar list for " + id + " must have exactly 10 items, got " +
                               std::to_string(list.size()));
    out[id] = std::move(list);
  }
  return out;
}

nlohmann::ordered_json to_json(const DialogueTranscript& t) {
  nlohmann::ordered_json j;
  j["id"] = t.function_id;
  nlohmann::ordered_json msgs = nlohmann::ordered_json::array();
  for (const auto& m : t.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  j["messages"] = msgs;
  nlohmann::ordered_json cmds = nlohmann::ordered_json::array();
  for (const auto& c : t.commands)
    cmds.push_back({{"raw", c.raw}, {"inputs", c.inputs}, {"response", c.response_line}});
  j["commands"] = cmds;
  j["interpretation"] = to_json(t.interpretation);
  j["completed"] = t.completed;
  return j;
}

void write_transcripts(const std::vector<DialogueTranscript>& ts, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write transcripts: " + path);
  nlohmann::ordered_json meta;
  meta["meta"] = true;
  meta["format_version"] = kFormatVersion;
  meta["engine_version"] = kEngineVersion;
  out << meta.dump() << "\n";
  for (const auto& t : ts) out << to_json(t).dump() << "\n";
}

}  // namespace findbench
