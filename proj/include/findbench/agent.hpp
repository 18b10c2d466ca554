#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "findbench/blackbox.hpp"
#include "findbench/interpretation.hpp"

namespace findbench {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

// Minimal chat-completion client interface; the HTTP implementation
// lives in http_chat.hpp and tests drive run_agent through a scripted
// local endpoint.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Returns the assistant reply or nullopt after exhausting retries.
  virtual std::optional<std::string> complete(const std::vector<ChatMessage>& messages,
                                              std::string* error) = 0;
};

enum class AgentMode { Aia, Milan, AiaMilan };

const char* agent_mode_name(AgentMode m);
std::optional<AgentMode> agent_mode_from_name(const std::string& name);

// Per-category instruction prompts plus the system prompt. The defaults
// carry the engine's interactive protocol: the agent issues
//   COMMAND: PYTHON(function.py input1 input2 ...)
// and receives "Response: <output line>" messages until it produces its
// final [DESCRIPTION] (with [DOMAIN] and [CODE] where applicable).
struct PromptSet {
  std::string system;
  std::string numeric;
  std::string strings;
  std::string relations;

  const std::string& for_category(Category c) const;
};

PromptSet default_prompts();

struct AgentConfig {
  std::string endpoint_url;
  std::string model;
  std::string credential_env;  // environment variable holding the key
  double temperature = 0.0;
  int max_turns = 16;
  AgentMode mode = AgentMode::Aia;
  PromptSet prompts = default_prompts();
  double rate_limit_rps = 0.0;  // 0 = unlimited
};

struct CommandExecution {
  std::string raw;                  // text inside PYTHON(...)
  std::vector<std::string> inputs;  // tokens after the script name
  std::string response_line;
};

struct DialogueTranscript {
  std::string function_id;
  std::vector<ChatMessage> messages;
  std::vector<CommandExecution> commands;
  Interpretation interpretation;
  bool completed = false;  // final [DESCRIPTION] parsed
  int interaction_count() const { return static_cast<int>(commands.size()); }
};

// Extracts the argument text of the first `PYTHON(...)` following a
// `COMMAND:` marker; nullopt when the reply carries no such command.
// Nothing else in a reply is ever executed.
std::optional<std::string> extract_command(const std::string& reply);

// Splits command text into whitespace tokens and drops the leading
// script name; empty result means a malformed command.
std::vector<std::string> command_inputs(const std::string& command_text);

// Parses [DESCRIPTION] / [DOMAIN] / [CODE] sections (later sections
// optional) out of a reply.
struct ParsedSections {
  std::string description;
  std::string domain;
  std::string code;
  bool has_description = false;
};
ParsedSections parse_sections(const std::string& reply);

// Runs one interpretation dialogue. In milan mode the engine evaluates
// the exemplar inputs itself, asks for a single description, and
// executes no agent commands; aia+milan seeds the dialogue with the
// exemplar outputs and then interacts.
DialogueTranscript run_agent(const AgentConfig& config, ChatClient& client,
                             BlackBoxSession& session,
                             const std::vector<std::string>* exemplars = nullptr);

// Re-executes a transcript's commands against a fresh session and
// reports whether every response line reproduces byte-for-byte.
bool replay_matches(const DialogueTranscript& transcript, BlackBoxSession& session);

// Exemplar files: JSON object keyed by function id, each a 10-item input
// list. Throws on wrong cardinality.
std::map<std::string, std::vector<std::string>> load_exemplars(const std::string& path);

nlohmann::ordered_json to_json(const DialogueTranscript& t);
void write_transcripts(const std::vector<DialogueTranscript>& ts, const std::string& path);

}  // namespace findbench
