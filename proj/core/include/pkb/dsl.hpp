#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pkb/store.hpp"

namespace pkb::dsl {

// ---------------------------------------------------------------------------
// Statements. One per line; `#` starts a comment; identifiers are
// [A-Za-z_][A-Za-z0-9_.@-]* ('@' is reserved for member references and
// derived names, so declared names may not contain it).

struct SrcLoc {
  int line = 0;
  int col = 0;
};

struct VersionStmt {
  int version = 1;
};
struct BranchStmt {
  std::string branch;
  std::uint32_t forks = 0;
};
struct StageStmt {
  std::string id;
  std::string branch;
  Epoch from;
};
struct WorldStmt {
  std::string name;
  std::vector<std::string> atoms;
};
struct IndStmt {
  std::string world;
  std::string name;
  std::vector<std::string> atoms;
};
struct PossMember {
  std::string individual;
  std::string world;
};
struct PossStmt {
  std::string name;
  bool functional = false;
  std::vector<PossMember> members;
};
struct ConstructStmt {
  std::string name;
  std::vector<std::string> inputs;
};
struct ContextStmt {
  std::string name;
  std::string agent;
  std::string now;
  std::optional<std::string> parent;
};
struct AgentStmt {
  std::string context;
  ModalStatus status = ModalStatus::Necessary;
  std::string possibility;
};
struct AssertStmt {
  std::string context;
  ModalStatus status = ModalStatus::Possible;
  std::string possibility;
};
struct TestifyStmt {
  std::string context;
  std::string speaker;
  std::string now;
  ModalStatus status = ModalStatus::Possible;
  std::string possibility;
};
struct EndorseStmt {
  std::string context;
  std::string testimony;
  bool reject = false;
};
struct EpochStmt {};
struct QueryStmt {
  enum class Kind { Possibly, Classify, Ratio };
  Kind kind = Kind::Possibly;
  std::string context;
  std::string possibility;
  std::string possibility2;  // ratio denominator
};
struct ForkStmt {
  std::string out_a;
  std::string out_b;
};
struct MergeStmt {
  std::string other;
};

using StatementNode =
    std::variant<VersionStmt, BranchStmt, StageStmt, WorldStmt, IndStmt,
                 PossStmt, ConstructStmt, ContextStmt, AgentStmt, AssertStmt,
                 TestifyStmt, EndorseStmt, EpochStmt, QueryStmt, ForkStmt,
                 MergeStmt>;

struct Statement {
  SrcLoc loc;
  StatementNode node;
};

struct Script {
  std::vector<Statement> statements;
};

struct Diagnostic {
  int line = 0;
  int col = 0;
  std::string message;
  std::string token;
};

std::string format_diagnostic(const Diagnostic& d);

struct ParseResult {
  std::optional<Script> script;
  std::vector<Diagnostic> diagnostics;  // sorted by (line, col)
  bool ok() const { return script.has_value() && diagnostics.empty(); }
};

/// Names already declared before the script runs, so REPL lines can
/// reference what the store holds.
struct SymbolEnv {
  std::set<std::string> worlds;
  std::set<std::string> possibilities;
  std::set<std::string> contexts;
  std::map<std::string, std::set<std::string>> individuals;  // per world
  std::size_t testimony_count = 0;
  static SymbolEnv from_store(const Store& store);
};

/// Single-pass parse with per-line error recovery. Returns a fully checked
/// Script (declare-before-use enforced against env plus earlier statements),
/// or every diagnostic found.
ParseResult parse_script(std::string_view text, const SymbolEnv& env = {});

/// Canonical text form: header, definitions ordered by (kind, identifier)
/// (dependency-respecting within constructs and contexts), then the
/// assertion log grouped by lineage stage in epoch order. Parsing the
/// output reproduces a classification-equivalent store; serializing that
/// store reproduces the same bytes.
std::string serialize(const Store& store);

struct ExecResult {
  int exit_code = 0;  // 0 ok, 1 script error, 2 modal inconsistency, 3 unknown
  std::vector<std::string> output;
  std::vector<Diagnostic> diagnostics;
  std::optional<ConflictReport> conflict;
  bool ok() const { return exit_code == 0; }
};

struct ExecOptions {
  bool explain = false;
  std::filesystem::path base_dir;  // resolves fork/merge file arguments
};

/// Thrown when a store file cannot be opened, parsed or executed; carries
/// the failing ExecResult for the caller to report.
class LoadError : public std::runtime_error {
 public:
  explicit LoadError(ExecResult result)
      : std::runtime_error(result.diagnostics.empty()
                               ? "store file load failed"
                               : result.diagnostics.front().message),
        result_(std::move(result)) {}
  const ExecResult& result() const { return result_; }

 private:
  ExecResult result_;
};

/// Applies a script to a store. Statements run with the full assertion
/// guard rail; once a `stage` directive is seen the remaining log events
/// replay verbatim (they come from a store file) and consistency is
/// verified at the end.
ExecResult execute(Store& store, const Script& script,
                   const ExecOptions& opts = {});

int exit_code_for(const Error& e);

// Output formatting shared by CLI, REPL and tests.
std::string format_possibly(const QueryAnswer& a);
std::string format_classify(ModalStatus s, const std::string& owner,
                            Epoch epoch);
std::string format_ratio(const Rational& r, const std::string& owner,
                         Epoch epoch);
std::vector<std::string> explain_lines(const Store& store, ContextId ctx,
                                       std::span<const PossibilityId> ps);

Store load_store_file(const std::filesystem::path& path);
void save_store_file(const Store& store, const std::filesystem::path& path);

}  // namespace pkb::dsl
