#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pkb/doxastic.hpp"
#include "pkb/possibility.hpp"

namespace pkb {

// ---------------------------------------------------------------------------
// Assertion-log events. Events reference entities by name so a log segment
// can be replayed onto any store holding the same definitions, which is what
// fork/merge and the store file format rely on.

struct AssertEvent {
  std::string context;
  std::string possibility;
  ModalStatus status = ModalStatus::Possible;
  friend bool operator==(const AssertEvent&, const AssertEvent&) = default;
};

struct RegisterEvent {
  std::string context;
  std::string agent;
  ModalStatus status = ModalStatus::Necessary;
  friend bool operator==(const RegisterEvent&, const RegisterEvent&) = default;
};

struct TestifyEvent {
  std::string context;  // receiving context
  std::string speaker;
  std::string now;
  std::string possibility;
  ModalStatus status = ModalStatus::Possible;
  friend bool operator==(const TestifyEvent&, const TestifyEvent&) = default;
};

// Endorsements reference testimony by content key rather than display id;
// display numbering shifts across merges, content keys do not.
struct EndorseEvent {
  std::string context;
  std::string speaker;
  Epoch testified_at;
  std::string possibility;
  ModalStatus status = ModalStatus::Possible;
  bool reject = false;
  friend bool operator==(const EndorseEvent&, const EndorseEvent&) = default;
};

struct LogEvent {
  Epoch epoch;
  std::string branch;
  std::variant<AssertEvent, RegisterEvent, TestifyEvent, EndorseEvent> payload;
  friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

/// A contiguous run of log events appended by one branch. Stages are the
/// units fork and merge share; a closed stage is immutable.
struct Stage {
  std::string id;
  std::string branch;
  Epoch epoch_begin;
  Epoch epoch_end;        // exclusive; meaningful once closed
  std::size_t log_begin = 0;
  std::size_t log_end = 0;  // meaningful once closed
  bool open = true;
};

// ---------------------------------------------------------------------------

/// A doxastic context: an agent possibility indexed to a Now. The root
/// context is the system itself (its Me possibility); nested contexts hold
/// the recorded beliefs of other agents at a testimony epoch.
struct ContextNode {
  ContextId id;
  std::string name;
  PossibilityId agent;
  PossibilityId now;
  std::optional<ContextId> parent;
  PossibilityId actuality;  // comoverlap of agent and now
  WorldSet candidates;      // worlds hosting the actuality
  Epoch at;                 // opening epoch (testimony epoch for nested)
  bool derived = false;     // true when created by a testimony record
};

struct AgentRecord {
  ContextId context;
  PossibilityId agent;
  ModalStatus existence = ModalStatus::Necessary;
  Epoch registered_at;
};

enum class Endorsement { Recorded, Endorsed, Rejected };

struct TestimonyRecord {
  std::uint32_t number = 0;
  std::string id;  // "t<number>"
  ContextId receiving_context;
  PossibilityId speaker;
  Epoch at;
  PossibilityId possibility;
  ModalStatus status = ModalStatus::Possible;
  ContextId speaker_context;
  Endorsement endorsement = Endorsement::Recorded;
};

/// One entry of a (context, possibility) constraint chain. supersededAt is
/// derived from the log: the epoch of the next assertion on the same pair.
struct ConstraintRec {
  ContextId context;
  PossibilityId possibility;
  ModalStatus status = ModalStatus::Possible;
  Epoch asserted_at;
  std::optional<Epoch> superseded_at;
  PossibilityId owner;  // agent of the asserting context
};

struct HistoryEntry {
  ModalStatus status = ModalStatus::Possible;
  Epoch asserted_at;
  std::optional<Epoch> superseded_at;
};

struct AssertOutcome {
  std::optional<ConflictReport> conflict;
  bool accepted() const { return !conflict.has_value(); }
};

struct QueryAnswer {
  bool yes = false;
  ModalStatus status = ModalStatus::Possible;
  std::string owner;
  Epoch epoch;
};

class InconsistencyError : public Error {
 public:
  InconsistencyError(Errc code, const std::string& message,
                     ConflictReport report)
      : Error(code, message), report_(std::move(report)) {}
  const ConflictReport& report() const { return report_; }

 private:
  ConflictReport report_;
};

// ---------------------------------------------------------------------------

/// The knowledge store: a modal space plus doxastic contexts, the epoch
/// clock, the assertion log, testimony records and branch lineage.
///
/// All queries are const and derive from immutable definitions plus the
/// log, so a copy of a Store is a consistent snapshot; mutation goes
/// through a single writer. Classifications are a pure function of the log:
/// replaying it reproduces them exactly.
class Store {
 public:
  Store();

  // --- kernel / possibility passthrough (single-writer mutations)
  WorldId add_world(const std::vector<std::string>& atom_labels,
                    std::string name = "");
  IndividualId add_individual(WorldId world,
                              const std::vector<std::string>& atom_labels,
                              std::string label = "");
  IndividualId add_individual(WorldId world, Extent extent,
                              std::string label = "");
  IndividualId intersect_individuals(std::span<const IndividualId> xs);
  PossibilityId define_possibility(std::string name,
                                   std::vector<IndividualId> members,
                                   bool functional);
  PossibilityId comoverlap_construct(std::span<const PossibilityId> s,
                                     std::string name);

  const ModalSpace& space() const { return space_; }
  const Model& model() const { return space_.model(); }

  // --- doxastic layer
  ContextId open_context(std::string name, PossibilityId agent,
                         PossibilityId now,
                         std::optional<ContextId> parent = std::nullopt);
  AssertOutcome assert_status(ContextId ctx, PossibilityId p,
                              ModalStatus status);
  std::variant<DoxasticState, ConflictReport> solve_worlds(ContextId ctx,
                                                           Epoch at) const;
  ModalStatus classify(ContextId ctx, PossibilityId p, Epoch at) const;
  QueryAnswer query_possibly(ContextId ctx, PossibilityId p) const;
  std::vector<HistoryEntry> history(ContextId ctx, PossibilityId p) const;
  bool entails(PossibilityId q, PossibilityId p) const;
  Rational credence_ratio(PossibilityId q, PossibilityId p, ContextId ctx,
                          Epoch at) const;
  OracleResult oracle_solve_at(ContextId ctx, Epoch at,
                               std::size_t max_candidates = 16) const;
  std::vector<ConstraintRec> live_constraints(ContextId ctx, Epoch at) const;

  // --- testimony layer
  AgentRecord register_agent(ContextId ctx, PossibilityId agent,
                             ModalStatus existence = ModalStatus::Necessary);
  std::vector<AgentRecord> agents(ContextId ctx) const;
  TestimonyRecord record_testimony(ContextId ctx, PossibilityId speaker,
                                   PossibilityId now, PossibilityId p,
                                   ModalStatus status);
  AssertOutcome endorse(ContextId ctx, const std::string& testimony_id);
  void reject_testimony(ContextId ctx, const std::string& testimony_id);
  ModalStatus agent_belief(ContextId ctx, PossibilityId speaker, Epoch at,
                           PossibilityId p) const;
  const std::vector<TestimonyRecord>& testimonies() const {
    return testimonies_;
  }
  std::optional<TestimonyRecord> find_testimony(const std::string& id) const;

  // --- epochs
  void advance_epoch() { clock_ = clock_.next(); }
  Epoch epoch() const { return clock_; }

  // --- identity: fork / merge / lineage
  std::pair<Store, Store> fork();
  static std::variant<Store, ConflictReport> merge(const Store& a,
                                                   const Store& b);
  const std::vector<Stage>& lineage() const { return stages_; }
  const std::string& branch_id() const { return branch_id_; }
  std::uint32_t fork_count() const { return fork_count_; }
  const std::vector<LogEvent>& log() const { return log_; }

  // --- contexts
  const ContextNode& context(ContextId id) const;
  std::optional<ContextId> find_context(const std::string& name) const;
  const std::vector<ContextNode>& contexts() const { return contexts_; }

  // --- replay hooks (used by the file loader and by merge; these append
  //     events verbatim, without the assertion guard rail)
  void set_branch(const std::string& id, std::uint32_t fork_count);
  void begin_stage(const std::string& id, const std::string& branch,
                   Epoch from);
  void record_assert(const std::string& ctx, const std::string& poss,
                     ModalStatus status);
  void record_register(const std::string& ctx, const std::string& agent,
                       ModalStatus status);
  void record_testify(const std::string& ctx, const std::string& speaker,
                      const std::string& now, const std::string& poss,
                      ModalStatus status);
  void record_endorse(const EndorseEvent& ev);
  /// Solves every context at the current epoch; first conflict found, if
  /// any, by context name order.
  std::optional<std::pair<std::string, ConflictReport>> verify_consistent()
      const;

 private:
  struct TestimonyKey {
    ContextId receiving;
    PossibilityId speaker;
    Epoch at;
    PossibilityId possibility;
    ModalStatus status;
    friend auto operator<=>(const TestimonyKey&, const TestimonyKey&) =
        default;
  };

  ContextId ensure_context(std::string name, PossibilityId agent,
                           PossibilityId now, std::optional<ContextId> parent,
                           Epoch at, bool derived);
  void append_event(LogEvent ev);
  void pop_event();
  void reindex();
  std::vector<std::size_t> sorted_event_order() const;
  ConflictReport build_report(ContextId ctx,
                              const std::vector<ConstraintRec>& live) const;
  std::vector<SolveInput> solve_inputs(
      const std::vector<ConstraintRec>& live) const;
  PossibilityId resolve_poss(const std::string& name) const;
  ContextId resolve_ctx(const std::string& name) const;
  std::string nested_context_name(ContextId parent, PossibilityId speaker,
                                  Epoch at) const;
  AssertOutcome guarded_append(LogEvent ev, ContextId affected);
  std::size_t prefix_length(const Store& other) const;
  static void check_definition_compat(const Store& a, const Store& b);
  void adopt_definitions_from(const Store& b);

  ModalSpace space_;
  std::vector<ContextNode> contexts_;
  std::map<std::string, ContextId> context_names_;
  std::vector<LogEvent> log_;
  std::vector<Stage> stages_;
  std::string branch_id_ = "b0";
  std::uint32_t fork_count_ = 0;
  Epoch clock_;

  // Derived from the log by reindex(): constraint chains in replay order,
  // testimony records in log order, agent registry.
  std::vector<ConstraintRec> constraints_;
  std::vector<TestimonyRecord> testimonies_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, AgentRecord> agents_;
};

}  // namespace pkb
