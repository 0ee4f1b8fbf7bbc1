#include <cctype>
#include <charconv>
#include <sstream>

#include "pkb/dsl.hpp"

namespace pkb::dsl {

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream out;
  out << d.line << ":" << d.col << ": error: " << d.message;
  if (!d.token.empty()) out << " [" << d.token << "]";
  return out.str();
}

SymbolEnv SymbolEnv::from_store(const Store& store) {
  SymbolEnv env;
  const Model& m = store.model();
  for (std::size_t i = 0; i < m.world_count(); ++i) {
    const World& w = m.world(WorldId{static_cast<std::uint32_t>(i)});
    env.worlds.insert(w.name);
    auto& inds = env.individuals[w.name];
    for (IndividualId ind : w.individuals)
      inds.insert(m.individual(ind).label);
  }
  for (std::size_t i = 0; i < store.space().possibility_count(); ++i)
    env.possibilities.insert(
        store.space().possibility(PossibilityId{static_cast<std::uint32_t>(i)})
            .name);
  for (const ContextNode& c : store.contexts()) env.contexts.insert(c.name);
  env.testimony_count = store.testimonies().size();
  return env;
}

namespace {

struct Token {
  enum class Kind { Ident, Number, Punct };
  Kind kind = Kind::Ident;
  std::string text;
  int col = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '@' || c == '-';
}

class Parser {
 public:
  explicit Parser(SymbolEnv env) : env_(std::move(env)) {}

  ParseResult run(std::string_view text) {
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      std::string line(text.substr(
          pos, eol == std::string_view::npos ? text.size() - pos : eol - pos));
      ++lineno;
      parse_line(line, lineno);
      if (eol == std::string_view::npos) break;
      pos = eol + 1;
    }
    std::sort(diags_.begin(), diags_.end(),
              [](const Diagnostic& a, const Diagnostic& b) {
                return std::tie(a.line, a.col) < std::tie(b.line, b.col);
              });
    ParseResult result;
    result.diagnostics = std::move(diags_);
    if (result.diagnostics.empty())
      result.script = Script{std::move(stmts_)};
    return result;
  }

 private:
  void error(int line, int col, std::string message, std::string token = "") {
    diags_.push_back(Diagnostic{line, col, std::move(message), std::move(token)});
  }

  static std::vector<std::string> split_raw(const std::string& line) {
    std::vector<std::string> words;
    std::istringstream in(line);
    std::string w;
    while (in >> w) words.push_back(w);
    return words;
  }

  std::optional<std::vector<Token>> lex(const std::string& line, int lineno) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      char c = line[i];
      if (c == '#') break;
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      int col = static_cast<int>(i) + 1;
      if (ident_start(c)) {
        std::size_t j = i;
        while (j < line.size() && ident_char(line[j])) ++j;
        tokens.push_back(Token{Token::Kind::Ident, line.substr(i, j - i), col});
        i = j;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < line.size() &&
               std::isdigit(static_cast<unsigned char>(line[j])))
          ++j;
        tokens.push_back(Token{Token::Kind::Number, line.substr(i, j - i), col});
        i = j;
      } else if (c == '{' || c == '}' || c == '(' || c == ')' || c == '=' ||
                 c == ',' || c == '@') {
        tokens.push_back(Token{Token::Kind::Punct, std::string(1, c), col});
        ++i;
      } else {
        error(lineno, col, "unexpected character", std::string(1, c));
        return std::nullopt;
      }
    }
    return tokens;
  }

  // --- small token-stream helpers ------------------------------------------

  struct Cursor {
    const std::vector<Token>* tokens;
    std::size_t i = 0;
    bool done() const { return i >= tokens->size(); }
    const Token& peek() const { return (*tokens)[i]; }
    Token take() { return (*tokens)[i++]; }
    int col_here(const std::string& line) const {
      return done() ? static_cast<int>(line.size()) + 1 : peek().col;
    }
  };

  std::optional<std::string> want_ident(Cursor& c, int lineno,
                                        const std::string& line,
                                        const char* what) {
    if (c.done() || c.peek().kind != Token::Kind::Ident) {
      error(lineno, c.col_here(line), std::string("expected ") + what,
            c.done() ? "" : c.peek().text);
      return std::nullopt;
    }
    return c.take().text;
  }

  bool want_punct(Cursor& c, char p, int lineno, const std::string& line) {
    if (c.done() || c.peek().kind != Token::Kind::Punct ||
        c.peek().text[0] != p) {
      error(lineno, c.col_here(line),
            std::string("expected '") + p + "'", c.done() ? "" : c.peek().text);
      return false;
    }
    c.take();
    return true;
  }

  std::optional<std::uint64_t> want_number(Cursor& c, int lineno,
                                           const std::string& line,
                                           const char* what) {
    if (c.done() || c.peek().kind != Token::Kind::Number) {
      error(lineno, c.col_here(line), std::string("expected ") + what,
            c.done() ? "" : c.peek().text);
      return std::nullopt;
    }
    Token t = c.take();
    std::uint64_t v = 0;
    std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    return v;
  }

  bool want_end(Cursor& c, int lineno) {
    if (!c.done()) {
      error(lineno, c.peek().col, "unexpected trailing input", c.peek().text);
      return false;
    }
    return true;
  }

  bool declared_name_ok(const std::string& name, int lineno, int col) {
    if (name.find('@') != std::string::npos) {
      error(lineno, col, "'@' is reserved and not allowed in declared names",
            name);
      return false;
    }
    return true;
  }

  std::optional<ModalStatus> want_status(Cursor& c, int lineno,
                                         const std::string& line) {
    auto word = want_ident(c, lineno, line, "a modal status");
    if (!word) return std::nullopt;
    auto status = parse_modal_status(*word);
    if (!status) {
      error(lineno, (*c.tokens)[c.i - 1].col,
            "expected possible|necessary|contingent|impossible", *word);
      return std::nullopt;
    }
    return status;
  }

  bool check_world(const std::string& name, int lineno, int col) {
    if (env_.worlds.count(name)) return true;
    error(lineno, col, "undeclared world", name);
    return false;
  }
  bool check_poss(const std::string& name, int lineno, int col) {
    if (env_.possibilities.count(name)) return true;
    error(lineno, col, "undeclared possibility", name);
    return false;
  }
  bool check_ctx(const std::string& name, int lineno, int col) {
    if (env_.contexts.count(name)) return true;
    error(lineno, col, "undeclared context", name);
    return false;
  }

  // --- statement parsers -----------------------------------------------------

  void parse_line(const std::string& line, int lineno) {
    // fork/merge arguments are file paths, not identifiers.
    auto words = split_raw(line);
    if (!words.empty() && !words[0].empty() && words[0][0] == '#') return;
    if (!words.empty() && (words[0] == "fork" || words[0] == "merge")) {
      if (words[0] == "fork") {
        if (words.size() != 3) {
          error(lineno, 1, "usage: fork <out-a> <out-b>");
          return;
        }
        stmts_.push_back(Statement{{lineno, 1}, ForkStmt{words[1], words[2]}});
      } else {
        if (words.size() != 2) {
          error(lineno, 1, "usage: merge <other-store>");
          return;
        }
        stmts_.push_back(Statement{{lineno, 1}, MergeStmt{words[1]}});
      }
      return;
    }

    auto tokens = lex(line, lineno);
    if (!tokens || tokens->empty()) return;
    Cursor c{&*tokens, 0};
    Token head = c.take();
    if (head.kind != Token::Kind::Ident) {
      error(lineno, head.col, "expected a statement keyword", head.text);
      return;
    }
    const std::string& kw = head.text;
    SrcLoc loc{lineno, head.col};

    if (kw == "pkb") {
      auto v = want_number(c, lineno, line, "a format version");
      if (!v || !want_end(c, lineno)) return;
      if (*v != 1) {
        error(lineno, loc.col, "unsupported format version",
              std::to_string(*v));
        return;
      }
      stmts_.push_back(Statement{loc, VersionStmt{static_cast<int>(*v)}});
    } else if (kw == "branch") {
      auto id = want_ident(c, lineno, line, "a branch id");
      if (!id) return;
      auto fk = want_ident(c, lineno, line, "'forks'");
      if (!fk) return;
      if (*fk != "forks") {
        error(lineno, loc.col, "expected 'forks'", *fk);
        return;
      }
      auto n = want_number(c, lineno, line, "a fork count");
      if (!n || !want_end(c, lineno)) return;
      stmts_.push_back(
          Statement{loc, BranchStmt{*id, static_cast<std::uint32_t>(*n)}});
    } else if (kw == "stage") {
      auto id = want_ident(c, lineno, line, "a stage id");
      if (!id) return;
      auto branch = want_ident(c, lineno, line, "a branch id");
      if (!branch) return;
      auto from = want_number(c, lineno, line, "a starting epoch");
      if (!from || !want_end(c, lineno)) return;
      clock_ = Epoch{*from};
      stmts_.push_back(Statement{loc, StageStmt{*id, *branch, Epoch{*from}}});
    } else if (kw == "world") {
      parse_world(c, lineno, line, loc);
    } else if (kw == "ind") {
      parse_ind(c, lineno, line, loc);
    } else if (kw == "poss") {
      parse_poss(c, lineno, line, loc);
    } else if (kw == "construct") {
      parse_construct(c, lineno, line, loc);
    } else if (kw == "context") {
      parse_context(c, lineno, line, loc);
    } else if (kw == "agent") {
      parse_agent(c, lineno, line, loc);
    } else if (kw == "assert") {
      parse_assert(c, lineno, line, loc);
    } else if (kw == "testify") {
      parse_testify(c, lineno, line, loc);
    } else if (kw == "endorse" || kw == "reject") {
      parse_endorse(c, lineno, line, loc, kw == "reject");
    } else if (kw == "epoch") {
      if (!want_end(c, lineno)) return;
      clock_ = clock_.next();
      stmts_.push_back(Statement{loc, EpochStmt{}});
    } else if (kw == "query") {
      parse_query(c, lineno, line, loc);
    } else {
      error(lineno, head.col, "unknown statement keyword", kw);
    }
  }

  std::optional<std::vector<std::string>> brace_list(Cursor& c, int lineno,
                                                     const std::string& line) {
    if (!want_punct(c, '{', lineno, line)) return std::nullopt;
    std::vector<std::string> items;
    while (!c.done() && !(c.peek().kind == Token::Kind::Punct &&
                          c.peek().text == "}")) {
      auto item = want_ident(c, lineno, line, "an identifier");
      if (!item) return std::nullopt;
      items.push_back(*item);
    }
    if (!want_punct(c, '}', lineno, line)) return std::nullopt;
    return items;
  }

  void parse_world(Cursor& c, int lineno, const std::string& line, SrcLoc loc) {
    auto name = want_ident(c, lineno, line, "a world name");
    if (!name || !declared_name_ok(*name, lineno, loc.col)) return;
    if (env_.worlds.count(*name)) {
      error(lineno, loc.col, "world already declared", *name);
      return;
    }
    auto atoms = brace_list(c, lineno, line);
    if (!atoms || !want_end(c, lineno)) return;
    if (atoms->empty()) {
      error(lineno, loc.col, "a world needs at least one atom", *name);
      return;
    }
    std::set<std::string> distinct;
    for (const auto& a : *atoms) {
      if (a.find('@') != std::string::npos) {
        error(lineno, loc.col, "'@' is not allowed in atom labels", a);
        return;
      }
      if (!distinct.insert(a).second) {
        error(lineno, loc.col, "duplicate atom label", a);
        return;
      }
    }
    env_.worlds.insert(*name);
    env_.individuals[*name].insert(*name + ".all");
    world_atoms_[*name] = distinct;
    stmts_.push_back(Statement{loc, WorldStmt{*name, *atoms}});
  }

  void parse_ind(Cursor& c, int lineno, const std::string& line, SrcLoc loc) {
    auto world = want_ident(c, lineno, line, "a world name");
    if (!world) return;
    if (!check_world(*world, lineno, (*c.tokens)[c.i - 1].col)) return;
    auto name = want_ident(c, lineno, line, "an individual name");
    if (!name || !declared_name_ok(*name, lineno, loc.col)) return;
    if (env_.individuals[*world].count(*name)) {
      error(lineno, loc.col, "individual already declared in world", *name);
      return;
    }
    auto atoms = brace_list(c, lineno, line);
    if (!atoms || !want_end(c, lineno)) return;
    if (atoms->empty()) {
      error(lineno, loc.col, "an individual needs a nonempty extent", *name);
      return;
    }
    auto wa = world_atoms_.find(*world);
    if (wa != world_atoms_.end()) {
      for (const auto& a : *atoms)
        if (!wa->second.count(a)) {
          error(lineno, loc.col,
                "atom is not in world '" + *world + "'", a);
          return;
        }
    }
    env_.individuals[*world].insert(*name);
    stmts_.push_back(Statement{loc, IndStmt{*world, *name, *atoms}});
  }

  void parse_poss(Cursor& c, int lineno, const std::string& line, SrcLoc loc) {
    auto name = want_ident(c, lineno, line, "a possibility name");
    if (!name || !declared_name_ok(*name, lineno, loc.col)) return;
    if (env_.possibilities.count(*name)) {
      error(lineno, loc.col, "possibility already declared", *name);
      return;
    }
    bool functional = false;
    if (!c.done() && c.peek().kind == Token::Kind::Ident &&
        c.peek().text == "functional") {
      functional = true;
      c.take();
    }
    auto refs = brace_list(c, lineno, line);
    if (!refs || !want_end(c, lineno)) return;
    if (refs->empty()) {
      error(lineno, loc.col, "a possibility needs members", *name);
      return;
    }
    std::vector<PossMember> members;
    std::set<std::string> worlds_used;
    for (const auto& ref : *refs) {
      auto at = ref.find('@');
      if (at == std::string::npos || ref.find('@', at + 1) != std::string::npos) {
        error(lineno, loc.col, "member references are <individual>@<world>",
              ref);
        return;
      }
      std::string ind = ref.substr(0, at);
      std::string world = ref.substr(at + 1);
      if (!check_world(world, lineno, loc.col)) return;
      if (!env_.individuals[world].count(ind)) {
        error(lineno, loc.col,
              "undeclared individual in world '" + world + "'", ind);
        return;
      }
      if (functional && !worlds_used.insert(world).second) {
        error(lineno, loc.col,
              "functional possibility has two members in world '" + world +
                  "'",
              ref);
        return;
      }
      members.push_back(PossMember{ind, world});
    }
    env_.possibilities.insert(*name);
    stmts_.push_back(Statement{loc, PossStmt{*name, functional, members}});
  }

  void parse_construct(Cursor& c, int lineno, const std::string& line,
                       SrcLoc loc) {
    auto name = want_ident(c, lineno, line, "a possibility name");
    if (!name || !declared_name_ok(*name, lineno, loc.col)) return;
    if (env_.possibilities.count(*name)) {
      error(lineno, loc.col, "possibility already declared", *name);
      return;
    }
    if (!want_punct(c, '=', lineno, line)) return;
    auto fn = want_ident(c, lineno, line, "'comoverlap'");
    if (!fn) return;
    if (*fn != "comoverlap") {
      error(lineno, loc.col, "only comoverlap(...) constructions exist", *fn);
      return;
    }
    if (!want_punct(c, '(', lineno, line)) return;
    std::vector<std::string> inputs;
    while (true) {
      auto input = want_ident(c, lineno, line, "a possibility name");
      if (!input) return;
      if (!check_poss(*input, lineno, (*c.tokens)[c.i - 1].col)) return;
      inputs.push_back(*input);
      if (!c.done() && c.peek().kind == Token::Kind::Punct &&
          c.peek().text == ",") {
        c.take();
        continue;
      }
      break;
    }
    if (!want_punct(c, ')', lineno, line) || !want_end(c, lineno)) return;
    env_.possibilities.insert(*name);
    stmts_.push_back(Statement{loc, ConstructStmt{*name, inputs}});
  }

  void parse_context(Cursor& c, int lineno, const std::string& line,
                     SrcLoc loc) {
    auto name = want_ident(c, lineno, line, "a context name");
    if (!name || !declared_name_ok(*name, lineno, loc.col)) return;
    if (env_.contexts.count(*name)) {
      error(lineno, loc.col, "context already declared", *name);
      return;
    }
    if (!want_punct(c, '=', lineno, line)) return;
    auto fn = want_ident(c, lineno, line, "'ctx'");
    if (!fn) return;
    if (*fn != "ctx") {
      error(lineno, loc.col, "contexts are declared with ctx(...)", *fn);
      return;
    }
    if (!want_punct(c, '(', lineno, line)) return;
    auto agent = want_ident(c, lineno, line, "an agent possibility");
    if (!agent || !check_poss(*agent, lineno, (*c.tokens)[c.i - 1].col)) return;
    if (!want_punct(c, ',', lineno, line)) return;
    auto now = want_ident(c, lineno, line, "a now possibility");
    if (!now || !check_poss(*now, lineno, (*c.tokens)[c.i - 1].col)) return;
    std::optional<std::string> parent;
    if (!c.done() && c.peek().kind == Token::Kind::Punct &&
        c.peek().text == ",") {
      c.take();
      auto kwp = want_ident(c, lineno, line, "'parent'");
      if (!kwp) return;
      if (*kwp != "parent") {
        error(lineno, loc.col, "expected parent=<context>", *kwp);
        return;
      }
      if (!want_punct(c, '=', lineno, line)) return;
      auto p = want_ident(c, lineno, line, "a context name");
      if (!p || !check_ctx(*p, lineno, (*c.tokens)[c.i - 1].col)) return;
      parent = *p;
    }
    if (!want_punct(c, ')', lineno, line) || !want_end(c, lineno)) return;
    env_.contexts.insert(*name);
    env_.possibilities.insert(*name + ".actuality");
    stmts_.push_back(Statement{loc, ContextStmt{*name, *agent, *now, parent}});
  }

  void parse_agent(Cursor& c, int lineno, const std::string& line, SrcLoc loc) {
    auto ctx = want_ident(c, lineno, line, "a context name");
    if (!ctx || !check_ctx(*ctx, lineno, (*c.tokens)[c.i - 1].col)) return;
    // Either `agent <ctx> <poss>` or `agent <ctx> <status> <poss>`.
    auto first = want_ident(c, lineno, line, "an agent possibility");
    if (!first) return;
    ModalStatus status = ModalStatus::Necessary;
    std::string poss;
    if (auto s = parse_modal_status(*first)) {
      status = *s;
      auto p = want_ident(c, lineno, line, "an agent possibility");
      if (!p) return;
      poss = *p;
    } else {
      poss = *first;
    }
    if (!check_poss(poss, lineno, (*c.tokens)[c.i - 1].col) ||
        !want_end(c, lineno))
      return;
    stmts_.push_back(Statement{loc, AgentStmt{*ctx, status, poss}});
  }

  void parse_assert(Cursor& c, int lineno, const std::string& line,
                    SrcLoc loc) {
    auto ctx = want_ident(c, lineno, line, "a context name");
    if (!ctx || !check_ctx(*ctx, lineno, (*c.tokens)[c.i - 1].col)) return;
    auto status = want_status(c, lineno, line);
    if (!status) return;
    auto poss = want_ident(c, lineno, line, "a possibility name");
    if (!poss || !check_poss(*poss, lineno, (*c.tokens)[c.i - 1].col) ||
        !want_end(c, lineno))
      return;
    stmts_.push_back(Statement{loc, AssertStmt{*ctx, *status, *poss}});
  }

  void parse_testify(Cursor& c, int lineno, const std::string& line,
                     SrcLoc loc) {
    auto ctx = want_ident(c, lineno, line, "a context name");
    if (!ctx || !check_ctx(*ctx, lineno, (*c.tokens)[c.i - 1].col)) return;
    auto speaker = want_ident(c, lineno, line, "a speaker possibility");
    if (!speaker || !check_poss(*speaker, lineno, (*c.tokens)[c.i - 1].col))
      return;
    if (!want_punct(c, '@', lineno, line)) return;
    auto now = want_ident(c, lineno, line, "a now possibility");
    if (!now || !check_poss(*now, lineno, (*c.tokens)[c.i - 1].col)) return;
    auto status = want_status(c, lineno, line);
    if (!status) return;
    auto poss = want_ident(c, lineno, line, "a possibility name");
    if (!poss || !check_poss(*poss, lineno, (*c.tokens)[c.i - 1].col) ||
        !want_end(c, lineno))
      return;
    std::string nested = *ctx + "." + *speaker + "@e" +
                         std::to_string(clock_.value);
    env_.contexts.insert(nested);
    env_.possibilities.insert(nested + ".actuality");
    ++testimony_seen_;
    stmts_.push_back(
        Statement{loc, TestifyStmt{*ctx, *speaker, *now, *status, *poss}});
  }

  void parse_endorse(Cursor& c, int lineno, const std::string& line,
                     SrcLoc loc, bool reject) {
    auto ctx = want_ident(c, lineno, line, "a context name");
    if (!ctx || !check_ctx(*ctx, lineno, (*c.tokens)[c.i - 1].col)) return;
    auto tid = want_ident(c, lineno, line, "a testimony id");
    if (!tid || !want_end(c, lineno)) return;
    std::uint64_t number = 0;
    bool well_formed = tid->size() > 1 && (*tid)[0] == 't';
    if (well_formed) {
      auto [ptr, ec] = std::from_chars(tid->data() + 1,
                                       tid->data() + tid->size(), number);
      well_formed = ec == std::errc{} && ptr == tid->data() + tid->size();
    }
    if (!well_formed) {
      error(lineno, loc.col, "testimony ids look like t1, t2, ...", *tid);
      return;
    }
    if (number == 0 || number > env_.testimony_count + testimony_seen_) {
      error(lineno, loc.col, "testimony not yet recorded", *tid);
      return;
    }
    stmts_.push_back(Statement{loc, EndorseStmt{*ctx, *tid, reject}});
  }

  void parse_query(Cursor& c, int lineno, const std::string& line,
                   SrcLoc loc) {
    auto ctx = want_ident(c, lineno, line, "a context name");
    if (!ctx || !check_ctx(*ctx, lineno, (*c.tokens)[c.i - 1].col)) return;
    auto kind = want_ident(c, lineno, line, "possibly|classify|ratio");
    if (!kind) return;
    QueryStmt q;
    q.context = *ctx;
    if (*kind == "possibly")
      q.kind = QueryStmt::Kind::Possibly;
    else if (*kind == "classify")
      q.kind = QueryStmt::Kind::Classify;
    else if (*kind == "ratio")
      q.kind = QueryStmt::Kind::Ratio;
    else {
      error(lineno, loc.col, "expected possibly|classify|ratio", *kind);
      return;
    }
    auto poss = want_ident(c, lineno, line, "a possibility name");
    if (!poss || !check_poss(*poss, lineno, (*c.tokens)[c.i - 1].col)) return;
    q.possibility = *poss;
    if (q.kind == QueryStmt::Kind::Ratio) {
      auto poss2 = want_ident(c, lineno, line, "a possibility name");
      if (!poss2 || !check_poss(*poss2, lineno, (*c.tokens)[c.i - 1].col))
        return;
      q.possibility2 = *poss2;
    }
    if (!want_end(c, lineno)) return;
    stmts_.push_back(Statement{loc, std::move(q)});
  }

  SymbolEnv env_;
  std::map<std::string, std::set<std::string>> world_atoms_;  // in-script
  std::vector<Diagnostic> diags_;
  std::vector<Statement> stmts_;
  Epoch clock_;
  std::size_t testimony_seen_ = 0;
};

}  // namespace

ParseResult parse_script(std::string_view text, const SymbolEnv& env) {
  return Parser(env).run(text);
}

}  // namespace pkb::dsl
