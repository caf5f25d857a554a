#include "bprepair/parser.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

namespace bp {

namespace {

enum class Tok {
  End, Ident, KwDecl, KwBegin, KwEnd, KwSkip, KwIf, KwThen, KwElse, KwFi,
  KwWhile, KwDo, KwOd, KwGoto, KwOr, KwAssume, KwAssert, KwCall, KwReturn,
  KwTrue, KwFalse, KwChoose,
  LParen, RParen, Comma, Semi, Colon, Assign,  // ":="
  Not, And, Pipe, Implies, Eq, Neq, Star
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

const std::map<std::string, Tok> kKeywords = {
    {"decl", Tok::KwDecl},     {"begin", Tok::KwBegin},   {"end", Tok::KwEnd},
    {"skip", Tok::KwSkip},     {"if", Tok::KwIf},         {"then", Tok::KwThen},
    {"else", Tok::KwElse},     {"fi", Tok::KwFi},         {"while", Tok::KwWhile},
    {"do", Tok::KwDo},         {"od", Tok::KwOd},         {"goto", Tok::KwGoto},
    {"or", Tok::KwOr},         {"assume", Tok::KwAssume}, {"assert", Tok::KwAssert},
    {"call", Tok::KwCall},     {"return", Tok::KwReturn}, {"true", Tok::KwTrue},
    {"false", Tok::KwFalse},   {"choose", Tok::KwChoose},
};

struct ParseError {
  int line, col;
  std::string message;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_ws();
    int line = line_, col = col_;
    if (pos_ >= text_.size()) return {Tok::End, "", line, col};
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        id += advance();
      auto it = kKeywords.find(id);
      return {it == kKeywords.end() ? Tok::Ident : it->second, id, line, col};
    }
    advance();
    switch (c) {
      case '(': return {Tok::LParen, "(", line, col};
      case ')': return {Tok::RParen, ")", line, col};
      case ',': return {Tok::Comma, ",", line, col};
      case ';': return {Tok::Semi, ";", line, col};
      case '*': return {Tok::Star, "*", line, col};
      case '&': return {Tok::And, "&", line, col};
      case '|': return {Tok::Pipe, "|", line, col};
      case ':':
        if (peek() == '=') {
          advance();
          return {Tok::Assign, ":=", line, col};
        }
        return {Tok::Colon, ":", line, col};
      case '=':
        if (peek() == '>') {
          advance();
          return {Tok::Implies, "=>", line, col};
        }
        return {Tok::Eq, "=", line, col};
      case '!':
        if (peek() == '=') {
          advance();
          return {Tok::Neq, "!=", line, col};
        }
        return {Tok::Not, "!", line, col};
      default:
        throw ParseError{line, col, std::string("unexpected character '") + c + "'"};
    }
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip_ws() {
    for (;;) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
        advance();
      if (pos_ + 1 < text_.size() && text_[pos_] == '/' && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
        continue;
      }
      break;
    }
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) { bump(); }

  Program parse_program_text() {
    Program p;
    while (cur_.kind == Tok::KwDecl) parse_decl(p.globals);
    if (cur_.kind == Tok::End)
      throw ParseError{cur_.line, cur_.col, "expected at least one procedure"};
    while (cur_.kind != Tok::End) p.procedures.push_back(parse_proc());
    return p;
  }

  ExprPtr parse_expr_only() {
    ExprPtr e = parse_expr();
    expect(Tok::End, "end of expression");
    return e;
  }

 private:
  void bump() { cur_ = lex_.next(); }
  bool accept(Tok k) {
    if (cur_.kind != k) return false;
    bump();
    return true;
  }
  Token expect(Tok k, const char* what) {
    if (cur_.kind != k)
      throw ParseError{cur_.line, cur_.col,
                       std::string("expected ") + what + ", got '" + cur_.text + "'"};
    Token t = cur_;
    bump();
    return t;
  }

  void parse_decl(std::vector<VarDecl>& out) {
    expect(Tok::KwDecl, "'decl'");
    do {
      Token t = expect(Tok::Ident, "variable name");
      out.push_back({t.text, t.line, t.col});
    } while (accept(Tok::Comma));
    expect(Tok::Semi, "';'");
  }

  Procedure parse_proc() {
    Procedure proc;
    Token name = expect(Tok::Ident, "procedure name");
    proc.name = name.text;
    proc.line = name.line;
    proc.col = name.col;
    expect(Tok::LParen, "'('");
    if (cur_.kind == Tok::Ident) {
      do {
        proc.formals.push_back(expect(Tok::Ident, "formal parameter").text);
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    expect(Tok::KwBegin, "'begin'");
    while (cur_.kind == Tok::KwDecl) parse_decl(proc.decls);
    proc.body = parse_stmtseq();
    expect(Tok::KwEnd, "'end'");
    return proc;
  }

  bool at_stmt_start() const {
    switch (cur_.kind) {
      case Tok::Ident:
      case Tok::KwSkip:
      case Tok::KwIf:
      case Tok::KwWhile:
      case Tok::KwGoto:
      case Tok::KwAssume:
      case Tok::KwAssert:
      case Tok::KwCall:
      case Tok::KwReturn: return true;
      default: return false;
    }
  }

  std::vector<LabeledStatement> parse_stmtseq() {
    std::vector<LabeledStatement> seq;
    if (!at_stmt_start())
      throw ParseError{cur_.line, cur_.col, "expected a statement"};
    while (at_stmt_start()) seq.push_back(parse_labstmt());
    return seq;
  }

  LabeledStatement parse_labstmt() {
    LabeledStatement ls;
    ls.line = cur_.line;
    ls.col = cur_.col;
    if (cur_.kind == Tok::Ident) {
      // Lookahead: `ident :` is a label; `ident :=`/`ident ,` starts an assignment.
      Token id = cur_;
      bump();
      if (accept(Tok::Colon)) {
        ls.label = id.text;
        ls.line = cur_.line;
        ls.col = cur_.col;
        ls.stmt = parse_stmt(nullptr);
      } else {
        ls.stmt = parse_stmt(&id);
      }
    } else {
      ls.stmt = parse_stmt(nullptr);
    }
    expect(Tok::Semi, "';'");
    return ls;
  }

  // first_ident, when set, is an already-consumed identifier beginning an
  // assignment statement.
  Statement parse_stmt(const Token* first_ident) {
    Statement s;
    if (first_ident) {
      s.kind = StmtKind::Assign;
      s.targets.push_back(first_ident->text);
      while (accept(Tok::Comma)) s.targets.push_back(expect(Tok::Ident, "variable name").text);
      expect(Tok::Assign, "':='");
      do {
        s.rhs.push_back(parse_expr());
      } while (accept(Tok::Comma));
      return s;
    }
    switch (cur_.kind) {
      case Tok::Ident: {
        Token id = cur_;
        bump();
        return parse_stmt(&id);
      }
      case Tok::KwSkip:
        bump();
        s.kind = StmtKind::Skip;
        return s;
      case Tok::KwReturn:
        bump();
        s.kind = StmtKind::Return;
        return s;
      case Tok::KwAssume:
      case Tok::KwAssert: {
        s.kind = cur_.kind == Tok::KwAssume ? StmtKind::Assume : StmtKind::Assert;
        bump();
        expect(Tok::LParen, "'('");
        s.guard = parse_expr();
        expect(Tok::RParen, "')'");
        return s;
      }
      case Tok::KwCall: {
        bump();
        s.kind = StmtKind::Call;
        s.callee = expect(Tok::Ident, "procedure name").text;
        expect(Tok::LParen, "'('");
        if (cur_.kind != Tok::RParen) {
          do {
            s.rhs.push_back(parse_expr());
          } while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        return s;
      }
      case Tok::KwGoto: {
        bump();
        s.kind = StmtKind::Goto;
        s.labels.push_back(expect(Tok::Ident, "label").text);
        while (accept(Tok::KwOr)) s.labels.push_back(expect(Tok::Ident, "label").text);
        return s;
      }
      case Tok::KwWhile: {
        bump();
        s.kind = StmtKind::While;
        expect(Tok::LParen, "'('");
        s.guard = parse_expr();
        expect(Tok::RParen, "')'");
        expect(Tok::KwDo, "'do'");
        s.then_body = parse_stmtseq();
        expect(Tok::KwOd, "'od'");
        return s;
      }
      case Tok::KwIf: {
        bump();
        expect(Tok::LParen, "'('");
        s.guard = parse_expr();
        expect(Tok::RParen, "')'");
        if (cur_.kind == Tok::KwGoto) {
          bump();
          s.kind = StmtKind::IfJump;
          s.labels.push_back(expect(Tok::Ident, "label").text);
          if (accept(Tok::KwElse)) {
            expect(Tok::KwGoto, "'goto'");
            s.labels.push_back(expect(Tok::Ident, "label").text);
          }
          return s;
        }
        expect(Tok::KwThen, "'then' or 'goto'");
        s.kind = StmtKind::If;
        s.then_body = parse_stmtseq();
        if (accept(Tok::KwElse)) s.else_body = parse_stmtseq();
        expect(Tok::KwFi, "'fi'");
        return s;
      }
      default:
        throw ParseError{cur_.line, cur_.col, "expected a statement, got '" + cur_.text + "'"};
    }
  }

  // Precedence climbing: ! > & > | > => (right) > = / != (non-associative).
  ExprPtr parse_expr() { return parse_eq(); }

  ExprPtr parse_eq() {
    ExprPtr a = parse_implies();
    if (cur_.kind == Tok::Eq || cur_.kind == Tok::Neq) {
      bool eq = cur_.kind == Tok::Eq;
      bump();
      ExprPtr b = parse_implies();
      if (cur_.kind == Tok::Eq || cur_.kind == Tok::Neq)
        throw ParseError{cur_.line, cur_.col, "'='/'!=' is non-associative; add parentheses"};
      return eq ? mk_eq(a, b) : mk_neq(a, b);
    }
    return a;
  }

  ExprPtr parse_implies() {
    ExprPtr a = parse_or();
    if (accept(Tok::Implies)) return mk_implies(a, parse_implies());
    return a;
  }

  ExprPtr parse_or() {
    ExprPtr a = parse_and();
    while (accept(Tok::Pipe)) a = mk_or(a, parse_and());
    return a;
  }

  ExprPtr parse_and() {
    ExprPtr a = parse_not();
    while (accept(Tok::And)) a = mk_and(a, parse_not());
    return a;
  }

  ExprPtr parse_not() {
    if (accept(Tok::Not)) return mk_not(parse_not());
    return parse_primary();
  }

  ExprPtr parse_primary() {
    switch (cur_.kind) {
      case Tok::KwTrue: bump(); return mk_true();
      case Tok::KwFalse: bump(); return mk_false();
      case Tok::Star: bump(); return mk_star();
      case Tok::Ident: {
        std::string name = cur_.text;
        bump();
        return mk_var(name);
      }
      case Tok::KwChoose: {
        bump();
        expect(Tok::LParen, "'('");
        ExprPtr a = parse_expr();
        expect(Tok::Comma, "','");
        ExprPtr b = parse_expr();
        expect(Tok::RParen, "')'");
        return mk_choose(a, b);
      }
      case Tok::LParen: {
        bump();
        ExprPtr e = parse_expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      default:
        throw ParseError{cur_.line, cur_.col, "expected an expression, got '" + cur_.text + "'"};
    }
  }

  Lexer lex_;
  Token cur_{Tok::End, "", 0, 0};
};

void assign_auto_labels(Program& p) {
  std::set<std::string> used;
  for (const auto& proc : p.procedures)
    for_each_statement(proc.body, [&](const LabeledStatement& ls) {
      if (!ls.label.empty()) used.insert(ls.label);
    });
  int counter = 0;
  std::function<void(std::vector<LabeledStatement>&)> walk =
      [&](std::vector<LabeledStatement>& body) {
        for (auto& ls : body) {
          if (ls.label.empty()) {
            std::string name;
            do {
              name = "l_auto_" + std::to_string(++counter);
            } while (used.count(name));
            used.insert(name);
            ls.label = name;
            ls.auto_label = true;
          }
          walk(ls.stmt.then_body);
          walk(ls.stmt.else_body);
        }
      };
  for (auto& proc : p.procedures) walk(proc.body);
}

struct ExprCtx {
  const std::string& file;
  int line, col;
  DiagnosticSink& sink;
  const std::set<std::string>& scope;
};

void check_vars_bound(const ExprPtr& e, const ExprCtx& ctx) {
  if (!e) return;
  if (e->kind == ExprKind::Var && !ctx.scope.count(e->name)) {
    ctx.sink.error(ctx.file, ctx.line, ctx.col, DiagCode::UnboundVariable,
                   "variable '" + e->name + "' is not in scope");
    return;
  }
  check_vars_bound(e->a, ctx);
  check_vars_bound(e->b, ctx);
}

// No Star/Choose anywhere below this expression.
void check_deterministic(const ExprPtr& e, const ExprCtx& ctx, DiagCode code, const char* what) {
  if (contains_star_or_choose(e))
    ctx.sink.error(ctx.file, ctx.line, ctx.col, code,
                   std::string(what) + " must be a deterministic expression");
  check_vars_bound(e, ctx);
}

// Assignment right-hand side: `*`, choose(det, det), or deterministic.
void check_rhs(const ExprPtr& e, const ExprCtx& ctx) {
  if (e->kind == ExprKind::Star) return;
  if (e->kind == ExprKind::Choose) {
    if (contains_star_or_choose(e->a) || contains_star_or_choose(e->b))
      ctx.sink.error(ctx.file, ctx.line, ctx.col, DiagCode::NondeterministicChooseArg,
                     "choose arguments must be deterministic");
    check_vars_bound(e, ctx);
    return;
  }
  if (contains_star_or_choose(e))
    ctx.sink.error(ctx.file, ctx.line, ctx.col, DiagCode::NondeterministicOperand,
                   "'*'/choose may only appear as an entire assignment right-hand side");
  check_vars_bound(e, ctx);
}

}  // namespace

void validate_program(const Program& p, const std::string& filename, DiagnosticSink& sink) {
  // Procedure names and main.
  std::set<std::string> proc_names;
  for (const auto& proc : p.procedures) {
    if (!proc_names.insert(proc.name).second)
      sink.error(filename, proc.line, proc.col, DiagCode::DuplicateProcedure,
                 "duplicate procedure '" + proc.name + "'");
  }
  if (!proc_names.count("main"))
    sink.error(filename, 1, 1, DiagCode::MissingMain, "program has no 'main' procedure");

  // Global uniqueness of variable and formal names.
  std::set<std::string> var_names;
  auto declare = [&](const std::string& name, int line, int col) {
    if (!var_names.insert(name).second)
      sink.error(filename, line, col, DiagCode::DuplicateVariable,
                 "variable name '" + name + "' is not globally unique");
  };
  for (const auto& g : p.globals) declare(g.name, g.line, g.col);
  for (const auto& proc : p.procedures) {
    std::set<std::string> formals;
    for (const auto& f : proc.formals) {
      if (!formals.insert(f).second)
        sink.error(filename, proc.line, proc.col, DiagCode::DuplicateFormal,
                   "formal parameter '" + f + "' repeated in '" + proc.name + "'");
      else
        declare(f, proc.line, proc.col);
    }
    for (const auto& d : proc.decls) declare(d.name, d.line, d.col);
  }

  for (size_t pi = 0; pi < p.procedures.size(); ++pi) {
    const auto& proc = p.procedures[pi];
    auto scope_list = p.inscope(pi);
    std::set<std::string> scope(scope_list.begin(), scope_list.end());

    std::set<std::string> labels;
    for_each_statement(proc.body, [&](const LabeledStatement& ls) {
      if (!ls.label.empty() && !labels.insert(ls.label).second)
        sink.error(filename, ls.line, ls.col, DiagCode::DuplicateLabel,
                   "duplicate label '" + ls.label + "' in '" + proc.name + "'");
    });

    for_each_statement(proc.body, [&](const LabeledStatement& ls) {
      const Statement& s = ls.stmt;
      ExprCtx ctx{filename, ls.line, ls.col, sink, scope};
      switch (s.kind) {
        case StmtKind::Assume:
          check_deterministic(s.guard, ctx, DiagCode::NondeterministicAssumeGuard,
                              "assume guard");
          break;
        case StmtKind::Assert:
          check_deterministic(s.guard, ctx, DiagCode::NondeterministicAssertGuard,
                              "assert guard");
          break;
        case StmtKind::If:
        case StmtKind::IfJump:
        case StmtKind::While:
          // Guard is either exactly `*` or deterministic.
          if (s.guard->kind != ExprKind::Star)
            check_deterministic(s.guard, ctx, DiagCode::NondeterministicAssumeGuard,
                                "branch guard");
          break;
        case StmtKind::Assign: {
          if (s.targets.size() != s.rhs.size())
            sink.error(filename, ls.line, ls.col, DiagCode::SyntaxError,
                       "assignment has " + std::to_string(s.targets.size()) +
                           " targets but " + std::to_string(s.rhs.size()) + " expressions");
          std::set<std::string> seen;
          for (const auto& t : s.targets) {
            if (!scope.count(t))
              sink.error(filename, ls.line, ls.col, DiagCode::UnboundVariable,
                         "variable '" + t + "' is not in scope");
            if (!seen.insert(t).second)
              sink.error(filename, ls.line, ls.col, DiagCode::DuplicateVariable,
                         "variable '" + t + "' assigned twice in one statement");
          }
          for (const auto& e : s.rhs) check_rhs(e, ctx);
          break;
        }
        case StmtKind::Call: {
          const Procedure* callee = p.find_procedure(s.callee);
          if (!callee) {
            sink.error(filename, ls.line, ls.col, DiagCode::UnknownProcedure,
                       "call to unknown procedure '" + s.callee + "'");
          } else {
            if (callee->name == "main")
              sink.error(filename, ls.line, ls.col, DiagCode::MainCalled,
                         "'main' must not be called");
            if (callee->formals.size() != s.rhs.size())
              sink.error(filename, ls.line, ls.col, DiagCode::ArityMismatch,
                         "call to '" + s.callee + "' passes " + std::to_string(s.rhs.size()) +
                             " arguments, expected " + std::to_string(callee->formals.size()));
          }
          for (const auto& e : s.rhs)
            check_deterministic(e, ctx, DiagCode::NondeterministicCallArg, "call argument");
          break;
        }
        default: break;
      }
      if (s.kind == StmtKind::Goto || s.kind == StmtKind::IfJump) {
        for (const auto& t : s.labels)
          if (!labels.count(t))
            sink.error(filename, ls.line, ls.col, DiagCode::UnknownLabel,
                       "jump to unknown label '" + t + "'");
      }
      if (s.kind == StmtKind::While) {
        if (s.then_body.empty() || s.then_body.back().stmt.kind != StmtKind::Skip)
          sink.error(filename, ls.line, ls.col, DiagCode::WhileBodyMustEndInSkip,
                     "the last statement of a while body must be 'skip'");
      }
    });
  }
}

ParseResult parse_program(const std::string& text, const std::string& filename) {
  ParseResult res;
  Program p;
  try {
    Parser parser(text);
    p = parser.parse_program_text();
  } catch (const ParseError& e) {
    res.diags.error(filename, e.line, e.col, DiagCode::SyntaxError, e.message);
    return res;
  }
  assign_auto_labels(p);
  // Normalize: main first.
  for (size_t i = 0; i < p.procedures.size(); ++i)
    if (p.procedures[i].name == "main" && i != 0) {
      std::rotate(p.procedures.begin(), p.procedures.begin() + i, p.procedures.begin() + i + 1);
      break;
    }
  validate_program(p, filename, res.diags);
  if (!res.diags.has_errors()) res.program = std::move(p);
  return res;
}

ExprPtr parse_expr_text(const std::string& text, std::string* err) {
  try {
    Parser parser(text);
    return parser.parse_expr_only();
  } catch (const ParseError& e) {
    if (err)
      *err = "line " + std::to_string(e.line) + ":" + std::to_string(e.col) + ": " + e.message;
    return nullptr;
  }
}

}  // namespace bp
