#include "synmpst/parser.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>

#include <json.hpp>

namespace synmpst {

std::string to_string(const Diagnostic & d)
{
  return to_string(d.span) + ": error: " + d.message;
}

const GlobalDecl * ProtocolFile::find_global(std::string_view name) const
{
  for (const auto & g : globals)
    if (g.name == name) return &g;
  return nullptr;
}

const ProcessDecl * ProtocolFile::find_process(std::string_view name) const
{
  for (const auto & p : processes)
    if (p.name == name) return &p;
  return nullptr;
}

const SessionDecl * ProtocolFile::find_session(std::string_view name) const
{
  for (const auto & s : sessions)
    if (s.name == name) return &s;
  return nullptr;
}

Session ProtocolFile::build_session(const SessionDecl & decl) const
{
  Session out;
  for (const auto & [role, proc_name] : decl.members)
    out.emplace(role, find_process(proc_name)->process);
  return out;
}

std::string to_string(const ProtocolFile & file)
{
  std::string out;
  for (const auto & g : file.globals)
    out += "global " + g.name + " = " + to_string(g.type) + "\n";
  for (const auto & p : file.processes)
    out += "process " + p.name + " at " + p.role.name + " = " + to_string(p.process)
           + "\n";
  for (const auto & s : file.sessions) {
    out += "session " + s.name + " of " + s.global + " = { ";
    for (std::size_t i = 0; i < s.members.size(); ++i)
      out += (i ? ", " : "") + s.members[i].first.name + ": " + s.members[i].second;
    out += " }\n";
  }
  return out;
}

namespace {

enum class Tok
{
  Ident,
  Nat,
  Int,
  Str,
  Arrow,
  Bars,
  EqEq,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Dot,
  Colon,
  Semi,
  Equals,
  Plus,
  Star,
  Eof
};

struct Token
{
  Tok kind;
  std::string text;  // identifier name or decoded string literal
  std::uint64_t nat = 0;
  std::int64_t integer = 0;
  int line = 1, col = 1, end_line = 1, end_col = 1;
};

struct ParseError
{
  SourceSpan span;
  std::string message;
};

const std::set<std::string, std::less<>> keywords = {
    "global", "process", "session", "at",   "of",   "mu",   "end",
    "par",    "send",    "recv",    "let",  "in",   "if",   "then",
    "else",   "rec",     "Unit",    "Bool", "Nat",  "Int",  "Str",
    "true",   "false",   "unit"};

class Lexer
{
 public:
  Lexer(std::string_view text, const std::string & path) : text_(text), path_(path) {}

  std::vector<Token> run()
  {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= text_.size()) {
        t.kind = Tok::Eof;
        t.end_line = line_;
        t.end_col = col_;
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos_ < text_.size()
               && (std::isalnum(static_cast<unsigned char>(text_[pos_]))
                   || text_[pos_] == '_'))
          t.text += advance();
        t.kind = Tok::Ident;
      }
      else if (std::isdigit(static_cast<unsigned char>(c))
               || (c == '-' && pos_ + 1 < text_.size()
                   && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
        number(t);
      }
      else if (c == '"') {
        string(t);
      }
      else {
        punct(t);
      }
      t.end_line = line_;
      t.end_col = col_ > 1 ? col_ - 1 : 1;
      out.push_back(std::move(t));
    }
  }

 private:
  char advance()
  {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    }
    else {
      ++col_;
    }
    return c;
  }

  [[noreturn]] void fail(int line, int col, std::string message)
  {
    throw ParseError{SourceSpan{path_, line, col, line, col}, std::move(message)};
  }

  void skip_space()
  {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      }
      else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      }
      else {
        return;
      }
    }
  }

  void number(Token & t)
  {
    bool negative = false;
    if (text_[pos_] == '-') {
      negative = true;
      advance();
    }
    std::string digits;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      digits += advance();
    bool suffix = pos_ < text_.size() && text_[pos_] == 'i'
                  && (pos_ + 1 >= text_.size()
                      || !(std::isalnum(static_cast<unsigned char>(text_[pos_ + 1]))
                           || text_[pos_ + 1] == '_'));
    if (suffix) advance();
    if (pos_ < text_.size()
        && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      fail(line_, col_, "unexpected character after number");
    std::uint64_t magnitude = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), magnitude);
    if (ec != std::errc() || p != digits.data() + digits.size())
      fail(t.line, t.col, "integer literal out of range");
    if (negative || suffix) {
      constexpr auto max = static_cast<std::uint64_t>(INT64_MAX);
      if (magnitude > max + (negative ? 1 : 0))
        fail(t.line, t.col, "integer literal out of range");
      t.kind = Tok::Int;
      t.integer = negative ? static_cast<std::int64_t>(0 - magnitude)
                           : static_cast<std::int64_t>(magnitude);
    }
    else {
      t.kind = Tok::Nat;
      t.nat = magnitude;
    }
  }

  void string(Token & t)
  {
    advance();  // opening quote
    for (;;) {
      if (pos_ >= text_.size() || text_[pos_] == '\n')
        fail(t.line, t.col, "unterminated string literal");
      char c = advance();
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= text_.size()) fail(t.line, t.col, "unterminated string literal");
        char e = advance();
        switch (e) {
          case 'n': t.text += '\n'; break;
          case 't': t.text += '\t'; break;
          case '"': t.text += '"'; break;
          case '\\': t.text += '\\'; break;
          default: fail(line_, col_ - 1, std::string("unknown escape \\") + e);
        }
      }
      else {
        t.text += c;
      }
    }
    t.kind = Tok::Str;
  }

  void punct(Token & t)
  {
    char c = text_[pos_];
    char d = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
    auto two = [&](Tok k) {
      advance();
      advance();
      t.kind = k;
    };
    auto one = [&](Tok k) {
      advance();
      t.kind = k;
    };
    if (c == '-' && d == '>') return two(Tok::Arrow);
    if (c == '|' && d == '|') return two(Tok::Bars);
    if (c == '=' && d == '=') return two(Tok::EqEq);
    switch (c) {
      case '{': return one(Tok::LBrace);
      case '}': return one(Tok::RBrace);
      case '(': return one(Tok::LParen);
      case ')': return one(Tok::RParen);
      case '[': return one(Tok::LBracket);
      case ']': return one(Tok::RBracket);
      case ',': return one(Tok::Comma);
      case '.': return one(Tok::Dot);
      case ':': return one(Tok::Colon);
      case ';': return one(Tok::Semi);
      case '=': return one(Tok::Equals);
      case '+': return one(Tok::Plus);
      case '*': return one(Tok::Star);
      default: break;
    }
    fail(line_, col_, std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  const std::string & path_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::string describe(const Token & t)
{
  switch (t.kind) {
    case Tok::Ident: return "'" + t.text + "'";
    case Tok::Nat: return "number " + std::to_string(t.nat);
    case Tok::Int: return "number " + std::to_string(t.integer) + "i";
    case Tok::Str: return "string literal";
    case Tok::Arrow: return "'->'";
    case Tok::Bars: return "'||'";
    case Tok::EqEq: return "'=='";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Colon: return "':'";
    case Tok::Semi: return "';'";
    case Tok::Equals: return "'='";
    case Tok::Plus: return "'+'";
    case Tok::Star: return "'*'";
    case Tok::Eof: return "end of file";
  }
  return "token";
}

enum class IdentClass
{
  Lower,  // roles, data variables, declaration names
  Upper   // labels, recursion variables
};

class Parser
{
 public:
  Parser(std::vector<Token> tokens, const std::string & path)
      : toks_(std::move(tokens)), path_(path)
  {
  }

  ProtocolFile file(std::vector<Diagnostic> & diags)
  {
    ProtocolFile out;
    std::set<std::string> global_names, process_names, session_names;
    while (peek().kind != Tok::Eof) {
      if (peek().kind == Tok::Semi) {
        next();
        continue;
      }
      const Token & kw = peek();
      if (is_kw("global")) {
        next();
        Token name = decl_name();
        expect(Tok::Equals, "'='");
        GlobalType g = global();
        if (!global_names.insert(name.text).second)
          diags.push_back({span_of(name), "duplicate global declaration " + name.text});
        out.globals.push_back({name.text, g, span_from(kw)});
      }
      else if (is_kw("process")) {
        next();
        Token name = decl_name();
        expect_kw("at");
        Role role{ident(IdentClass::Lower, "role").text};
        expect(Tok::Equals, "'='");
        Process p = process();
        if (!process_names.insert(name.text).second)
          diags.push_back({span_of(name), "duplicate process declaration " + name.text});
        out.processes.push_back({name.text, role, p, span_from(kw)});
      }
      else if (is_kw("session")) {
        next();
        Token name = decl_name();
        expect_kw("of");
        Token global_name = decl_name();
        expect(Tok::Equals, "'='");
        expect(Tok::LBrace, "'{'");
        SessionDecl decl{name.text, global_name.text, {}, {}};
        do {
          Role role{ident(IdentClass::Lower, "role").text};
          expect(Tok::Colon, "':'");
          Token proc = decl_name();
          decl.members.emplace_back(role, proc.text);
          member_spans_.push_back(span_of(proc));
        } while (accept(Tok::Comma));
        expect(Tok::RBrace, "'}'");
        decl.span = span_from(kw);
        if (!session_names.insert(name.text).second)
          diags.push_back({span_of(name), "duplicate session declaration " + name.text});
        session_global_spans_.push_back(span_of(global_name));
        out.sessions.push_back(std::move(decl));
      }
      else {
        fail(peek(), "expected 'global', 'process' or 'session', found " + describe(peek()));
      }
    }
    return out;
  }

  const std::vector<SourceSpan> & member_spans() const { return member_spans_; }
  const std::vector<SourceSpan> & session_global_spans() const
  {
    return session_global_spans_;
  }

 private:
  const Token & peek() const { return toks_[pos_]; }
  const Token & next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  const Token & last() const { return toks_[pos_ > 0 ? pos_ - 1 : 0]; }

  SourceSpan span_of(const Token & t) const
  {
    return {path_, t.line, t.col, t.end_line, t.end_col};
  }

  SourceSpan span_from(const Token & first) const
  {
    const Token & end = last();
    return {path_, first.line, first.col, end.end_line, end.end_col};
  }

  [[noreturn]] void fail(const Token & at, std::string message) const
  {
    throw ParseError{span_of(at), std::move(message)};
  }

  bool is_kw(std::string_view kw) const
  {
    return peek().kind == Tok::Ident && peek().text == kw;
  }

  bool accept(Tok k)
  {
    if (peek().kind != k) return false;
    next();
    return true;
  }

  const Token & expect(Tok k, std::string_view what)
  {
    if (peek().kind != k)
      fail(peek(), "expected " + std::string(what) + ", found " + describe(peek()));
    return next();
  }

  void expect_kw(std::string_view kw)
  {
    if (!is_kw(kw))
      fail(peek(), "expected '" + std::string(kw) + "', found " + describe(peek()));
    next();
  }

  Token decl_name()
  {
    const Token & t = peek();
    if (t.kind != Tok::Ident || keywords.count(t.text) || t.text == "_")
      fail(t, "expected a name, found " + describe(t));
    return next();
  }

  Token ident(IdentClass cls, std::string_view what)
  {
    const Token & t = peek();
    if (t.kind != Tok::Ident || keywords.count(t.text))
      fail(t, "expected " + std::string(what) + ", found " + describe(t));
    bool upper = std::isupper(static_cast<unsigned char>(t.text[0]));
    bool lower = std::islower(static_cast<unsigned char>(t.text[0]));
    if ((cls == IdentClass::Upper && !upper) || (cls == IdentClass::Lower && !lower))
      fail(t, std::string(what) + " must start with "
                  + (cls == IdentClass::Upper ? "an uppercase" : "a lowercase")
                  + " letter: " + describe(t));
    return next();
  }

  PayloadType payload_type()
  {
    const Token & t = peek();
    if (t.kind == Tok::Ident)
      if (auto pt = payload_type_from_string(t.text)) {
        next();
        return *pt;
      }
    fail(t, "expected a payload type (Unit, Bool, Nat, Int, Str), found " + describe(t));
  }

  // ---- global types

  GlobalType global()
  {
    const Token & first = peek();
    if (is_kw("end")) {
      next();
      return g_end(span_from(first));
    }
    if (is_kw("mu")) {
      next();
      Token var = ident(IdentClass::Upper, "recursion variable");
      expect(Tok::Dot, "'.'");
      GlobalType body = global();
      return g_mu(var.text, body, span_from(first));
    }
    if (is_kw("par")) {
      next();
      expect(Tok::LBrace, "'{'");
      GlobalType l = global();
      expect(Tok::Bars, "'||'");
      GlobalType r = global();
      expect(Tok::RBrace, "'}'");
      return g_par(l, r, span_from(first));
    }
    if (first.kind == Tok::Ident && !keywords.count(first.text)
        && std::isupper(static_cast<unsigned char>(first.text[0]))) {
      next();
      return g_var(first.text, span_from(first));
    }
    Token sender = ident(IdentClass::Lower, "role, 'mu', 'par', 'end' or recursion variable");
    expect(Tok::Arrow, "'->'");
    std::vector<Role> receivers;
    if (accept(Tok::LBracket)) {
      do receivers.push_back(Role{ident(IdentClass::Lower, "role").text});
      while (accept(Tok::Comma));
      expect(Tok::RBracket, "']'");
    }
    else {
      receivers.push_back(Role{ident(IdentClass::Lower, "role").text});
    }
    struct RawBranch
    {
      Label label;
      PayloadType payload;
      GlobalType cont;
    };
    std::vector<RawBranch> branches;
    auto branch = [&] {
      Label label{ident(IdentClass::Upper, "label").text};
      expect(Tok::LParen, "'('");
      PayloadType t = payload_type();
      expect(Tok::RParen, "')'");
      expect(Tok::Dot, "'.'");
      branches.push_back({label, t, global()});
    };
    if (accept(Tok::Colon)) {
      branch();
    }
    else if (accept(Tok::LBrace)) {
      do branch();
      while (accept(Tok::Comma));
      expect(Tok::RBrace, "'}'");
    }
    else {
      fail(peek(), "expected ':' or '{', found " + describe(peek()));
    }
    SourceSpan span = span_from(first);
    Role from{sender.text};
    // p -> [q1, ..., qn] sends the same message to each receiver in turn
    std::vector<GBranch> out;
    for (const auto & b : branches) {
      GlobalType cont = b.cont;
      for (std::size_t i = receivers.size(); i-- > 1;)
        cont = g_msg(from, receivers[i], b.label, b.payload, cont, span);
      out.push_back({b.label, b.payload, cont});
    }
    return g_comm(from, receivers.front(), std::move(out), span);
  }

  // ---- processes

  Process process()
  {
    const Token & first = peek();
    if (is_kw("end")) {
      next();
      return p_end(span_from(first));
    }
    if (is_kw("send")) {
      next();
      Role to{ident(IdentClass::Lower, "role").text};
      Label label{ident(IdentClass::Upper, "label").text};
      expect(Tok::LParen, "'('");
      Expr e = expr();
      expect(Tok::RParen, "')'");
      SourceSpan head = span_from(first);
      expect(Tok::Dot, "'.'");
      Process cont = process();
      return p_send(to, label, e, cont, head);
    }
    if (is_kw("recv")) {
      next();
      Role from{ident(IdentClass::Lower, "role").text};
      SourceSpan head = span_from(first);
      expect(Tok::LBrace, "'{'");
      std::vector<PRecvBranch> branches;
      do {
        Label label{ident(IdentClass::Upper, "label").text};
        expect(Tok::LParen, "'('");
        std::string binder = binder_name();
        expect(Tok::Colon, "':'");
        PayloadType t = payload_type();
        expect(Tok::RParen, "')'");
        expect(Tok::Dot, "'.'");
        branches.push_back({label, binder, t, process()});
      } while (accept(Tok::Comma));
      expect(Tok::RBrace, "'}'");
      return p_recv(from, std::move(branches), head);
    }
    if (is_kw("let")) {
      next();
      std::string x = binder_name();
      expect(Tok::Equals, "'='");
      Expr e = expr();
      expect_kw("in");
      SourceSpan head = span_from(first);
      Process cont = process();
      return p_let(x, e, cont, head);
    }
    if (is_kw("if")) {
      next();
      Expr c = expr();
      SourceSpan head = span_from(first);
      expect_kw("then");
      Process t = process();
      expect_kw("else");
      Process f = process();
      return p_if(c, t, f, head);
    }
    if (is_kw("rec")) {
      next();
      Token var = ident(IdentClass::Upper, "recursion variable");
      SourceSpan head = span_from(first);
      expect(Tok::Dot, "'.'");
      Process body = process();
      return p_rec(var.text, body, head);
    }
    if (first.kind == Tok::Ident && !keywords.count(first.text)
        && std::isupper(static_cast<unsigned char>(first.text[0]))) {
      next();
      return p_var(first.text, span_from(first));
    }
    fail(first, "expected a process ('send', 'recv', 'let', 'if', 'rec', 'end' or a "
                "recursion variable), found " + describe(first));
  }

  std::string binder_name()
  {
    if (peek().kind == Tok::Ident && peek().text == "_") return next().text;
    return ident(IdentClass::Lower, "variable").text;
  }

  // ---- expressions

  Expr expr()
  {
    const Token & first = peek();
    Expr lhs = sum();
    if (accept(Tok::EqEq)) {
      Expr rhs = sum();
      return Expr::binary(BinaryOp::Eq, lhs, rhs, span_from(first));
    }
    return lhs;
  }

  Expr sum()
  {
    const Token & first = peek();
    Expr lhs = product();
    while (accept(Tok::Plus))
      lhs = Expr::binary(BinaryOp::Add, lhs, product(), span_from(first));
    return lhs;
  }

  Expr product()
  {
    const Token & first = peek();
    Expr lhs = atom();
    while (accept(Tok::Star))
      lhs = Expr::binary(BinaryOp::Mul, lhs, atom(), span_from(first));
    return lhs;
  }

  Expr atom()
  {
    const Token & t = peek();
    switch (t.kind) {
      case Tok::Nat: next(); return Expr::literal(Value::nat(t.nat), span_of(t));
      case Tok::Int: next(); return Expr::literal(Value::integer(t.integer), span_of(t));
      case Tok::Str: next(); return Expr::literal(Value::str(t.text), span_of(t));
      case Tok::LParen: {
        next();
        Expr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident:
        if (t.text == "unit") {
          next();
          return Expr::literal(Value::unit(), span_of(t));
        }
        if (t.text == "true" || t.text == "false") {
          next();
          return Expr::literal(Value::boolean(t.text == "true"), span_of(t));
        }
        return Expr::var(ident(IdentClass::Lower, "expression").text, span_of(t));
      default: break;
    }
    fail(t, "expected an expression, found " + describe(t));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const std::string & path_;
  std::vector<SourceSpan> member_spans_;
  std::vector<SourceSpan> session_global_spans_;
};

void check_references(const ProtocolFile & file,
                      const std::vector<SourceSpan> & member_spans,
                      const std::vector<SourceSpan> & global_spans,
                      const ParseOptions & opts,
                      std::vector<Diagnostic> & diags)
{
  std::size_t m = 0;
  for (std::size_t i = 0; i < file.sessions.size(); ++i) {
    const auto & s = file.sessions[i];
    if (opts.require_session_globals && !file.find_global(s.global))
      diags.push_back({global_spans[i], "unknown global " + s.global});
    std::set<Role> seen;
    for (const auto & [role, proc_name] : s.members) {
      const SourceSpan & span = member_spans[m++];
      if (!seen.insert(role).second)
        diags.push_back({span, "role " + role.name + " is implemented twice in session "
                                   + s.name});
      const auto * p = file.find_process(proc_name);
      if (!p)
        diags.push_back({span, "unknown process " + proc_name});
      else if (p->role != role)
        diags.push_back({span, "process " + proc_name + " is declared at role "
                                   + p->role.name + ", not " + role.name});
    }
  }
}

}  // namespace

ParseResult parse_file(std::string_view text, const std::string & path, const ParseOptions & opts)
{
  ParseResult result;
  try {
    Parser parser(Lexer(text, path).run(), path);
    ProtocolFile file = parser.file(result.diagnostics);
    check_references(file, parser.member_spans(), parser.session_global_spans(), opts,
                     result.diagnostics);
    for (const auto & g : file.globals)
      for (const auto & v : check_wellformed_global(g.type))
        result.diagnostics.push_back(
            {v.span.valid() ? v.span : g.span,
             "global " + g.name + ": " + std::string(to_string(v.kind)) + ": " + v.message});
    for (const auto & p : file.processes) {
      for (const auto & v : check_wellformed_process(p.process))
        result.diagnostics.push_back(
            {v.span.valid() ? v.span : p.span,
             "process " + p.name + ": " + std::string(to_string(v.kind)) + ": " + v.message});
    }
    result.file = std::move(file);
  }
  catch (const ParseError & e) {
    result.diagnostics.push_back({e.span, e.message});
  }
  return result;
}

// ---------------------------------------------------------------------------
// MLTS JSON

MltsParseResult parse_mlts(std::string_view text, const std::string & path)
{
  MltsParseResult result;
  auto diag = [&](std::string message, int line = 1, int col = 1) {
    result.diagnostics.push_back({SourceSpan{path, line, col, line, col}, std::move(message)});
  };

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  }
  catch (const nlohmann::json::parse_error & e) {
    // convert the byte offset into a line and column
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      }
      else {
        ++col;
      }
    }
    diag("invalid JSON: " + std::string(e.what()), line, col);
    return result;
  }

  if (!j.is_object()) {
    diag("MLTS must be a JSON object");
    return result;
  }
  for (const char * key : {"states", "initial", "transitions"})
    if (!j.contains(key)) diag(std::string("missing field \"") + key + "\"");
  if (!result.diagnostics.empty()) return result;
  if (!j["states"].is_array() || j["states"].empty()) {
    diag("\"states\" must be a non-empty array of strings");
    return result;
  }
  if (!j["initial"].is_string()) diag("\"initial\" must be a string");
  if (!j["transitions"].is_array()) diag("\"transitions\" must be an array");
  if (!result.diagnostics.empty()) return result;

  std::map<std::string, StateId> ids;
  Mlts m;
  for (const auto & s : j["states"]) {
    if (!s.is_string() || s.get<std::string>().empty()) {
      diag("state names must be non-empty strings");
      return result;
    }
    auto name = s.get<std::string>();
    if (ids.count(name)) {
      diag("duplicate state " + name);
      continue;
    }
    ids.emplace(name, StateId{static_cast<std::uint32_t>(m.state_names.size())});
    m.state_names.push_back(name);
  }
  auto initial = j["initial"].get<std::string>();
  if (!ids.count(initial)) diag("initial state " + initial + " is not declared");

  std::vector<Transition> transitions;
  std::size_t index = 0;
  for (const auto & t : j["transitions"]) {
    std::string where = "transition " + std::to_string(index++);
    if (!t.is_object()) {
      diag(where + " must be an object");
      continue;
    }
    bool complete = true;
    for (const char * key : {"from", "to", "sender", "receiver", "label", "payload"})
      if (!t.contains(key) || !t[key].is_string()
          || t[key].get<std::string>().empty()) {
        diag(where + ": field \"" + key + "\" must be a non-empty string");
        complete = false;
      }
    if (!complete) continue;
    auto from = t["from"].get<std::string>();
    auto to = t["to"].get<std::string>();
    auto payload = payload_type_from_string(t["payload"].get<std::string>());
    Role sender{t["sender"].get<std::string>()};
    Role receiver{t["receiver"].get<std::string>()};
    if (!ids.count(from)) diag(where + " starts at undeclared state " + from);
    if (!ids.count(to)) diag(where + " ends at undeclared state " + to);
    if (!payload) diag(where + ": unknown payload type " + t["payload"].get<std::string>());
    if (sender == receiver) diag(where + ": sender and receiver are both " + sender.name);
    if (!ids.count(from) || !ids.count(to) || !payload || sender == receiver) continue;
    transitions.push_back({ids.at(from),
                           GlobalAction{sender, receiver, Label{t["label"].get<std::string>()},
                                        *payload},
                           ids.at(to)});
  }
  if (!result.diagnostics.empty()) return result;
  m.graph = TransitionGraph(m.state_names.size(), ids.at(initial), std::move(transitions));
  result.mlts = std::move(m);
  return result;
}

}  // namespace synmpst
