#pragma once

// Surface syntax for definite programs and queries.
//
//   program  ::= clause*
//   clause   ::= atom '.' | atom ':-' atoms '.'
//   query    ::= ['?-'] atoms ['.']
//   atoms    ::= atom (',' atom)*
//   atom     ::= ident | ident '(' term (',' term)* ')'
//   term     ::= VAR | ident | ident '(' term (',' term)* ')'
//
// Identifiers starting lowercase are predicates/constants/functors;
// identifiers starting uppercase or '_' are variables. '%' starts a line
// comment. In strict mode user predicates may not start with "pre_"; in
// permissive mode `pre_p` parses as the magic predicate p, which lets
// rendered magic programs round-trip through the engine.

#include <cctype>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "magiclp/ast.hpp"
#include "magiclp/errors.hpp"

namespace magiclp {

enum class ParseMode { strict, permissive };

namespace detail {

struct Token {
  enum class Kind { ident, variable, lparen, rparen, comma, dot, turnstile, query_mark, eof };
  Kind kind;
  std::string text;
  SourceSpan span;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws_and_comments();
    SourceSpan span{line_, col_, 1};
    if (pos_ >= text_.size()) {
      tok_ = {Token::Kind::eof, "", span};
      return;
    }
    char c = text_[pos_];
    if (c == '(') return single(Token::Kind::lparen, "(");
    if (c == ')') return single(Token::Kind::rparen, ")");
    if (c == ',') return single(Token::Kind::comma, ",");
    if (c == '.') return single(Token::Kind::dot, ".");
    if (c == ':') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
        span.length = 2;
        bump();
        bump();
        tok_ = {Token::Kind::turnstile, ":-", span};
        return;
      }
      throw SyntaxError("expected ':-'", span);
    }
    if (c == '?') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
        span.length = 2;
        bump();
        bump();
        tok_ = {Token::Kind::query_mark, "?-", span};
        return;
      }
      throw SyntaxError("expected '?-'", span);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        word.push_back(text_[pos_]);
        bump();
      }
      span.length = word.size();
      bool is_var = word[0] == '_' || std::isupper(static_cast<unsigned char>(word[0]));
      tok_ = {is_var ? Token::Kind::variable : Token::Kind::ident, std::move(word), span};
      return;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", span);
  }

  void single(Token::Kind k, const char* text) {
    SourceSpan span{line_, col_, 1};
    bump();
    tok_ = {k, text, span};
  }

  void skip_ws_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  Token tok_;
};

class Parser {
 public:
  Parser(const std::string& text, ParseMode mode) : lx_(text), mode_(mode) {}

  Program parse_program() {
    std::vector<Clause> clauses;
    while (lx_.peek().kind != Token::Kind::eof) clauses.push_back(parse_clause());
    return Program::build(std::move(clauses));
  }

  Query parse_query() {
    if (lx_.peek().kind == Token::Kind::query_mark) lx_.next();
    Query q;
    if (lx_.peek().kind == Token::Kind::dot || lx_.peek().kind == Token::Kind::eof)
      throw EmptyQueryError("empty query", lx_.peek().span);
    q.atoms.push_back(parse_atom());
    while (lx_.peek().kind == Token::Kind::comma) {
      lx_.next();
      q.atoms.push_back(parse_atom());
    }
    if (lx_.peek().kind == Token::Kind::dot) lx_.next();
    expect(Token::Kind::eof, "end of query");
    return q;
  }

 private:
  Clause parse_clause() {
    Clause c;
    c.head = parse_atom();
    Token t = lx_.next();
    if (t.kind == Token::Kind::dot) return c;
    if (t.kind != Token::Kind::turnstile)
      throw SyntaxError("expected '.' or ':-' after clause head", t.span);
    c.body.push_back(parse_atom());
    while (lx_.peek().kind == Token::Kind::comma) {
      lx_.next();
      c.body.push_back(parse_atom());
    }
    Token dot = lx_.next();
    if (dot.kind != Token::Kind::dot)
      throw SyntaxError("expected '.' at end of clause", dot.span);
    return c;
  }

  Atom parse_atom() {
    Token t = lx_.next();
    if (t.kind == Token::Kind::variable)
      throw SyntaxError("a variable cannot be used as a predicate", t.span);
    if (t.kind != Token::Kind::ident)
      throw SyntaxError("expected a predicate name", t.span);
    Pred pred{t.text, Ns::original};
    if (t.text.rfind("pre_", 0) == 0) {
      if (mode_ == ParseMode::strict)
        throw ReservedPrefixError(
            "predicate names starting with 'pre_' are reserved", t.span);
      std::string base = t.text.substr(4);
      if (base.empty())
        throw SyntaxError("invalid magic predicate name 'pre_'", t.span);
      pred = Pred{std::move(base), Ns::magic};
    }
    Atom a{std::move(pred), {}};
    if (lx_.peek().kind == Token::Kind::lparen) {
      lx_.next();
      a.args.push_back(parse_term());
      while (lx_.peek().kind == Token::Kind::comma) {
        lx_.next();
        a.args.push_back(parse_term());
      }
      Token rp = lx_.next();
      if (rp.kind != Token::Kind::rparen)
        throw SyntaxError("expected ')' closing argument list", rp.span);
    }
    note_arity(a, t.span);
    return a;
  }

  Term parse_term() {
    Token t = lx_.next();
    if (t.kind == Token::Kind::variable) return Term::var(t.text);
    if (t.kind != Token::Kind::ident)
      throw SyntaxError("expected a term", t.span);
    if (lx_.peek().kind != Token::Kind::lparen) return Term::cst(t.text);
    lx_.next();
    std::vector<Term> args;
    args.push_back(parse_term());
    while (lx_.peek().kind == Token::Kind::comma) {
      lx_.next();
      args.push_back(parse_term());
    }
    Token rp = lx_.next();
    if (rp.kind != Token::Kind::rparen)
      throw SyntaxError("expected ')' closing argument list", rp.span);
    return Term::fun(t.text, std::move(args));
  }

  void note_arity(const Atom& a, SourceSpan span) {
    auto [it, fresh] = arities_.emplace(a.pred, a.arity());
    if (!fresh && it->second != a.arity())
      throw ArityMismatchError("predicate " + a.pred.name + " used at arity " +
                                   std::to_string(a.arity()) + " but previously at " +
                                   std::to_string(it->second),
                               span);
  }

  void expect(Token::Kind k, const char* what) {
    Token t = lx_.next();
    if (t.kind != k)
      throw SyntaxError(std::string("expected ") + what, t.span);
  }

  Lexer lx_;
  ParseMode mode_;
  std::map<Pred, std::size_t> arities_;
};

}  // namespace detail

inline Program parse_program(const std::string& text,
                             ParseMode mode = ParseMode::strict) {
  return detail::Parser(text, mode).parse_program();
}

inline Query parse_query(const std::string& text,
                         ParseMode mode = ParseMode::strict) {
  return detail::Parser(text, mode).parse_query();
}

}  // namespace magiclp
