#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "casa/diag.hpp"

namespace casa {

enum class Tok {
  Eof,
  Ident,
  IntLit,
  StrLit,
  // keywords
  KwActor, KwClass, KwExtends, KwGlobal, KwVal, KwVar, KwDef, KwIf, KwElse,
  KwWhile, KwReturn, KwTrue, KwFalse, KwNew, KwThis, KwSpawn, KwMkBox,
  KwConsume, KwOpen, KwPrint,
  KwInt, KwBool, KwStr, KwUnit, KwNothing, KwBox, KwActorRef, KwPerm,
  // punctuation
  LBrace, RBrace, LParen, RParen, LBracket, RBracket, Comma, Colon, Dot,
  Arrow,      // =>
  Assign,     // =
  EqEq, NotEq, Lt, Le, Gt, Ge,
  Plus, Minus, Star, Slash, Percent,
  Bang,       // !
  BangBang,   // !!
  AndAnd, OrOr,
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  long long intValue = 0;
  Span span;
};

inline const char* tokName(Tok t) {
  switch (t) {
    case Tok::Eof: return "end of file";
    case Tok::Ident: return "identifier";
    case Tok::IntLit: return "integer literal";
    case Tok::StrLit: return "string literal";
    case Tok::KwActor: return "'actor'";
    case Tok::KwClass: return "'class'";
    case Tok::KwExtends: return "'extends'";
    case Tok::KwGlobal: return "'global'";
    case Tok::KwVal: return "'val'";
    case Tok::KwVar: return "'var'";
    case Tok::KwDef: return "'def'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwReturn: return "'return'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwNew: return "'new'";
    case Tok::KwThis: return "'this'";
    case Tok::KwSpawn: return "'spawn'";
    case Tok::KwMkBox: return "'mkbox'";
    case Tok::KwConsume: return "'consume'";
    case Tok::KwOpen: return "'open'";
    case Tok::KwPrint: return "'print'";
    case Tok::KwInt: return "'Int'";
    case Tok::KwBool: return "'Bool'";
    case Tok::KwStr: return "'Str'";
    case Tok::KwUnit: return "'Unit'";
    case Tok::KwNothing: return "'Nothing'";
    case Tok::KwBox: return "'Box'";
    case Tok::KwActorRef: return "'ActorRef'";
    case Tok::KwPerm: return "'Perm'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Arrow: return "'=>'";
    case Tok::Assign: return "'='";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::Bang: return "'!'";
    case Tok::BangBang: return "'!!'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
  }
  return "?";
}

class Lexer {
 public:
  Lexer(std::string_view source, std::string file)
      : src_(source), file_(std::move(file)) {}

  // Tokenizes the whole input. Lexical errors become SYN001 diagnostics and a
  // best-effort token stream is still returned (always EOF-terminated).
  std::vector<Token> tokenize(std::vector<Diagnostic>& diags) {
    std::vector<Token> out;
    while (true) {
      skipTrivia();
      if (atEnd()) break;
      int line = line_, col = col_;
      char c = peek();
      if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string word;
        while (!atEnd() && (isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
          word.push_back(advance());
        Token t;
        t.kind = keywordOf(word);
        t.text = word;
        t.span = spanFrom(line, col);
        out.push_back(std::move(t));
      } else if (isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (!atEnd() && isdigit(static_cast<unsigned char>(peek()))) num.push_back(advance());
        Token t;
        t.kind = Tok::IntLit;
        t.text = num;
        t.intValue = std::stoll(num);
        t.span = spanFrom(line, col);
        out.push_back(std::move(t));
      } else if (c == '"') {
        advance();
        std::string value;
        bool closed = false;
        while (!atEnd()) {
          char d = advance();
          if (d == '"') { closed = true; break; }
          if (d == '\\' && !atEnd()) {
            char e = advance();
            switch (e) {
              case 'n': value.push_back('\n'); break;
              case 't': value.push_back('\t'); break;
              case '"': value.push_back('"'); break;
              case '\\': value.push_back('\\'); break;
              default: value.push_back(e); break;
            }
          } else {
            value.push_back(d);
          }
        }
        if (!closed) {
          diags.push_back({"SYN001", Severity::Error, spanFrom(line, col),
                           "unterminated string literal"});
        }
        Token t;
        t.kind = Tok::StrLit;
        t.text = value;
        t.span = spanFrom(line, col);
        out.push_back(std::move(t));
      } else {
        Tok k = symbol(diags);
        if (k == Tok::Eof) continue;  // error already reported
        Token t;
        t.kind = k;
        t.span = spanFrom(line, col);
        out.push_back(std::move(t));
      }
    }
    Token eof;
    eof.kind = Tok::Eof;
    eof.span = spanFrom(line_, col_ > 1 ? col_ - 1 : 1);
    out.push_back(std::move(eof));
    return out;
  }

 private:
  bool atEnd() const { return pos_ >= src_.size(); }
  char peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') { ++line_; col_ = 1; } else { ++col_; }
    return c;
  }

  void skipTrivia() {
    while (!atEnd()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (!atEnd() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  Span spanFrom(int line, int col) const {
    Span s;
    s.file = file_;
    s.startLine = line;
    s.startCol = col;
    s.endLine = line_;
    s.endCol = col_ > 1 ? col_ - 1 : 1;
    if (s.endLine > s.startLine) {
      // multi-line token (string); keep as-is
    } else if (s.endCol < s.startCol) {
      s.endCol = s.startCol;
    }
    return s;
  }

  Tok symbol(std::vector<Diagnostic>& diags) {
    int line = line_, col = col_;
    char c = advance();
    switch (c) {
      case '{': return Tok::LBrace;
      case '}': return Tok::RBrace;
      case '(': return Tok::LParen;
      case ')': return Tok::RParen;
      case '[': return Tok::LBracket;
      case ']': return Tok::RBracket;
      case ',': return Tok::Comma;
      case ':': return Tok::Colon;
      case '.': return Tok::Dot;
      case '+': return Tok::Plus;
      case '-': return Tok::Minus;
      case '*': return Tok::Star;
      case '/': return Tok::Slash;
      case '%': return Tok::Percent;
      case '=':
        if (peek() == '=') { advance(); return Tok::EqEq; }
        if (peek() == '>') { advance(); return Tok::Arrow; }
        return Tok::Assign;
      case '!':
        if (peek() == '=') { advance(); return Tok::NotEq; }
        if (peek() == '!') { advance(); return Tok::BangBang; }
        return Tok::Bang;
      case '<':
        if (peek() == '=') { advance(); return Tok::Le; }
        return Tok::Lt;
      case '>':
        if (peek() == '=') { advance(); return Tok::Ge; }
        return Tok::Gt;
      case '&':
        if (peek() == '&') { advance(); return Tok::AndAnd; }
        break;
      case '|':
        if (peek() == '|') { advance(); return Tok::OrOr; }
        break;
      default:
        break;
    }
    diags.push_back({"SYN001", Severity::Error, spanFrom(line, col),
                     std::string("unexpected character '") + c + "'"});
    return Tok::Eof;
  }

  static Tok keywordOf(const std::string& w) {
    static const std::unordered_map<std::string, Tok> kw = {
        {"actor", Tok::KwActor},     {"class", Tok::KwClass},
        {"extends", Tok::KwExtends}, {"global", Tok::KwGlobal},
        {"val", Tok::KwVal},         {"var", Tok::KwVar},
        {"def", Tok::KwDef},         {"if", Tok::KwIf},
        {"else", Tok::KwElse},       {"while", Tok::KwWhile},
        {"return", Tok::KwReturn},   {"true", Tok::KwTrue},
        {"false", Tok::KwFalse},     {"new", Tok::KwNew},
        {"this", Tok::KwThis},       {"spawn", Tok::KwSpawn},
        {"mkbox", Tok::KwMkBox},     {"consume", Tok::KwConsume},
        {"open", Tok::KwOpen},       {"print", Tok::KwPrint},
        {"Int", Tok::KwInt},         {"Bool", Tok::KwBool},
        {"Str", Tok::KwStr},         {"Unit", Tok::KwUnit},
        {"Nothing", Tok::KwNothing}, {"Box", Tok::KwBox},
        {"ActorRef", Tok::KwActorRef}, {"Perm", Tok::KwPerm},
    };
    auto it = kw.find(w);
    return it == kw.end() ? Tok::Ident : it->second;
  }

  std::string_view src_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace casa
