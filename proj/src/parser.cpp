#include "drs/parser.hpp"

#include <cstdlib>

namespace drs::lang {

namespace {

struct ParseFail {
  std::int32_t index;
};

// LL(1) recursive descent with no backtracking, so the failure index is the
// first token at which the prefix stops being viable — the same index the
// incremental grammar blames.
class Parser {
 public:
  Parser(const Vocab& vocab, const TokenizedProgram& prog, std::int32_t begin,
         std::int32_t end)
      : v_(vocab), p_(prog), pos_(begin), end_(end) {}

  Ast parse_program() {
    Ast ast;
    ast.range.begin = pos_;
    if (pos_ >= end_) throw ParseFail{pos_};
    while (pos_ < end_) ast.statements.push_back(parse_stmt());
    ast.range.end = pos_;
    return ast;
  }

 private:
  TokenClass cls_at(std::int32_t i) const {
    return v_.token_class(p_.ids[static_cast<std::size_t>(i)]);
  }
  TokenClass peek() const {
    if (pos_ >= end_) throw ParseFail{end_};
    return cls_at(pos_);
  }
  const std::string& surface() const {
    return v_.surface(p_.ids[static_cast<std::size_t>(pos_)]);
  }
  void expect(TokenClass c) {
    if (pos_ >= end_ || cls_at(pos_) != c) throw ParseFail{pos_ >= end_ ? end_ : pos_};
    ++pos_;
  }
  std::string take_word(TokenClass c) {
    if (pos_ >= end_ || cls_at(pos_) != c) throw ParseFail{pos_ >= end_ ? end_ : pos_};
    std::string s = surface();
    ++pos_;
    return s;
  }

  Stmt parse_stmt() {
    Stmt st;
    st.range.begin = pos_;
    switch (peek()) {
      case TokenClass::KwGoTo: {
        ++pos_;
        st.kind = Stmt::Kind::Call;
        st.api = CallApi::GoTo;
        expect(TokenClass::LParen);
        st.word_arg = take_word(TokenClass::Room);
        expect(TokenClass::RParen);
        expect(TokenClass::Semi);
        break;
      }
      case TokenClass::KwPick:
      case TokenClass::KwPlace: {
        st.kind = Stmt::Kind::Call;
        st.api = peek() == TokenClass::KwPick ? CallApi::Pick : CallApi::Place;
        ++pos_;
        expect(TokenClass::LParen);
        st.word_arg = take_word(TokenClass::Object);
        expect(TokenClass::RParen);
        expect(TokenClass::Semi);
        break;
      }
      case TokenClass::KwSay: {
        ++pos_;
        st.kind = Stmt::Kind::Call;
        st.api = CallApi::Say;
        expect(TokenClass::LParen);
        st.say_arg = std::make_unique<Expr>(parse_arg());
        expect(TokenClass::RParen);
        expect(TokenClass::Semi);
        break;
      }
      case TokenClass::Var: {
        st.kind = Stmt::Kind::Assign;
        st.var = take_word(TokenClass::Var);
        expect(TokenClass::Assign);
        st.value = std::make_unique<Expr>(parse_expr());
        expect(TokenClass::Semi);
        break;
      }
      case TokenClass::KwAssert: {
        ++pos_;
        st.kind = Stmt::Kind::Assert;
        st.cond = std::make_unique<Cond>(parse_cond());
        expect(TokenClass::Semi);
        break;
      }
      case TokenClass::KwIf: {
        ++pos_;
        st.kind = Stmt::Kind::If;
        st.cond = std::make_unique<Cond>(parse_cond());
        st.then_body = parse_block();
        if (pos_ < end_ && cls_at(pos_) == TokenClass::KwElse) {
          ++pos_;
          st.else_body = parse_block();
        }
        break;
      }
      case TokenClass::KwRepeat: {
        ++pos_;
        st.kind = Stmt::Kind::Repeat;
        if (peek() != TokenClass::IntPos) throw ParseFail{pos_};
        st.repeat_count = std::atoll(surface().c_str());
        ++pos_;
        if (st.repeat_count < 1 || st.repeat_count > 32) throw ParseFail{pos_ - 1};
        st.body = parse_block();
        break;
      }
      default:
        throw ParseFail{pos_};
    }
    st.range.end = pos_;
    return st;
  }

  std::vector<Stmt> parse_block() {
    expect(TokenClass::LBrace);
    std::vector<Stmt> stmts;
    stmts.push_back(parse_stmt());
    while (peek() != TokenClass::RBrace) stmts.push_back(parse_stmt());
    expect(TokenClass::RBrace);
    return stmts;
  }

  Expr parse_arg() {
    if (peek() == TokenClass::Str) {
      Expr e;
      e.kind = Expr::Kind::StrLit;
      e.range.begin = pos_;
      const std::string& s = surface();
      e.text = s.substr(1, s.size() - 2);  // strip quotes
      ++pos_;
      e.range.end = pos_;
      return e;
    }
    return parse_expr();
  }

  Expr parse_expr() {
    Expr e = parse_term();
    while (pos_ < end_ &&
           (cls_at(pos_) == TokenClass::Plus || cls_at(pos_) == TokenClass::Minus)) {
      Expr bin;
      bin.kind = Expr::Kind::Bin;
      bin.op = cls_at(pos_) == TokenClass::Plus ? BinOp::Add : BinOp::Sub;
      bin.range.begin = e.range.begin;
      ++pos_;
      bin.lhs = std::make_unique<Expr>(std::move(e));
      bin.rhs = std::make_unique<Expr>(parse_term());
      bin.range.end = pos_;
      e = std::move(bin);
    }
    return e;
  }

  Expr parse_term() {
    Expr e = parse_factor();
    while (pos_ < end_ && cls_at(pos_) == TokenClass::Star) {
      Expr bin;
      bin.kind = Expr::Kind::Bin;
      bin.op = BinOp::Mul;
      bin.range.begin = e.range.begin;
      ++pos_;
      bin.lhs = std::make_unique<Expr>(std::move(e));
      bin.rhs = std::make_unique<Expr>(parse_factor());
      bin.range.end = pos_;
      e = std::move(bin);
    }
    return e;
  }

  Expr parse_factor() {
    Expr e;
    e.range.begin = pos_;
    switch (peek()) {
      case TokenClass::IntZero:
      case TokenClass::IntPos:
        e.kind = Expr::Kind::IntLit;
        e.int_value = std::atoll(surface().c_str());
        ++pos_;
        break;
      case TokenClass::Var:
        e.kind = Expr::Kind::Var;
        e.text = surface();
        ++pos_;
        break;
      default:
        throw ParseFail{pos_};
    }
    e.range.end = pos_;
    return e;
  }

  Cond parse_cond() {
    Cond c;
    c.range.begin = pos_;
    c.lhs = parse_expr();
    switch (peek()) {
      case TokenClass::CmpEq: c.op = CmpOp::Eq; break;
      case TokenClass::CmpNe: c.op = CmpOp::Ne; break;
      case TokenClass::CmpLt: c.op = CmpOp::Lt; break;
      case TokenClass::CmpGt: c.op = CmpOp::Gt; break;
      case TokenClass::CmpLe: c.op = CmpOp::Le; break;
      case TokenClass::CmpGe: c.op = CmpOp::Ge; break;
      default: throw ParseFail{pos_};
    }
    ++pos_;
    c.rhs = parse_expr();
    c.range.end = pos_;
    return c;
  }

  const Vocab& v_;
  const TokenizedProgram& p_;
  std::int32_t pos_, end_;
};

}  // namespace

ParseResult parse(const Vocab& vocab, const TokenizedProgram& prog) {
  std::int32_t begin = 0, end = static_cast<std::int32_t>(prog.size());
  if (auto region = prog.code_region()) {
    begin = region->first;
    end = region->second;
  }
  ParseResult res;
  try {
    Parser parser(vocab, prog, begin, end);
    res.ast = parser.parse_program();
  } catch (const ParseFail& f) {
    res.error_index = f.index;
  }
  return res;
}

}  // namespace drs::lang
