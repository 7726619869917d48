#ifndef DRS_AST_HPP_
#define DRS_AST_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace drs::lang {

// Every node records the half-open token-index range it was parsed from,
// in the coordinates of the tokenized input (so fenced programs report
// spans in response coordinates).
struct TokenRange {
  std::int32_t begin = 0;
  std::int32_t end = 0;
};

enum class BinOp : std::uint8_t { Add, Sub, Mul };
enum class CmpOp : std::uint8_t { Eq, Ne, Lt, Gt, Le, Ge };

struct Expr {
  enum class Kind : std::uint8_t { IntLit, StrLit, Var, Bin } kind = Kind::IntLit;
  std::int64_t int_value = 0;
  std::string text;  // variable name or unquoted string value
  BinOp op = BinOp::Add;
  std::unique_ptr<Expr> lhs, rhs;
  TokenRange range;
};

struct Cond {
  CmpOp op = CmpOp::Eq;
  Expr lhs, rhs;
  TokenRange range;
};

enum class CallApi : std::uint8_t { GoTo, Pick, Place, Say };

struct Stmt {
  enum class Kind : std::uint8_t { Call, Assign, Assert, If, Repeat } kind = Kind::Call;
  TokenRange range;

  // Call
  CallApi api = CallApi::GoTo;
  std::string word_arg;           // room (go_to) or object (pick/place)
  std::unique_ptr<Expr> say_arg;  // say only

  // Assign
  std::string var;
  std::unique_ptr<Expr> value;

  // Assert / If
  std::unique_ptr<Cond> cond;
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;

  // Repeat
  std::int64_t repeat_count = 0;
  std::vector<Stmt> body;
};

struct Ast {
  std::vector<Stmt> statements;
  TokenRange range;
};

}  // namespace drs::lang

#endif  // DRS_AST_HPP_
