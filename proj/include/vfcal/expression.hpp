#ifndef VFCAL_EXPRESSION_HPP_
#define VFCAL_EXPRESSION_HPP_

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vfcal {

/// Parse failure. `offset` is the 1-based column of the offending character
/// (input length + 1 when the input ends early).
class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownIdentifier };

  ParseError(Kind kind, std::size_t offset, const std::string& what);

  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Expression tree over the variables x, y and r2 = x^2 + y^2.
///
/// Grammar (usual precedence, `^` binds tighter than unary minus and is
/// right-associative):
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'pi' | 'x' | 'y' | 'r2' | func '(' expr ')' | '(' expr ')'
///   func    := exp | log | sqrt | sin | cos
class Expression {
 public:
  struct Node;

  static Expression parse(std::string_view text);

  double evaluate(double x, double y) const;
  const std::string& text() const { return text_; }

  /// True when the tree does not reference x, y or r2.
  bool is_constant() const;

 private:
  Expression(std::string text, std::shared_ptr<const Node> root);

  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace vfcal

#endif  // VFCAL_EXPRESSION_HPP_
