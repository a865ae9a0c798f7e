#pragma once

/**
 * MiniExpr: the patch language — prefix-notation integer arithmetic.
 *
 * Grammar (fixed arity, no parentheses needed):
 *   expr := OP expr expr | INPUT | LITERAL
 *   OP       surfaces "+", "-", "*", "/", "min", "max"   (binary)
 *   INPUT    surfaces "x0".."x3"
 *   LITERAL  any surface parsing as a decimal integer
 *
 * A complete program is one expr followed by a terminal token. Evaluation is
 * total and deterministic: division by zero and any signed-overflow step
 * yield "no value" (the enclosing test case fails) instead of a crash.
 * Division truncates toward zero, as in C.
 */

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "flames/vocab.hpp"

namespace flames::expr {

using model::TokenId;
using model::Vocab;

enum class TokenKind { Operator, Input, Literal, Start, Terminal, Unknown };

/** Classifies a token by vocabulary flags first, then by surface. */
TokenKind classify(const Vocab& vocab, TokenId id);

enum class Op { Add, Sub, Mul, Div, Min, Max };

/** Expression tree. Comparable so generator round-trips are checkable. */
struct Program {
  enum class Kind { Literal, Input, Binary };
  Kind kind;
  std::int64_t literal = 0;  // Kind::Literal
  int input_index = 0;       // Kind::Input
  Op op = Op::Add;           // Kind::Binary
  std::unique_ptr<Program> lhs, rhs;

  bool operator==(const Program& other) const;
};

/**
 * Parses a complete token sequence into a Program. A leading sos token is
 * skipped; the sequence must then be exactly one well-formed expression
 * followed by one terminal token. Returns nullopt on any violation
 * (arity, trailing tokens, unknown token, missing terminal).
 */
std::optional<Program> decode_program(std::span<const TokenId> tokens,
                                      const Vocab& vocab);

/**
 * Evaluates with 64-bit checked arithmetic. nullopt = runtime failure
 * (division by zero, overflow, input index beyond `inputs`).
 */
std::optional<std::int64_t> eval_program(const Program& program,
                                         std::span<const std::int64_t> inputs);

/** Convenience: decode_program + eval_program in one step. */
std::optional<std::int64_t> run_tokens(std::span<const TokenId> tokens,
                                       const Vocab& vocab,
                                       std::span<const std::int64_t> inputs);

}  // namespace flames::expr
