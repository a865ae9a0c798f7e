#include "flames/expr.hpp"

#include <charconv>
#include <limits>

namespace flames::expr {

namespace {

std::optional<Op> op_of(const std::string& surface) {
  if (surface == "+") return Op::Add;
  if (surface == "-") return Op::Sub;
  if (surface == "*") return Op::Mul;
  if (surface == "/") return Op::Div;
  if (surface == "min") return Op::Min;
  if (surface == "max") return Op::Max;
  return std::nullopt;
}

std::optional<int> input_index_of(const std::string& surface) {
  if (surface.size() < 2 || surface[0] != 'x') return std::nullopt;
  int idx = 0;
  auto [ptr, ec] = std::from_chars(surface.data() + 1,
                                   surface.data() + surface.size(), idx);
  if (ec != std::errc() || ptr != surface.data() + surface.size())
    return std::nullopt;
  return idx;
}

std::optional<std::int64_t> literal_of(const std::string& surface) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(surface.data(),
                                   surface.data() + surface.size(), value);
  if (ec != std::errc() || ptr != surface.data() + surface.size())
    return std::nullopt;
  return value;
}

}  // namespace

TokenKind classify(const Vocab& vocab, TokenId id) {
  if (!vocab.contains(id)) return TokenKind::Unknown;
  if (id == vocab.sos()) return TokenKind::Start;
  if (vocab.is_terminal(id)) return TokenKind::Terminal;
  const std::string& s = vocab.surface(id);
  if (op_of(s)) return TokenKind::Operator;
  if (input_index_of(s)) return TokenKind::Input;
  if (literal_of(s)) return TokenKind::Literal;
  return TokenKind::Unknown;
}

bool Program::operator==(const Program& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::Literal:
      return literal == other.literal;
    case Kind::Input:
      return input_index == other.input_index;
    case Kind::Binary:
      return op == other.op && lhs && other.lhs && *lhs == *other.lhs &&
             rhs && other.rhs && *rhs == *other.rhs;
  }
  return false;
}

namespace {

/** Recursive-descent over the fixed-arity prefix grammar. */
std::unique_ptr<Program> parse_expr(std::span<const TokenId> tokens,
                                    std::size_t& pos, const Vocab& vocab) {
  if (pos >= tokens.size()) return nullptr;
  const TokenId id = tokens[pos];
  switch (classify(vocab, id)) {
    case TokenKind::Operator: {
      const std::string& s = vocab.surface(id);
      ++pos;
      auto lhs = parse_expr(tokens, pos, vocab);
      if (!lhs) return nullptr;
      auto rhs = parse_expr(tokens, pos, vocab);
      if (!rhs) return nullptr;
      auto node = std::make_unique<Program>();
      node->kind = Program::Kind::Binary;
      node->op = *op_of(s);
      node->lhs = std::move(lhs);
      node->rhs = std::move(rhs);
      return node;
    }
    case TokenKind::Input: {
      ++pos;
      auto node = std::make_unique<Program>();
      node->kind = Program::Kind::Input;
      node->input_index = *input_index_of(vocab.surface(id));
      return node;
    }
    case TokenKind::Literal: {
      ++pos;
      auto node = std::make_unique<Program>();
      node->kind = Program::Kind::Literal;
      node->literal = *literal_of(vocab.surface(id));
      return node;
    }
    default:
      return nullptr;
  }
}

}  // namespace

std::optional<Program> decode_program(std::span<const TokenId> tokens,
                                      const Vocab& vocab) {
  std::size_t pos = 0;
  if (!tokens.empty() && tokens.front() == vocab.sos()) pos = 1;
  auto root = parse_expr(tokens, pos, vocab);
  if (!root) return std::nullopt;
  // Exactly one terminal token after the expression, nothing else.
  if (pos + 1 != tokens.size()) return std::nullopt;
  if (!vocab.contains(tokens[pos]) || !vocab.is_terminal(tokens[pos]))
    return std::nullopt;
  return std::move(*root);
}

std::optional<std::int64_t> eval_program(const Program& program,
                                         std::span<const std::int64_t> inputs) {
  switch (program.kind) {
    case Program::Kind::Literal:
      return program.literal;
    case Program::Kind::Input: {
      if (program.input_index < 0 ||
          static_cast<std::size_t>(program.input_index) >= inputs.size())
        return std::nullopt;
      return inputs[static_cast<std::size_t>(program.input_index)];
    }
    case Program::Kind::Binary: {
      const auto l = eval_program(*program.lhs, inputs);
      if (!l) return std::nullopt;
      const auto r = eval_program(*program.rhs, inputs);
      if (!r) return std::nullopt;
      std::int64_t out = 0;
      switch (program.op) {
        case Op::Add:
          if (__builtin_add_overflow(*l, *r, &out)) return std::nullopt;
          return out;
        case Op::Sub:
          if (__builtin_sub_overflow(*l, *r, &out)) return std::nullopt;
          return out;
        case Op::Mul:
          if (__builtin_mul_overflow(*l, *r, &out)) return std::nullopt;
          return out;
        case Op::Div:
          if (*r == 0) return std::nullopt;
          if (*l == std::numeric_limits<std::int64_t>::min() && *r == -1)
            return std::nullopt;  // the one overflowing division
          return *l / *r;  // truncates toward zero
        case Op::Min:
          return std::min(*l, *r);
        case Op::Max:
          return std::max(*l, *r);
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<std::int64_t> run_tokens(std::span<const TokenId> tokens,
                                       const Vocab& vocab,
                                       std::span<const std::int64_t> inputs) {
  const auto program = decode_program(tokens, vocab);
  if (!program) return std::nullopt;
  return eval_program(*program, inputs);
}

}  // namespace flames::expr
