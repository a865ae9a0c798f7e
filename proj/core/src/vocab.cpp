#include "flames/vocab.hpp"

#include <stdexcept>

#include "flames/errors.hpp"

namespace flames::model {

Vocab::Vocab(std::vector<std::string> surfaces, std::vector<TokenId> terminals,
             TokenId sos)
    : surfaces_(std::move(surfaces)), terminals_(std::move(terminals)), sos_(sos) {
  const auto v = static_cast<TokenId>(surfaces_.size());
  if (v == 0) throw std::invalid_argument("vocab: empty surface list");
  if (terminals_.empty()) throw std::invalid_argument("vocab: no terminal tokens");
  if (sos_ < 0 || sos_ >= v) throw UnknownTokenError("vocab: sos id out of range");

  terminal_mask_.assign(v, false);
  for (TokenId t : terminals_) {
    if (t < 0 || t >= v) throw UnknownTokenError("vocab: terminal id out of range");
    terminal_mask_[t] = true;
  }
  if (terminal_mask_[sos_]) throw PrefixTerminalError("vocab: sos cannot be terminal");

  by_surface_.reserve(surfaces_.size());
  for (TokenId i = 0; i < v; ++i) {
    auto [it, inserted] = by_surface_.emplace(surfaces_[i], i);
    if (!inserted)
      throw UnknownTokenError("vocab: duplicate surface '" + surfaces_[i] + "'");
  }
}

const std::string& Vocab::surface(TokenId id) const {
  if (!contains(id)) throw UnknownTokenError("vocab: id " + std::to_string(id));
  return surfaces_[id];
}

std::optional<TokenId> Vocab::id_of(const std::string& surface) const {
  auto it = by_surface_.find(surface);
  if (it == by_surface_.end()) return std::nullopt;
  return it->second;
}

void Vocab::validate_prefix(std::span<const TokenId> prefix) const {
  if (prefix.empty())
    throw std::invalid_argument("prefix: empty (must start at sos)");
  if (prefix.front() != sos_)
    throw std::invalid_argument("prefix: does not start at sos");
  for (TokenId id : prefix) {
    if (!contains(id))
      throw UnknownTokenError("prefix: unknown token id " + std::to_string(id));
  }
  // A terminal anywhere means the sequence already completed; it cannot be
  // extended, and the last position is the usual offender.
  for (TokenId id : prefix) {
    if (terminal_mask_[id])
      throw PrefixTerminalError("prefix: contains terminal token " +
                                std::to_string(id));
  }
}

std::string Vocab::render(std::span<const TokenId> tokens) const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += contains(tokens[i]) ? surfaces_[tokens[i]] : "?";
  }
  return out;
}

}  // namespace flames::model
