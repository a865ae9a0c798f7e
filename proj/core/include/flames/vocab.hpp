#pragma once

/**
 * Token vocabulary: dense ids 0..v-1, each with a unique surface string,
 * a nonempty set of terminal ids, and a designated start-of-sequence id
 * that is itself never terminal.
 *
 * All models and decoders speak token ids; surfaces exist for file formats,
 * diagnostics, and the expression interpreter (which classifies tokens by
 * surface).
 */

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace flames::model {

using TokenId = std::int32_t;

class Vocab {
 public:
  /**
   * Builds and validates a vocabulary.
   * Throws UnknownTokenError on duplicate surfaces or out-of-range ids,
   * PrefixTerminalError if sos is listed as terminal, std::invalid_argument
   * if terminals is empty.
   */
  Vocab(std::vector<std::string> surfaces, std::vector<TokenId> terminals,
        TokenId sos);

  TokenId size() const { return static_cast<TokenId>(surfaces_.size()); }
  TokenId sos() const { return sos_; }
  bool is_terminal(TokenId id) const { return terminal_mask_.at(id); }
  const std::string& surface(TokenId id) const;
  const std::vector<TokenId>& terminals() const { return terminals_; }

  /** Id for a surface, or nullopt if the surface is not in the vocabulary. */
  std::optional<TokenId> id_of(const std::string& surface) const;

  bool contains(TokenId id) const { return id >= 0 && id < size(); }

  /**
   * Validates a generation prefix: nonempty, starts at sos, every id in
   * range, and no terminal anywhere (a prefix that already ended cannot be
   * extended). Throws UnknownTokenError / PrefixTerminalError /
   * std::invalid_argument accordingly.
   */
  void validate_prefix(std::span<const TokenId> prefix) const;

  /** Render a token sequence as space-joined surfaces (diagnostics). */
  std::string render(std::span<const TokenId> tokens) const;

 private:
  std::vector<std::string> surfaces_;
  std::vector<TokenId> terminals_;
  std::vector<bool> terminal_mask_;
  TokenId sos_;
  std::unordered_map<std::string, TokenId> by_surface_;
};

}  // namespace flames::model
