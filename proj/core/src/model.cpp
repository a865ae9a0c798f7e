#include "flames/model.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "flames/errors.hpp"
#include "json.hpp"

namespace flames::model {

namespace {

/** Uniform distribution over the given ids (canonicalized). */
TokenDist uniform_over(const std::vector<TokenId>& ids) {
  std::vector<TokenDist::Entry> entries;
  entries.reserve(ids.size());
  const double p = 1.0 / static_cast<double>(ids.size());
  for (TokenId id : ids) entries.push_back({id, p});
  return TokenDist::from_probs(std::move(entries));
}

std::vector<TokenId> all_ids(const Vocab& vocab) {
  std::vector<TokenId> ids(static_cast<std::size_t>(vocab.size()));
  for (TokenId i = 0; i < vocab.size(); ++i) ids[static_cast<std::size_t>(i)] = i;
  return ids;
}

std::string join_ids(const std::vector<TokenId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(ids[i]);
  }
  return out;
}

std::vector<TokenId> split_ids(const std::string& key) {
  std::vector<TokenId> ids;
  std::istringstream ss(key);
  std::string tok;
  while (ss >> tok) {
    try {
      ids.push_back(static_cast<TokenId>(std::stol(tok)));
    } catch (const std::exception&) {
      throw ProtocolError("table model: bad prefix key '" + key + "'");
    }
  }
  return ids;
}

}  // namespace

// ==== TokenModel =============================================================

TokenDist TokenModel::next_dist(std::span<const TokenId> prefix) const {
  vocab_.validate_prefix(prefix);
  stats_.record_forward();
  return compute_dist(prefix);
}

// ==== TableModel =============================================================

TableModel::TableModel(Vocab vocab, std::map<std::vector<TokenId>, Rule> rules,
                       UnlistedPolicy unlisted, std::int64_t alpha)
    : TokenModel(std::move(vocab), alpha), unlisted_(unlisted) {
  for (auto& [prefix, rule] : rules) {
    for (const auto& e : rule) {
      if (!this->vocab().contains(e.id))
        throw UnknownTokenError("table model: rule emits unknown id " +
                                std::to_string(e.id));
    }
    rules_.emplace(prefix, TokenDist::from_probs(rule));
  }
}

TokenDist TableModel::compute_dist(std::span<const TokenId> prefix) const {
  std::vector<TokenId> key(prefix.begin(), prefix.end());
  auto it = rules_.find(key);
  if (it != rules_.end()) return it->second;
  switch (unlisted_) {
    case UnlistedPolicy::UniformAll:
      return uniform_over(all_ids(vocab()));
    case UnlistedPolicy::UniformTerminals:
    default:
      return uniform_over(vocab().terminals());
  }
}

TableModel TableModel::load_json(std::istream& in, std::int64_t alpha) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("table model: bad JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vocab") || !doc.contains("rules"))
    throw ProtocolError("table model: missing 'vocab' or 'rules'");

  const auto& jv = doc["vocab"];
  if (!jv.contains("tokens") || !jv.contains("terminals") || !jv.contains("sos"))
    throw ProtocolError("table model: vocab needs tokens/terminals/sos");

  std::vector<std::string> surfaces = jv["tokens"].get<std::vector<std::string>>();
  std::vector<TokenId> terminals = jv["terminals"].get<std::vector<TokenId>>();
  TokenId sos = jv["sos"].get<TokenId>();
  Vocab vocab(std::move(surfaces), std::move(terminals), sos);

  UnlistedPolicy unlisted = UnlistedPolicy::UniformTerminals;
  if (doc.contains("unlisted")) {
    const std::string s = doc["unlisted"].get<std::string>();
    if (s == "uniform_all") unlisted = UnlistedPolicy::UniformAll;
    else if (s == "uniform_terminals") unlisted = UnlistedPolicy::UniformTerminals;
    else throw ProtocolError("table model: unknown unlisted policy '" + s + "'");
  }

  std::map<std::vector<TokenId>, Rule> rules;
  for (const auto& [key, val] : doc["rules"].items()) {
    if (!val.is_object()) throw ProtocolError("table model: rule must be object");
    Rule rule;
    for (const auto& [tok, prob] : val.items()) {
      TokenId id;
      try {
        id = static_cast<TokenId>(std::stol(tok));
      } catch (const std::exception&) {
        throw ProtocolError("table model: bad token id key '" + tok + "'");
      }
      rule.push_back({id, prob.get<double>()});
    }
    rules.emplace(split_ids(key), std::move(rule));
  }
  return TableModel(std::move(vocab), std::move(rules), unlisted, alpha);
}

void TableModel::save_json(std::ostream& out) const {
  nlohmann::json doc;
  std::vector<std::string> surfaces;
  for (TokenId i = 0; i < vocab().size(); ++i) surfaces.push_back(vocab().surface(i));
  doc["vocab"] = {{"tokens", surfaces},
                  {"terminals", vocab().terminals()},
                  {"sos", vocab().sos()}};
  doc["unlisted"] = unlisted_ == UnlistedPolicy::UniformAll ? "uniform_all"
                                                            : "uniform_terminals";
  nlohmann::json rules = nlohmann::json::object();
  for (const auto& [prefix, dist] : rules_) {
    nlohmann::json rule = nlohmann::json::object();
    for (const auto& e : dist.entries) rule[std::to_string(e.id)] = e.prob;
    rules[join_ids(prefix)] = std::move(rule);
  }
  doc["rules"] = std::move(rules);
  out << doc.dump(2) << '\n';
}

// ==== NgramModel =============================================================

NgramModel::NgramModel(Vocab vocab, const std::vector<std::vector<TokenId>>& corpus,
                       int order, std::int64_t alpha)
    : TokenModel(std::move(vocab), alpha), order_(order) {
  if (order_ < 2)
    throw std::invalid_argument("ngram model: order must be >= 2");
  const auto v = static_cast<std::size_t>(this->vocab().size());
  for (const auto& seq : corpus) {
    if (seq.empty() || seq.front() != this->vocab().sos())
      throw std::invalid_argument("ngram model: sequence must start at sos");
    if (!this->vocab().is_terminal(seq.back()))
      throw std::invalid_argument("ngram model: sequence must end with terminal");
    for (TokenId id : seq) {
      if (!this->vocab().contains(id))
        throw UnknownTokenError("ngram model: unknown id " + std::to_string(id));
    }
    const std::size_t ctx_len = static_cast<std::size_t>(order_ - 1);
    for (std::size_t pos = 1; pos < seq.size(); ++pos) {
      // Context: up to order-1 tokens ending just before pos. Short prefixes
      // near sos use what exists, so generation from [sos] is trainable.
      const std::size_t start = pos >= ctx_len ? pos - ctx_len : 0;
      std::vector<TokenId> ctx(seq.begin() + static_cast<std::ptrdiff_t>(start),
                               seq.begin() + static_cast<std::ptrdiff_t>(pos));
      auto& row = counts_[ctx];
      if (row.empty()) row.assign(v, 0);
      row[static_cast<std::size_t>(seq[pos])] += 1;
      totals_[ctx] += 1;
    }
  }
}

std::uint64_t NgramModel::count(std::span<const TokenId> context, TokenId next) const {
  std::vector<TokenId> key(context.begin(), context.end());
  auto it = counts_.find(key);
  if (it == counts_.end()) return 0;
  if (next < 0 || next >= vocab().size()) return 0;
  return it->second[static_cast<std::size_t>(next)];
}

TokenDist NgramModel::compute_dist(std::span<const TokenId> prefix) const {
  const std::size_t ctx_len = static_cast<std::size_t>(order_ - 1);
  const std::size_t start = prefix.size() >= ctx_len ? prefix.size() - ctx_len : 0;
  std::vector<TokenId> ctx(prefix.begin() + static_cast<std::ptrdiff_t>(start),
                           prefix.end());
  auto it = counts_.find(ctx);
  if (it == counts_.end()) {
    // Never-seen context: add-one smoothing collapses to uniform over the
    // whole vocabulary, which keeps the model total without perturbing the
    // exact ratios that trained contexts report.
    return uniform_over(all_ids(vocab()));
  }
  const std::uint64_t total = totals_.at(ctx);
  std::vector<TokenDist::Entry> entries;
  for (std::size_t id = 0; id < it->second.size(); ++id) {
    if (it->second[id] == 0) continue;
    entries.push_back({static_cast<TokenId>(id),
                       static_cast<double>(it->second[id]) /
                           static_cast<double>(total)});
  }
  return TokenDist::from_probs(std::move(entries));
}

}  // namespace flames::model
