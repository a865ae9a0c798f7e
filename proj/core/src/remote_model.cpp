#include "flames/remote_model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "flames/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace flames::model {

struct RemoteModel::Impl {
  RemoteConfig config;
};

RemoteModel::RemoteModel(Vocab vocab, RemoteConfig config, std::int64_t alpha)
    : TokenModel(std::move(vocab), alpha),
      impl_(std::make_unique<Impl>(Impl{std::move(config)})) {
  if (impl_->config.base_url.empty())
    throw ProtocolError("remote model: empty base_url");
  if (impl_->config.attempts < 1)
    throw ProtocolError("remote model: attempts must be >= 1");
}

RemoteModel::~RemoteModel() = default;

namespace {

int backoff_ms(const RemoteConfig& config, int attempt) {
  const std::int64_t raw =
      static_cast<std::int64_t>(config.backoff_base_ms) << attempt;
  return static_cast<int>(
      std::min<std::int64_t>(raw, config.backoff_cap_ms));
}

TokenDist parse_response(const std::string& body, const Vocab& vocab) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("remote model: bad JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("logprobs") ||
      !doc["logprobs"].is_object() || doc["logprobs"].empty())
    throw ProtocolError("remote model: missing or empty 'logprobs'");

  // Softmax over exactly the returned entries: endpoints send a truncated
  // top-k, so renormalizing over what came back is the consistent closure.
  std::vector<std::pair<TokenId, double>> raw;
  double max_lp = -std::numeric_limits<double>::infinity();
  for (const auto& [key, val] : doc["logprobs"].items()) {
    TokenId id;
    try {
      std::size_t used = 0;
      id = static_cast<TokenId>(std::stol(key, &used));
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw ProtocolError("remote model: bad token id key '" + key + "'");
    }
    if (!vocab.contains(id))
      throw ProtocolError("remote model: id " + key + " outside vocabulary");
    if (!val.is_number())
      throw ProtocolError("remote model: non-numeric logprob for id " + key);
    const double lp = val.get<double>();
    max_lp = std::max(max_lp, lp);
    raw.emplace_back(id, lp);
  }

  double sum = 0.0;
  std::vector<TokenDist::Entry> entries;
  entries.reserve(raw.size());
  for (const auto& [id, lp] : raw) {
    const double w = std::exp(lp - max_lp);
    sum += w;
    entries.push_back({id, w});
  }
  for (auto& e : entries) e.prob /= sum;
  return TokenDist::from_probs(std::move(entries));
}

}  // namespace

TokenDist RemoteModel::compute_dist(std::span<const TokenId> prefix) const {
  const RemoteConfig& config = impl_->config;
  nlohmann::json req;
  req["prefix"] = std::vector<TokenId>(prefix.begin(), prefix.end());
  req["k"] = config.request_k > 0 ? config.request_k
                                  : static_cast<int>(vocab().size());
  const std::string body = req.dump();

  std::string last_failure = "no attempt made";
  for (int attempt = 0; attempt < config.attempts; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(backoff_ms(config, attempt - 1)));

    httplib::Client client(config.base_url);
    client.set_connection_timeout(std::chrono::milliseconds(config.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(config.timeout_ms));
    auto res = client.Post("/v1/next_token", body, "application/json");

    if (!res) {
      last_failure = "connection failed (" + httplib::to_string(res.error()) + ")";
      continue;  // transport-level: retry
    }
    if (res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;  // server-side: retry
    }
    if (res->status != 200)
      throw ProtocolError("remote model: unexpected HTTP " +
                          std::to_string(res->status));
    return parse_response(res->body, vocab());
  }
  throw TransportError("remote model: " + std::to_string(config.attempts) +
                       " attempts to " + config.base_url + " failed; last: " +
                       last_failure);
}

}  // namespace flames::model
