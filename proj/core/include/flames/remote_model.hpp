#pragma once

/**
 * HTTP-backed token model.
 *
 * Wire contract (JSON over POST):
 *   request:  POST {base_url}/v1/next_token   {"prefix": [int...], "k": int}
 *   response: 200                             {"logprobs": {"<token id>": float}}
 *
 * The returned entries are softmax-renormalized (dist proportional to
 * exp(logprob) over exactly the returned ids); ids the endpoint omitted are
 * implicit zeros. Connection failures and 5xx responses are retried with
 * capped exponential backoff (3 attempts total) and surface as
 * TransportError; a reachable endpoint that violates the contract (bad
 * status, malformed JSON, missing/empty "logprobs", unknown ids) surfaces as
 * ProtocolError without retry.
 */

#include <cstdint>
#include <memory>
#include <string>

#include "flames/model.hpp"

namespace flames::model {

struct RemoteConfig {
  std::string base_url;        // e.g. "http://127.0.0.1:8080"
  int request_k = 0;           // 0 = ask for the full vocabulary
  int attempts = 3;            // total tries per forward
  int backoff_base_ms = 100;   // delay after try i is base * 2^i, capped
  int backoff_cap_ms = 2000;
  int timeout_ms = 5000;       // per-request connect/read timeout
};

class RemoteModel : public TokenModel {
 public:
  RemoteModel(Vocab vocab, RemoteConfig config, std::int64_t alpha = 1000);
  ~RemoteModel() override;

 protected:
  TokenDist compute_dist(std::span<const TokenId> prefix) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace flames::model
