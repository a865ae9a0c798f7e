#pragma once

/**
 * Error taxonomy shared across the library.
 *
 * Everything derives from flames::Error (itself a std::runtime_error) so
 * callers can catch broadly, while the CLI and campaign layers can still
 * distinguish configuration mistakes from I/O failures and from simulated
 * resource exhaustion.
 */

#include <cstdint>
#include <stdexcept>
#include <string>

namespace flames {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- model --------------------------------------------------------------

/** Prefix handed to a model ends in (or crosses) a terminal token. */
struct PrefixTerminalError : Error {
  using Error::Error;
};

/** Token id outside the vocabulary, or a surface with no id. */
struct UnknownTokenError : Error {
  using Error::Error;
};

/** k out of range for a top-k request. */
struct BadKError : Error {
  using Error::Error;
};

// ---- remote model ---------------------------------------------------------

/** Endpoint unreachable after retries (connect/read failure, 5xx). */
struct TransportError : Error {
  using Error::Error;
};

/** Endpoint answered, but the payload violates the wire contract. */
struct ProtocolError : Error {
  using Error::Error;
};

// ---- cost model / decoding -----------------------------------------------

/**
 * A decode step pushed the memory meter past its configured cap. The meter
 * records the breach (peak + oom flag); the decode layer throws this to
 * abort. `peak_bytes` is the attempted peak, `cap_bytes` the configured cap.
 */
struct SimulatedOom : Error {
  SimulatedOom(std::int64_t peak, std::int64_t cap)
      : Error("simulated OOM: peak " + std::to_string(peak) + " exceeds cap " +
              std::to_string(cap)),
        peak_bytes(peak),
        cap_bytes(cap) {}
  std::int64_t peak_bytes;
  std::int64_t cap_bytes;
};

// ---- corpus / campaign -----------------------------------------------------

/** Corpus generator could not produce a valid mutant within its attempt cap. */
struct GenerationExhausted : Error {
  using Error::Error;
};

/** Two campaign reports cannot be compared (bug id sets disjoint). */
struct PairingError : Error {
  using Error::Error;
};

/** Bad run configuration (unknown algorithm, invalid parameter combos). */
struct ConfigError : Error {
  using Error::Error;
};

/** File missing / unreadable / unwritable. */
struct IoError : Error {
  using Error::Error;
};

}  // namespace flames
