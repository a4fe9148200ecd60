#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sbilint/correlate/exchange.hpp"
#include "sbilint/openapi/schema.hpp"
#include "sbilint/validate/finding.hpp"

namespace sbilint::validate {

struct ContentSelection {
  const openapi::Schema* schema = nullptr;  // null: payload is not validated
  std::string content_type;                 // media type the schema was taken from
  std::vector<Finding> findings;
};

/// Picks the payload schema for one side of a bound exchange. For responses
/// this includes the status lookup.
ContentSelection select_content_schema(const correlate::HttpExchange& exchange, capture::MessageDirection side);

struct ExchangeValidationOptions {
  std::size_t max_body = 4u << 20;
};

struct ExchangeValidation {
  std::vector<Finding> findings;
  std::vector<std::string> notes;
};

/// Payload and response-level checks for one exchange. Exchanges under an
/// unsupported API version or without a binding yield nothing.
ExchangeValidation validate_exchange(const correlate::HttpExchange& exchange,
                                     const ExchangeValidationOptions& options = {});

}  // namespace sbilint::validate
