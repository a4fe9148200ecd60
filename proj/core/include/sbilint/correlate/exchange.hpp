#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbilint/capture/messages.hpp"
#include "sbilint/openapi/spec_index.hpp"
#include "sbilint/validate/finding.hpp"

namespace sbilint::correlate {

enum class AugmentSource { ContentSniff, SpecDefault, Unrecoverable };

std::string_view to_string(AugmentSource source);

struct AugmentationNote {
  std::string header;  // lower case
  AugmentSource source = AugmentSource::ContentSniff;
  capture::MessageDirection message = capture::MessageDirection::Request;
  std::optional<std::string> original;  // decoded value, when one existed
  std::string value;                    // synthesized value; empty for Unrecoverable
};

struct BoundOperation {
  const openapi::OperationSpec* operation = nullptr;
  std::vector<std::pair<std::string, std::string>> path_parameters;
  bool via_callback = false;  // bound through a subscription's callback declaration
};

struct UnsupportedVersion {
  std::string found;
  std::string expected;
};

struct HttpExchange {
  std::size_t id = 0;  // position in the exchange list
  std::optional<capture::HttpMessage> request;  // absent for orphan responses
  std::optional<capture::HttpMessage> response;
  std::optional<BoundOperation> bound_operation;
  std::vector<AugmentationNote> augmentations;
  std::optional<UnsupportedVersion> version_status;  // nullopt = ok
  std::vector<std::size_t> links;                    // ids of related exchanges, ascending
  std::vector<validate::Finding> findings;           // correlation-stage findings
  std::vector<std::string> notes;

  std::uint64_t first_frame() const;
  std::uint64_t last_frame() const;
  std::string method() const;  // "" when unknown
  std::string path() const;    // "" when unknown
  std::optional<int> status() const;
};

struct SubscriptionRecord {
  std::size_t subscription = 0;  // exchange id
  std::string callback_uri;      // normalized authority + path
  std::optional<std::string> resource_location;
};

struct CorrelatorOptions {
  std::set<std::string> callback_properties{"nfStatusNotificationUri", "callbackReference", "notificationUri"};
};

/// Groups messages by (tcp stream, h2 stream). Every message lands in exactly
/// one exchange. Exchanges are ordered by first frame and numbered from 0.
std::vector<HttpExchange> pair_exchanges(std::vector<capture::HttpMessage> messages);

/// Binds the request to an operation. Lookup failures become findings.
void match_operation(HttpExchange& exchange, const openapi::SpecIndex& index);

/// Registers subscriptions and links later requests addressed to their
/// callback URIs. A linked notification with no binding of its own is bound
/// to the matching callback operation of the subscription.
std::vector<SubscriptionRecord> link_subscriptions(std::vector<HttpExchange>& exchanges,
                                                   const CorrelatorOptions& options = {});

/// Fills in a missing content-type. Never overwrites decoded values and is
/// idempotent.
void augment_headers(HttpExchange& exchange, const openapi::SpecIndex& index);

/// Media type without parameters, trimmed and lower-cased.
std::string media_type(std::string_view content_type);
/// application/json and any "+json" structured-syntax suffix.
bool is_json_media_type(std::string_view media);

/// Lower-cased authority with the scheme's default port made explicit, plus
/// the path without query. Returns nullopt for anything that is not an
/// absolute http(s) URI.
std::optional<std::string> normalize_callback_uri(std::string_view uri);
std::string normalize_authority(std::string_view authority, std::string_view scheme);

/// pair_exchanges, match_operation, link_subscriptions, augment_headers.
std::vector<HttpExchange> correlate(std::vector<capture::HttpMessage> messages, const openapi::SpecIndex& index,
                                    const CorrelatorOptions& options = {});

}  // namespace sbilint::correlate
