#pragma once

#include <chrono>
#include <string>

#include <nlohmann/json.hpp>

namespace intentscape {

// Parsed "http://host[:port][/path]" endpoint.
struct Endpoint {
  std::string scheme_host_port;
  std::string path;
};

Endpoint parse_endpoint(const std::string& url);

// POSTs a JSON body and returns the parsed JSON response. Connection
// failures and non-2xx statuses raise TransportError; an unparseable body
// raises Error.
nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body,
                         std::chrono::seconds timeout = std::chrono::seconds(120));

}  // namespace intentscape
