#include "intentscape/http_client.hpp"

#include <httplib.h>

#include "intentscape/error.hpp"

namespace intentscape {

Endpoint parse_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint URL needs a scheme: " + url);
  if (url.compare(0, scheme_end, "http") != 0) throw ConfigError("only http:// endpoints are supported: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body, std::chrono::seconds timeout) {
  httplib::Client client(endpoint.scheme_host_port);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  auto res = client.Post(endpoint.path, body.dump(), "application/json");
  if (!res) {
    throw TransportError("POST " + endpoint.scheme_host_port + endpoint.path + " failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("POST " + endpoint.scheme_host_port + endpoint.path + " returned HTTP " +
                         std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("backend returned invalid JSON: ") + e.what());
  }
}

}  // namespace intentscape
