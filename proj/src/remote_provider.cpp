#include "ganav/remote_provider.hpp"

#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "ganav/codec.hpp"

namespace ganav::remote {
namespace {

using nlohmann::json;

json parse_body(const std::string& body, std::string_view endpoint) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    fail(Errc::ProviderFailure, std::string(endpoint) + " returned malformed JSON: " + e.what());
  }
}

std::string error_text(const json& body) {
  if (body.contains("error") && body["error"].is_object()) {
    const auto& err = body["error"];
    std::string text = err.value("kind", std::string("Error")) + ": " + err.value("message", std::string());
    if (err.contains("raw") && err["raw"].is_string()) text += " [raw: " + err["raw"].get<std::string>() + "]";
    return text;
  }
  return "unstructured error response";
}

std::vector<scoring::Embedding> read_vectors(const json& body, std::size_t expected) {
  if (!body.contains("vectors") || !body["vectors"].is_array()) {
    fail(Errc::ProviderFailure, "/embed response has no vectors");
  }
  std::vector<scoring::Embedding> out;
  try {
    out = body["vectors"].get<std::vector<scoring::Embedding>>();
  } catch (const json::exception& e) {
    fail(Errc::ProviderFailure, std::string("/embed vectors are not numeric arrays: ") + e.what());
  }
  if (out.size() != expected) {
    fail(Errc::ProviderFailure, "/embed returned " + std::to_string(out.size()) + " vectors for " +
                                    std::to_string(expected) + " inputs");
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].size() != out[0].size()) fail(Errc::ProviderFailure, "/embed vectors have mixed dimensions");
  }
  for (auto& v : out) scoring::normalize(v);
  return out;
}

}  // namespace

RemoteClient::RemoteClient(std::string base_url, double timeout_seconds)
    : base_url_(std::move(base_url)) {
  try {
    http_ = std::make_unique<httplib::Client>(base_url_);
  } catch (const std::exception& e) {
    fail(Errc::RemoteUnavailable, "invalid service URL '" + base_url_ + "': " + e.what());
  }
  if (!http_->is_valid()) fail(Errc::RemoteUnavailable, "invalid service URL '" + base_url_ + "'");
  const auto whole = static_cast<time_t>(timeout_seconds);
  const auto micros = static_cast<time_t>((timeout_seconds - static_cast<double>(whole)) * 1e6);
  http_->set_connection_timeout(whole, micros);
  http_->set_read_timeout(whole, micros);
  http_->set_write_timeout(whole, micros);
}

RemoteClient::~RemoteClient() = default;
RemoteClient::RemoteClient(RemoteClient&&) noexcept = default;
RemoteClient& RemoteClient::operator=(RemoteClient&&) noexcept = default;

std::string RemoteClient::next_id() { return "req-" + std::to_string(++counter_); }

ServiceInfo RemoteClient::info() {
  auto res = http_->Get("/info");
  if (!res) fail(Errc::RemoteUnavailable, base_url_ + "/info: " + httplib::to_string(res.error()));
  const json body = parse_body(res->body, "/info");
  if (res->status != 200) fail(Errc::ProviderFailure, "/info: " + error_text(body));
  try {
    ServiceInfo info;
    info.model = body.at("model").get<std::string>();
    info.dimension = body.at("dimension").get<std::size_t>();
    info.input_size = body.value("input_size", 0);
    if (info.dimension == 0) fail(Errc::ProviderFailure, "/info reports zero dimension");
    return info;
  } catch (const json::exception& e) {
    fail(Errc::ProviderFailure, std::string("/info response incomplete: ") + e.what());
  }
}

std::vector<scoring::Embedding> RemoteClient::embed_images(std::span<const RgbView> patches, int input_size) {
  if (patches.empty()) return {};
  json payload = json::array();
  for (const RgbView& patch : patches) {
    const codec::Bytes png = input_size > 0 ? codec::encode_png_rgb(resize_bilinear(patch, input_size, input_size).view())
                                            : codec::encode_png_rgb(patch);
    payload.push_back(codec::base64_encode(png));
  }
  const std::string id = next_id();
  const json request{{"id", id}, {"kind", "images"}, {"payload", std::move(payload)}};
  auto res = http_->Post("/embed", request.dump(), "application/json");
  if (!res) fail(Errc::RemoteUnavailable, base_url_ + "/embed: " + httplib::to_string(res.error()));
  const json body = parse_body(res->body, "/embed");
  if (res->status != 200) fail(Errc::ProviderFailure, "/embed: " + error_text(body));
  if (body.value("id", std::string()) != id) fail(Errc::ProviderFailure, "/embed response id mismatch");
  return read_vectors(body, patches.size());
}

std::vector<scoring::Embedding> RemoteClient::embed_texts(std::span<const std::string> texts) {
  if (texts.empty()) return {};
  const std::string id = next_id();
  const json request{{"id", id}, {"kind", "texts"}, {"payload", std::vector<std::string>(texts.begin(), texts.end())}};
  auto res = http_->Post("/embed", request.dump(), "application/json");
  if (!res) fail(Errc::RemoteUnavailable, base_url_ + "/embed: " + httplib::to_string(res.error()));
  const json body = parse_body(res->body, "/embed");
  if (res->status != 200) fail(Errc::ProviderFailure, "/embed: " + error_text(body));
  if (body.value("id", std::string()) != id) fail(Errc::ProviderFailure, "/embed response id mismatch");
  return read_vectors(body, texts.size());
}

attributes::AttributeSet RemoteClient::attributes(std::string_view target, int n_geometric, int n_affordance) {
  json request{{"target", std::string(target)},
               {"n_geometric", n_geometric},
               {"n_affordance", n_affordance},
               {"system_prompt", std::string(attributes::kSystemPrompt)}};
  if (n_geometric > 0) request["geometric_prompt"] = attributes::build_geometric_prompt(target, n_geometric);
  if (n_affordance > 0) request["affordance_prompt"] = attributes::build_affordance_prompt(target, n_affordance);

  auto res = http_->Post("/attributes", request.dump(), "application/json");
  if (!res) fail(Errc::RemoteUnavailable, base_url_ + "/attributes: " + httplib::to_string(res.error()));
  json body;
  try {
    body = json::parse(res->body);
  } catch (const json::exception& e) {
    fail(Errc::RemoteUnavailable, std::string("/attributes returned malformed JSON: ") + e.what());
  }
  if (res->status != 200) {
    const bool parse_error = body.contains("error") && body["error"].value("kind", std::string()) == "ParseError";
    fail(parse_error ? Errc::ParseError : Errc::RemoteUnavailable, "/attributes: " + error_text(body));
  }

  // Raw completions, when present, go through the same parser as fixtures.
  auto read_list = [&](const char* key, int expected) -> std::vector<std::string> {
    if (expected == 0) return {};
    const std::string raw_key = std::string(key) + "_raw";
    if (body.contains(raw_key) && body[raw_key].is_string()) {
      return attributes::parse_attribute_list(body[raw_key].get<std::string>(), expected);
    }
    if (!body.contains(key) || !body[key].is_array()) {
      fail(Errc::ParseError, std::string("/attributes response lacks '") + key + "'");
    }
    auto items = body[key].get<std::vector<std::string>>();
    if (static_cast<int>(items.size()) != expected) {
      fail(Errc::CountMismatch, std::string("/attributes returned wrong number of ") + key + " attributes");
    }
    return items;
  };

  attributes::AttributeSet set;
  set.target = std::string(target);
  set.geometric = read_list("geometric", n_geometric);
  set.affordance = read_list("affordance", n_affordance);
  return set;
}

RemoteProvider::RemoteProvider(std::string base_url, double timeout_seconds)
    : client_(std::move(base_url), timeout_seconds) {}

const ServiceInfo& RemoteProvider::info() {
  if (!info_) info_ = client_.info();
  return *info_;
}

std::size_t RemoteProvider::dimension() { return info().dimension; }

int RemoteProvider::input_size() { return info().input_size; }

std::vector<scoring::Embedding> RemoteProvider::embed_images(std::span<const RgbView> patches) {
  auto out = client_.embed_images(patches, input_size());
  for (const auto& v : out) {
    if (v.size() != dimension()) fail(Errc::ProviderFailure, "image embedding dimension differs from /info");
  }
  return out;
}

std::vector<scoring::Embedding> RemoteProvider::embed_texts(std::span<const std::string> texts) {
  auto out = client_.embed_texts(texts);
  for (const auto& v : out) {
    if (v.size() != dimension()) fail(Errc::ProviderFailure, "text embedding dimension differs from /info");
  }
  return out;
}

}  // namespace ganav::remote
