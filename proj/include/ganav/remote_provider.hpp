#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "ganav/attributes.hpp"
#include "ganav/embedding.hpp"

namespace httplib {
class Client;
}

// Client side of the embedding / attribute service protocol (docs/protocol.md).
namespace ganav::remote {

struct ServiceInfo {
  std::string model;
  std::size_t dimension = 0;
  int input_size = 0;
};

class RemoteClient {
 public:
  explicit RemoteClient(std::string base_url, double timeout_seconds = 30.0);
  ~RemoteClient();
  RemoteClient(RemoteClient&&) noexcept;
  RemoteClient& operator=(RemoteClient&&) noexcept;

  const std::string& base_url() const noexcept { return base_url_; }

  ServiceInfo info();
  // Patches are resized to `input_size` (when > 0), PNG-encoded and base64'd.
  std::vector<scoring::Embedding> embed_images(std::span<const RgbView> patches, int input_size);
  std::vector<scoring::Embedding> embed_texts(std::span<const std::string> texts);
  attributes::AttributeSet attributes(std::string_view target, int n_geometric, int n_affordance);

 private:
  std::string next_id();

  std::string base_url_;
  std::unique_ptr<httplib::Client> http_;
  std::uint64_t counter_ = 0;
};

// EmbeddingProvider bound to a running embedding service.
class RemoteProvider final : public scoring::EmbeddingProvider {
 public:
  explicit RemoteProvider(std::string base_url, double timeout_seconds = 30.0);

  std::size_t dimension() override;
  int input_size() override;
  std::vector<scoring::Embedding> embed_images(std::span<const RgbView> patches) override;
  std::vector<scoring::Embedding> embed_texts(std::span<const std::string> texts) override;

  const ServiceInfo& info();

 private:
  RemoteClient client_;
  std::optional<ServiceInfo> info_;
};

}  // namespace ganav::remote
