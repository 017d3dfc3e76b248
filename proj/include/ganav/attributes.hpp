#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ganav/embedding.hpp"

namespace ganav::attributes {

inline constexpr std::string_view kSystemPrompt =
    "I am a highly intelligent question-answering bot, and I answer questions from a human perspective.";

inline constexpr int kDefaultGeometric = 3;
inline constexpr int kDefaultAffordance = 1;

// Target object plus its geometric-part and affordance descriptions.
struct AttributeSet {
  std::string target;
  std::vector<std::string> geometric;
  std::vector<std::string> affordance;

  std::size_t channels() const noexcept { return geometric.size() + affordance.size(); }
  // Geometric parts first, then affordances. This order defines map channels.
  std::vector<std::string> channel_names() const;
  void validate() const;

  bool operator==(const AttributeSet&) const = default;
};

// Channel names with one unit-norm text embedding each, in channel order.
struct AttributeEmbeddings {
  std::vector<std::string> names;
  std::vector<scoring::Embedding> vectors;

  std::size_t channels() const noexcept { return names.size(); }
  std::size_t dimension() const noexcept { return vectors.empty() ? 0 : vectors.front().size(); }
};

std::string build_affordance_prompt(std::string_view target, int n);
std::string build_geometric_prompt(std::string_view target, int n);

// Strips list markers ("1.", "2)", "-", "*", bullets), trims and lowercases
// each non-empty line. Throws EmptyResponse or CountMismatch.
std::vector<std::string> parse_attribute_list(std::string_view raw, int expected);

struct FixtureSource {
  std::filesystem::path directory;
};

struct RemoteSource {
  std::string base_url;
  double timeout_seconds = 30.0;
};

using AttributeSource = std::variant<FixtureSource, RemoteSource>;

// Bundled fixtures shipped with the project.
std::filesystem::path default_fixture_dir();

AttributeSet load_fixture(const std::filesystem::path& file);

AttributeSet resolve_attributes(std::string_view target, int n_geometric, int n_affordance,
                                const AttributeSource& source);

AttributeEmbeddings embed_attributes(const AttributeSet& set, scoring::EmbeddingProvider& provider);

}  // namespace ganav::attributes
