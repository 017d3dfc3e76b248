#include "ganav/attributes.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ganav/remote_provider.hpp"

namespace ganav::attributes {
namespace {

std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string strip_marker(std::string line) {
  static constexpr std::string_view kBullet = "\xE2\x80\xA2";
  if (line.starts_with(kBullet)) return trim(std::string_view(line).substr(kBullet.size()));
  if (!line.empty() && (line[0] == '-' || line[0] == '*')) return trim(std::string_view(line).substr(1));
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i])) != 0) ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')' || line[i] == ':')) {
    return trim(std::string_view(line).substr(i + 1));
  }
  return line;
}

void check_target_and_count(std::string_view target, int n) {
  if (trim(target).empty()) fail(Errc::EmptyTarget, "target object must be non-empty");
  if (n < 1) fail(Errc::PromptCountError, "attribute count must be at least 1");
}

std::vector<std::string> take_first(const std::vector<std::string>& items, int n, std::string_view what,
                                    std::string_view target) {
  if (static_cast<int>(items.size()) < n) {
    fail(Errc::CountMismatch, std::string(what) + " list for '" + std::string(target) + "' has " +
                                  std::to_string(items.size()) + " entries, " + std::to_string(n) + " requested");
  }
  return {items.begin(), items.begin() + n};
}

}  // namespace

std::vector<std::string> AttributeSet::channel_names() const {
  std::vector<std::string> names = geometric;
  names.insert(names.end(), affordance.begin(), affordance.end());
  return names;
}

void AttributeSet::validate() const {
  if (trim(target).empty()) fail(Errc::EmptyTarget, "attribute set has no target");
  if (channels() == 0) fail(Errc::InvalidArgument, "attribute set needs at least one channel");
  std::set<std::string> seen;
  for (const auto& name : channel_names()) {
    if (name.empty()) fail(Errc::InvalidArgument, "attribute strings must be non-empty");
    if (!seen.insert(name).second) fail(Errc::InvalidArgument, "duplicate attribute '" + name + "'");
  }
}

std::string build_affordance_prompt(std::string_view target, int n) {
  check_target_and_count(target, n);
  std::ostringstream os;
  os << "For the target object " << target << ", please provide " << n
     << " affordance attributes that to the most reflect its characteristics.";
  return os.str();
}

std::string build_geometric_prompt(std::string_view target, int n) {
  check_target_and_count(target, n);
  std::ostringstream os;
  os << "Summarize " << n << " geometric part visual features of the " << target
     << " which are typically used to identify why it is a " << target << ".";
  return os.str();
}

std::vector<std::string> parse_attribute_list(std::string_view raw, int expected) {
  if (trim(raw).empty()) fail(Errc::EmptyResponse, "attribute response is empty");

  std::vector<std::string> lines;
  std::istringstream in{std::string(raw)};
  for (std::string line; std::getline(in, line);) {
    std::string t = trim(line);
    if (!t.empty()) lines.push_back(std::move(t));
  }
  if (lines.size() == 1 && expected > 1 && lines.front().find(',') != std::string::npos) {
    std::string single = lines.front();
    lines.clear();
    std::istringstream parts(single);
    for (std::string part; std::getline(parts, part, ',');) {
      std::string t = trim(part);
      if (!t.empty()) lines.push_back(std::move(t));
    }
  }

  std::vector<std::string> items;
  for (auto& line : lines) {
    std::string item = strip_marker(line);
    while (!item.empty() && item.back() == '.') item.pop_back();
    item = trim(item);
    std::transform(item.begin(), item.end(), item.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!item.empty()) items.push_back(std::move(item));
  }
  if (items.empty()) fail(Errc::EmptyResponse, "attribute response has no items");
  if (static_cast<int>(items.size()) != expected) {
    fail(Errc::CountMismatch,
         "expected " + std::to_string(expected) + " attributes, parsed " + std::to_string(items.size()));
  }
  return items;
}

std::filesystem::path default_fixture_dir() {
  if (const char* env = std::getenv("GANAV_DATA_DIR")) return std::filesystem::path(env) / "attributes";
  return std::filesystem::path(GANAV_DEFAULT_DATA_DIR) / "attributes";
}

AttributeSet load_fixture(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(Errc::UnknownCategory, "no attribute fixture at " + file.string());
  nlohmann::json j;
  try {
    in >> j;
    AttributeSet set;
    set.target = j.at("target").get<std::string>();
    set.geometric = j.at("geometric").get<std::vector<std::string>>();
    set.affordance = j.at("affordance").get<std::vector<std::string>>();
    return set;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, "malformed attribute fixture " + file.string() + ": " + e.what());
  }
}

AttributeSet resolve_attributes(std::string_view target, int n_geometric, int n_affordance,
                                const AttributeSource& source) {
  if (trim(target).empty()) fail(Errc::EmptyTarget, "target object must be non-empty");
  if (n_geometric < 0 || n_affordance < 0) fail(Errc::PromptCountError, "attribute counts must be non-negative");
  if (n_geometric + n_affordance < 1) fail(Errc::PromptCountError, "need at least one attribute channel");

  AttributeSet out;
  if (const auto* fixture = std::get_if<FixtureSource>(&source)) {
    const AttributeSet full = load_fixture(fixture->directory / (std::string(target) + ".json"));
    if (full.target != target) fail(Errc::ParseError, "fixture target mismatch for '" + std::string(target) + "'");
    out.target = full.target;
    out.geometric = take_first(full.geometric, n_geometric, "geometric", target);
    out.affordance = take_first(full.affordance, n_affordance, "affordance", target);
  } else {
    const auto& remote = std::get<RemoteSource>(source);
    remote::RemoteClient client(remote.base_url, remote.timeout_seconds);
    out = client.attributes(target, n_geometric, n_affordance);
  }
  out.validate();
  return out;
}

AttributeEmbeddings embed_attributes(const AttributeSet& set, scoring::EmbeddingProvider& provider) {
  set.validate();
  AttributeEmbeddings out;
  out.names = set.channel_names();
  out.vectors = provider.embed_texts(out.names);
  if (out.vectors.size() != out.names.size()) {
    fail(Errc::ProviderFailure, "provider returned a different number of text embeddings");
  }
  const std::size_t dim = provider.dimension();
  for (auto& v : out.vectors) {
    if (v.size() != dim) fail(Errc::ProviderFailure, "text embedding dimension mismatch");
    scoring::normalize(v);
  }
  return out;
}

}  // namespace ganav::attributes
