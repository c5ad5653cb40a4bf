#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "colayout/error.hpp"
#include "colayout/geometry.hpp"

namespace colayout {

inline constexpr int kFormatVersion = 1;

enum class Side : std::uint8_t { Front = 1, Back = 2, Left = 4, Right = 8 };

/// Bit set over Side.
class SideSet {
 public:
  constexpr SideSet() = default;
  static constexpr SideSet all() { return SideSet(0x0f); }
  static SideSet defaults_for_label(std::string_view label);

  constexpr bool contains(Side s) const { return (bits_ & static_cast<std::uint8_t>(s)) != 0; }
  constexpr SideSet& insert(Side s) {
    bits_ |= static_cast<std::uint8_t>(s);
    return *this;
  }
  constexpr bool empty() const { return bits_ == 0; }
  friend constexpr bool operator==(SideSet, SideSet) = default;

 private:
  constexpr explicit SideSet(std::uint8_t bits) : bits_(bits) {}
  std::uint8_t bits_ = 0;
};

std::string_view side_name(Side s);
std::optional<Side> parse_side(std::string_view name);

struct SceneObject {
  std::string id;
  std::string label;
  OrientedRect footprint;
  SideSet interaction_sides;
  bool movable = true;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct RobotSpec {
  double r_b = 0.3;     ///< inflated base radius
  double d_max = 0.6;   ///< arm reach
  std::optional<Vec2> seed_hint;

  friend bool operator==(const RobotSpec&, const RobotSpec&) = default;
};

struct Scene {
  Room room;
  std::vector<SceneObject> objects;
  RobotSpec robot;

  const SceneObject* find(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;
  std::vector<std::string> labels() const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Poses of the movable objects, keyed by object id.
using Layout = std::map<std::string, Pose2, std::less<>>;

/// Throws ValidationError naming the first violated invariant.
void validate(const Scene& scene);

Scene scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const Scene& scene);

Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

Layout layout_from_json(const nlohmann::json& j);
nlohmann::json layout_to_json(const Layout& layout);

/// The layout currently realized by the scene's movable objects.
Layout current_layout(const Scene& scene);

/// Copy of `scene` with movable footprints moved to `layout`. The layout must
/// name every movable object and nothing else.
Scene apply_layout(const Scene& scene, const Layout& layout);

/// Parses a whole JSON document, reporting line/column on failure.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);

/// Rejects documents whose "format_version" is present and not ours.
void check_format_version(const nlohmann::json& j, std::string_view what);

}  // namespace colayout
