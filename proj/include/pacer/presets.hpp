#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pacer/json_codec.hpp"
#include "pacer/timer.hpp"

namespace pacer {

using Timestamp = std::chrono::sys_seconds;

inline constexpr int kPresetFormatVersion = 1;
inline constexpr std::size_t kMaxPresetNameLength = 64;

struct Preset {
  std::string id;
  std::string name;
  TimerConfig config;
  Timestamp created_at{};
  Timestamp updated_at{};

  friend bool operator==(const Preset&, const Preset&) = default;
};

struct PresetStore {
  int version = kPresetFormatVersion;
  std::vector<Preset> presets;

  const Preset* find(std::string_view id) const;
  const Preset* find_by_name(std::string_view name) const;

  friend bool operator==(const PresetStore&, const PresetStore&) = default;
};

/// A preset entry that was skipped while loading.
struct PresetIssue {
  std::size_t position = 0;
  std::string id;  // empty if the entry had no readable id
  std::string message;
};

struct LoadedStore {
  PresetStore store;
  std::vector<PresetIssue> issues;
};

std::string format_rfc3339(Timestamp t);
/// Accepts "YYYY-MM-DDTHH:MM:SS[.fff](Z|+hh:mm|-hh:mm)"; fractions are truncated.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// Random UUID-shaped identifier (version 4 layout).
std::string make_preset_id();

json::Json to_json(const Preset& preset);
/// Throws Error(ParseError) naming the offending field.
Preset preset_from_json(const json::Json& value, const std::string& path);

/// Canonical JSON text of the store (two-space indent, schema field order).
std::string serialize(const PresetStore& store);

/// Throws Error(ParseError) for malformed documents and
/// Error(UnsupportedVersion) for other format versions. Entries that fail
/// field or plan validation are skipped and reported in `issues`.
LoadedStore parse_store(std::string_view text);

/// Missing file yields an empty store.
LoadedStore load_file(const std::filesystem::path& path);

/// Called with the temporary file after it is fully written and before it
/// is renamed over the target. Throwing aborts the write.
using BeforeCommitHook = std::function<void(const std::filesystem::path& temp)>;

/// Writes through a temporary file in the same directory, then renames it
/// over `path`. Throws Error(StorageFailure); the target is untouched on
/// failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view data,
                       const BeforeCommitHook& before_commit = {});

/// $PACER_PRESETS, else $XDG_DATA_HOME/pacer/presets.json, else
/// ~/.local/share/pacer/presets.json.
std::filesystem::path default_presets_path();

// Store mutations. They validate and mutate `store` in place and do no I/O.
void check_preset_name(std::string_view name);
Preset& add_preset(PresetStore& store, std::string name, TimerConfig config, Timestamp now,
                   std::string id);
void remove_preset(PresetStore& store, std::string_view id);
Preset& rename_preset(PresetStore& store, std::string_view id, std::string new_name, Timestamp now);
/// Presets ordered by name (case-insensitive, then by id).
std::vector<Preset> sorted_presets(const PresetStore& store);

/// File-backed preset collection. Each mutation is applied to a copy, written
/// atomically under an advisory lock and only then made visible, so a failed
/// write leaves both the file and the in-memory store unchanged.
class PresetRepository {
public:
  struct Options {
    std::function<Timestamp()> now;
    std::function<std::string()> make_id;
    BeforeCommitHook before_commit;
  };

  /// An empty path keeps the store in memory only.
  explicit PresetRepository(std::filesystem::path path);
  PresetRepository(std::filesystem::path path, Options options);

  Preset save(std::string name, TimerConfig config);
  void remove(std::string_view id);
  Preset rename(std::string_view id, std::string new_name);
  std::vector<Preset> list() const;
  /// Throws Error(NotFound).
  const Preset& get(std::string_view id) const;

  const PresetStore& store() const noexcept { return store_; }
  const std::vector<PresetIssue>& load_issues() const noexcept { return issues_; }
  const std::filesystem::path& path() const noexcept { return path_; }

private:
  void commit(PresetStore next);

  std::filesystem::path path_;
  Options options_;
  PresetStore store_;
  std::vector<PresetIssue> issues_;
};

}  // namespace pacer
