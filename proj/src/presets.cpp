#include "pacer/presets.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "pacer/error.hpp"
#include "pacer/json_codec.hpp"

namespace pacer {

namespace fs = std::filesystem;
using json::Json;

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(
      text.begin(), text.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

[[noreturn]] void storage_failure(const std::string& what, const fs::path& path) {
  throw Error(ErrorCode::StorageFailure,
              what + " " + path.string() + ": " + std::strerror(errno));
}

// Exclusive advisory lock on a sibling ".lock" file for the duration of a write.
class FileLock {
public:
  explicit FileLock(const fs::path& target) {
    const fs::path lock_path = target.string() + ".lock";
    if (target.has_parent_path()) {
      std::error_code ec;
      fs::create_directories(target.parent_path(), ec);
    }
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) storage_failure("cannot open lock file", lock_path);
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      storage_failure("cannot lock", lock_path);
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

private:
  int fd_ = -1;
};

}  // namespace

Json to_json(const Preset& p) {
  const Json config = json::to_json(p.config);
  return Json{{"id", p.id},
              {"name", p.name},
              {"duration_s", config["duration_s"]},
              {"alerts", config["alerts"]},
              {"created_at", format_rfc3339(p.created_at)},
              {"updated_at", format_rfc3339(p.updated_at)}};
}

namespace {

Timestamp get_timestamp(const Json& object, std::string_view key, const std::string& path) {
  const auto text = json::get_string(object, key, path);
  const auto t = parse_rfc3339(text);
  if (!t) {
    throw Error(ErrorCode::ParseError,
                path + "." + std::string(key) + ": expected RFC 3339 timestamp, got \"" + text + "\"");
  }
  return *t;
}

}  // namespace

Preset preset_from_json(const Json& value, const std::string& path) {
  json::expect_object(value, path, {"id", "name", "duration_s", "alerts", "created_at", "updated_at"});
  Preset p;
  p.id = json::get_string(value, "id", path);
  if (p.id.empty()) throw Error(ErrorCode::ParseError, path + ".id: must not be empty");
  p.name = json::get_string(value, "name", path);
  Json config{{"duration_s", json::field(value, "duration_s", path)},
              {"alerts", json::field(value, "alerts", path)}};
  p.config = json::alert_plan_from_json(config, path);
  p.created_at = get_timestamp(value, "created_at", path);
  p.updated_at = get_timestamp(value, "updated_at", path);
  return p;
}

namespace {

void require_valid_config(const TimerConfig& config) {
  const auto report = validate_plan(config);
  if (!report.ok()) throw Error(ErrorCode::InvalidConfig, report.describe());
}

Preset& find_mutable(PresetStore& store, std::string_view id) {
  auto it = std::find_if(store.presets.begin(), store.presets.end(),
                         [&](const Preset& p) { return p.id == id; });
  if (it == store.presets.end()) {
    throw Error(ErrorCode::NotFound, "no preset with id " + std::string(id));
  }
  return *it;
}

void require_unique_name(const PresetStore& store, std::string_view name, std::string_view except_id) {
  const auto key = lower(name);
  for (const auto& p : store.presets) {
    if (p.id != except_id && lower(p.name) == key) {
      throw Error(ErrorCode::DuplicateName, "a preset named \"" + p.name + "\" already exists");
    }
  }
}

}  // namespace

const Preset* PresetStore::find(std::string_view id) const {
  for (const auto& p : presets) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const Preset* PresetStore::find_by_name(std::string_view name) const {
  const auto key = lower(name);
  for (const auto& p : presets) {
    if (lower(p.name) == key) return &p;
  }
  return nullptr;
}

std::string format_rfc3339(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long long>(hms.seconds().count()));
  return buf;
}

std::optional<Timestamp> parse_rfc3339(std::string_view text) {
  using namespace std::chrono;
  auto digits = [&](std::size_t pos, std::size_t n) -> std::optional<int> {
    if (pos + n > text.size()) return std::nullopt;
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  auto at = [&](std::size_t pos, char c) { return pos < text.size() && text[pos] == c; };

  const auto y = digits(0, 4), mo = digits(5, 2), d = digits(8, 2);
  const auto h = digits(11, 2), mi = digits(14, 2), s = digits(17, 2);
  if (!y || !mo || !d || !h || !mi || !s || !at(4, '-') || !at(7, '-') ||
      !(at(10, 'T') || at(10, 't')) || !at(13, ':') || !at(16, ':')) {
    return std::nullopt;
  }
  const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
  if (!ymd.ok() || *h > 23 || *mi > 59 || *s > 60) return std::nullopt;

  std::size_t pos = 19;
  if (at(pos, '.')) {
    ++pos;
    const std::size_t frac_start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == frac_start) return std::nullopt;
  }

  seconds offset{0};
  if (at(pos, 'Z') || at(pos, 'z')) {
    ++pos;
  } else if (at(pos, '+') || at(pos, '-')) {
    const int sign = text[pos] == '-' ? -1 : 1;
    const auto oh = digits(pos + 1, 2), om = digits(pos + 4, 2);
    if (!oh || !om || !at(pos + 3, ':') || *oh > 23 || *om > 59) return std::nullopt;
    offset = sign * (hours{*oh} + minutes{*om});
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != text.size()) return std::nullopt;

  return sys_days{ymd} + hours{*h} + minutes{*mi} + seconds{*s} - offset;
}

std::string make_preset_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uniform_int_distribution<std::uint64_t> dist;
  std::uint64_t hi = dist(rng), lo = dist(rng);
  hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;  // version 4
  lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;  // RFC 4122 variant
  char buf[37];
  std::snprintf(buf, sizeof buf, "%08llx-%04llx-%04llx-%04llx-%012llx",
                static_cast<unsigned long long>(hi >> 32),
                static_cast<unsigned long long>((hi >> 16) & 0xFFFF),
                static_cast<unsigned long long>(hi & 0xFFFF),
                static_cast<unsigned long long>(lo >> 48),
                static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
  return buf;
}

std::string serialize(const PresetStore& store) {
  Json presets = Json::array();
  for (const auto& p : store.presets) presets.push_back(to_json(p));
  const Json doc{{"version", store.version}, {"presets", std::move(presets)}};
  return doc.dump(2) + "\n";
}

LoadedStore parse_store(std::string_view text) {
  const Json doc = json::parse(text);
  json::expect_object(doc, "", {"version", "presets"});
  LoadedStore out;
  out.store.version = json::get_int(doc, "version", "");
  if (out.store.version != kPresetFormatVersion) {
    throw Error(ErrorCode::UnsupportedVersion,
                "preset file version " + std::to_string(out.store.version) + " is not supported");
  }
  const Json& entries = json::get_array(doc, "presets", "");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string path = "presets[" + std::to_string(i) + "]";
    PresetIssue issue{i, {}, {}};
    if (entries[i].is_object()) {
      auto id = entries[i].find("id");
      if (id != entries[i].end() && id->is_string()) issue.id = id->get<std::string>();
    }
    try {
      Preset p = preset_from_json(entries[i], path);
      check_preset_name(p.name);
      const auto report = validate_plan(p.config);
      if (!report.ok()) throw Error(ErrorCode::InvalidConfig, path + ": " + report.describe());
      if (out.store.find(p.id)) throw Error(ErrorCode::ParseError, path + ".id: duplicate id " + p.id);
      require_unique_name(out.store, p.name, {});
      out.store.presets.push_back(std::move(p));
    } catch (const Error& e) {
      issue.message = e.what();
      out.issues.push_back(std::move(issue));
    }
  }
  return out;
}

LoadedStore load_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::error_code ec;
    if (!fs::exists(path, ec)) return {};
    storage_failure("cannot read", path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_store(buffer.str());
}

void write_file_atomic(const fs::path& path, std::string_view data, const BeforeCommitHook& before_commit) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);

  std::string pattern = (dir / ("." + path.filename().string() + ".tmp-XXXXXX")).string();
  const int fd = ::mkstemp(pattern.data());
  if (fd < 0) storage_failure("cannot create temporary file in", dir);
  const fs::path temp = pattern;

  auto abandon = [&](const char* what) {
    const int saved = errno;
    ::close(fd);
    ::unlink(temp.c_str());
    errno = saved;
    storage_failure(what, temp);
  };

  std::size_t written = 0;
  while (written < data.size()) {
    const ssize_t n = ::write(fd, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      abandon("cannot write");
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fchmod(fd, 0644) != 0 || ::fsync(fd) != 0) abandon("cannot flush");
  if (::close(fd) != 0) {
    ::unlink(temp.c_str());
    storage_failure("cannot close", temp);
  }

  if (before_commit) {
    try {
      before_commit(temp);
    } catch (const std::exception& e) {
      ::unlink(temp.c_str());
      throw Error(ErrorCode::StorageFailure, std::string("write interrupted: ") + e.what());
    }
  }

  if (::rename(temp.c_str(), path.c_str()) != 0) {
    const int saved = errno;
    ::unlink(temp.c_str());
    errno = saved;
    storage_failure("cannot replace", path);
  }
  const int dir_fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (dir_fd >= 0) {
    ::fsync(dir_fd);
    ::close(dir_fd);
  }
}

fs::path default_presets_path() {
  if (const char* env = std::getenv("PACER_PRESETS"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_DATA_HOME"); xdg && *xdg) {
    return fs::path(xdg) / "pacer" / "presets.json";
  }
  if (const char* home = std::getenv("HOME"); home && *home) {
    return fs::path(home) / ".local" / "share" / "pacer" / "presets.json";
  }
  return "presets.json";
}

void check_preset_name(std::string_view name) {
  const bool blank = std::all_of(name.begin(), name.end(),
                                 [](unsigned char c) { return std::isspace(c); });
  if (blank) throw Error(ErrorCode::InvalidConfig, "preset name must not be empty");
  if (utf8_length(name) > kMaxPresetNameLength) {
    throw Error(ErrorCode::InvalidConfig, "preset name must be at most 64 characters");
  }
}

Preset& add_preset(PresetStore& store, std::string name, TimerConfig config, Timestamp now,
                   std::string id) {
  check_preset_name(name);
  require_valid_config(config);
  require_unique_name(store, name, {});
  if (store.find(id)) throw Error(ErrorCode::InvalidConfig, "duplicate preset id " + id);
  store.presets.push_back({std::move(id), std::move(name), std::move(config), now, now});
  return store.presets.back();
}

void remove_preset(PresetStore& store, std::string_view id) {
  const Preset& p = find_mutable(store, id);
  store.presets.erase(store.presets.begin() + (&p - store.presets.data()));
}

Preset& rename_preset(PresetStore& store, std::string_view id, std::string new_name, Timestamp now) {
  Preset& p = find_mutable(store, id);
  check_preset_name(new_name);
  require_unique_name(store, new_name, id);
  p.name = std::move(new_name);
  p.updated_at = now;
  return p;
}

std::vector<Preset> sorted_presets(const PresetStore& store) {
  std::vector<Preset> out = store.presets;
  std::stable_sort(out.begin(), out.end(), [](const Preset& a, const Preset& b) {
    const auto la = lower(a.name), lb = lower(b.name);
    return la != lb ? la < lb : a.id < b.id;
  });
  return out;
}

PresetRepository::PresetRepository(fs::path path) : PresetRepository(std::move(path), Options{}) {}

PresetRepository::PresetRepository(fs::path path, Options options)
    : path_(std::move(path)), options_(std::move(options)) {
  if (!options_.now) {
    options_.now = [] { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); };
  }
  if (!options_.make_id) options_.make_id = make_preset_id;
  if (path_.empty()) return;
  auto loaded = load_file(path_);
  store_ = std::move(loaded.store);
  issues_ = std::move(loaded.issues);
}

void PresetRepository::commit(PresetStore next) {
  if (!path_.empty()) {
    FileLock lock(path_);
    write_file_atomic(path_, serialize(next), options_.before_commit);
  }
  store_ = std::move(next);
}

Preset PresetRepository::save(std::string name, TimerConfig config) {
  PresetStore next = store_;
  Preset created = add_preset(next, std::move(name), std::move(config), options_.now(), options_.make_id());
  commit(std::move(next));
  return created;
}

void PresetRepository::remove(std::string_view id) {
  PresetStore next = store_;
  remove_preset(next, id);
  commit(std::move(next));
}

Preset PresetRepository::rename(std::string_view id, std::string new_name) {
  PresetStore next = store_;
  Preset renamed = rename_preset(next, id, std::move(new_name), options_.now());
  commit(std::move(next));
  return renamed;
}

std::vector<Preset> PresetRepository::list() const { return sorted_presets(store_); }

const Preset& PresetRepository::get(std::string_view id) const {
  const Preset* p = store_.find(id);
  if (!p) throw Error(ErrorCode::NotFound, "no preset with id " + std::string(id));
  return *p;
}

}  // namespace pacer
