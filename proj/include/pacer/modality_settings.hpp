#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace pacer {

enum class Channel { Visual, Auditory, Speech, Haptic };

inline constexpr std::array<Channel, 4> kAllChannels{
    Channel::Visual, Channel::Auditory, Channel::Speech, Channel::Haptic};

std::string_view to_string(Channel channel);
std::optional<Channel> channel_from_string(std::string_view text);

/// The four alert toggles. Any combination is legal, including all off.
struct ModalitySettings {
  bool visual = true;
  bool auditory = true;
  bool speech = true;
  bool haptic = true;

  bool enabled(Channel channel) const noexcept;
  void set(Channel channel, bool on) noexcept;

  static ModalitySettings all() { return {}; }
  static ModalitySettings none() { return {false, false, false, false}; }

  friend bool operator==(const ModalitySettings&, const ModalitySettings&) = default;
};

enum class HapticIntensity { Normal, Prominent };

std::string_view to_string(HapticIntensity intensity);
std::optional<HapticIntensity> haptic_intensity_from_string(std::string_view text);

}  // namespace pacer
