#include "pacer/modality_settings.hpp"

namespace pacer {

std::string_view to_string(Channel channel) {
  switch (channel) {
    case Channel::Visual: return "visual";
    case Channel::Auditory: return "auditory";
    case Channel::Speech: return "speech";
    case Channel::Haptic: return "haptic";
  }
  return "unknown";
}

std::optional<Channel> channel_from_string(std::string_view text) {
  for (Channel c : kAllChannels) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

bool ModalitySettings::enabled(Channel channel) const noexcept {
  switch (channel) {
    case Channel::Visual: return visual;
    case Channel::Auditory: return auditory;
    case Channel::Speech: return speech;
    case Channel::Haptic: return haptic;
  }
  return false;
}

void ModalitySettings::set(Channel channel, bool on) noexcept {
  switch (channel) {
    case Channel::Visual: visual = on; break;
    case Channel::Auditory: auditory = on; break;
    case Channel::Speech: speech = on; break;
    case Channel::Haptic: haptic = on; break;
  }
}

std::string_view to_string(HapticIntensity intensity) {
  return intensity == HapticIntensity::Prominent ? "prominent" : "normal";
}

std::optional<HapticIntensity> haptic_intensity_from_string(std::string_view text) {
  if (text == "normal") return HapticIntensity::Normal;
  if (text == "prominent") return HapticIntensity::Prominent;
  return std::nullopt;
}

}  // namespace pacer
