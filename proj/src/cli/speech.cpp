#include <spawn.h>
#include <sys/wait.h>

#include <sstream>

#include "pacer/cli.hpp"
#include "pacer/error.hpp"

extern char** environ;

namespace pacer::cli {

namespace {

class SpeechCommandSink final : public AlertSink {
public:
  explicit SpeechCommandSink(std::string command) {
    std::istringstream in(command);
    for (std::string word; in >> word;) argv_.push_back(word);
    if (argv_.empty()) throw Error(ErrorCode::InvalidConfig, "--speech-cmd is empty");
  }

  Channel channel() const override { return Channel::Speech; }

  void deliver(const AlertEvent& event) override {
    const auto* speech = std::get_if<SpeechPayload>(&event.payload);
    if (!speech) return;
    std::vector<std::string> args = argv_;
    args.push_back(speech->text);
    std::vector<char*> raw;
    for (auto& a : args) raw.push_back(a.data());
    raw.push_back(nullptr);
    pid_t pid = 0;
    if (const int rc = ::posix_spawnp(&pid, raw[0], nullptr, nullptr, raw.data(), environ); rc != 0) {
      throw std::runtime_error("cannot run speech command " + argv_[0]);
    }
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
  }

private:
  std::vector<std::string> argv_;
};

}  // namespace

std::shared_ptr<AlertSink> make_speech_command_sink(std::string command) {
  return std::make_shared<SpeechCommandSink>(std::move(command));
}

}  // namespace pacer::cli
