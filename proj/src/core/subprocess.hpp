#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <sys/types.h>

namespace cbo {

// A child process whose stdin/stdout are line-oriented pipes. stderr is
// inherited. Not copyable; the destructor closes stdin and reaps the child.
class ChildProcess {
 public:
  ChildProcess() = default;
  ~ChildProcess();
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  /// Returns false (with errno text in `error`) if the program could not be
  /// started.
  bool spawn(const std::vector<std::string>& argv, std::string& error);
  bool running() const { return pid_ > 0; }

  /// False if the pipe is closed (child gone).
  bool write_line(const std::string& line);

  enum class ReadStatus { kLine, kTimeout, kEof };
  ReadStatus read_line(std::string& line, std::chrono::milliseconds timeout);

  /// Close stdin and wait up to `grace` for a clean exit, then SIGKILL.
  /// Returns the wait status, if the child was reaped.
  std::optional<int> shutdown(std::chrono::milliseconds grace);
  void kill();

 private:
  void close_fds();

  pid_t pid_ = -1;
  int in_fd_ = -1;   // our end of the child's stdin
  int out_fd_ = -1;  // our end of the child's stdout
  std::string buffer_;
};

}  // namespace cbo
