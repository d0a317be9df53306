#pragma once

// Host side of the external generator protocol: newline-delimited JSON over a child
// process's stdin/stdout. One request is in flight at a time.
//
//   {"op":"info"}                    -> {"latent_dim":L,"n_rows":R,"n_cols":C,"supports_discriminator":b,"name":s}
//   {"op":"generate","z":[L]}        -> {"grid":[R*C values in [0,1], row-major]}
//   {"op":"discriminate","grid":[..]}-> {"score":s in (0,1)}
//   {"op":"shutdown"}                -> child exits 0
//
// Any violation fails the session; later calls throw without talking to the child.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "facies_qc/error.hpp"
#include "facies_qc/generator.hpp"
#include "facies_qc/grid.hpp"

namespace facies_qc {

inline constexpr std::chrono::milliseconds default_protocol_timeout{30000};

/// Splits "exec:<command line>" style specs on whitespace.
inline std::vector<std::string> split_command(const std::string& command) {
  std::istringstream in(command);
  std::vector<std::string> argv;
  for (std::string tok; in >> tok;) argv.push_back(tok);
  return argv;
}

/// A child process with line-oriented stdin/stdout. Stderr is inherited.
class ChildProcess {
 public:
  explicit ChildProcess(std::vector<std::string> argv) {
    if (argv.empty()) throw invalid_argument("external generator command is empty");
    int to_child[2];
    int from_child[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, to_child) != 0) {
      throw protocol_error(std::string("socketpair failed: ") + std::strerror(errno));
    }
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw protocol_error(std::string("pipe failed: ") + std::strerror(errno));
    }
    std::vector<char*> cargv;
    for (auto& a : argv) cargv.push_back(a.data());
    cargv.push_back(nullptr);

    pid_ = ::fork();
    if (pid_ < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      throw protocol_error(std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid_ == 0) {
      ::dup2(to_child[1], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::execvp(cargv[0], cargv.data());
      const char msg[] = "facies_qc: exec of external generator failed\n";
      [[maybe_unused]] auto n = ::write(STDERR_FILENO, msg, sizeof msg - 1);
      ::_exit(127);
    }
    ::close(to_child[1]);
    ::close(from_child[1]);
    write_fd_ = to_child[0];
    read_fd_ = from_child[0];
    command_ = argv.front();
  }

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  ~ChildProcess() { terminate(std::chrono::milliseconds(2000)); }

  void write_line(const std::string& line) {
    std::string buf = line + "\n";
    std::size_t off = 0;
    while (off < buf.size()) {
      ssize_t n = ::send(write_fd_, buf.data() + off, buf.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw protocol_error("external generator " + command_ + ": write failed: " + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw protocol_error("external generator " + command_ + ": timed out waiting for response");
      pollfd pfd{read_fd_, POLLIN, 0};
      int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw protocol_error(std::string("poll failed: ") + std::strerror(errno));
      }
      if (rc == 0) continue;
      char chunk[65536];
      ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw protocol_error("external generator " + command_ + ": read failed: " + std::strerror(errno));
      }
      if (n == 0) throw protocol_error("external generator " + command_ + ": closed its output unexpectedly");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  /// Closes stdin and waits for exit; returns the exit status, or -1 if it had to be killed.
  int terminate(std::chrono::milliseconds grace) {
    if (pid_ <= 0) return exit_status_;
    if (write_fd_ >= 0) {
      ::close(write_fd_);
      write_fd_ = -1;
    }
    const auto deadline = std::chrono::steady_clock::now() + grace;
    int status = 0;
    while (true) {
      pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_) {
        exit_status_ = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        break;
      }
      if (r < 0 && errno != EINTR) {
        exit_status_ = -1;
        break;
      }
      if (std::chrono::steady_clock::now() >= deadline) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
        exit_status_ = -1;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    pid_ = -1;
    if (read_fd_ >= 0) {
      ::close(read_fd_);
      read_fd_ = -1;
    }
    return exit_status_;
  }

 private:
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  int exit_status_ = -1;
  std::string buffer_;
  std::string command_;
};

/// A generator (and optionally a discriminator) living in a child process.
class ExternalGenerator final : public Generator {
 public:
  explicit ExternalGenerator(std::vector<std::string> argv,
                             std::chrono::milliseconds timeout = default_protocol_timeout)
      : child_(std::move(argv)), timeout_(timeout) {
    info_ = handshake();
  }

  ~ExternalGenerator() override {
    if (!shut_down_ && !failed_) {
      try {
        child_.write_line(R"({"op":"shutdown"})");
      } catch (...) {
      }
    }
  }

  GeneratorInfo info() const override { return info_; }

  GeneratorInfo handshake() {
    auto resp = request({{"op", "info"}});
    try {
      GeneratorInfo info;
      info.latent_dim = resp.at("latent_dim").get<std::size_t>();
      info.n_rows = resp.at("n_rows").get<std::size_t>();
      info.n_cols = resp.at("n_cols").get<std::size_t>();
      info.supports_discriminator = resp.at("supports_discriminator").get<bool>();
      info.name = resp.at("name").get<std::string>();
      if (info.latent_dim < 1 || info.n_rows < 1 || info.n_cols < 1) fail("info declares non-positive dimensions");
      return info;
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("malformed info response: ") + e.what());
    }
  }

  RealGrid generate(const LatentVector& z) override {
    if (z.size() != info_.latent_dim) {
      throw invalid_argument("latent dimension " + std::to_string(z.size()) + " does not match external generator's " +
                             std::to_string(info_.latent_dim));
    }
    nlohmann::json req{{"op", "generate"}, {"z", std::vector<double>(z.values().begin(), z.values().end())}};
    auto resp = request(req);
    auto it = resp.find("grid");
    if (it == resp.end() || !it->is_array()) fail("generate response lacks a \"grid\" array");
    if (it->size() != info_.n_rows * info_.n_cols) {
      fail("generate returned " + std::to_string(it->size()) + " values, expected " +
           std::to_string(info_.n_rows * info_.n_cols));
    }
    std::vector<double> cells;
    cells.reserve(it->size());
    for (const auto& v : *it) {
      if (!v.is_number()) fail("generate returned a non-numeric grid value");
      const double d = v.get<double>();
      if (!std::isfinite(d) || d < 0.0 || d > 1.0) fail("generate returned a value outside [0, 1]");
      cells.push_back(d);
    }
    return RealGrid(info_.shape(), std::move(cells));
  }

  double discriminate(const RealGrid& g) {
    if (!info_.supports_discriminator) throw invalid_argument("external generator declares no discriminator");
    if (g.shape() != info_.shape()) throw invalid_argument("discriminate: grid shape does not match generator");
    nlohmann::json req{{"op", "discriminate"}, {"grid", std::vector<double>(g.cells().begin(), g.cells().end())}};
    auto resp = request(req);
    auto it = resp.find("score");
    if (it == resp.end() || !it->is_number()) fail("discriminate response lacks a numeric \"score\"");
    const double s = it->get<double>();
    if (!(s > 0.0 && s < 1.0)) fail("discriminate score outside (0, 1)");
    return s;
  }

  /// Sends shutdown and returns the child's exit status.
  int shutdown() {
    if (shut_down_) return exit_status_;
    shut_down_ = true;
    try {
      child_.write_line(R"({"op":"shutdown"})");
    } catch (const protocol_error&) {
    }
    exit_status_ = child_.terminate(timeout_);
    return exit_status_;
  }

  bool failed() const { return failed_; }

 private:
  [[noreturn]] void fail(const std::string& what) {
    failed_ = true;
    throw protocol_error("external generator protocol violation: " + what);
  }

  nlohmann::json request(const nlohmann::json& req) {
    if (failed_) throw protocol_error("external generator session already failed");
    if (shut_down_) throw protocol_error("external generator session is shut down");
    std::string line;
    try {
      child_.write_line(req.dump());
      line = child_.read_line(timeout_);
    } catch (const protocol_error& e) {
      failed_ = true;
      throw;
    }
    nlohmann::json resp;
    try {
      resp = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      fail("malformed JSON line: " + line.substr(0, 120));
    }
    if (!resp.is_object()) fail("response is not a JSON object");
    if (auto err = resp.find("error"); err != resp.end()) {
      fail("child reported error: " + (err->is_string() ? err->get<std::string>() : err->dump()));
    }
    return resp;
  }

  ChildProcess child_;
  std::chrono::milliseconds timeout_;
  GeneratorInfo info_;
  bool failed_ = false;
  bool shut_down_ = false;
  int exit_status_ = -1;
};

class ExternalDiscriminator final : public Discriminator {
 public:
  explicit ExternalDiscriminator(ExternalGenerator& gen) : gen_(gen) {}
  double score(const RealGrid& g) override { return gen_.discriminate(g); }
  std::string name() const override { return "external:" + gen_.info().name; }

 private:
  ExternalGenerator& gen_;
};

}  // namespace facies_qc
