#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>

#include "synthcheck/error.hpp"
#include "synthcheck/generators.hpp"
#include "synthcheck/io.hpp"

extern char** environ;

namespace synthcheck {

namespace {

class Pipe {
 public:
  Pipe() {
    if (::pipe2(fd_, O_CLOEXEC) != 0) throw GeneratorError(std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;

  int read_end() const { return fd_[0]; }
  int write_end() const { return fd_[1]; }
  void close_read() { reset(fd_[0]); }
  void close_write() { reset(fd_[1]); }

 private:
  static void reset(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
  int fd_[2] = {-1, -1};
};

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "synthcheck-XXXXXX").string();
    if (!::mkdtemp(pattern.data())) throw GeneratorError(std::string("mkdtemp: ") + std::strerror(errno));
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string tail(const std::string& text, std::size_t n = 2000) {
  return text.size() <= n ? text : "..." + text.substr(text.size() - n);
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          std::chrono::milliseconds timeout) {
  if (argv.empty()) throw GeneratorError("empty command");
  Pipe in;
  Pipe out;
  Pipe err;

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in.read_end(), STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out.write_end(), STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err.write_end(), STDERR_FILENO);
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, args[0], &actions, &attr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) throw GeneratorError("cannot start '" + argv[0] + "': " + std::strerror(rc));

  in.close_read();
  out.close_write();
  err.close_write();

  // Feed stdin while draining stdout/stderr so neither side blocks.
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  ProcessResult result;
  std::size_t written = 0;
  if (input.empty()) in.close_write();
  ::fcntl(in.write_end(), F_SETFL, O_NONBLOCK);
  bool out_open = true;
  bool err_open = true;
  char buf[65536];
  while (out_open || err_open) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
      throw GeneratorTimeout("generator '" + argv[0] + "' exceeded the timeout of " +
                             std::to_string(timeout.count()) + " ms");
    }
    pollfd fds[3];
    nfds_t nfds = 0;
    int idx_out = -1, idx_err = -1, idx_in = -1;
    if (out_open) {
      idx_out = static_cast<int>(nfds);
      fds[nfds++] = {out.read_end(), POLLIN, 0};
    }
    if (err_open) {
      idx_err = static_cast<int>(nfds);
      fds[nfds++] = {err.read_end(), POLLIN, 0};
    }
    if (in.write_end() >= 0) {
      idx_in = static_cast<int>(nfds);
      fds[nfds++] = {in.write_end(), POLLOUT, 0};
    }
    const auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    const int ready = ::poll(fds, nfds, static_cast<int>(std::min<long long>(wait_ms + 1, 1000)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw GeneratorError(std::string("poll: ") + std::strerror(errno));
    }
    if (idx_in >= 0 && (fds[idx_in].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t n = ::write(in.write_end(), input.data() + written, input.size() - written);
      if (n > 0) written += static_cast<std::size_t>(n);
      if (n < 0 && errno != EAGAIN && errno != EINTR) written = input.size();  // reader went away
      if (written >= input.size()) in.close_write();
    }
    const auto drain = [&](int idx, int fd, std::string& sink, bool& open) {
      if (idx < 0 || !(fds[idx].revents & (POLLIN | POLLHUP | POLLERR))) return;
      const ssize_t n = ::read(fd, buf, sizeof buf);
      if (n > 0) {
        sink.append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || (errno != EINTR && errno != EAGAIN)) {
        open = false;
      }
    };
    drain(idx_out, out.read_end(), result.out, out_open);
    drain(idx_err, err.read_end(), result.err, err_open);
  }
  in.close_write();

  int status = 0;
  for (;;) {
    const pid_t w = ::waitpid(pid, &status, WNOHANG);
    if (w == pid) break;
    if (w < 0 && errno != EINTR) throw GeneratorError(std::string("waitpid: ") + std::strerror(errno));
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
      throw GeneratorTimeout("generator '" + argv[0] + "' exceeded the timeout of " +
                             std::to_string(timeout.count()) + " ms");
    }
    ::usleep(1000);
  }
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return result;
}

nlohmann::json ProtocolRequest::to_json() const {
  return {{"command", command},         {"train_csv", train_csv},     {"schema_json", schema_json},
          {"hyperparameters", hyperparameters}, {"n_samples", n_samples}, {"train_seed", train_seed},
          {"sample_seed", sample_seed}, {"out_csv", out_csv}};
}

ProtocolResponse ProtocolResponse::parse(const std::string& text) {
  // The response is the last non-empty line, so stray log lines before it
  // are tolerated.
  std::string line;
  std::size_t end = text.find_last_not_of(" \t\r\n");
  if (end == std::string::npos) throw GeneratorError("malformed generator response: empty output");
  const std::size_t start = text.rfind('\n', end);
  line = text.substr(start == std::string::npos ? 0 : start + 1, end + 1 - (start == std::string::npos ? 0 : start + 1));

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw GeneratorError(std::string("malformed generator response: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("status") || !doc.at("status").is_string()) {
    throw GeneratorError("malformed generator response: missing string field 'status'");
  }
  ProtocolResponse r;
  r.status = doc.at("status").get<std::string>();
  if (r.status != "ok" && r.status != "error") {
    throw GeneratorError("malformed generator response: status '" + r.status + "'");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key == "status") continue;
    if (key != "out_csv" && key != "message") {
      throw GeneratorError("malformed generator response: unknown field '" + key + "'");
    }
    if (value.is_null()) continue;
    if (!value.is_string()) throw GeneratorError("malformed generator response: '" + key + "' must be a string");
    (key == "out_csv" ? r.out_csv : r.message) = value.get<std::string>();
  }
  return r;
}

ExternalGenerator::ExternalGenerator(std::vector<std::string> command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
  if (command_.empty()) throw ConfigError("external generator needs a command");
  const auto& exe = command_.front();
  if (exe.find('/') != std::string::npos && ::access(exe.c_str(), X_OK) != 0) {
    throw ConfigError("external generator '" + exe + "' is not executable");
  }
  if (timeout_.count() <= 0) throw ConfigError("generator timeout must be positive");
}

std::string ExternalGenerator::name() const {
  std::string s = "exec:";
  for (std::size_t i = 0; i < command_.size(); ++i) s += (i ? " " : "") + command_[i];
  return s;
}

Dataset ExternalGenerator::call(const ProtocolRequest& req, const Schema& schema) const {
  if (req.n_samples < 1) throw ConfigError("n_samples must be >= 1");
  const auto result = run_process(command_, req.to_json().dump() + "\n", timeout_);
  std::optional<ProtocolResponse> response;
  std::string parse_error;
  try {
    response = ProtocolResponse::parse(result.out);
  } catch (const GeneratorError& e) {
    parse_error = e.what();
  }
  if (result.exit_code != 0) {
    std::string msg = "generator exited with status " + std::to_string(result.exit_code);
    if (response && response->message) msg += ": " + *response->message;
    if (!result.err.empty()) msg += "\n" + tail(result.err);
    throw GeneratorError(msg);
  }
  if (!response) throw GeneratorError(parse_error);
  if (response->status != "ok") {
    throw GeneratorError("generator reported an error: " + response->message.value_or("(no message)"));
  }
  const std::string path = response->out_csv.value_or(req.out_csv);
  if (!std::filesystem::exists(path)) throw InvalidOutput("generator output file '" + path + "' does not exist");
  Dataset syn;
  try {
    syn = load_csv(path, schema);
  } catch (const DataError& e) {
    throw InvalidOutput(std::string("generator output: ") + e.what());
  }
  check_generator_output(syn, schema, req.n_samples);
  return syn;
}

Dataset ExternalGenerator::fit_sample(const Dataset& train, const nlohmann::json& hyperparameters, std::size_t n,
                                      std::uint64_t train_seed, std::uint64_t sample_seed) {
  TempDir dir;
  ProtocolRequest req;
  req.train_csv = (dir.path() / "train.csv").string();
  req.schema_json = (dir.path() / "schema.json").string();
  req.out_csv = (dir.path() / "out.csv").string();
  req.hyperparameters = hyperparameters.is_null() ? nlohmann::json::object() : hyperparameters;
  req.n_samples = n;
  req.train_seed = train_seed;
  req.sample_seed = sample_seed;
  save_csv(req.train_csv, train);
  {
    std::ofstream schema_out(req.schema_json);
    schema_out << schema_to_json(SchemaDocument{train.schema(), std::nullopt});
  }
  return call(req, train.schema());
}

}  // namespace synthcheck
