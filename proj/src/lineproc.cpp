#include "morphobpe/lineproc.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "morphobpe/errors.hpp"

namespace morphobpe {

namespace {

void ignore_sigpipe_once() {
    static const bool done = [] {
        ::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)done;
}

}  // namespace

LineProcess::LineProcess(const std::string& command) {
    ignore_sigpipe_once();

    int in_pipe[2];   // parent -> child
    int out_pipe[2];  // child -> parent
    int err_pipe[2];  // exec status, CLOEXEC
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0) {
        throw ConfigError("external command: pipe() failed: " + std::string(std::strerror(errno)));
    }
    ::fcntl(err_pipe[1], F_SETFD, FD_CLOEXEC);

    const pid_t pid = ::fork();
    if (pid < 0) {
        throw ConfigError("external command: fork() failed: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::close(err_pipe[0]);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        const int err = errno;
        ssize_t ignored = ::write(err_pipe[1], &err, sizeof(err));
        (void)ignored;
        ::_exit(127);
    }

    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);

    int exec_errno = 0;
    const ssize_t n = ::read(err_pipe[0], &exec_errno, sizeof(exec_errno));
    ::close(err_pipe[0]);
    if (n > 0) {
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        int status = 0;
        ::waitpid(pid, &status, 0);
        throw ConfigError("external command failed to start: \"" + command +
                          "\": " + std::string(std::strerror(exec_errno)));
    }

    child_pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

LineProcess::~LineProcess() {
    if (to_child_ >= 0) ::close(to_child_);
    if (from_child_ >= 0) ::close(from_child_);
    if (child_pid_ > 0) {
        int status = 0;
        ::waitpid(child_pid_, &status, 0);
    }
}

bool LineProcess::write_all(const char* data, std::size_t len) {
    while (len > 0) {
        const ssize_t n = ::write(to_child_, data, len);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        data += n;
        len -= static_cast<std::size_t>(n);
    }
    return true;
}

std::optional<std::string> LineProcess::read_line() {
    for (;;) {
        const auto nl = buf_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buf_.substr(0, nl);
            buf_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        char chunk[4096];
        const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
        if (n < 0) {
            if (errno == EINTR) continue;
            return std::nullopt;
        }
        if (n == 0) return std::nullopt;  // child closed stdout
        buf_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::optional<std::string> LineProcess::exchange(const std::string& line) {
    std::lock_guard<std::mutex> lock(mu_);
    if (broken_) return std::nullopt;
    std::string msg = line;
    msg.push_back('\n');
    if (!write_all(msg.data(), msg.size())) {
        broken_ = true;
        return std::nullopt;
    }
    auto reply = read_line();
    if (!reply) broken_ = true;
    return reply;
}

}  // namespace morphobpe
