#include "sygra/smt_process.hpp"

#include <cctype>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "sygra/error.hpp"

namespace sygra {

namespace {

void ignore_sigpipe() {
    static const bool done = [] {
        std::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)done;
}

void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
}

}  // namespace

std::vector<std::string> split_command(const std::string& command) {
    std::vector<std::string> out;
    std::string cur;
    bool have = false;
    char quote = 0;
    for (char c : command) {
        if (quote) {
            if (c == quote) quote = 0;
            else cur += c;
        } else if (c == '\'' || c == '"') {
            quote = c;
            have = true;
        } else if (c == ' ' || c == '\t' || c == '\n') {
            if (have) out.push_back(cur);
            cur.clear();
            have = false;
        } else {
            cur += c;
            have = true;
        }
    }
    if (have) out.push_back(cur);
    return out;
}

SmtProcess::SmtProcess(const std::vector<std::string>& argv) {
    if (argv.empty()) throw SolverError(SolverError::Kind::Launch, "empty solver command");
    ignore_sigpipe();

    int to_child[2], from_child[2], status[2];
    if (::pipe(to_child) != 0) throw SolverError(SolverError::Kind::Launch, std::strerror(errno));
    if (::pipe(from_child) != 0) {
        ::close(to_child[0]);
        ::close(to_child[1]);
        throw SolverError(SolverError::Kind::Launch, std::strerror(errno));
    }
    if (::pipe2(status, O_CLOEXEC) != 0) {
        for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
        throw SolverError(SolverError::Kind::Launch, std::strerror(errno));
    }

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_ = ::fork();
    if (pid_ < 0) {
        for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1], status[0], status[1]}) ::close(fd);
        throw SolverError(SolverError::Kind::Launch, std::strerror(errno));
    }
    if (pid_ == 0) {
        ::dup2(to_child[0], STDIN_FILENO);
        ::dup2(from_child[1], STDOUT_FILENO);
        int devnull = ::open("/dev/null", O_WRONLY);
        if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
        for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1], status[0]}) ::close(fd);
        ::execvp(args[0], args.data());
        int err = errno;
        [[maybe_unused]] auto n = ::write(status[1], &err, sizeof err);
        ::_exit(127);
    }

    ::close(to_child[0]);
    ::close(from_child[1]);
    ::close(status[1]);
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];

    int err = 0;
    ssize_t n;
    do {
        n = ::read(status[0], &err, sizeof err);
    } while (n < 0 && errno == EINTR);
    ::close(status[0]);
    if (n > 0) {
        kill();
        throw SolverError(SolverError::Kind::Launch, "cannot execute '" + argv[0] + "': " + std::strerror(err));
    }
}

SmtProcess::~SmtProcess() { kill(); }

void SmtProcess::kill() {
    close_fd(in_fd_);
    close_fd(out_fd_);
    if (pid_ > 0) {
        ::kill(pid_, SIGKILL);
        int st;
        ::waitpid(pid_, &st, 0);
        pid_ = -1;
    }
}

void SmtProcess::send(std::string_view text) {
    if (in_fd_ < 0) throw SolverError(SolverError::Kind::Protocol, "solver process not running");
    while (!text.empty()) {
        ssize_t n = ::write(in_fd_, text.data(), text.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            throw SolverError(SolverError::Kind::Protocol, std::string("write to solver failed: ") + std::strerror(errno));
        }
        text.remove_prefix(static_cast<std::size_t>(n));
    }
}

// Length of the first complete response in the buffer, including leading
// whitespace.
std::optional<std::size_t> SmtProcess::complete_prefix() const {
    std::size_t i = 0;
    while (i < buffer_.size() && std::isspace(static_cast<unsigned char>(buffer_[i]))) ++i;
    if (i == buffer_.size()) return std::nullopt;
    if (buffer_[i] != '(') {
        auto nl = buffer_.find('\n', i);
        if (nl == std::string::npos) return std::nullopt;
        return nl + 1;
    }
    int depth = 0;
    bool in_string = false, in_bar = false;
    for (; i < buffer_.size(); ++i) {
        char c = buffer_[i];
        if (in_string) {
            if (c == '"') in_string = false;
        } else if (in_bar) {
            if (c == '|') in_bar = false;
        } else if (c == '"') {
            in_string = true;
        } else if (c == '|') {
            in_bar = true;
        } else if (c == '(') {
            ++depth;
        } else if (c == ')') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::nullopt;
}

std::optional<std::string> SmtProcess::read_response(int timeout_ms) {
    if (out_fd_ < 0) throw SolverError(SolverError::Kind::Protocol, "solver process not running");
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    for (;;) {
        if (auto len = complete_prefix()) {
            std::string resp = buffer_.substr(0, *len);
            buffer_.erase(0, *len);
            auto b = resp.find_first_not_of(" \t\r\n");
            auto e = resp.find_last_not_of(" \t\r\n");
            return resp.substr(b, e - b + 1);
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return std::nullopt;
        pollfd p{out_fd_, POLLIN, 0};
        int r = ::poll(&p, 1, static_cast<int>(left.count()));
        if (r < 0) {
            if (errno == EINTR) continue;
            throw SolverError(SolverError::Kind::Protocol, std::string("poll failed: ") + std::strerror(errno));
        }
        if (r == 0) return std::nullopt;
        char chunk[4096];
        ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw SolverError(SolverError::Kind::Protocol, std::string("read failed: ") + std::strerror(errno));
        }
        if (n == 0) throw SolverError(SolverError::Kind::Protocol, "solver closed its output");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

}  // namespace sygra
