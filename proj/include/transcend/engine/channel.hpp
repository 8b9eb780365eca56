#pragma once

// Newline-delimited text channels: a child process over pipes, or an
// in-process handler for tests.

#include <transcend/error.hpp>

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace transcend::engine {

enum class ReadStatus { Line, Timeout, Closed };

struct ReadResult {
    ReadStatus status = ReadStatus::Closed;
    std::string line;
};

class LineChannel {
public:
    virtual ~LineChannel() = default;

    /// Writes one line; the newline is appended. Returns false if the peer is gone.
    virtual bool send(std::string_view line) = 0;
    virtual ReadResult receive(std::chrono::milliseconds timeout) = 0;
};

/// Runs a handler on every sent line and queues its replies. A receive with
/// nothing queued times out immediately.
class FunctionChannel final : public LineChannel {
public:
    using Handler = std::function<std::vector<std::string>(std::string_view)>;

    explicit FunctionChannel(Handler handler, std::function<bool()> peer_gone = {})
        : handler_(std::move(handler)), peer_gone_(std::move(peer_gone))
    {
    }

    bool send(std::string_view line) override
    {
        if (is_closed())
            return false;
        sent_.emplace_back(line);
        for (auto& reply : handler_(line))
            queue_.push_back(std::move(reply));
        return true;
    }

    ReadResult receive(std::chrono::milliseconds) override
    {
        if (!queue_.empty()) {
            ReadResult r{ReadStatus::Line, std::move(queue_.front())};
            queue_.pop_front();
            return r;
        }
        return {is_closed() ? ReadStatus::Closed : ReadStatus::Timeout, {}};
    }

    void close() { closed_ = true; }
    bool is_closed() const { return closed_ || (peer_gone_ && peer_gone_()); }
    const std::vector<std::string>& sent() const noexcept { return sent_; }

private:
    Handler handler_;
    std::function<bool()> peer_gone_;
    std::deque<std::string> queue_;
    std::vector<std::string> sent_;
    bool closed_ = false;
};

/// Splits a command line on whitespace. No quoting.
inline std::vector<std::string> split_command(std::string_view cmd)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < cmd.size()) {
        while (i < cmd.size() && (cmd[i] == ' ' || cmd[i] == '\t'))
            ++i;
        std::size_t j = i;
        while (j < cmd.size() && cmd[j] != ' ' && cmd[j] != '\t')
            ++j;
        if (j > i)
            out.emplace_back(cmd.substr(i, j - i));
        i = j;
    }
    return out;
}

/// A child process with stdin/stdout connected to pipes.
class ProcessChannel final : public LineChannel {
public:
    explicit ProcessChannel(const std::vector<std::string>& argv)
    {
        if (argv.empty())
            throw Error(Errc::ConfigError, "empty command");
        std::signal(SIGPIPE, SIG_IGN);
        int in_pipe[2];
        int out_pipe[2];
        if (pipe(in_pipe) != 0)
            throw Error(Errc::EngineCrashed, std::string("pipe: ") + std::strerror(errno));
        if (pipe(out_pipe) != 0) {
            ::close(in_pipe[0]);
            ::close(in_pipe[1]);
            throw Error(Errc::EngineCrashed, std::string("pipe: ") + std::strerror(errno));
        }
        // Exec failures are reported through a close-on-exec pipe.
        int err_pipe[2];
        if (pipe2(err_pipe, O_CLOEXEC) != 0)
            throw Error(Errc::EngineCrashed, std::string("pipe: ") + std::strerror(errno));
        pid_ = fork();
        if (pid_ < 0)
            throw Error(Errc::EngineCrashed, std::string("fork: ") + std::strerror(errno));
        if (pid_ == 0) {
            dup2(in_pipe[0], STDIN_FILENO);
            dup2(out_pipe[1], STDOUT_FILENO);
            ::close(in_pipe[0]);
            ::close(in_pipe[1]);
            ::close(out_pipe[0]);
            ::close(out_pipe[1]);
            ::close(err_pipe[0]);
            std::vector<char*> args;
            for (const auto& a : argv)
                args.push_back(const_cast<char*>(a.c_str()));
            args.push_back(nullptr);
            execvp(args[0], args.data());
            const int e = errno;
            [[maybe_unused]] auto n = write(err_pipe[1], &e, sizeof e);
            _exit(127);
        }
        ::close(in_pipe[0]);
        ::close(out_pipe[1]);
        ::close(err_pipe[1]);
        to_child_ = in_pipe[1];
        from_child_ = out_pipe[0];
        int e = 0;
        const auto n = read(err_pipe[0], &e, sizeof e);
        ::close(err_pipe[0]);
        if (n == static_cast<ssize_t>(sizeof e)) {
            shutdown();
            throw Error(Errc::EngineCrashed, "cannot execute " + argv[0] + ": " + std::strerror(e));
        }
    }

    ProcessChannel(const ProcessChannel&) = delete;
    ProcessChannel& operator=(const ProcessChannel&) = delete;

    ~ProcessChannel() override { shutdown(); }

    bool send(std::string_view line) override
    {
        if (to_child_ < 0)
            return false;
        std::string buf(line);
        buf += '\n';
        std::size_t off = 0;
        while (off < buf.size()) {
            const auto n = ::write(to_child_, buf.data() + off, buf.size() - off);
            if (n < 0) {
                if (errno == EINTR)
                    continue;
                return false;
            }
            off += static_cast<std::size_t>(n);
        }
        return true;
    }

    ReadResult receive(std::chrono::milliseconds timeout) override
    {
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        while (true) {
            if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
                std::string line = buffer_.substr(0, pos);
                buffer_.erase(0, pos + 1);
                if (!line.empty() && line.back() == '\r')
                    line.pop_back();
                return {ReadStatus::Line, std::move(line)};
            }
            if (eof_)
                return {ReadStatus::Closed, {}};
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0)
                return {ReadStatus::Timeout, {}};
            pollfd p{from_child_, POLLIN, 0};
            const int rc = poll(&p, 1, static_cast<int>(left.count()));
            if (rc < 0 && errno == EINTR)
                continue;
            if (rc == 0)
                return {ReadStatus::Timeout, {}};
            char chunk[4096];
            const auto n = ::read(from_child_, chunk, sizeof chunk);
            if (n < 0 && errno == EINTR)
                continue;
            if (n <= 0)
                eof_ = true;
            else
                buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    pid_t pid() const noexcept { return pid_; }

private:
    void shutdown()
    {
        if (to_child_ >= 0)
            ::close(to_child_);
        if (from_child_ >= 0)
            ::close(from_child_);
        to_child_ = from_child_ = -1;
        if (pid_ > 0) {
            // Give the child a moment to exit on EOF before killing it.
            for (int i = 0; i < 50; ++i) {
                if (waitpid(pid_, nullptr, WNOHANG) == pid_) {
                    pid_ = -1;
                    return;
                }
                usleep(2000);
            }
            kill(pid_, SIGKILL);
            waitpid(pid_, nullptr, 0);
            pid_ = -1;
        }
    }

    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    bool eof_ = false;
};

} // namespace transcend::engine
