#include "dpnsound/errors.hpp"
#include "dpnsound/smt.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <mutex>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace dpnsound {

namespace {

constexpr std::string_view kSentinel = "@@end@@";

void ignore_sigpipe()
{
    static std::once_flag once;
    std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

bool write_all(int fd, std::string_view data)
{
    while (!data.empty()) {
        ssize_t n = ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR)
                continue;
            return false;
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
}

} // namespace

SolverProcess::SolverProcess(std::string executable, std::vector<std::string> args, std::vector<std::string> prelude)
    : executable_(std::move(executable)), args_(std::move(args)), prelude_(std::move(prelude))
{
    ignore_sigpipe();
    start();
}

SolverProcess::~SolverProcess()
{
    stop();
}

void SolverProcess::start()
{
    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0)
        throw SolverUnavailable(std::string("pipe: ") + std::strerror(errno));
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw SolverUnavailable(std::string("pipe: ") + std::strerror(errno));
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], 0);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], 1);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], 2);

    std::vector<std::string> argv_store{executable_};
    argv_store.insert(argv_store.end(), args_.begin(), args_.end());
    std::vector<char*> argv;
    for (auto& a : argv_store)
        argv.push_back(a.data());
    argv.push_back(nullptr);

    pid_t pid = -1;
    int rc = ::posix_spawnp(&pid, executable_.c_str(), &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    if (rc != 0) {
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        throw SolverUnavailable("cannot start solver '" + executable_ + "': " + std::strerror(rc));
    }
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    pending_.clear();

    std::string init;
    for (const auto& cmd : prelude_)
        init += cmd + "\n";
    std::optional<std::string> reply;
    try {
        reply = exchange(init, std::chrono::milliseconds(10000));
    } catch (const SolverFailure& e) {
        throw SolverUnavailable(e.what());
    }
    if (!reply || reply->find("(error") != std::string::npos) {
        stop();
        throw SolverUnavailable("solver '" + executable_ + "' rejected the session setup"
                                + (reply ? ": " + *reply : std::string()));
    }
}

void SolverProcess::stop()
{
    if (to_child_ >= 0)
        ::close(to_child_);
    if (from_child_ >= 0)
        ::close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
        ::kill(pid_, SIGKILL);
        int status = 0;
        while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
        }
    }
    pid_ = -1;
    pending_.clear();
}

void SolverProcess::restart()
{
    stop();
    start();
}

std::optional<std::string> SolverProcess::exchange(const std::string& commands, std::chrono::milliseconds timeout)
{
    if (pid_ < 0)
        start();
    std::string payload = commands;
    payload += "\n(echo \"";
    payload += kSentinel;
    payload += "\")\n";
    if (!write_all(to_child_, payload)) {
        stop();
        throw SolverFailure("solver process '" + executable_ + "' closed its input");
    }

    auto deadline = std::chrono::steady_clock::now() + timeout;
    char buf[65536];
    for (;;) {
        if (auto pos = pending_.find(kSentinel); pos != std::string::npos) {
            std::string out = pending_.substr(0, pos);
            std::size_t end = pos + kSentinel.size();
            if (end < pending_.size() && pending_[end] == '\n')
                ++end;
            pending_.erase(0, end);
            return out;
        }
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            stop(); // the next exchange starts a fresh session
            return std::nullopt;
        }
        pollfd pfd{from_child_, POLLIN, 0};
        int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining.count(), 1000 * 60)));
        if (rc < 0) {
            if (errno == EINTR)
                continue;
            throw SolverFailure(std::string("poll: ") + std::strerror(errno));
        }
        if (rc == 0)
            continue;
        ssize_t n = ::read(from_child_, buf, sizeof buf);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw SolverFailure(std::string("read: ") + std::strerror(errno));
        }
        if (n == 0) {
            std::string output = pending_;
            stop();
            throw SolverFailure("solver process '" + executable_ + "' exited" + (output.empty() ? "" : ": " + output));
        }
        pending_.append(buf, static_cast<std::size_t>(n));
    }
}

} // namespace dpnsound
