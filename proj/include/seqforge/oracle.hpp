#pragma once

// Batch scoring of sequences by a black-box oracle: a deterministic motif-count
// toy oracle, a subprocess oracle speaking a newline-delimited protocol, and a
// per-run score cache.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <csignal>
#include <fcntl.h>
#include <poll.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>
#include <cerrno>
#include <cstring>
#include <thread>

#include "seqforge/archive.hpp"
#include "seqforge/error.hpp"
#include "seqforge/seqdiff.hpp"

namespace seqforge {

struct OracleRequest {
    std::uint64_t id = 0;
    std::string sequence;
};

struct OracleScore {
    std::uint64_t id = 0;
    double prediction = 0.0;
    friend bool operator==(const OracleScore&, const OracleScore&) = default;
};

class Oracle {
public:
    virtual ~Oracle() = default;
    /// One score per request, any order.
    virtual std::vector<OracleScore> score(std::span<const OracleRequest> batch) = 0;
    virtual std::string identity() const = 0;
};

/// Scores a batch and returns the scores in request order. Checks that the
/// response covers exactly the requested ids with finite values in [0,1].
inline std::vector<OracleScore> batch_eval(Oracle& oracle, std::span<const OracleRequest> batch) {
    if (batch.empty()) return {};
    std::unordered_map<std::uint64_t, std::size_t> slot;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (!slot.emplace(batch[i].id, i).second)
            throw OracleProtocolError("duplicate request id " + std::to_string(batch[i].id));
    }
    std::vector<OracleScore> raw = oracle.score(batch);
    if (raw.size() != batch.size()) {
        throw OracleProtocolError("oracle returned " + std::to_string(raw.size()) + " scores for " +
                                  std::to_string(batch.size()) + " requests");
    }
    std::vector<OracleScore> out(batch.size());
    std::vector<bool> filled(batch.size(), false);
    for (const OracleScore& s : raw) {
        auto it = slot.find(s.id);
        if (it == slot.end()) throw OracleProtocolError("unexpected id " + std::to_string(s.id));
        if (filled[it->second]) throw OracleProtocolError("id answered twice " + std::to_string(s.id));
        if (!std::isfinite(s.prediction) || s.prediction < 0.0 || s.prediction > 1.0) {
            throw OracleProtocolError("score out of range for id " + std::to_string(s.id) + ": " +
                                      format_double(s.prediction));
        }
        filled[it->second] = true;
        out[it->second] = s;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Toy oracle

/// Overlapping occurrences of `motif` in `seq`.
inline std::size_t count_occurrences(std::string_view motif, std::string_view seq) noexcept {
    if (motif.empty() || motif.size() > seq.size()) return 0;
    std::size_t n = 0;
    for (auto pos = seq.find(motif); pos != std::string_view::npos; pos = seq.find(motif, pos + 1)) ++n;
    return n;
}

struct ToyOracleConfig {
    std::map<std::string, double> motifs{
        {"GCATG", 0.8}, {"TTTCT", -0.7}, {"GAAGAA", 0.5}, {"CTCTCT", -0.4}};
    double bias = 0.0;

    void check() const {
        for (const auto& [m, w] : motifs) {
            if (m.empty()) throw ConfigError("empty motif in toy oracle table");
            try {
                require_alphabet(m);
            } catch (const BadAlphabet& e) {
                throw ConfigError(std::string("toy oracle motif: ") + e.what());
            }
            if (!std::isfinite(w)) throw ConfigError("non-finite motif weight");
        }
    }
};

inline double logistic(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

/// logistic(bias + sum_m weight_m * occurrences(m, seq))
inline double toy_score(std::string_view seq, const ToyOracleConfig& cfg) {
    if (seq.empty()) throw BadAlphabet("empty sequence");
    require_alphabet(seq);
    double x = cfg.bias;
    for (const auto& [motif, weight] : cfg.motifs) {
        x += weight * static_cast<double>(count_occurrences(motif, seq));
    }
    return logistic(x);
}

class ToyOracle final : public Oracle {
public:
    explicit ToyOracle(ToyOracleConfig cfg = {}) : cfg_(std::move(cfg)) { cfg_.check(); }

    std::vector<OracleScore> score(std::span<const OracleRequest> batch) override {
        std::vector<OracleScore> out;
        out.reserve(batch.size());
        for (const OracleRequest& r : batch) out.push_back({r.id, toy_score(r.sequence, cfg_)});
        return out;
    }

    std::string identity() const override { return "toy"; }
    const ToyOracleConfig& config() const noexcept { return cfg_; }

private:
    ToyOracleConfig cfg_;
};

// ---------------------------------------------------------------------------
// Subprocess oracle
//
// Wire protocol, one message per line:
//   child  -> "READY"                        once, at start
//   parent -> "EVAL\t<id>\t<sequence>" x k, then "FLUSH"
//   child  -> "<id>\t<score>" x k (any order), then "DONE"
//   parent -> "QUIT"                         at shutdown
// A child may answer "ERROR\t<id>\t<message>" instead and exit.

class SubprocessOracle final : public Oracle {
public:
    explicit SubprocessOracle(std::string command) : command_(std::move(command)) {
        std::signal(SIGPIPE, SIG_IGN);
        int in_pipe[2], out_pipe[2];
        if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw OracleProtocolError(sys_error("pipe"));
        if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
            ::close(in_pipe[0]);
            ::close(in_pipe[1]);
            throw OracleProtocolError(sys_error("pipe"));
        }
        pid_ = ::fork();
        if (pid_ < 0) {
            for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
            throw OracleProtocolError(sys_error("fork"));
        }
        if (pid_ == 0) {
            ::dup2(in_pipe[0], STDIN_FILENO);
            ::dup2(out_pipe[1], STDOUT_FILENO);
            ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::close(in_pipe[0]);
        ::close(out_pipe[1]);
        to_child_ = in_pipe[1];
        from_child_ = out_pipe[0];
        std::string hello;
        try {
            hello = read_line();
        } catch (...) {
            shutdown();
            throw;
        }
        if (hello != "READY") {
            shutdown();
            throw OracleProtocolError("expected READY from oracle, got '" + hello + "'");
        }
    }

    SubprocessOracle(const SubprocessOracle&) = delete;
    SubprocessOracle& operator=(const SubprocessOracle&) = delete;

    ~SubprocessOracle() override { shutdown(); }

    std::string identity() const override { return "subprocess:" + command_; }

    std::vector<OracleScore> score(std::span<const OracleRequest> batch) override {
        if (broken_) throw OracleProtocolError("oracle process is no longer usable");
        std::string payload;
        for (const OracleRequest& r : batch) {
            payload += "EVAL\t";
            payload += std::to_string(r.id);
            payload += '\t';
            payload += r.sequence;
            payload += '\n';
        }
        payload += "FLUSH\n";
        try {
            write_all(payload);
            std::vector<OracleScore> out;
            out.reserve(batch.size());
            while (true) {
                const std::string line = read_line();
                if (line == "DONE") break;
                out.push_back(parse_response(line));
            }
            return out;
        } catch (...) {
            broken_ = true;
            throw;
        }
    }

private:
    static std::string sys_error(const char* what) {
        return std::string(what) + ": " + std::strerror(errno);
    }

    static OracleScore parse_response(const std::string& line) {
        if (line.rfind("ERROR\t", 0) == 0) throw OracleProtocolError("oracle reported: " + line);
        const auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
            throw OracleProtocolError("malformed response line '" + line + "'");
        OracleScore s;
        const char* b = line.data();
        auto r1 = std::from_chars(b, b + tab, s.id);
        auto r2 = std::from_chars(b + tab + 1, b + line.size(), s.prediction);
        if (tab == 0 || r1.ec != std::errc{} || r1.ptr != b + tab || r2.ec != std::errc{} ||
            r2.ptr != b + line.size() || tab + 1 == line.size()) {
            throw OracleProtocolError("malformed response line '" + line + "'");
        }
        return s;
    }

    // Reads whatever the child has written without blocking.
    bool drain_available() {
        char buf[65536];
        const ssize_t n = ::read(from_child_, buf, sizeof buf);
        if (n > 0) {
            rbuf_.append(buf, static_cast<std::size_t>(n));
            return true;
        }
        if (n == 0) throw OracleProtocolError("oracle process closed its output");
        if (errno == EINTR || errno == EAGAIN) return true;
        throw OracleProtocolError(sys_error("read"));
    }

    // Writes the whole payload, consuming child output meanwhile so that a
    // child answering early cannot deadlock on a full pipe.
    void write_all(std::string_view data) {
        std::size_t done = 0;
        while (done < data.size()) {
            pollfd fds[2] = {{to_child_, POLLOUT, 0}, {from_child_, POLLIN, 0}};
            if (::poll(fds, 2, -1) < 0) {
                if (errno == EINTR) continue;
                throw OracleProtocolError(sys_error("poll"));
            }
            if (fds[1].revents & (POLLIN | POLLHUP)) drain_available();
            if (fds[0].revents & (POLLERR | POLLHUP))
                throw OracleProtocolError("oracle process closed its input");
            if (fds[0].revents & POLLOUT) {
                const ssize_t n = ::write(to_child_, data.data() + done, data.size() - done);
                if (n < 0) {
                    if (errno == EINTR || errno == EAGAIN) continue;
                    throw OracleProtocolError(sys_error("write"));
                }
                done += static_cast<std::size_t>(n);
            }
        }
    }

    std::string read_line() {
        while (true) {
            const auto nl = rbuf_.find('\n');
            if (nl != std::string::npos) {
                std::string line = rbuf_.substr(0, nl);
                rbuf_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
            drain_available();
        }
    }

    void shutdown() noexcept {
        if (pid_ <= 0) return;
        if (to_child_ >= 0) {
            const char quit[] = "QUIT\n";
            [[maybe_unused]] auto n = ::write(to_child_, quit, sizeof quit - 1);
            ::close(to_child_);
            to_child_ = -1;
        }
        if (from_child_ >= 0) {
            ::close(from_child_);
            from_child_ = -1;
        }
        int status = 0;
        for (int i = 0; i < 200; ++i) {
            if (::waitpid(pid_, &status, WNOHANG) != 0) {
                pid_ = -1;
                return;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
        pid_ = -1;
    }

    std::string command_;
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string rbuf_;
    bool broken_ = false;
};

/// Builds an oracle from a spec string: "toy" or "subprocess:<command>".
inline std::unique_ptr<Oracle> make_oracle(std::string_view spec, const ToyOracleConfig& toy = {}) {
    if (spec == "toy") return std::make_unique<ToyOracle>(toy);
    constexpr std::string_view prefix = "subprocess:";
    if (spec.substr(0, prefix.size()) == prefix) {
        const auto cmd = spec.substr(prefix.size());
        if (cmd.empty()) throw ConfigError("subprocess oracle needs a command");
        return std::make_unique<SubprocessOracle>(std::string(cmd));
    }
    throw ConfigError("unknown oracle '" + std::string(spec) + "'");
}

// ---------------------------------------------------------------------------
// Score cache

/// Per-run cache in front of an oracle. Each evaluate() call sends the
/// uncached distinct sequences, in first-appearance order, as one batch.
class CachedScorer {
public:
    explicit CachedScorer(Oracle& oracle, std::size_t max_entries = 2'000'000)
        : oracle_(&oracle), max_entries_(max_entries) {}

    std::vector<double> evaluate(const std::vector<std::string>& sequences) {
        if (cache_.size() + sequences.size() > max_entries_) cache_.clear();
        std::vector<OracleRequest> batch;
        std::unordered_set<std::string_view> queued;
        for (const std::string& s : sequences) {
            if (cache_.contains(s) || queued.contains(s)) continue;
            queued.insert(s);
            batch.push_back({batch.size(), s});
        }
        if (!batch.empty()) {
            const auto scores = batch_eval(*oracle_, batch);
            calls_ += batch.size();
            ++batches_;
            for (std::size_t i = 0; i < batch.size(); ++i) {
                cache_.emplace(std::move(batch[i].sequence), scores[i].prediction);
            }
        }
        std::vector<double> out;
        out.reserve(sequences.size());
        for (const std::string& s : sequences) out.push_back(cache_.at(s));
        return out;
    }

    /// Sequences sent to the oracle so far.
    std::size_t oracle_calls() const noexcept { return calls_; }
    std::size_t batches() const noexcept { return batches_; }
    const Oracle& oracle() const noexcept { return *oracle_; }

private:
    Oracle* oracle_;
    std::size_t max_entries_;
    std::unordered_map<std::string, double> cache_;
    std::size_t calls_ = 0;
    std::size_t batches_ = 0;
};

}  // namespace seqforge
