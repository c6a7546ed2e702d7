#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace litpipe::net {

using Duration = std::chrono::nanoseconds;
using TimePoint = std::chrono::time_point<std::chrono::steady_clock, Duration>;

class Clock {
public:
    virtual ~Clock() = default;
    virtual TimePoint now() const = 0;
    virtual void sleep_until(TimePoint t) = 0;
    void sleep_for(Duration d) { sleep_until(now() + d); }
};

class SystemClock final : public Clock {
public:
    TimePoint now() const override;
    void sleep_until(TimePoint t) override;
};

/// Time only moves when someone sleeps. Sleeping advances the clock to
/// max(now, t), so concurrent sleepers never rewind it.
class SimulatedClock final : public Clock {
public:
    TimePoint now() const override { return TimePoint(Duration(ticks_.load())); }
    void sleep_until(TimePoint t) override;
    double seconds() const { return std::chrono::duration<double>(now().time_since_epoch()).count(); }

private:
    std::atomic<Duration::rep> ticks_{0};
};

SystemClock& system_clock();

/// Request pacing and retry settings for one remote service.
struct RateLimit {
    double requests_per_second = 5.0;
    int max_concurrent = 4;
    int max_retries = 3;
    std::chrono::milliseconds backoff_base{500};

    /// Throws Error("invalid-config").
    void validate() const;
};

/// Spaces permits 1/rate apart. The first permit is immediate, so N permits
/// take at least (N-1)/rate.
class RateLimiter {
public:
    RateLimiter(double requests_per_second, Clock& clock);
    void acquire();
    Clock& clock() const { return clock_; }

private:
    Duration interval_;
    Clock& clock_;
    std::mutex mu_;
    TimePoint next_{};
    bool started_ = false;
};

/// One limiter per host, created on first use.
class HostRateLimiters {
public:
    HostRateLimiters(double requests_per_second, Clock& clock) : rps_(requests_per_second), clock_(clock) {}
    RateLimiter& for_url(const std::string& url);

private:
    double rps_;
    Clock& clock_;
    std::mutex mu_;
    std::map<std::string, std::unique_ptr<RateLimiter>> limiters_;
};

struct HttpRequest {
    std::string method = "GET";
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::string content_type = "application/json";
};

struct HttpResponse {
    int status = 0;
    std::string body;
    std::map<std::string, std::string> headers;  // lower-cased names

    std::string header(const std::string& name) const;
};

/// Sends one request. Network-level failures throw Error("provider-unreachable");
/// any HTTP status (including 4xx/5xx) is returned, not thrown.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// cpp-httplib backed transport; follows redirects, supports https.
class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(30)) : timeout_(timeout) {}
    HttpResponse send(const HttpRequest& request) override;

private:
    std::chrono::seconds timeout_;
};

struct UrlParts {
    std::string origin;  // scheme://host[:port]
    std::string host;
    std::string target;  // path + query, at least "/"
};
UrlParts split_url(const std::string& url);
std::string url_encode(const std::string& s);

/// Exponential backoff with jitter: base * 2^attempt * (1 + u), u ~ U[0, jitter).
class Backoff {
public:
    explicit Backoff(std::chrono::milliseconds base, double jitter = 0.25, std::uint64_t seed = 0x5eed);
    Duration delay(int attempt);

private:
    std::chrono::milliseconds base_;
    double jitter_;
    std::mutex mu_;
    std::mt19937_64 rng_;
};

/// Sends `request` honoring the limiter (if any) before every attempt.
/// Retries network failures, 429 and 5xx up to limits.max_retries times; a
/// 429 `Retry-After` (seconds) overrides the backoff delay. Non-429 4xx
/// throws Error("provider-rejected") with the body preserved in the detail.
HttpResponse send_with_retries(HttpTransport& transport, const HttpRequest& request, const RateLimit& limits,
                               Clock& clock, RateLimiter* limiter = nullptr, Backoff* backoff = nullptr);

}  // namespace litpipe::net
