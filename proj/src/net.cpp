#include "litpipe/net.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <httplib.h>

#include "litpipe/error.hpp"
#include "litpipe/text.hpp"

namespace litpipe::net {

TimePoint SystemClock::now() const {
    return std::chrono::time_point_cast<Duration>(std::chrono::steady_clock::now());
}

void SystemClock::sleep_until(TimePoint t) { std::this_thread::sleep_until(t); }

void SimulatedClock::sleep_until(TimePoint t) {
    const auto target = t.time_since_epoch().count();
    auto cur = ticks_.load();
    while (cur < target && !ticks_.compare_exchange_weak(cur, target)) {
    }
}

SystemClock& system_clock() {
    static SystemClock clock;
    return clock;
}

void RateLimit::validate() const {
    if (!(requests_per_second > 0.0) || !std::isfinite(requests_per_second)) {
        throw Error("invalid-config", "requests_per_second must be positive");
    }
    if (max_concurrent < 1 || max_concurrent > 32) {
        throw Error("invalid-config", "max_concurrent must be in [1, 32]");
    }
    if (max_retries < 0) throw Error("invalid-config", "max_retries must be nonnegative");
    if (backoff_base.count() < 0) throw Error("invalid-config", "backoff_base must be nonnegative");
}

RateLimiter::RateLimiter(double requests_per_second, Clock& clock)
    : interval_(std::chrono::duration_cast<Duration>(std::chrono::duration<double>(1.0 / requests_per_second))),
      clock_(clock) {
    if (!(requests_per_second > 0.0)) throw Error("invalid-config", "requests_per_second must be positive");
}

void RateLimiter::acquire() {
    TimePoint slot;
    {
        std::lock_guard lock(mu_);
        const auto now = clock_.now();
        slot = started_ ? std::max(now, next_) : now;
        started_ = true;
        next_ = slot + interval_;
    }
    if (slot > clock_.now()) clock_.sleep_until(slot);
}

RateLimiter& HostRateLimiters::for_url(const std::string& url) {
    std::string host = url;
    try {
        host = split_url(url).host;
    } catch (const Error&) {
    }
    std::lock_guard lock(mu_);
    auto& slot = limiters_[host];
    if (!slot) slot = std::make_unique<RateLimiter>(rps_, clock_);
    return *slot;
}

std::string HttpResponse::header(const std::string& name) const {
    auto it = headers.find(text::to_lower_ascii(name));
    return it == headers.end() ? std::string() : it->second;
}

UrlParts split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error("invalid-config", "not an absolute URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    UrlParts parts;
    parts.origin = url.substr(0, path_start);
    parts.target = path_start == std::string::npos ? "/" : url.substr(path_start);
    auto authority = url.substr(scheme_end + 3, path_start == std::string::npos ? std::string::npos
                                                                                : path_start - scheme_end - 3);
    parts.host = authority.substr(0, authority.find(':'));
    if (parts.host.empty()) throw Error("invalid-config", "URL has no host: " + url);
    return parts;
}

std::string url_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 15]);
        }
    }
    return out;
}

HttpResponse HttplibTransport::send(const HttpRequest& request) {
    const auto parts = split_url(request.url);
    httplib::Client client(parts.origin);
    client.set_follow_location(true);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);

    httplib::Result res;
    if (request.method == "POST") {
        res = client.Post(parts.target, headers, request.body, request.content_type);
    } else {
        res = client.Get(parts.target, headers);
    }
    if (!res) {
        throw Error("provider-unreachable", request.url + ": " + httplib::to_string(res.error()));
    }
    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    for (const auto& [k, v] : res->headers) out.headers[text::to_lower_ascii(k)] = v;
    return out;
}

Backoff::Backoff(std::chrono::milliseconds base, double jitter, std::uint64_t seed)
    : base_(base), jitter_(jitter), rng_(seed) {}

Duration Backoff::delay(int attempt) {
    double u = 0.0;
    if (jitter_ > 0.0) {
        std::lock_guard lock(mu_);
        u = std::uniform_real_distribution<double>(0.0, jitter_)(rng_);
    }
    const double ms = static_cast<double>(base_.count()) * std::ldexp(1.0, std::min(attempt, 30)) * (1.0 + u);
    return std::chrono::duration_cast<Duration>(std::chrono::duration<double, std::milli>(ms));
}

namespace {
std::string excerpt(const std::string& body) {
    return body.size() > 512 ? body.substr(0, 512) + "..." : body;
}
}  // namespace

HttpResponse send_with_retries(HttpTransport& transport, const HttpRequest& request, const RateLimit& limits,
                               Clock& clock, RateLimiter* limiter, Backoff* backoff) {
    Backoff local(limits.backoff_base);
    Backoff& bo = backoff ? *backoff : local;
    std::string last_problem;
    for (int attempt = 0;; ++attempt) {
        if (limiter) limiter->acquire();
        const bool final_attempt = attempt >= limits.max_retries;
        Duration wait = bo.delay(attempt);
        try {
            auto resp = transport.send(request);
            if (resp.status == 429) {
                last_problem = "HTTP 429 from " + request.url;
                const auto hint = resp.header("retry-after");
                if (!hint.empty()) {
                    try {
                        wait = std::chrono::duration_cast<Duration>(std::chrono::duration<double>(std::stod(hint)));
                    } catch (const std::exception&) {
                    }
                }
                if (final_attempt) throw Error("provider-rejected", last_problem + ": " + excerpt(resp.body));
            } else if (resp.status >= 500) {
                last_problem = "HTTP " + std::to_string(resp.status) + " from " + request.url;
                if (final_attempt) throw Error("provider-unreachable", last_problem + ": " + excerpt(resp.body));
            } else if (resp.status >= 400) {
                throw Error("provider-rejected",
                            "HTTP " + std::to_string(resp.status) + " from " + request.url + ": " + resp.body);
            } else {
                return resp;
            }
        } catch (const Error& e) {
            if (e.code() != "provider-unreachable" || final_attempt) throw;
            last_problem = e.detail();
        }
        clock.sleep_for(wait);
    }
}

}  // namespace litpipe::net
