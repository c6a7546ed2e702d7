#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "litpipe/config.hpp"
#include "litpipe/providers.hpp"

namespace litpipe::server {

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

/// HTTP status for an error code.
int status_for(const std::string& error_code);

/// JSON API state (documents, conversations, the current review table and
/// clusters, background runs) plus the optional HTTP listener. Every route
/// goes through handle(), so in-process calls and HTTP requests share code.
class Service {
public:
    explicit Service(SuiteConfig config);
    Service(SuiteConfig config, Providers providers);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    ApiResponse handle(const std::string& method, const std::string& path, const std::string& body);

    /// Binds config.host:config.port (0 picks a free port) and serves on a
    /// background thread. Returns the bound port. Throws Error("port-in-use").
    int start();
    /// Stops accepting requests and waits for in-flight ones.
    void stop();
    /// Blocks until stop() is called from another thread or a signal.
    void wait();

    /// Blocks until every background run has finished.
    void join_runs();

    const SuiteConfig& config() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace litpipe::server
