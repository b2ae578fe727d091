#include <atomic>
#include <thread>

#include "evsg/cli/cli.hpp"
#include "evsg/core/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace evsg::cli {

struct RewardService::Impl {
  reward::RewardWeights weights;
  httplib::Server server;
  std::thread worker;
  std::atomic<bool> running{false};
};

RewardService::RewardService(reward::RewardWeights weights) : impl_(new Impl) {
  impl_->weights = weights;
  impl_->weights.check();

  impl_->server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"status\":\"ready\"}\n", "application/json");
  });
  impl_->server.Post("/score", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      res.set_content(score_record_json(req.body, impl_->weights), "application/json");
    } catch (const DataError& e) {
      res.status = 400;
      res.set_content(std::string("{\"error\":") + nlohmann::json(e.what()).dump() + "}\n",
                      "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(std::string("{\"error\":") + nlohmann::json(e.what()).dump() + "}\n",
                      "application/json");
    }
  });
  impl_->server.Post("/shutdown", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"status\":\"stopping\"}\n", "application/json");
    impl_->server.stop();
  });
}

RewardService::~RewardService() {
  stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

int RewardService::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw EndpointError("could not bind scoring service to " + host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    throw EndpointError("could not bind scoring service to " + host + ":" +
                        std::to_string(port));
  }
  impl_->running = true;
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void RewardService::wait() {
  if (impl_->worker.joinable()) impl_->worker.join();
  impl_->running = false;
}

void RewardService::stop() {
  if (impl_->running.exchange(false)) impl_->server.stop();
}

}  // namespace evsg::cli
