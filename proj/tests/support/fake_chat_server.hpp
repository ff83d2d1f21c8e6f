#pragma once

// Scripted chat-completion endpoint on 127.0.0.1 for exercising the live
// backend without network access. Counts requests and the peak number of
// requests in flight.

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <deque>
#include <mutex>
#include <string>
#include <thread>

namespace testsupport {

class FakeChatServer {
 public:
  FakeChatServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int now = ++in_flight_;
      {
        std::lock_guard lock(mutex_);
        peak_ = std::max(peak_, now);
        ++requests_;
        last_auth_ = req.get_header_value("Authorization");
      }
      std::this_thread::sleep_for(delay_);
      int status = 200;
      {
        std::lock_guard lock(mutex_);
        if (!script_.empty()) {
          status = script_.front();
          script_.pop_front();
        }
      }
      if (status == 200) {
        const auto body = nlohmann::json::parse(req.body);
        const std::string prompt = body.at("messages").at(0).at("content");
        nlohmann::json reply;
        reply["choices"] = nlohmann::json::array(
            {{{"message", {{"role", "assistant"}, {"content", content_.empty() ? "echo\n\n" + prompt : content_}}}}});
        res.set_content(reply.dump(), "application/json");
      } else {
        res.status = status;
        res.set_content("{\"error\":\"scripted\"}", "application/json");
      }
      --in_flight_;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeChatServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  // Statuses returned by the next requests, in order; 200 afterwards.
  void script(std::initializer_list<int> statuses) {
    std::lock_guard lock(mutex_);
    script_.assign(statuses.begin(), statuses.end());
  }
  void fail_always(int status) {
    std::lock_guard lock(mutex_);
    script_.assign(10000, status);
  }
  void set_content(std::string content) { content_ = std::move(content); }
  void set_delay(std::chrono::milliseconds delay) { delay_ = delay; }

  int requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
  }
  int peak_in_flight() const {
    std::lock_guard lock(mutex_);
    return peak_;
  }
  std::string last_authorization() const {
    std::lock_guard lock(mutex_);
    return last_auth_;
  }
  void reset_counters() {
    std::lock_guard lock(mutex_);
    requests_ = 0;
    peak_ = 0;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> in_flight_{0};
  mutable std::mutex mutex_;
  std::deque<int> script_;
  int requests_ = 0;
  int peak_ = 0;
  std::string last_auth_;
  std::string content_;
  std::chrono::milliseconds delay_{0};
};

}  // namespace testsupport
