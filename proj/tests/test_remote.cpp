#include <doctest.h>

#include <atomic>
#include <functional>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "helpers.hpp"
#include "shuxu/error.hpp"
#include "shuxu/remote.hpp"

using namespace shuxu;
using nlohmann::json;

namespace {

// Local HTTP endpoint whose behaviour is a per-request callback.
class MockServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&, int call)>;

  explicit MockServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/classify", [this](const httplib::Request& req, httplib::Response& res) {
      const int call = calls_++;
      {
        std::lock_guard lock(mutex_);
        requests_.push_back(req.body);
        auth_.push_back(req.get_header_value("Authorization"));
      }
      handler_(req, res, call);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/classify"; }
  int calls() const { return calls_; }
  std::vector<std::string> requests() {
    std::lock_guard lock(mutex_);
    return requests_;
  }
  std::vector<std::string> auth() {
    std::lock_guard lock(mutex_);
    return auth_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> calls_{0};
  std::mutex mutex_;
  std::vector<std::string> requests_;
  std::vector<std::string> auth_;
};

void answer_letters(const httplib::Request& req, httplib::Response& res,
                    const std::string& skip = {}) {
  json out = json::array();
  for (const auto& item : json::parse(req.body)) {
    if (item["record_id"] == skip) continue;
    out.push_back({{"record_id", item["record_id"]}, {"label", "letter"}, {"score", 0.9}});
  }
  res.set_content(out.dump(), "application/json");
}

std::vector<TitleRecord> titles(std::size_t n) {
  Pcg32 rng(77, 1);
  return testing::random_records(rng, n);
}

RemoteOptions fast(const MockServer& server) {
  RemoteOptions o;
  o.endpoint = server.url();
  o.initial_backoff = std::chrono::milliseconds(1);
  o.max_backoff = std::chrono::milliseconds(4);
  o.timeout = std::chrono::milliseconds(2000);
  return o;
}

}  // namespace

TEST_CASE("echo endpoint covers every record") {
  MockServer server([](const auto& req, auto& res, int) { answer_letters(req, res); });
  const auto records = titles(10);
  const auto result = remote_classify(records, fast(server));
  CHECK(result.predictions.size() == 10);
  CHECK(result.missing_ids.empty());
  CHECK(result.predictions.system_name == "remote");
  for (const auto& r : records) {
    const auto* p = result.predictions.find(r.record_id);
    REQUIRE(p != nullptr);
    CHECK(p->label == Label::Letter);
    CHECK(p->score == 0.9);
  }
  // The request body carries ids and titles.
  const auto body = json::parse(server.requests().front());
  CHECK(body[0]["title"] == records[0].title);
}

TEST_CASE("omitted ids are reported as missing") {
  const auto records = titles(5);
  const std::string dropped = records[3].record_id;
  MockServer server([&](const auto& req, auto& res, int) { answer_letters(req, res, dropped); });
  const auto result = remote_classify(records, fast(server));
  CHECK(result.predictions.size() == 4);
  REQUIRE(result.missing_ids.size() == 1);
  CHECK(result.missing_ids[0] == dropped);
}

TEST_CASE("batching sends ceil(n / batch) requests") {
  MockServer server([](const auto& req, auto& res, int) { answer_letters(req, res); });
  const auto records = titles(1000);
  auto options = fast(server);
  options.batch_size = 32;
  const auto result = remote_classify(records, options);
  CHECK(server.calls() == 32);
  CHECK(result.predictions.size() == 1000);
  std::size_t total = 0;
  for (const auto& body : server.requests()) {
    const auto n = json::parse(body).size();
    CHECK(n <= 32);
    total += n;
  }
  CHECK(total == 1000);
}

TEST_CASE("concurrent waves produce the same predictions") {
  MockServer server([](const auto& req, auto& res, int) { answer_letters(req, res); });
  const auto records = titles(100);
  auto options = fast(server);
  options.batch_size = 7;
  const auto serial = remote_classify(records, options);
  options.concurrency = 4;
  const auto parallel = remote_classify(records, options);
  CHECK(serial.predictions == parallel.predictions);
}

TEST_CASE("transient failures are retried") {
  MockServer server([](const auto& req, auto& res, int call) {
    if (call == 0) {
      res.status = 503;
      return;
    }
    answer_letters(req, res);
  });
  const auto result = remote_classify(titles(3), fast(server));
  CHECK(server.calls() == 2);
  CHECK(result.predictions.size() == 3);
}

TEST_CASE("persistent failure carries the last status") {
  MockServer server([](const auto&, auto& res, int) { res.status = 500; });
  auto options = fast(server);
  options.max_retries = 2;
  try {
    (void)remote_classify(titles(3), options);
    FAIL("expected RemoteError");
  } catch (const RemoteError& e) {
    CHECK(e.status() == 500);
  }
  CHECK(server.calls() == 3);
}

TEST_CASE("client errors fail without retrying") {
  MockServer server([](const auto&, auto& res, int) { res.status = 400; });
  CHECK_THROWS_AS(remote_classify(titles(3), fast(server)), RemoteError);
  CHECK(server.calls() == 1);
}

TEST_CASE("malformed responses are rejected") {
  SUBCASE("not json") {
    MockServer server([](const auto&, auto& res, int) { res.set_content("oops", "text/plain"); });
    CHECK_THROWS_AS(remote_classify(titles(2), fast(server)), RemoteError);
  }
  SUBCASE("unknown label") {
    MockServer server([](const auto& req, auto& res, int) {
      json out = json::array();
      for (const auto& item : json::parse(req.body)) {
        out.push_back({{"record_id", item["record_id"]}, {"label", "poem"}});
      }
      res.set_content(out.dump(), "application/json");
    });
    CHECK_THROWS_AS(remote_classify(titles(2), fast(server)), RemoteError);
  }
  SUBCASE("unrequested id") {
    MockServer server([](const auto&, auto& res, int) {
      res.set_content(R"([{"record_id":"ghost","label":"letter"}])", "application/json");
    });
    CHECK_THROWS_AS(remote_classify(titles(2), fast(server)), RemoteError);
  }
  SUBCASE("score out of range") {
    MockServer server([](const auto& req, auto& res, int) {
      json out = json::array();
      for (const auto& item : json::parse(req.body)) {
        out.push_back({{"record_id", item["record_id"]}, {"label", "letter"}, {"score", 1.5}});
      }
      res.set_content(out.dump(), "application/json");
    });
    CHECK_THROWS_AS(remote_classify(titles(2), fast(server)), RemoteError);
  }
}

TEST_CASE("slow endpoint times out") {
  MockServer server([](const auto& req, auto& res, int) {
    std::this_thread::sleep_for(std::chrono::milliseconds(400));
    answer_letters(req, res);
  });
  auto options = fast(server);
  options.timeout = std::chrono::milliseconds(100);
  options.max_retries = 1;
  try {
    (void)remote_classify(titles(2), options);
    FAIL("expected RemoteError");
  } catch (const RemoteError& e) {
    CHECK(std::string(e.what()).find("timed out") != std::string::npos);
  }
}

TEST_CASE("headers are passed through") {
  MockServer server([](const auto& req, auto& res, int) { answer_letters(req, res); });
  auto options = fast(server);
  options.headers = {{"Authorization", "Bearer secret"}};
  (void)remote_classify(titles(2), options);
  CHECK(server.auth().front() == "Bearer secret");
}

TEST_CASE("option validation") {
  RemoteOptions o;
  o.endpoint = "https://example.org/x";
  const auto records = titles(1);
  CHECK_THROWS_AS(remote_classify(records, o), UsageError);
  o.endpoint = "http://127.0.0.1:1/x";
  o.batch_size = 0;
  CHECK_THROWS_AS(remote_classify(records, o), UsageError);
  o.batch_size = 1;
  CHECK_THROWS_AS(remote_classify({}, o), UsageError);
}

TEST_CASE("unreachable endpoint is a remote error") {
  RemoteOptions o;
  o.endpoint = "http://127.0.0.1:1/x";
  o.max_retries = 0;
  o.timeout = std::chrono::milliseconds(500);
  CHECK_THROWS_AS(remote_classify(titles(1), o), RemoteError);
}
