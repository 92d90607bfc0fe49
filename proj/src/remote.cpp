#include "shuxu/remote.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "shuxu/error.hpp"

namespace shuxu {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw UsageError("endpoint must be an http:// URL");
  if (url.substr(0, scheme_end) != "http") {
    throw UsageError("only http:// endpoints are supported");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  e.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (e.origin.size() <= scheme_end + 3) throw UsageError("endpoint has no host");
  return e;
}

bool transient(int status) { return status == 408 || status == 429 || status >= 500; }

using BatchResult = std::vector<std::pair<std::string, Prediction>>;

BatchResult post_batch(const Endpoint& endpoint, std::span<const TitleRecord> batch,
                       const RemoteOptions& options) {
  nlohmann::json body = nlohmann::json::array();
  std::set<std::string> requested;
  for (const auto& r : batch) {
    body.push_back({{"record_id", r.record_id}, {"title", r.title}});
    requested.insert(r.record_id);
  }
  const std::string payload = body.dump();

  httplib::Headers headers;
  for (const auto& [k, v] : options.headers) headers.emplace(k, v);

  httplib::Client client(endpoint.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  int last_status = 0;
  std::string last_failure;
  auto backoff = options.initial_backoff;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, options.max_backoff);
    }
    auto res = client.Post(endpoint.path, headers, payload, "application/json");
    if (!res) {
      const auto err = res.error();
      last_failure = (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout)
                         ? "timed out or connection dropped"
                         : "request failed: " + httplib::to_string(err);
      continue;
    }
    last_status = res->status;
    if (res->status < 200 || res->status >= 300) {
      last_failure = "endpoint returned HTTP " + std::to_string(res->status);
      if (!transient(res->status)) break;
      continue;
    }

    const auto doc = nlohmann::json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_array()) {
      throw RemoteError("malformed response: expected a JSON array", res->status);
    }
    BatchResult out;
    std::set<std::string> seen;
    for (const auto& item : doc) {
      if (!item.is_object() || !item.contains("record_id") || !item["record_id"].is_string() ||
          !item.contains("label") || !item["label"].is_string()) {
        throw RemoteError("malformed response item: " + item.dump(), res->status);
      }
      auto id = item["record_id"].get<std::string>();
      if (!requested.contains(id) || !seen.insert(id).second) {
        throw RemoteError("response has unexpected or repeated record_id '" + id + "'",
                          res->status);
      }
      const auto label = parse_label(item["label"].get<std::string>());
      if (!label) throw RemoteError("response has unknown label for '" + id + "'", res->status);
      Prediction p{*label, std::nullopt};
      if (item.contains("score") && !item["score"].is_null()) {
        if (!item["score"].is_number()) {
          throw RemoteError("response score for '" + id + "' is not a number", res->status);
        }
        const double s = item["score"].get<double>();
        if (!(s >= 0.0 && s <= 1.0)) {
          throw RemoteError("response score for '" + id + "' is outside [0, 1]", res->status);
        }
        p.score = s;
      }
      out.emplace_back(std::move(id), p);
    }
    return out;
  }
  throw RemoteError(last_failure.empty() ? "request failed" : last_failure, last_status);
}

}  // namespace

RemoteResult remote_classify(std::span<const TitleRecord> records, const RemoteOptions& options) {
  if (records.empty()) throw UsageError("no records to classify");
  if (options.batch_size == 0) throw UsageError("batch size must be positive");
  if (options.concurrency == 0) throw UsageError("concurrency must be positive");
  if (options.max_retries < 0) throw UsageError("max_retries must be non-negative");
  if (options.timeout.count() <= 0) throw UsageError("timeout must be positive");
  const Endpoint endpoint = parse_endpoint(options.endpoint);

  std::vector<std::span<const TitleRecord>> batches;
  for (std::size_t i = 0; i < records.size(); i += options.batch_size) {
    batches.push_back(records.subspan(i, std::min(options.batch_size, records.size() - i)));
  }

  std::vector<BatchResult> results(batches.size());
  for (std::size_t wave = 0; wave < batches.size(); wave += options.concurrency) {
    const std::size_t end = std::min(batches.size(), wave + options.concurrency);
    if (end - wave == 1) {
      results[wave] = post_batch(endpoint, batches[wave], options);
      continue;
    }
    std::vector<std::future<BatchResult>> pending;
    for (std::size_t b = wave; b < end; ++b) {
      pending.push_back(std::async(std::launch::async, post_batch, std::cref(endpoint),
                                   batches[b], std::cref(options)));
    }
    // get() in batch order; the first failure propagates after all finish.
    std::exception_ptr failure;
    for (std::size_t b = wave; b < end; ++b) {
      try {
        results[b] = pending[b - wave].get();
      } catch (...) {
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  RemoteResult out;
  out.predictions.system_name = options.system_name;
  for (auto& batch : results) {
    for (auto& [id, p] : batch) out.predictions.add(std::move(id), p);
  }
  for (const auto& r : records) {
    if (!out.predictions.find(r.record_id)) out.missing_ids.push_back(r.record_id);
  }
  std::sort(out.missing_ids.begin(), out.missing_ids.end());
  return out;
}

}  // namespace shuxu
