#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shuxu/corpus.hpp"
#include "shuxu/predictions.hpp"

namespace shuxu {

struct RemoteOptions {
  std::string endpoint;  // http://host[:port]/path
  std::size_t batch_size = 32;
  std::chrono::milliseconds timeout{10'000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::milliseconds max_backoff{5'000};
  std::size_t concurrency = 1;
  std::vector<std::pair<std::string, std::string>> headers;  // passed through, e.g. Authorization
  std::string system_name = "remote";
};

struct RemoteResult {
  PredictionSet predictions;
  std::vector<std::string> missing_ids;  // requested but absent from every response, sorted
};

// POSTs batches of [{"record_id", "title"}] and expects
// [{"record_id", "label", "score"}] back. Connection failures, timeouts,
// 408, 429 and 5xx are retried with exponential backoff; other non-2xx
// fail at once. Throws RemoteError on exhausted retries or a malformed
// response, UsageError on bad options.
RemoteResult remote_classify(std::span<const TitleRecord> records, const RemoteOptions& options);

}  // namespace shuxu
