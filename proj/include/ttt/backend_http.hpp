#pragma once

#include "ttt/inference.hpp"

namespace ttt {

// Talks to a completion endpoint over HTTP. One POST per generate() call:
//
//   request  {"prompt", "max_tokens", "temperature", "top_p", "top_k",
//             "beams", "logprobs", "seed", "attempt"}
//   response {"text": "...", "tokens": [{"token": "...",
//             "top_logprobs": [{"token": "...", "logprob": -0.1}, ...]}, ...]}
//
// Responses without per-token top-K logprobs are rejected (MalformedResponse);
// transport failures and non-200 statuses raise BackendUnavailable.
class HttpCompletionBackend : public Backend {
 public:
  explicit HttpCompletionBackend(std::string url);

  const std::string& url() const { return url_; }

 private:
  TokenTrace do_generate(const std::string& prompt, const GenParams& params) override;

  std::string url_;
};

}  // namespace ttt
