#include "ttt/backend_http.hpp"

#include <cmath>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace ttt {

namespace {

// Splits "http://host:port/some/path" into the client base and the path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  size_t scheme = url.find("://");
  size_t path_start = scheme == std::string::npos ? url.find('/') : url.find('/', scheme + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpCompletionBackend::HttpCompletionBackend(std::string url) : url_(std::move(url)) {}

TokenTrace HttpCompletionBackend::do_generate(const std::string& prompt,
                                              const GenParams& params) {
  nlohmann::ordered_json body;
  body["prompt"] = prompt;
  body["max_tokens"] = params.max_tokens;
  body["temperature"] = params.temperature;
  body["top_p"] = params.top_p;
  body["top_k"] = params.top_k;
  body["beams"] = params.beams;
  body["logprobs"] = params.logprob_depth;
  body["seed"] = params.seed;
  body["attempt"] = params.attempt;

  auto [base, path] = split_url(url_);
  httplib::Client client(base);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(120, 0);

  httplib::Result res = client.Post(path, body.dump(), "application/json");
  if (!res) {
    throw BackendUnavailable("http backend: " + httplib::to_string(res.error()) + " for " + url_);
  }
  if (res->status != 200) {
    throw BackendUnavailable("http backend: status " + std::to_string(res->status) + " from " +
                             url_);
  }

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedResponse(std::string("http backend: response is not JSON: ") + e.what());
  }
  if (!doc.contains("text") || !doc.contains("tokens") || !doc["tokens"].is_array() ||
      doc["tokens"].empty()) {
    throw MalformedResponse("http backend: response must carry text and non-empty tokens");
  }

  TokenTrace trace;
  trace.text = doc["text"].get<std::string>();
  for (const auto& jt : doc["tokens"]) {
    if (!jt.contains("token") || !jt.contains("top_logprobs") || !jt["top_logprobs"].is_array() ||
        jt["top_logprobs"].empty()) {
      throw MalformedResponse("http backend: every token needs top_logprobs");
    }
    TokenInfo info;
    info.token = jt["token"].get<std::string>();
    info.truncated = true;
    std::vector<double> probs;
    double sum = 0.0;
    for (const auto& alt : jt["top_logprobs"]) {
      double p = std::exp(alt.at("logprob").get<double>());
      info.alternatives.emplace_back(alt.at("token").get<std::string>(), p);
      probs.push_back(p);
      sum += p;
    }
    if (!std::isfinite(sum) || sum > 1.0 + 1e-6) {
      throw MalformedResponse("http backend: token probabilities exceed 1");
    }
    info.residual = std::max(0.0, 1.0 - sum);
    info.entropy = token_entropy_topk(probs, info.residual);
    trace.tokens.push_back(std::move(info));
  }
  return trace;
}

}  // namespace ttt
