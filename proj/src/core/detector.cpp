#include "detector.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <optional>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "error.hpp"
#include "textio.hpp"

namespace imgrl {

ProbVector ProbVector::from_values(std::vector<double> probs, double sum_tol) {
  if (probs.size() < 2) {
    throw Error(ErrorCode::InvalidProbability, "probability vector needs at least 2 classes");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw Error(ErrorCode::InvalidProbability,
                  "probability " + text::exact(p) + " at class " + std::to_string(i) + " outside [0,1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > sum_tol) {
    throw Error(ErrorCode::InvalidProbability, "probabilities sum to " + text::exact(sum));
  }
  return ProbVector(std::move(probs));
}

double correct_prob(const ProbVector& p, std::size_t true_class) {
  if (true_class >= p.class_count()) {
    throw Error(ErrorCode::IndexOutOfRange, "class " + std::to_string(true_class) + " out of range for " +
                                                std::to_string(p.class_count()) + " classes");
  }
  return p.values()[true_class];
}

std::size_t true_class_for(std::string_view image_name, std::size_t class_count) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : image_name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h % class_count);
}

double score(const Detector& d, const Raster& img, std::string_view image_name) {
  const auto p = d.infer(img, image_name);
  return correct_prob(p, true_class_for(image_name, p.class_count()));
}

// --- surrogate ---------------------------------------------------------------

std::vector<std::string> SurrogateConfig::validate() const {
  std::vector<std::string> errs;
  if (class_count < 2) errs.push_back("surrogate.class_count must be >= 2");
  if (class_count >= 2 && !(p_oracle > 1.0 / class_count && p_oracle <= 1.0)) {
    errs.push_back("surrogate.p_oracle must satisfy 1/C < p_oracle <= 1");
  }
  if (!(std::isfinite(decay) && decay > 0.0)) errs.push_back("surrogate.decay must be > 0");
  return errs;
}

SurrogateDetector::SurrogateDetector(SurrogateConfig cfg, const std::vector<NamedRaster>& originals)
    : cfg_(cfg) {
  if (auto errs = cfg_.validate(); !errs.empty()) throw Error(ErrorCode::InvalidParameter, errs.front());
  for (const auto& o : originals) registry_.insert_or_assign(o.name, o.image);
}

double SurrogateDetector::true_class_probability(double rmse_to_original) const noexcept {
  const double floor = 1.0 / cfg_.class_count;
  return floor + (cfg_.p_oracle - floor) * std::exp(-cfg_.decay * rmse_to_original / 255.0);
}

ProbVector SurrogateDetector::infer(const Raster& img, std::string_view image_name) const {
  const auto it = registry_.find(image_name);
  if (it == registry_.end()) {
    throw Error(ErrorCode::UnknownImage, "surrogate has no reference for '" + std::string(image_name) + "'");
  }
  const double p_true = true_class_probability(rmse(img, it->second));
  const auto c = static_cast<std::size_t>(cfg_.class_count);
  std::vector<double> probs(c, (1.0 - p_true) / static_cast<double>(c - 1));
  probs[true_class_for(image_name, c)] = p_true;
  return ProbVector::from_values(std::move(probs));
}

std::string SurrogateDetector::describe() const {
  return "surrogate(C=" + std::to_string(cfg_.class_count) + ", p_oracle=" + text::exact(cfg_.p_oracle) +
         ", decay=" + text::exact(cfg_.decay) + ")";
}

// --- remote ------------------------------------------------------------------

struct RemoteDetector::Impl {
  explicit Impl(const std::string& url, double timeout_s) : client(url) {
    const auto sec = static_cast<time_t>(timeout_s);
    const auto usec = static_cast<time_t>((timeout_s - static_cast<double>(sec)) * 1e6);
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
  }
  std::mutex mu;
  httplib::Client client;
};

RemoteDetector::RemoteDetector(std::string base_url, double timeout_s) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  impl_ = std::make_unique<Impl>(base_url_, timeout_s);
  if (!impl_->client.is_valid()) throw Error(ErrorCode::InvalidParameter, "invalid detector url: " + base_url_);
}

RemoteDetector::~RemoteDetector() = default;

ProbVector RemoteDetector::parse_response(std::string_view body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Protocol, std::string("detector response is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("probs") || !j["probs"].is_array()) {
    throw Error(ErrorCode::Protocol, "detector response lacks a 'probs' array");
  }
  std::vector<double> probs;
  for (const auto& v : j["probs"]) {
    if (!v.is_number()) throw Error(ErrorCode::Protocol, "detector response 'probs' has a non-number");
    probs.push_back(v.get<double>());
  }
  if (j.contains("class_count")) {
    if (!j["class_count"].is_number_integer() || j["class_count"].get<long long>() != static_cast<long long>(probs.size())) {
      throw Error(ErrorCode::InvalidProbability, "detector class_count disagrees with probs length");
    }
  }
  return ProbVector::from_values(std::move(probs), 1e-6);
}

ProbVector RemoteDetector::infer(const Raster& img, std::string_view image_name) const {
  const auto bytes = write_ppm(img);
  httplib::Result res;
  {
    std::lock_guard lock(impl_->mu);
    res = impl_->client.Post("/infer", reinterpret_cast<const char*>(bytes.data()), bytes.size(),
                             "image/x-portable-pixmap");
  }
  if (!res) {
    throw Error(ErrorCode::Transport, "detector " + base_url_ + " unreachable (" + httplib::to_string(res.error()) +
                                          ") scoring '" + std::string(image_name) + "'");
  }
  if (res->status != 200) {
    throw Error(ErrorCode::Protocol, "detector returned HTTP " + std::to_string(res->status) + " for '" +
                                         std::string(image_name) + "'");
  }
  return parse_response(res->body);
}

std::string RemoteDetector::describe() const { return "remote(" + base_url_ + ")"; }

// --- oracle table ------------------------------------------------------------

double OracleTable::lookup(std::string_view image_name) const {
  const auto it = entries.find(image_name);
  if (it == entries.end()) {
    throw Error(ErrorCode::MissingOracleEntry, "oracle table has no entry for '" + std::string(image_name) + "'");
  }
  return it->second;
}

OracleTable build_oracle_table(const std::vector<NamedRaster>& originals, const Detector& detector, int jobs) {
  if (originals.empty()) throw Error(ErrorCode::InvalidParameter, "oracle table needs at least one image");
  const std::size_t n = originals.size();
  std::vector<double> probs(n, 0.0);
  std::vector<std::optional<Error>> failures(n);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        probs[i] = score(detector, originals[i].image, originals[i].name);
      } catch (const Error& e) {
        failures[i].emplace(e.code(), originals[i].name + ": " + e.what());
      } catch (const std::exception& e) {
        failures[i].emplace(ErrorCode::Internal, originals[i].name + ": " + e.what());
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, 64));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(worker);
  }
  for (auto& f : failures) {
    if (f) throw *f;
  }

  OracleTable table;
  double gray_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!table.entries.emplace(originals[i].name, probs[i]).second) {
      throw Error(ErrorCode::InvalidParameter, "duplicate image name '" + originals[i].name + "'");
    }
    gray_sum += mean_gray(originals[i].image);
  }
  table.brightness_ref = gray_sum / static_cast<double>(n);
  return table;
}

std::string write_oracle_csv(const OracleTable& table) {
  std::string out = "#brightness_ref=" + text::exact(table.brightness_ref) + "\n";
  for (const auto& [name, p] : table.entries) out += name + "," + text::exact(p) + "\n";
  return out;
}

OracleTable read_oracle_csv(std::string_view csv) {
  const auto rows = text::lines(csv);
  constexpr std::string_view kPrefix = "#brightness_ref=";
  if (rows.empty() || rows[0].substr(0, kPrefix.size()) != kPrefix) {
    throw Error(ErrorCode::MalformedLog, "oracle table line 1: expected '#brightness_ref=<real>'");
  }
  OracleTable table;
  const auto ref = text::parse_double(rows[0].substr(kPrefix.size()));
  if (!ref) throw Error(ErrorCode::MalformedLog, "oracle table line 1: bad brightness_ref");
  table.brightness_ref = *ref;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto row = rows[i];
    if (row.empty() || (i == 1 && row == "image_name,oracle_pr")) continue;
    const auto cols = text::split(row, ',');
    const auto p = cols.size() == 2 ? text::parse_double(cols[1]) : std::nullopt;
    if (!p || cols[0].empty() || *p < 0.0 || *p > 1.0) {
      throw Error(ErrorCode::MalformedLog, "oracle table line " + std::to_string(i + 1) + ": malformed row");
    }
    if (!table.entries.emplace(std::string(cols[0]), *p).second) {
      throw Error(ErrorCode::MalformedLog, "oracle table line " + std::to_string(i + 1) + ": duplicate name");
    }
  }
  return table;
}

void save_oracle_table(const OracleTable& table, const std::filesystem::path& path) {
  text::write_file(path, write_oracle_csv(table));
}

OracleTable load_oracle_table(const std::filesystem::path& path) {
  try {
    return read_oracle_csv(text::read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace imgrl
