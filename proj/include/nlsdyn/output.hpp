#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace nlsdyn {

inline constexpr const char* kSummarySchema = "nlsdyn.summary/1";
inline constexpr const char* kStreamSchema = "nlsdyn.stream/1";

// Numbers use 17 significant digits; non-finite values become null.
std::string json_number(double v);
std::string json_string(std::string_view s);

// Flat-or-nested JSON object built in insertion order.
class JsonObject {
 public:
  JsonObject& add(std::string_view key, double v);
  JsonObject& add(std::string_view key, int v);
  JsonObject& add(std::string_view key, long v);
  JsonObject& add(std::string_view key, unsigned long v);
  JsonObject& add(std::string_view key, bool v);
  JsonObject& add(std::string_view key, std::string_view v);
  JsonObject& add(std::string_view key, const char* v) { return add(key, std::string_view(v)); }
  JsonObject& add(std::string_view key, const std::string& v) { return add(key, std::string_view(v)); }
  JsonObject& add(std::string_view key, const std::vector<double>& v);
  JsonObject& add(std::string_view key, const JsonObject& v);
  JsonObject& add(std::string_view key, const std::vector<JsonObject>& v);
  JsonObject& add_null(std::string_view key);
  bool empty() const { return body_.empty(); }
  std::string str() const { return "{" + body_ + "}"; }

 private:
  JsonObject& raw(std::string_view key, const std::string& value);
  std::string body_;
};

// Append-only JSON-lines file, flushed after every record.
class JsonlStream {
 public:
  JsonlStream() = default;
  explicit JsonlStream(const std::string& path);
  JsonlStream(const JsonlStream&) = delete;
  JsonlStream& operator=(const JsonlStream&) = delete;
  JsonlStream(JsonlStream&& o) noexcept;
  JsonlStream& operator=(JsonlStream&& o) noexcept;
  ~JsonlStream();
  bool is_open() const { return f_ != nullptr; }
  void write(const JsonObject& rec);
  const std::string& path() const { return path_; }

 private:
  std::FILE* f_ = nullptr;
  std::string path_;
};

void write_text_file(const std::string& path, const std::string& content);

// CSV with a header row; numbers use 17 significant digits.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// "key: value" lines.
std::string key_value_text(const std::vector<std::pair<std::string, std::string>>& items);

void ensure_directory(const std::string& path);

}  // namespace nlsdyn
