#include "nlsdyn/output.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "nlsdyn/error.hpp"

namespace nlsdyn {

std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  return fmt::format("{:.17g}", v);
}

std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20)
          out += fmt::format("\\u{:04x}", static_cast<unsigned>(static_cast<unsigned char>(c)));
        else
          out += c;
    }
  }
  return out + "\"";
}

JsonObject& JsonObject::raw(std::string_view key, const std::string& value) {
  if (!body_.empty()) body_ += ",";
  body_ += json_string(key);
  body_ += ":";
  body_ += value;
  return *this;
}

JsonObject& JsonObject::add(std::string_view key, double v) { return raw(key, json_number(v)); }
JsonObject& JsonObject::add(std::string_view key, int v) { return raw(key, std::to_string(v)); }
JsonObject& JsonObject::add(std::string_view key, long v) { return raw(key, std::to_string(v)); }
JsonObject& JsonObject::add(std::string_view key, unsigned long v) { return raw(key, std::to_string(v)); }
JsonObject& JsonObject::add(std::string_view key, bool v) { return raw(key, v ? "true" : "false"); }
JsonObject& JsonObject::add(std::string_view key, std::string_view v) { return raw(key, json_string(v)); }
JsonObject& JsonObject::add_null(std::string_view key) { return raw(key, "null"); }
JsonObject& JsonObject::add(std::string_view key, const JsonObject& v) { return raw(key, v.str()); }

JsonObject& JsonObject::add(std::string_view key, const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + json_number(v[i]);
  return raw(key, s + "]");
}

JsonObject& JsonObject::add(std::string_view key, const std::vector<JsonObject>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].str();
  return raw(key, s + "]");
}

JsonlStream::JsonlStream(const std::string& path) : path_(path) {
  f_ = std::fopen(path.c_str(), "w");
  if (!f_) throw UsageError(fmt::format("cannot open {} for writing", path));
}

JsonlStream::JsonlStream(JsonlStream&& o) noexcept : f_(o.f_), path_(std::move(o.path_)) { o.f_ = nullptr; }

JsonlStream& JsonlStream::operator=(JsonlStream&& o) noexcept {
  if (this != &o) {
    if (f_) std::fclose(f_);
    f_ = o.f_;
    path_ = std::move(o.path_);
    o.f_ = nullptr;
  }
  return *this;
}

JsonlStream::~JsonlStream() {
  if (f_) std::fclose(f_);
}

void JsonlStream::write(const JsonObject& rec) {
  if (!f_) return;
  const std::string line = rec.str() + "\n";
  std::fwrite(line.data(), 1, line.size(), f_);
  std::fflush(f_);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw UsageError(fmt::format("cannot write {}", path));
  os << content;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + fmt::format("{:.17g}", r[i]);
    s += "\n";
  }
  write_text_file(path, s);
}

std::string key_value_text(const std::vector<std::pair<std::string, std::string>>& items) {
  std::string s;
  for (const auto& [k, v] : items) s += k + ": " + v + "\n";
  return s;
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw UsageError(fmt::format("cannot create directory {}: {}", path, ec.message()));
}

}  // namespace nlsdyn
