#pragma once

#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

namespace docqual {

// Line-delimited structured log records: {"ts":..., "level":..., "event":..., fields}.
class Logger {
 public:
  static Logger& instance() {
    static Logger logger;
    return logger;
  }

  void open_file(const std::string& path) {
    file_ = std::make_unique<std::ofstream>(path, std::ios::app);
  }

  void set_quiet(bool quiet) { quiet_ = quiet; }

  void log(const std::string& level, const std::string& event,
           nlohmann::ordered_json fields = nlohmann::ordered_json::object()) {
    nlohmann::ordered_json rec;
    rec["ts"] = timestamp();
    rec["level"] = level;
    rec["event"] = event;
    for (auto& [k, v] : fields.items()) rec[k] = v;
    std::string line = rec.dump();
    if (!quiet_) std::cerr << line << "\n";
    if (file_) *file_ << line << "\n" << std::flush;
  }

  void info(const std::string& event, nlohmann::ordered_json fields = nlohmann::ordered_json::object()) {
    log("info", event, std::move(fields));
  }
  void warn(const std::string& event, nlohmann::ordered_json fields = nlohmann::ordered_json::object()) {
    log("warn", event, std::move(fields));
  }
  void error(const std::string& event, nlohmann::ordered_json fields = nlohmann::ordered_json::object()) {
    log("error", event, std::move(fields));
  }

  static std::string timestamp();

 private:
  std::unique_ptr<std::ofstream> file_;
  bool quiet_ = false;
};

}  // namespace docqual
