#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "kanlm/errors.hpp"

namespace kanlmcli {

using namespace kanlm;

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
  if (!out) throw InvalidInput("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create directory " + dir + ": " + ec.message());
}

std::vector<Channel> parse_channel_list(const std::string& csv) {
  std::vector<Channel> out;
  std::string cur;
  std::istringstream ss(csv);
  while (std::getline(ss, cur, ',')) {
    if (cur.empty()) throw InvalidInput("empty channel name in '" + csv + "'");
    out.push_back(channel_from_name(cur));
  }
  if (out.empty()) throw InvalidInput("empty channel list");
  return out;
}

std::string channel_list_name(const std::vector<Channel>& chans) {
  std::string out;
  for (std::size_t i = 0; i < chans.size(); ++i) {
    if (i) out += ",";
    out += channel_name(chans[i]);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::string cur;
  std::istringstream ss(csv);
  while (std::getline(ss, cur, ',')) {
    const char* s = cur.c_str();
    char* endp = nullptr;
    long v = std::strtol(s, &endp, 10);
    if (cur.empty() || endp != s + cur.size())
      throw InvalidInput("bad integer '" + cur + "' in list '" + csv + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::string int_list_name(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace kanlmcli
