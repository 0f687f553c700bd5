#pragma once

#include <string>
#include <vector>

#include "kanlm/dataset.hpp"

namespace CLI {
class App;
}

namespace kanlmcli {

void register_synth(CLI::App& app);
void register_train(CLI::App& app);
void register_extract(CLI::App& app);
void register_eval(CLI::App& app);
void register_compare(CLI::App& app);

// --- shared helpers (util.cpp) ---------------------------------------------

std::string fmt_g(double v);                   // %.17g
std::string fmt_fixed(double v, int decimals); // %.*f
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);
void ensure_dir(const std::string& dir);

std::vector<kanlm::Channel> parse_channel_list(const std::string& csv);
std::string channel_list_name(const std::vector<kanlm::Channel>& chans);
std::vector<int> parse_int_list(const std::string& csv);
std::string int_list_name(const std::vector<int>& v);

}  // namespace kanlmcli
