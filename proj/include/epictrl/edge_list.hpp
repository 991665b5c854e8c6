#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "epictrl/network.hpp"

namespace epictrl {

// Edge-list text format, one record per line:
//
//   # comment
//   @source <label>
//   @seeds <label> <label> ...
//   <u> <v> <cost> <prob>
//
// Labels become dense ids in order of first appearance on edge lines.
// When @seeds is present the seeds are merged into a meta-source, which
// then replaces any @source.
ContactNetwork parse_network(std::istream& in);
ContactNetwork parse_network_string(const std::string& text);
ContactNetwork load_network(const std::filesystem::path& path);

// Writes `network` back in the same format. Meta-source edges are written
// with cost `inf`.
void write_network(std::ostream& out, const ContactNetwork& network);
void save_network(const std::filesystem::path& path, const ContactNetwork& network);

}  // namespace epictrl
