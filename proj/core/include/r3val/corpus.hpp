#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace r3v {

/// Repeated energy readings of a single true variant, one block per reboot.
struct Corpus {
  std::string platform_label;
  std::vector<std::vector<double>> reboots;

  std::size_t reading_count() const noexcept;
  /// Throws ConfigError unless there is at least one block and no block is empty.
  void validate() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// CSV with columns platform,reboot_index,position,energy_j. A file may hold
// several platforms; they come back in order of first appearance.
void write_corpora(std::ostream& out, const std::vector<Corpus>& corpora);
std::vector<Corpus> read_corpora(std::istream& in, const std::string& source_name = "<corpus>");
void save_corpora(const std::string& path, const std::vector<Corpus>& corpora);
std::vector<Corpus> load_corpora(const std::string& path);

}  // namespace r3v
