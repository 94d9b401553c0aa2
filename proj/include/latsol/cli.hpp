// Batch driver: CSV and SVG emitters and the latsol subcommands.

#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace latsol::cli {

inline constexpr const char* kVersion = "1.0.0";
/// Default output directory when --out is not given.
inline constexpr const char* kOutputDirVariable = "LATSOL_OUTPUT_DIR";

enum ExitCode { kSuccess = 0, kRuntimeFailure = 1, kUsageError = 2 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, enough to round-trip any double.
std::string format_real(double x);

/// Comma-separated with LF line endings; the header row comes first.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  std::size_t columns() const { return header_.size(); }

 private:
  std::ofstream os_;
  std::vector<std::string> header_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index of `name`; throws std::runtime_error when absent.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
  bool points = false;  // markers instead of a polyline
};

struct SvgChart {
  std::string title, x_label, y_label;
  std::vector<SvgSeries> series;
};

void write_svg(const std::filesystem::path& path, const SvgChart& chart);

/// Runs one command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace latsol::cli
