#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qpinn {

// %.17g: round-trips every double.
std::string format_double(double v);

// Writes `content` to `<path>.tmp` and renames it over `path`, creating parent
// directories as needed. Throws std::runtime_error on I/O failure.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

struct FieldSnapshot;

// Field CSV: "x,t,u_pred,u_ref,abs_err" (1D) or "x,y,t,u_pred,u_ref,abs_err" (2D).
std::string field_csv(const FieldSnapshot& snap);

// Comma-separated list of doubles; throws std::invalid_argument on junk.
std::vector<double> parse_double_list(std::string_view text);
std::vector<std::size_t> parse_size_list(std::string_view text);

}  // namespace qpinn
