#include "qpinn/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qpinn/training.hpp"

namespace qpinn {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string field_csv(const FieldSnapshot& snap) {
    const std::size_t d = snap.points.dim;
    std::string out = d == 2 ? "x,t,u_pred,u_ref,abs_err\n" : "x,y,t,u_pred,u_ref,abs_err\n";
    for (std::size_t i = 0; i < snap.points.size(); ++i) {
        const auto p = snap.points[i];
        for (std::size_t a = 0; a < d; ++a) {
            out += format_double(p[a]);
            out += ',';
        }
        out += format_double(snap.u_pred[i]);
        out += ',';
        out += format_double(snap.u_ref[i]);
        out += ',';
        out += format_double(snap.abs_err[i]);
        out += '\n';
    }
    return out;
}

std::vector<double> parse_double_list(std::string_view text) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss{std::string(text)};
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos) throw std::invalid_argument("empty entry in list '" + std::string(text) + "'");
        const std::string trimmed = item.substr(first, item.find_last_not_of(" \t") - first + 1);
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(trimmed.c_str(), &end);
        if (errno != 0 || end != trimmed.c_str() + trimmed.size()) {
            throw std::invalid_argument("not a number: '" + trimmed + "'");
        }
        out.push_back(v);
    }
    return out;
}

std::vector<std::size_t> parse_size_list(std::string_view text) {
    std::vector<std::size_t> out;
    for (double v : parse_double_list(text)) {
        if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
            throw std::invalid_argument("expected non-negative integers in '" + std::string(text) + "'");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

}  // namespace qpinn
