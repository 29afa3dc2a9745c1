#include "sburgers/csv.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <locale>
#include <stdexcept>

namespace sburgers::csv {

std::ofstream open(const std::filesystem::path& file) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
    os.imbue(std::locale::classic());
    os << std::setprecision(17);
    return os;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace sburgers::csv
