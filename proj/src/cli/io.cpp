#include "trimer/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

namespace trimer::cli {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view s, std::string_view what) {
    s = trim(s);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument(std::string(what) + ": not a number: '" + std::string(s) + "'");
    }
    return x;
}

int parse_int(std::string_view s, std::string_view what) {
    s = trim(s);
    int x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument(std::string(what) + ": not an integer: '" + std::string(s) + "'");
    }
    return x;
}

}  // namespace

std::vector<double> GridSpec::values() const {
    std::vector<double> g(static_cast<std::size_t>(points));
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + i * step;
    g.back() = hi;
    return g;
}

GridSpec parse_grid(std::string_view text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw std::invalid_argument("grid must be min:max:points, got '" + std::string(text) + "'");
    GridSpec g{parse_double(parts[0], "grid min"), parse_double(parts[1], "grid max"), parse_int(parts[2], "grid points")};
    if (g.points < 2) throw std::invalid_argument("grid needs at least 2 points");
    if (!std::isfinite(g.lo) || !std::isfinite(g.hi) || !(g.hi > g.lo)) {
        throw std::invalid_argument("grid needs finite min < max");
    }
    return g;
}

std::pair<double, double> parse_range(std::string_view text) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw std::invalid_argument("range must be min:max, got '" + std::string(text) + "'");
    const double lo = parse_double(parts[0], "range min");
    const double hi = parse_double(parts[1], "range max");
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) throw std::invalid_argument("range needs min < max");
    return {lo, hi};
}

std::array<int, 3> parse_cutoffs(std::string_view text) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) throw std::invalid_argument("cutoffs must be n_a,n_b,n_c");
    std::array<int, 3> c{};
    for (int i = 0; i < 3; ++i) {
        c[i] = parse_int(parts[static_cast<std::size_t>(i)], "cutoff");
        if (c[i] < 0) throw std::invalid_argument("cutoffs must be non-negative");
    }
    return c;
}

std::string format_double(double x) {
    if (x == 0.0) return "0";  // folds -0 as well
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("format_double: buffer too small");
    return std::string(buf, ptr);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::invalid_argument("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw std::invalid_argument("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw std::invalid_argument("cannot move output into place: " + path.string() + ": " + ec.message());
    }
}

SpectrumSamples read_spectrum_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || trim(line) != "omega,s_value") {
        throw std::invalid_argument(path.string() + ": expected header omega,s_value");
    }
    SpectrumSamples s;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto parts = split(line, ',');
        if (parts.size() != 2) throw std::invalid_argument(path.string() + ": bad row " + std::to_string(row));
        s.omega.push_back(parse_double(parts[0], "omega"));
        s.value.push_back(parse_double(parts[1], "s_value"));
    }
    if (s.omega.size() < 3) throw std::invalid_argument(path.string() + ": need at least 3 samples");
    for (std::size_t i = 1; i < s.omega.size(); ++i) {
        if (!(s.omega[i] > s.omega[i - 1])) throw std::invalid_argument(path.string() + ": omega must increase");
    }
    return s;
}

std::string spectrum_csv(const std::vector<double>& omega, const std::vector<double>& value) {
    std::string out = "omega,s_value\n";
    for (std::size_t i = 0; i < omega.size(); ++i) {
        out += format_double(omega[i]);
        out += ',';
        out += format_double(value[i]);
        out += '\n';
    }
    return out;
}

double multiset_distance(const std::array<Complex, 6>& a, const std::array<Complex, 6>& b) {
    std::array<int, 6> perm;
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double worst = 0.0;
        for (int i = 0; i < 6 && worst < best; ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace trimer::cli
