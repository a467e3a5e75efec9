#include "bandblas/dispatch.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <sstream>
#include <vector>

namespace bandblas {

namespace {

constexpr std::array<std::string_view, 2> kGbmvVariants{"N", "T"};
constexpr std::array<std::string_view, 2> kSbmvVariants{"lower", "upper"};
constexpr std::array<std::string_view, 4> kTriangularVariants{"LN", "LT", "UN", "UT"};
constexpr std::array<Precision, 2> kPrecisions{Precision::f32, Precision::f64};

constexpr std::array<Routine, 4> kRoutines{Routine::gbmv, Routine::sbmv, Routine::tbmv,
                                           Routine::tbsv};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string threshold_key(Routine routine, std::string_view variant, Precision precision) {
    std::string key = to_string(routine);
    key += '.';
    key += variant;
    key += '.';
    key += to_string(precision);
    return key;
}

std::span<const std::string_view> variants_of(Routine routine) {
    switch (routine) {
        case Routine::gbmv: return kGbmvVariants;
        case Routine::sbmv: return kSbmvVariants;
        default: return kTriangularVariants;
    }
}

bool valid_variant(Routine routine, std::string_view variant) {
    for (auto v : variants_of(routine))
        if (v == variant) return true;
    return false;
}

DispatchConfig default_config() {
    DispatchConfig cfg;
    auto set = [&cfg](Routine r, std::string_view variant, index_t f32_value, index_t f64_value) {
        cfg.thresholds[threshold_key(r, variant, Precision::f32)] = f32_value;
        cfg.thresholds[threshold_key(r, variant, Precision::f64)] = f64_value;
    };
    set(Routine::gbmv, "N", 13, 19);
    set(Routine::gbmv, "T", 13, 19);
    set(Routine::sbmv, "lower", 19, 13);
    set(Routine::sbmv, "upper", 19, 13);
    set(Routine::tbmv, "LN", 6, 6);
    set(Routine::tbmv, "UN", 6, 6);
    set(Routine::tbmv, "LT", kUnlimited, kUnlimited);
    set(Routine::tbmv, "UT", kUnlimited, kUnlimited);
    for (auto v : kTriangularVariants) set(Routine::tbsv, v, kUnlimited, kUnlimited);
    return cfg;
}

DispatchConfig load_config(std::string_view text) {
    DispatchConfig cfg = default_config();
    const DispatchConfig defaults = cfg;
    std::size_t line_number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_number;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw config_error("line " + std::to_string(line_number) +
                               ": expected 'key = value', got '" + std::string(line) + "'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));

        if (defaults.thresholds.find(std::string(key)) == defaults.thresholds.end())
            throw config_error("line " + std::to_string(line_number) + ": unknown key '" +
                               std::string(key) + "'");

        index_t threshold = 0;
        if (value == "unlimited") {
            threshold = kUnlimited;
        } else {
            const auto [ptr, ec] =
                std::from_chars(value.data(), value.data() + value.size(), threshold);
            if (ec != std::errc{} || ptr != value.data() + value.size() || threshold < 0)
                throw config_error("line " + std::to_string(line_number) +
                                   ": value for '" + std::string(key) +
                                   "' must be a non-negative integer or 'unlimited', got '" +
                                   std::string(value) + "'");
        }
        cfg.thresholds[std::string(key)] = threshold;
    }
    return cfg;
}

std::string serialize_config(const DispatchConfig& config) {
    const DispatchConfig defaults = default_config();
    std::ostringstream out;
    for (Routine r : kRoutines) {
        for (auto variant : variants_of(r)) {
            for (Precision p : kPrecisions) {
                const std::string key = threshold_key(r, variant, p);
                auto it = config.thresholds.find(key);
                const index_t threshold =
                    it != config.thresholds.end() ? it->second : defaults.thresholds.at(key);
                out << key << " = " << threshold << '\n';
            }
        }
    }
    return out.str();
}

Impl select_impl(Routine routine, std::string_view variant, Precision precision, index_t bandwidth,
                 const DispatchConfig& config) {
    const std::string key = threshold_key(routine, variant, precision);
    auto it = config.thresholds.find(key);
    if (it == config.thresholds.end()) {
        static const DispatchConfig defaults = default_config();
        it = defaults.thresholds.find(key);
        if (it == defaults.thresholds.end()) return Impl::baseline;
    }
    return bandwidth <= it->second ? Impl::optimized : Impl::baseline;
}

}  // namespace bandblas
