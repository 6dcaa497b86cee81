#include "evacast/core/time.hpp"

#include "evacast/core/error.hpp"

#include <cctype>
#include <cstdio>

namespace evacast {

namespace {

int read_digits(std::string_view s, std::size_t& pos, std::size_t count) {
    if (pos + count > s.size()) {
        throw ParseError("timestamp truncated: '" + std::string(s) + "'");
    }
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const char c = s[pos + i];
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw ParseError("invalid timestamp '" + std::string(s) + "'");
        }
        value = value * 10 + (c - '0');
    }
    pos += count;
    return value;
}

void expect(std::string_view s, std::size_t& pos, char c) {
    if (pos >= s.size() || s[pos] != c) {
        throw ParseError("invalid timestamp '" + std::string(s) + "'");
    }
    ++pos;
}

} // namespace

Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    std::size_t pos = 0;
    const int y = read_digits(text, pos, 4);
    expect(text, pos, '-');
    const int mo = read_digits(text, pos, 2);
    expect(text, pos, '-');
    const int d = read_digits(text, pos, 2);
    if (pos >= text.size() || (text[pos] != 'T' && text[pos] != ' ')) {
        throw ParseError("invalid timestamp '" + std::string(text) + "'");
    }
    ++pos;
    const int hh = read_digits(text, pos, 2);
    expect(text, pos, ':');
    const int mm = read_digits(text, pos, 2);
    int ss = 0;
    if (pos < text.size() && text[pos] == ':') {
        ++pos;
        ss = read_digits(text, pos, 2);
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                ++pos;
            }
        }
    }
    int offset_minutes = 0;
    if (pos < text.size()) {
        const char z = text[pos];
        if (z == 'Z' || z == 'z') {
            ++pos;
        } else if (z == '+' || z == '-') {
            ++pos;
            const int oh = read_digits(text, pos, 2);
            if (pos < text.size() && text[pos] == ':') {
                ++pos;
            }
            const int om = read_digits(text, pos, 2);
            offset_minutes = (z == '+' ? 1 : -1) * (oh * 60 + om);
        }
    }
    if (pos != text.size()) {
        throw ParseError("trailing characters in timestamp '" + std::string(text) + "'");
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
        throw ParseError("out-of-range timestamp '" + std::string(text) + "'");
    }
    return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} - minutes{offset_minutes};
}

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto day_start = floor<days>(t);
    const year_month_day ymd{day_start};
    const auto tod = t - day_start;
    const auto h = duration_cast<hours>(tod).count();
    const auto m = duration_cast<minutes>(tod).count() % 60;
    const auto s = tod.count() % 60;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(h), static_cast<long long>(m), static_cast<long long>(s));
    return buf;
}

Timestamp floor_to_day(Timestamp t) {
    return std::chrono::floor<std::chrono::days>(t);
}

double hours_between(Timestamp a, Timestamp b) {
    return static_cast<double>((a - b).count()) / 3600.0;
}

} // namespace evacast
