#include "core/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace ermm {

std::vector<char32_t> utf8_decode(const std::string& text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        char32_t cp = c;
        std::size_t len = 1;
        if ((c & 0x80u) == 0) {
            len = 1;
        } else if ((c & 0xE0u) == 0xC0u) {
            len = 2;
            cp = c & 0x1Fu;
        } else if ((c & 0xF0u) == 0xE0u) {
            len = 3;
            cp = c & 0x0Fu;
        } else if ((c & 0xF8u) == 0xF0u) {
            len = 4;
            cp = c & 0x07u;
        } else {
            out.push_back(c);
            ++i;
            continue;
        }
        if (i + len > n) {
            out.push_back(c);
            ++i;
            continue;
        }
        bool valid = true;
        char32_t decoded = cp;
        for (std::size_t k = 1; k < len; ++k) {
            const unsigned char cc = static_cast<unsigned char>(text[i + k]);
            if ((cc & 0xC0u) != 0x80u) {
                valid = false;
                break;
            }
            decoded = (decoded << 6) | (cc & 0x3Fu);
        }
        if (!valid) {
            out.push_back(c);
            ++i;
            continue;
        }
        out.push_back(decoded);
        i += len;
    }
    return out;
}

std::size_t codepoint_count(const std::string& text) {
    return utf8_decode(text).size();
}

std::string trim(const std::string& text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

std::string to_lower_ascii(const std::string& text) {
    std::string out = text;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

namespace {

// Latin-1 supplement and Latin Extended-A fold table; anything outside is
// passed through unchanged.
char fold_latin(char32_t cp) {
    if (cp < 0x80) return static_cast<char>(std::tolower(static_cast<int>(cp)));
    switch (cp) {
    case U'à': case U'á': case U'â': case U'ã': case U'ä': case U'å':
    case U'À': case U'Á': case U'Â': case U'Ã': case U'Ä': case U'Å':
    case U'ā': case U'ă': case U'ą': case U'Ā': case U'Ă': case U'Ą':
        return 'a';
    case U'è': case U'é': case U'ê': case U'ë':
    case U'È': case U'É': case U'Ê': case U'Ë':
    case U'ē': case U'ĕ': case U'ė': case U'ę': case U'ě':
    case U'Ē': case U'Ĕ': case U'Ė': case U'Ę': case U'Ě':
        return 'e';
    case U'ì': case U'í': case U'î': case U'ï':
    case U'Ì': case U'Í': case U'Î': case U'Ï':
    case U'ĩ': case U'ī': case U'ĭ': case U'į': case U'ı':
        return 'i';
    case U'ò': case U'ó': case U'ô': case U'õ': case U'ö': case U'ø':
    case U'Ò': case U'Ó': case U'Ô': case U'Õ': case U'Ö': case U'Ø':
    case U'ō': case U'ŏ': case U'ő':
        return 'o';
    case U'ù': case U'ú': case U'û': case U'ü':
    case U'Ù': case U'Ú': case U'Û': case U'Ü':
    case U'ũ': case U'ū': case U'ŭ': case U'ů': case U'ű': case U'ų':
        return 'u';
    case U'ç': case U'Ç': case U'ć': case U'ĉ': case U'č':
        return 'c';
    case U'ñ': case U'Ñ': case U'ń': case U'ň':
        return 'n';
    case U'ý': case U'ÿ': case U'Ý':
        return 'y';
    case U'š': case U'ś': case U'Š':
        return 's';
    case U'ž': case U'ź': case U'ż': case U'Ž':
        return 'z';
    default:
        return '\0';
    }
}

} // namespace

std::string normalize_city_name(const std::string& name) {
    std::string out;
    out.reserve(name.size());
    for (char32_t cp : utf8_decode(trim(name))) {
        const char folded = fold_latin(cp);
        if (folded != '\0') {
            out.push_back(folded);
        } else if (cp < 0x80) {
            out.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
        }
        // non-Latin code points are dropped from the join key
    }
    // collapse repeated spaces introduced by dropped characters
    std::string collapsed;
    collapsed.reserve(out.size());
    for (char c : out) {
        if (c == ' ' && !collapsed.empty() && collapsed.back() == ' ') continue;
        collapsed.push_back(c);
    }
    return trim(collapsed);
}

std::vector<std::string> tokenize_words(const std::string& text) {
    std::vector<std::string> words;
    std::string current;
    auto flush = [&]() {
        std::size_t begin = 0;
        std::size_t end = current.size();
        auto is_punct = [](unsigned char c) {
            return std::ispunct(c) != 0;
        };
        while (begin < end && is_punct(static_cast<unsigned char>(current[begin]))) ++begin;
        while (end > begin && is_punct(static_cast<unsigned char>(current[end - 1]))) --end;
        if (end > begin) {
            words.push_back(current.substr(begin, end - begin));
        }
        current.clear();
    };
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            flush();
        } else {
            current.push_back(static_cast<char>(c));
        }
    }
    flush();
    return words;
}

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

} // namespace

std::optional<double> parse_flexible_number(const std::string& raw) {
    // Keep sign, digits and separators; drop whitespace and currency
    // decoration. Any other letter-ish content makes the value non-numeric.
    std::string s;
    s.reserve(raw.size());
    bool seen_digit = false;
    for (char32_t cp : utf8_decode(raw)) {
        if (cp == U' ' || cp == U'\t' || cp == 0x00A0 || cp == 0x202F) continue;
        if (cp == U'$' || cp == U'€' || cp == U'£' || cp == U'¥' || cp == U'%') continue;
        if (cp < 0x80) {
            const char c = static_cast<char>(cp);
            if (std::isdigit(static_cast<unsigned char>(c))) {
                seen_digit = true;
                s.push_back(c);
            } else if (c == '+' || c == '-' || c == '.' || c == ',') {
                s.push_back(c);
            } else if ((c == 'e' || c == 'E') && seen_digit) {
                s.push_back('e');
            } else if (c == 'R' && !seen_digit && s.empty()) {
                // currency prefix as in "R$ 1.234"
                continue;
            } else {
                return std::nullopt;
            }
        } else {
            return std::nullopt;
        }
    }
    if (!seen_digit) return std::nullopt;

    std::string sign;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        sign = s.front() == '-' ? "-" : "";
        s.erase(s.begin());
    }
    if (s.find('+') != std::string::npos || s.find('-') != std::string::npos) {
        // interior signs only valid right after an exponent marker
        const std::size_t epos = s.find('e');
        const std::size_t pos = s.find_first_of("+-");
        if (epos == std::string::npos || pos != epos + 1) return std::nullopt;
    }

    const std::size_t last_dot = s.rfind('.');
    const std::size_t last_comma = s.rfind(',');
    std::string normalized;
    if (last_dot != std::string::npos && last_comma != std::string::npos) {
        // Both present: the rightmost separator is the decimal point.
        const char decimal = last_dot > last_comma ? '.' : ',';
        for (char c : s) {
            if (c == '.' || c == ',') {
                if (c == decimal) normalized.push_back('.');
            } else {
                normalized.push_back(c);
            }
        }
        // the decimal separator must occur exactly once
        if (std::count(normalized.begin(), normalized.end(), '.') != 1) return std::nullopt;
    } else if (last_dot != std::string::npos || last_comma != std::string::npos) {
        const char sep = last_dot != std::string::npos ? '.' : ',';
        std::vector<std::string> parts;
        std::string part;
        for (char c : s) {
            if (c == sep) {
                parts.push_back(part);
                part.clear();
            } else {
                part.push_back(c);
            }
        }
        parts.push_back(part);
        for (const auto& p : parts) {
            if (p.find('e') == std::string::npos && !p.empty() && !all_digits(p)) {
                return std::nullopt;
            }
        }
        bool grouping = false;
        if (parts.size() >= 2) {
            // Grouping needs every interior group of exactly three digits
            // and a 1-3 digit nonzero-looking lead.
            grouping = true;
            const std::string& head = parts.front();
            if (head.empty() || head.size() > 3 || head == "0") grouping = false;
            for (std::size_t i = 1; i < parts.size() && grouping; ++i) {
                if (parts[i].size() != 3 || !all_digits(parts[i])) grouping = false;
            }
            // A single trailing group of 1-2 digits reads as a decimal.
            if (parts.size() == 2 && parts.back().size() <= 2) grouping = false;
        }
        if (grouping) {
            for (const auto& p : parts) normalized += p;
        } else {
            if (parts.size() != 2) return std::nullopt;
            normalized = parts[0] + "." + parts[1];
        }
    } else {
        normalized = s;
    }

    if (normalized.empty() || normalized == ".") return std::nullopt;
    try {
        std::size_t consumed = 0;
        const double value = std::stod(sign + normalized, &consumed);
        if (consumed != sign.size() + normalized.size()) return std::nullopt;
        if (!std::isfinite(value)) return std::nullopt;
        return value;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::string format_double(double value) {
    if (value == 0.0) return "0";
    char buf[64];
    // shortest representation that round-trips
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

bool starts_with(const std::string& text, const std::string& prefix) {
    return text.size() >= prefix.size() &&
           text.compare(0, prefix.size(), prefix) == 0;
}

} // namespace ermm
