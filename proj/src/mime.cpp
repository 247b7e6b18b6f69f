#include "mailclass/mime.hpp"

#include <array>

#include "mailclass/error.hpp"
#include "mailclass/util.hpp"

namespace mailclass {

namespace {

struct Line {
    std::size_t begin;        // first byte
    std::size_t content_end;  // end of content, excluding "\n" or "\r\n"
    std::size_t end;          // one past the line terminator
};

std::vector<Line> split_lines(std::string_view s) {
    std::vector<Line> lines;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t nl = s.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back({pos, s.size(), s.size()});
            break;
        }
        std::size_t content_end = nl;
        if (content_end > pos && s[content_end - 1] == '\r') --content_end;
        lines.push_back({pos, content_end, nl + 1});
        pos = nl + 1;
    }
    return lines;
}

std::string_view line_text(std::string_view s, const Line& line) {
    return s.substr(line.begin, line.content_end - line.begin);
}

bool is_ws(char c) { return c == ' ' || c == '\t'; }

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        char x = a[i], y = b[i];
        if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
        if (y >= 'A' && y <= 'Z') y = static_cast<char>(y - 'A' + 'a');
        if (x != y) return false;
    }
    return true;
}

struct HeaderBlock {
    std::vector<Header> headers;
    std::string_view body;
    bool has_separator = false;
};

// Splits at the first empty line and unfolds continuation lines.
HeaderBlock split_headers(std::string_view bytes, std::vector<std::string>& warnings) {
    HeaderBlock block;
    const auto lines = split_lines(bytes);
    std::size_t i = 0;
    if (!lines.empty() && line_text(bytes, lines[0]).starts_with("From ")) i = 1;

    for (; i < lines.size(); ++i) {
        const auto text = line_text(bytes, lines[i]);
        if (text.empty()) {
            block.has_separator = true;
            block.body = bytes.substr(lines[i].end);
            break;
        }
        if (is_ws(text.front())) {
            if (block.headers.empty()) {
                warnings.push_back("continuation line before any header ignored");
            } else {
                block.headers.back().value += text;
            }
            continue;
        }
        const auto colon = text.find(':');
        const auto name = colon == std::string_view::npos ? std::string_view{} : trim(text.substr(0, colon));
        if (name.empty()) {
            warnings.push_back("malformed header line ignored: " + std::string(text.substr(0, 60)));
            continue;
        }
        block.headers.push_back({std::string(name), std::string(text.substr(colon + 1))});
    }
    for (auto& h : block.headers) h.value = std::string(trim(h.value));
    return block;
}

std::optional<std::string> find_header(const std::vector<Header>& headers, std::string_view name) {
    for (const auto& h : headers)
        if (iequals(h.name, name)) return h.value;
    return std::nullopt;
}

void parse_entity(const std::vector<Header>& headers, std::string_view body, bool top_level,
                  std::vector<BodyPart>& parts, std::vector<std::string>& warnings, int depth) {
    const auto ct = parse_content_type(find_header(headers, "Content-Type").value_or("text/plain"));
    if (!ct.media_type.starts_with("multipart/")) {
        if (top_level && body.empty()) return;
        BodyPart part;
        part.content_type = ct.media_type.empty() ? "text/plain" : ct.media_type;
        part.charset = to_lower_ascii(trim(ct.param("charset").value_or("us-ascii")));
        part.transfer_encoding =
            to_lower_ascii(trim(find_header(headers, "Content-Transfer-Encoding").value_or("7bit")));
        part.raw_bytes = std::string(body);
        parts.push_back(std::move(part));
        return;
    }

    const auto boundary = ct.param("boundary");
    if (!boundary || boundary->empty())
        throw Error(ErrorCode::MalformedMime, ct.media_type + " without a boundary parameter");
    if (depth > 32) throw Error(ErrorCode::MalformedMime, "multipart nesting too deep");

    const std::string delimiter = "--" + *boundary;
    const auto lines = split_lines(body);
    std::optional<std::size_t> open;  // index of the delimiter line that opened the current part
    bool closed = false;

    auto emit = [&](std::size_t next_line) {
        const std::size_t begin = lines[*open].end;
        const std::size_t end = next_line > *open + 1 ? lines[next_line - 1].content_end : begin;
        auto block = split_headers(body.substr(begin, end - begin), warnings);
        if (!block.has_separator) warnings.push_back("MIME part without header separator; read as headers only");
        parse_entity(block.headers, block.body, false, parts, warnings, depth + 1);
    };

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto text = trim(line_text(body, lines[i]));
        if (!text.starts_with(delimiter)) continue;
        const auto rest = text.substr(delimiter.size());
        if (rest == "--") {
            if (open) emit(i);
            open.reset();
            closed = true;
            break;
        }
        if (!rest.empty()) continue;
        if (open) emit(i);
        open = i;
    }
    if (open) {
        warnings.push_back("multipart body missing closing boundary");
        emit(lines.size());
    } else if (!closed) {
        warnings.push_back("multipart body contains no boundary delimiter");
    }
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

constexpr char32_t kReplacement = 0xFFFD;

std::string sanitize_utf8(std::string_view bytes) {
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    while (i < bytes.size()) {
        const auto b0 = static_cast<unsigned char>(bytes[i]);
        if (b0 < 0x80) {
            out += static_cast<char>(b0);
            ++i;
            continue;
        }
        int len = 0;
        char32_t cp = 0;
        char32_t min = 0;
        if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1F; min = 0x80; }
        else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0F; min = 0x800; }
        else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07; min = 0x10000; }
        bool ok = len > 0 && i + len <= bytes.size();
        for (int k = 1; ok && k < len; ++k) {
            const auto b = static_cast<unsigned char>(bytes[i + k]);
            if ((b & 0xC0) != 0x80) ok = false;
            else cp = (cp << 6) | (b & 0x3F);
        }
        if (ok && (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) ok = false;
        if (ok) {
            out.append(bytes.substr(i, len));
            i += len;
        } else {
            append_utf8(out, kReplacement);
            ++i;
        }
    }
    return out;
}

std::string decode_transfer(const BodyPart& part) {
    if (part.transfer_encoding == "base64") return decode_base64(part.raw_bytes);
    if (part.transfer_encoding == "quoted-printable") return decode_quoted_printable(part.raw_bytes);
    return part.raw_bytes;
}

std::string escape_from_lines(std::string_view message) {
    std::string out;
    out.reserve(message.size() + 16);
    for (const auto& line : split_lines(message)) {
        const auto text = message.substr(line.begin, line.content_end - line.begin);
        std::size_t k = 0;
        while (k < text.size() && text[k] == '>') ++k;
        if (text.substr(k).starts_with("From ")) out += '>';
        out.append(message.substr(line.begin, line.end - line.begin));
    }
    return out;
}

}  // namespace

std::optional<std::string> RawEmail::header(std::string_view name) const { return find_header(headers, name); }

std::optional<std::string> ContentType::param(std::string_view name) const {
    for (const auto& [key, value] : params)
        if (key == name) return value;
    return std::nullopt;
}

ContentType parse_content_type(std::string_view value) {
    ContentType ct;
    auto semi = value.find(';');
    ct.media_type = to_lower_ascii(trim(value.substr(0, semi)));
    while (semi != std::string_view::npos) {
        std::size_t pos = semi + 1;
        while (pos < value.size() && (is_ws(value[pos]) || value[pos] == '\r' || value[pos] == '\n')) ++pos;
        const auto eq = value.find('=', pos);
        if (eq == std::string_view::npos) break;
        const std::string key = to_lower_ascii(trim(value.substr(pos, eq - pos)));
        std::size_t vpos = eq + 1;
        while (vpos < value.size() && is_ws(value[vpos])) ++vpos;
        std::string param_value;
        if (vpos < value.size() && value[vpos] == '"') {
            ++vpos;
            while (vpos < value.size() && value[vpos] != '"') {
                if (value[vpos] == '\\' && vpos + 1 < value.size()) ++vpos;
                param_value += value[vpos++];
            }
            semi = value.find(';', vpos);
        } else {
            semi = value.find(';', vpos);
            param_value = std::string(trim(value.substr(vpos, semi == std::string_view::npos ? semi : semi - vpos)));
        }
        if (!key.empty()) ct.params.emplace_back(key, std::move(param_value));
    }
    return ct;
}

std::vector<RawEmail> parse_mbox(std::string_view bytes) {
    std::vector<RawEmail> emails;
    if (bytes.empty()) return emails;
    const auto lines = split_lines(bytes);
    if (!line_text(bytes, lines[0]).starts_with("From "))
        throw Error(ErrorCode::MalformedMbox, "stream does not begin with a \"From \" line");

    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < lines.size(); ++i)
        if (line_text(bytes, lines[i]).starts_with("From ")) starts.push_back(i);
    starts.push_back(lines.size());

    for (std::size_t m = 0; m + 1 < starts.size(); ++m) {
        std::string message;
        for (std::size_t i = starts[m] + 1; i < starts[m + 1]; ++i) {
            auto raw = bytes.substr(lines[i].begin, lines[i].end - lines[i].begin);
            std::size_t k = 0;
            while (k < raw.size() && raw[k] == '>') ++k;
            if (k > 0 && raw.substr(k).starts_with("From ")) raw.remove_prefix(1);
            message.append(raw);
        }
        const bool last = m + 2 == starts.size();
        bool truncated = false;
        if (message.ends_with("\r\n")) {
            message.resize(message.size() - 2);
        } else if (message.ends_with('\n')) {
            message.pop_back();
        } else if (last) {
            truncated = true;
        }
        RawEmail email = parse_eml(message);
        if (truncated) email.warnings.push_back("final message truncated (no terminating newline)");
        emails.push_back(std::move(email));
    }
    return emails;
}

RawEmail parse_eml(std::string_view bytes) {
    RawEmail email;
    auto block = split_headers(bytes, email.warnings);
    email.headers = std::move(block.headers);
    if (!block.has_separator) {
        if (!bytes.empty()) email.warnings.push_back("missing blank line between headers and body; read as headers only");
        const auto ct = parse_content_type(find_header(email.headers, "Content-Type").value_or("text/plain"));
        if (ct.media_type.starts_with("multipart/") && !ct.param("boundary"))
            throw Error(ErrorCode::MalformedMime, ct.media_type + " without a boundary parameter");
        return email;
    }
    parse_entity(email.headers, block.body, true, email.body_parts, email.warnings, 0);
    return email;
}

std::string serialize_eml(const RawEmail& email) {
    std::string out;
    for (const auto& h : email.headers) out += h.name + ": " + h.value + "\n";
    out += "\n";
    const auto ct = parse_content_type(find_header(email.headers, "Content-Type").value_or("text/plain"));
    if (ct.media_type.starts_with("multipart/")) {
        const std::string delimiter = "--" + ct.param("boundary").value_or("");
        for (const auto& part : email.body_parts) {
            out += delimiter + "\n";
            out += "Content-Type: " + part.content_type + "; charset=\"" + part.charset + "\"\n";
            out += "Content-Transfer-Encoding: " + part.transfer_encoding + "\n\n";
            out += part.raw_bytes + "\n";
        }
        out += delimiter + "--\n";
    } else if (!email.body_parts.empty()) {
        out += email.body_parts.front().raw_bytes;
    }
    return out;
}

std::string serialize_mbox(const std::vector<RawEmail>& emails) {
    std::string out;
    for (const auto& email : emails) {
        out += "From mailclass@localhost Thu Jan  1 00:00:00 1970\n";
        out += escape_from_lines(serialize_eml(email));
        out += "\n";
    }
    return out;
}

std::string decode_base64(std::string_view encoded) {
    static const auto table = [] {
        std::array<int, 256> t{};
        t.fill(-1);
        const std::string_view alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
        for (std::size_t i = 0; i < alphabet.size(); ++i) t[static_cast<unsigned char>(alphabet[i])] = static_cast<int>(i);
        return t;
    }();
    std::string out;
    out.reserve(encoded.size() * 3 / 4);
    std::uint32_t buffer = 0;
    int bits = 0;
    for (char c : encoded) {
        if (c == '=') break;
        const int v = table[static_cast<unsigned char>(c)];
        if (v < 0) continue;
        buffer = (buffer << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out += static_cast<char>((buffer >> bits) & 0xFF);
        }
    }
    return out;
}

std::string decode_quoted_printable(std::string_view encoded) {
    auto hex = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    std::string out;
    out.reserve(encoded.size());
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        const char c = encoded[i];
        if (c != '=') {
            out += c;
            continue;
        }
        if (i + 1 < encoded.size() && encoded[i + 1] == '\n') {
            i += 1;
        } else if (i + 2 < encoded.size() && encoded[i + 1] == '\r' && encoded[i + 2] == '\n') {
            i += 2;
        } else if (i + 2 < encoded.size() && hex(encoded[i + 1]) >= 0 && hex(encoded[i + 2]) >= 0) {
            out += static_cast<char>(hex(encoded[i + 1]) * 16 + hex(encoded[i + 2]));
            i += 2;
        } else {
            out += c;
        }
    }
    return out;
}

std::string decode_charset(std::string_view bytes, std::string_view charset, std::vector<std::string>& warnings) {
    const std::string cs = to_lower_ascii(trim(charset));
    if (cs == "utf-8" || cs == "utf8") return sanitize_utf8(bytes);
    if (cs.empty() || cs == "us-ascii" || cs == "ascii") {
        std::string out;
        out.reserve(bytes.size());
        for (char c : bytes) {
            if (static_cast<unsigned char>(c) < 0x80) out += c;
            else append_utf8(out, kReplacement);
        }
        return out;
    }
    if (cs != "iso-8859-1" && cs != "iso8859-1" && cs != "latin1" && cs != "latin-1")
        warnings.push_back("unsupported charset \"" + cs + "\" decoded as ISO-8859-1");
    std::string out;
    out.reserve(bytes.size());
    for (char c : bytes) append_utf8(out, static_cast<unsigned char>(c));
    return out;
}

std::string strip_html(std::string_view html) {
    std::string text;
    text.reserve(html.size());
    for (std::size_t i = 0; i < html.size(); ++i) {
        if (html[i] == '<') {
            const auto close = html.find('>', i + 1);
            if (close != std::string_view::npos) {
                if (!text.empty() && text.back() != ' ') text += ' ';
                i = close;
                continue;
            }
        }
        text += html[i];
    }

    static constexpr std::array<std::pair<std::string_view, char>, 5> entities{{
        {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&nbsp;", ' '}}};
    std::string out;
    out.reserve(text.size());
    const std::string_view view = text;
    for (std::size_t i = 0; i < view.size(); ++i) {
        bool replaced = false;
        if (view[i] == '&') {
            for (const auto& [entity, ch] : entities) {
                if (view.substr(i).starts_with(entity)) {
                    out += ch;
                    i += entity.size() - 1;
                    replaced = true;
                    break;
                }
            }
        }
        if (!replaced) out += view[i];
    }
    return std::string(trim(out));
}

std::string extract_text(const RawEmail& email) {
    std::vector<std::string> ignored;
    return extract_text(email, ignored);
}

std::string extract_text(const RawEmail& email, std::vector<std::string>& warnings) {
    const std::string subject(trim(email.header("Subject").value_or("")));

    const BodyPart* chosen = nullptr;
    bool html = false;
    for (const auto& part : email.body_parts) {
        if (part.content_type == "text/plain") {
            chosen = &part;
            break;
        }
    }
    if (chosen == nullptr) {
        for (const auto& part : email.body_parts) {
            if (part.content_type == "text/html") {
                chosen = &part;
                html = true;
                break;
            }
        }
    }

    std::string body;
    if (chosen != nullptr) {
        body = decode_charset(decode_transfer(*chosen), chosen->charset, warnings);
        body = html ? strip_html(body) : std::string(trim(body));
    }

    if (subject.empty()) return body;
    if (body.empty()) return subject;
    return subject + " " + body;
}

}  // namespace mailclass
