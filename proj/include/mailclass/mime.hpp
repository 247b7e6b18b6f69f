#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mailclass {

struct Header {
    std::string name;
    std::string value;

    bool operator==(const Header&) const = default;
};

// One leaf MIME part. Nested multiparts are flattened in document order.
struct BodyPart {
    std::string content_type = "text/plain";  // lowercased media type
    std::string transfer_encoding = "7bit";    // lowercased
    std::string charset = "us-ascii";          // lowercased
    std::string raw_bytes;                     // still transfer-encoded

    bool operator==(const BodyPart&) const = default;
};

struct RawEmail {
    std::vector<Header> headers;
    std::vector<BodyPart> body_parts;
    // Non-fatal problems noticed while parsing (truncation, missing separator, ...).
    std::vector<std::string> warnings;

    // First header with this name, case-insensitive.
    std::optional<std::string> header(std::string_view name) const;
};

// mboxrd: messages start at "From " lines; ">From " body lines lose one '>'.
std::vector<RawEmail> parse_mbox(std::string_view bytes);

// A single RFC 5322 message, with MIME multipart splitting.
RawEmail parse_eml(std::string_view bytes);

// Inverse of parse_eml for the information RawEmail retains. Multipart bodies
// are written flat under the boundary taken from the Content-Type header.
std::string serialize_eml(const RawEmail& email);
std::string serialize_mbox(const std::vector<RawEmail>& emails);

struct ContentType {
    std::string media_type;  // lowercased "type/subtype"
    std::vector<std::pair<std::string, std::string>> params;  // names lowercased

    std::optional<std::string> param(std::string_view name) const;
};
ContentType parse_content_type(std::string_view value);

std::string decode_base64(std::string_view encoded);
std::string decode_quoted_printable(std::string_view encoded);

// Decodes bytes in `charset` to UTF-8. Invalid bytes become U+FFFD. Unsupported
// charsets are read as ISO-8859-1 and a warning is appended.
std::string decode_charset(std::string_view bytes, std::string_view charset,
                           std::vector<std::string>& warnings);

// Removes everything between '<' and '>' and decodes &amp; &lt; &gt; &quot; &nbsp;.
std::string strip_html(std::string_view html);

// Subject and body text, joined with one space.
std::string extract_text(const RawEmail& email);
std::string extract_text(const RawEmail& email, std::vector<std::string>& warnings);

}  // namespace mailclass
