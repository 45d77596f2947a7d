#include "ewnoise/xml.hpp"

#include <cctype>
#include <cstdlib>

#include "ewnoise/error.hpp"

namespace ewnoise::xml {

namespace {

constexpr int kMaxDepth = 64;

[[noreturn]] void fail(size_t pos, const std::string& what) {
    throw Error(ErrorKind::MalformedDocument,
                what + " at byte " + std::to_string(pos));
}

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
    return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
           c == '-' || c == '.';
}

struct Cursor {
    std::string_view doc;
    size_t pos = 0;

    bool eof() const { return pos >= doc.size(); }
    char peek() const { return doc[pos]; }
    bool starts_with(std::string_view s) const {
        return doc.compare(pos, s.size(), s) == 0;
    }
    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(doc[pos]))) ++pos;
    }

    std::string read_name() {
        if (eof() || !is_name_start(doc[pos])) fail(pos, "expected name");
        size_t start = pos;
        while (!eof() && is_name_char(doc[pos])) ++pos;
        return std::string(doc.substr(start, pos - start));
    }

    void expect(char c) {
        if (eof() || doc[pos] != c)
            fail(pos, std::string("expected '") + c + "'");
        ++pos;
    }

    // Decodes one entity reference starting at '&'.
    void append_entity(std::string& out) {
        size_t start = pos;
        ++pos; // '&'
        size_t end = doc.find(';', pos);
        if (end == std::string_view::npos || end - pos == 0 || end - pos > 8)
            fail(start, "bad entity reference");
        std::string_view ent = doc.substr(pos, end - pos);
        if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "amp") out += '&';
        else if (ent == "apos") out += '\'';
        else if (ent == "quot") out += '"';
        else if (ent.size() > 1 && ent[0] == '#') {
            int base = 10;
            std::string digits(ent.substr(1));
            if (digits.size() > 1 && (digits[0] == 'x' || digits[0] == 'X')) {
                base = 16;
                digits.erase(0, 1);
            }
            char* endp = nullptr;
            long code = std::strtol(digits.c_str(), &endp, base);
            if (endp == digits.c_str() || *endp != '\0' || code <= 0 || code > 0x10FFFF)
                fail(start, "bad character reference");
            if (code < 0x80) {
                out += static_cast<char>(code);
            } else {
                // Encode as UTF-8.
                if (code < 0x800) {
                    out += static_cast<char>(0xC0 | (code >> 6));
                } else if (code < 0x10000) {
                    out += static_cast<char>(0xE0 | (code >> 12));
                    out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                } else {
                    out += static_cast<char>(0xF0 | (code >> 18));
                    out += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
                    out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
                }
                out += static_cast<char>(0x80 | (code & 0x3F));
            }
        } else {
            fail(start, "unknown entity '" + std::string(ent) + "'");
        }
        pos = end + 1;
    }

    std::string read_attr_value() {
        if (eof() || (doc[pos] != '"' && doc[pos] != '\'')) fail(pos, "expected quote");
        char quote = doc[pos];
        ++pos;
        std::string out;
        while (true) {
            if (eof()) fail(pos, "unterminated attribute value");
            char c = doc[pos];
            if (c == quote) { ++pos; break; }
            if (c == '<') fail(pos, "'<' in attribute value");
            if (c == '&') { append_entity(out); continue; }
            out += c;
            ++pos;
        }
        return out;
    }

    void skip_comment() {
        // at "<!--"
        size_t end = doc.find("-->", pos + 4);
        if (end == std::string_view::npos) fail(pos, "unterminated comment");
        pos = end + 3;
    }

    void skip_declaration() {
        // at "<?"
        size_t end = doc.find("?>", pos + 2);
        if (end == std::string_view::npos) fail(pos, "unterminated declaration");
        pos = end + 2;
    }
};

} // namespace

const Element* Element::find(std::string_view child_name) const {
    for (const Element& c : children)
        if (c.name == child_name) return &c;
    return nullptr;
}

std::vector<const Element*> Element::find_all(std::string_view child_name) const {
    std::vector<const Element*> out;
    for (const Element& c : children)
        if (c.name == child_name) out.push_back(&c);
    return out;
}

Element parse(std::string_view document) {
    Cursor cur{document};
    Element root;
    bool have_root = false;

    // Open-element stack; stack.back() is the element currently being filled.
    std::vector<Element> stack;

    while (true) {
        if (cur.eof()) {
            if (!stack.empty()) fail(cur.pos, "unclosed element <" + stack.back().name + ">");
            break;
        }
        char c = cur.peek();
        if (c == '<') {
            if (cur.starts_with("<!--")) { cur.skip_comment(); continue; }
            if (cur.starts_with("<?")) {
                if (!stack.empty() || have_root) fail(cur.pos, "misplaced declaration");
                cur.skip_declaration();
                continue;
            }
            if (cur.starts_with("<!")) fail(cur.pos, "unsupported markup construct");
            if (cur.starts_with("</")) {
                size_t tag_pos = cur.pos;
                cur.pos += 2;
                std::string name = cur.read_name();
                cur.skip_ws();
                cur.expect('>');
                if (stack.empty() || stack.back().name != name)
                    fail(tag_pos, "mismatched closing tag </" + name + ">");
                Element done = std::move(stack.back());
                stack.pop_back();
                if (stack.empty()) {
                    root = std::move(done);
                    have_root = true;
                } else {
                    stack.back().children.push_back(std::move(done));
                }
                continue;
            }
            // Opening tag.
            size_t tag_pos = cur.pos;
            ++cur.pos;
            if (have_root && stack.empty()) fail(tag_pos, "trailing content after root element");
            Element elem;
            elem.name = cur.read_name();
            while (true) {
                cur.skip_ws();
                if (cur.eof()) fail(cur.pos, "unterminated tag");
                if (cur.peek() == '>') { ++cur.pos; break; }
                if (cur.starts_with("/>")) {
                    cur.pos += 2;
                    if (stack.empty()) {
                        root = std::move(elem);
                        have_root = true;
                    } else {
                        stack.back().children.push_back(std::move(elem));
                    }
                    elem.name.clear();
                    break;
                }
                std::string attr = cur.read_name();
                cur.skip_ws();
                cur.expect('=');
                cur.skip_ws();
                std::string value = cur.read_attr_value();
                if (!elem.attributes.emplace(attr, value).second)
                    fail(tag_pos, "duplicate attribute '" + attr + "'");
            }
            if (!elem.name.empty()) {
                if (static_cast<int>(stack.size()) >= kMaxDepth)
                    fail(tag_pos, "nesting too deep");
                stack.push_back(std::move(elem));
            }
        } else {
            // Character data.
            if (stack.empty()) {
                if (std::isspace(static_cast<unsigned char>(c))) { ++cur.pos; continue; }
                fail(cur.pos, "content outside root element");
            }
            std::string& text = stack.back().text;
            if (c == '&') cur.append_entity(text);
            else { text += c; ++cur.pos; }
        }
    }
    if (!have_root) fail(0, "no root element");
    return root;
}

namespace {

void escape_into(std::string& out, const std::string& s) {
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
}

void serialize_into(std::string& out, const Element& e, int indent) {
    out.append(indent * 2, ' ');
    out += '<';
    out += e.name;
    for (const auto& [k, v] : e.attributes) {
        out += ' ';
        out += k;
        out += "=\"";
        escape_into(out, v);
        out += '"';
    }
    if (e.children.empty() && e.text.empty()) {
        out += "/>\n";
        return;
    }
    out += '>';
    if (e.children.empty()) {
        escape_into(out, e.text);
    } else {
        out += '\n';
        for (const Element& c : e.children) serialize_into(out, c, indent + 1);
        out.append(indent * 2, ' ');
    }
    out += "</";
    out += e.name;
    out += ">\n";
}

} // namespace

std::string serialize(const Element& root) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    serialize_into(out, root, 0);
    return out;
}

} // namespace ewnoise::xml
