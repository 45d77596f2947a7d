#ifndef EWNOISE_XML_HPP
#define EWNOISE_XML_HPP

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ewnoise::xml {

// Minimal XML element tree, sufficient for annotation-style documents:
// elements, attributes, character data, comments, an optional XML
// declaration, and the five predefined entities plus numeric references.
// DOCTYPE, CDATA, and processing instructions other than the declaration
// are rejected.
struct Element {
    std::string name;
    std::map<std::string, std::string> attributes;
    std::string text; // concatenated character data of this element
    std::vector<Element> children;

    const Element* find(std::string_view child_name) const;
    std::vector<const Element*> find_all(std::string_view child_name) const;
};

/// Parses a document into its root element. Throws Error{MalformedDocument}
/// on any syntax problem; never crashes on arbitrary bytes.
Element parse(std::string_view document);

/// Serializes an element tree (text-only leaves, two-space indentation).
std::string serialize(const Element& root);

} // namespace ewnoise::xml

#endif
