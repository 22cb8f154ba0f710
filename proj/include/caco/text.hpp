#pragma once

#include <algorithm>
#include <cstddef>
#include <locale>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "caco/error.hpp"

namespace caco {

/// A word is its sequence of Unicode code points.
using Word = std::u32string;

struct Document {
    std::vector<Word> words;

    friend bool operator==(const Document&, const Document&) = default;
};

struct LabeledExample {
    Document document;
    std::size_t label = 0;

    friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

// ---------------------------------------------------------------------------
// UTF-8

/// Decodes UTF-8; malformed sequences become U+FFFD.
inline std::u32string utf8_decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (c < 0x80) {
            len = 1;
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        }
        bool ok = len > 0 && i + len <= s.size();
        for (std::size_t k = 1; ok && k < len; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) ok = false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (!ok) {
            out.push_back(U'�');
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

inline std::string utf8_encode(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

inline std::string to_utf8(const Document& doc) {
    std::string out;
    for (std::size_t i = 0; i < doc.words.size(); ++i) {
        if (i) out.push_back(' ');
        out += utf8_encode(doc.words[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tokenization

struct TokenizerOptions {
    bool lowercase = true;
};

namespace detail {

inline const std::ctype<wchar_t>& unicode_ctype() {
    static const std::locale loc = [] {
        try {
            return std::locale("C.UTF-8");
        } catch (const std::runtime_error&) {
            return std::locale::classic();
        }
    }();
    return std::use_facet<std::ctype<wchar_t>>(loc);
}

inline bool is_space(char32_t c) {
    return c == U' ' || detail::unicode_ctype().is(std::ctype_base::space, static_cast<wchar_t>(c));
}

inline bool is_punct(char32_t c) {
    return detail::unicode_ctype().is(std::ctype_base::punct, static_cast<wchar_t>(c));
}

inline char32_t to_lower(char32_t c) {
    return static_cast<char32_t>(detail::unicode_ctype().tolower(static_cast<wchar_t>(c)));
}

} // namespace detail

/// Lowercases (optionally), splits on whitespace, strips punctuation from word
/// edges and drops tokens that end up empty. Throws EmptyDocumentError when
/// nothing remains.
inline Document tokenize(std::string_view text, const TokenizerOptions& options = {}) {
    Document doc;
    Word current;
    auto flush = [&] {
        auto first = std::find_if_not(current.begin(), current.end(), detail::is_punct);
        auto last = std::find_if_not(current.rbegin(), current.rend(), detail::is_punct).base();
        if (first < last) doc.words.emplace_back(first, last);
        current.clear();
    };
    for (char32_t c : utf8_decode(text)) {
        if (detail::is_space(c)) {
            flush();
            continue;
        }
        current.push_back(options.lowercase ? detail::to_lower(c) : c);
    }
    flush();
    if (doc.words.empty()) throw EmptyDocumentError("text contains no tokens");
    return doc;
}

// ---------------------------------------------------------------------------
// Labels and characters

class LabelSet {
public:
    LabelSet() = default;
    explicit LabelSet(std::vector<std::string> names) : names_(std::move(names)) {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i].empty()) throw ConfigError("empty label name");
            if (!index_.emplace(names_[i], i).second) throw ConfigError("duplicate label '" + names_[i] + "'");
        }
    }

    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    std::optional<std::size_t> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    friend bool operator==(const LabelSet& a, const LabelSet& b) { return a.names_ == b.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Character inventory shared by all languages. Index 0 is UNK; known code
/// points follow in ascending order.
class CharVocab {
public:
    static constexpr std::size_t unk = 0;

    CharVocab() = default;

    template <class Range>
    static CharVocab from_chars(const Range& chars) {
        CharVocab v;
        std::set<char32_t> sorted(std::begin(chars), std::end(chars));
        v.chars_.assign(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < v.chars_.size(); ++i) v.index_.emplace(v.chars_[i], i + 1);
        return v;
    }

    std::size_t size() const noexcept { return chars_.size() + 1; }

    std::size_t index(char32_t c) const {
        auto it = index_.find(c);
        return it == index_.end() ? unk : it->second;
    }

    std::vector<std::size_t> encode(std::u32string_view word) const {
        std::vector<std::size_t> out;
        out.reserve(word.size());
        for (char32_t c : word) out.push_back(index(c));
        return out;
    }

    /// Known code points in index order (index i + 1).
    const std::vector<char32_t>& chars() const noexcept { return chars_; }

    friend bool operator==(const CharVocab& a, const CharVocab& b) { return a.chars_ == b.chars_; }

private:
    std::vector<char32_t> chars_;
    std::unordered_map<char32_t, std::size_t> index_;
};

/// Collects characters from any mix of resources; order of insertion is irrelevant.
class CharVocabBuilder {
public:
    CharVocabBuilder& add(std::u32string_view word) {
        chars_.insert(word.begin(), word.end());
        return *this;
    }
    CharVocabBuilder& add(const Document& doc) {
        for (const auto& w : doc.words) add(w);
        return *this;
    }
    CharVocabBuilder& add(std::span<const LabeledExample> corpus) {
        for (const auto& ex : corpus) add(ex.document);
        return *this;
    }
    CharVocabBuilder& add(std::span<const Document> docs) {
        for (const auto& d : docs) add(d);
        return *this;
    }

    CharVocab build() const { return CharVocab::from_chars(chars_); }

private:
    std::set<char32_t> chars_;
};

} // namespace caco
