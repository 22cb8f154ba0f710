#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "caco/ops.hpp"
#include "caco/random.hpp"
#include "caco/tensor.hpp"
#include "caco/text.hpp"

namespace caco {

struct WordPair {
    Word source;
    Word target;

    friend bool operator==(const WordPair&, const WordPair&) = default;
};

/// Translation pairs. Duplicates are kept and act as weights.
struct BilingualDictionary {
    std::vector<WordPair> pairs;

    std::size_t size() const noexcept { return pairs.size(); }
    friend bool operator==(const BilingualDictionary&, const BilingualDictionary&) = default;
};

/// Word -> vector table with a fixed dimension.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

    void add(Word word, std::vector<double> vec) {
        if (vec.size() != dim_)
            throw ShapeError("embedding for '" + utf8_encode(word) + "' has dimension " +
                             std::to_string(vec.size()) + ", table dimension is " + std::to_string(dim_));
        if (!index_.emplace(word, words_.size()).second)
            throw Error("duplicate embedding word '" + utf8_encode(word) + "'");
        words_.push_back(std::move(word));
        data_.insert(data_.end(), vec.begin(), vec.end());
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return words_.size(); }
    bool empty() const noexcept { return words_.empty(); }
    const std::vector<Word>& words() const noexcept { return words_; }
    const Word& word(std::size_t i) const { return words_.at(i); }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    Tensor row_tensor(std::size_t i) const {
        auto r = row(i);
        return Tensor::vector(std::vector<double>(r.begin(), r.end()));
    }

    std::optional<std::size_t> find(const Word& w) const {
        auto it = index_.find(w);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Content hash over words and raw values.
    std::uint64_t fingerprint() const {
        std::uint64_t h = fnv1a(&dim_, sizeof dim_);
        for (const auto& w : words_) h = fnv1a(w.data(), w.size() * sizeof(char32_t), h);
        return fnv1a(data_.data(), data_.size() * sizeof(double), h);
    }

    friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
        return a.dim_ == b.dim_ && a.words_ == b.words_ && a.data_ == b.data_;
    }

private:
    std::size_t dim_ = 0;
    std::vector<Word> words_;
    std::vector<double> data_;
    std::unordered_map<Word, std::size_t> index_;
};

struct ParallelPair {
    Document source;
    Document reference;

    friend bool operator==(const ParallelPair&, const ParallelPair&) = default;
};

/// A parallel pair with the frozen reference model's label distribution on its reference side.
struct DistillExample {
    ParallelPair pair;
    Tensor reference_output;

    friend bool operator==(const DistillExample&, const DistillExample&) = default;
};

// ---------------------------------------------------------------------------
// Reading helpers

namespace detail {

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path.string(), 0, "cannot open file for reading");
    return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(path.string() + ": cannot open file for writing");
    return out;
}

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline bool blank(std::string_view line) { return line.find_first_not_of(" \t") == std::string_view::npos; }

/// Shortest text that parses back to exactly `v`.
inline std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

inline double parse_double(const std::string& tok, const std::string& source, std::size_t line) {
    double v = 0.0;
    const char* first = tok.data();
    if (!tok.empty() && tok.front() == '+') ++first;
    auto [end, ec] = std::from_chars(first, tok.data() + tok.size(), v);
    if (ec != std::errc() || end != tok.data() + tok.size() || tok.empty())
        throw FormatError(source, line, "invalid number '" + tok + "'");
    return v;
}

inline Document tokenize_field(std::string_view text, const TokenizerOptions& options, const std::string& source,
                               std::size_t line, const char* what) {
    try {
        return tokenize(text, options);
    } catch (const EmptyDocumentError&) {
        throw FormatError(source, line, std::string(what) + " has no tokens");
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Labeled corpus: "label<TAB>text" per line.

/// Distinct labels appearing in a corpus file, in first-seen order.
inline std::vector<std::string> read_corpus_labels(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    std::vector<std::string> labels;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        detail::strip_cr(line);
        if (detail::blank(line)) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw FormatError(path.string(), n, "missing tab between label and text");
        std::string label = line.substr(0, tab);
        if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
    }
    return labels;
}

inline std::vector<LabeledExample> load_corpus(const std::filesystem::path& path, const LabelSet& labels,
                                               const TokenizerOptions& options = {}) {
    auto in = detail::open_input(path);
    std::vector<LabeledExample> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        detail::strip_cr(line);
        if (detail::blank(line)) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw FormatError(path.string(), n, "missing tab between label and text");
        const std::string label = line.substr(0, tab);
        auto idx = labels.find(label);
        if (!idx) throw FormatError(path.string(), n, "unknown label '" + label + "'");
        out.push_back({detail::tokenize_field(std::string_view(line).substr(tab + 1), options, path.string(), n,
                                              "document"),
                       *idx});
    }
    return out;
}

inline void write_corpus(const std::filesystem::path& path, std::span<const LabeledExample> corpus,
                         const LabelSet& labels) {
    auto out = detail::open_output(path);
    for (const auto& ex : corpus) out << labels.name(ex.label) << '\t' << to_utf8(ex.document) << '\n';
}

// ---------------------------------------------------------------------------
// Dictionary: "source<TAB>target" per line.

inline BilingualDictionary load_dictionary(const std::filesystem::path& path, const TokenizerOptions& options = {}) {
    auto in = detail::open_input(path);
    BilingualDictionary dict;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        detail::strip_cr(line);
        if (detail::blank(line)) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw FormatError(path.string(), n, "missing tab between source and target");
        auto src = detail::tokenize_field(std::string_view(line).substr(0, tab), options, path.string(), n, "source word");
        auto tgt = detail::tokenize_field(std::string_view(line).substr(tab + 1), options, path.string(), n, "target word");
        if (src.words.size() != 1 || tgt.words.size() != 1)
            throw FormatError(path.string(), n, "dictionary entries must be single words");
        dict.pairs.push_back({src.words[0], tgt.words[0]});
    }
    return dict;
}

/// One word per line; blank lines skipped, duplicates kept.
inline std::vector<Word> load_word_list(const std::filesystem::path& path, const TokenizerOptions& options = {}) {
    auto in = detail::open_input(path);
    std::vector<Word> words;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        detail::strip_cr(line);
        if (detail::blank(line)) continue;
        auto doc = detail::tokenize_field(line, options, path.string(), n, "word");
        if (doc.words.size() != 1) throw FormatError(path.string(), n, "expected one word per line");
        words.push_back(std::move(doc.words[0]));
    }
    return words;
}

inline void write_dictionary(const std::filesystem::path& path, const BilingualDictionary& dict) {
    auto out = detail::open_output(path);
    for (const auto& p : dict.pairs) out << utf8_encode(p.source) << '\t' << utf8_encode(p.target) << '\n';
}

/// Uniform sample of `n` pairs without replacement, in sampling order.
inline BilingualDictionary sample_dictionary(const BilingualDictionary& dict, std::size_t n, Rng& rng) {
    if (n > dict.size())
        throw Error("cannot sample " + std::to_string(n) + " pairs from a dictionary of " + std::to_string(dict.size()));
    BilingualDictionary out;
    for (std::size_t i : rng.sample_without_replacement(dict.size(), n)) out.pairs.push_back(dict.pairs[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Embeddings: header "V d", then V lines "word v1 ... vd".

inline EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    const std::string src = path.string();
    std::string line;
    std::size_t n = 0;
    std::size_t rows = 0, dim = 0;
    while (std::getline(in, line)) {
        ++n;
        detail::strip_cr(line);
        if (detail::blank(line)) continue;
        std::istringstream hs(line);
        std::string extra;
        if (!(hs >> rows >> dim) || (hs >> extra) || dim == 0)
            throw FormatError(src, n, "expected header 'V d' with positive d");
        break;
    }
    if (n == 0) throw FormatError(src, 0, "empty embedding file");
    EmbeddingTable table(dim);
    while (std::getline(in, line)) {
        ++n;
        detail::strip_cr(line);
        if (detail::blank(line)) continue;
        if (table.size() == rows) throw FormatError(src, n, "more rows than the declared " + std::to_string(rows));
        std::istringstream ls(line);
        std::string word, tok;
        ls >> word;
        std::vector<double> vec;
        while (ls >> tok) vec.push_back(detail::parse_double(tok, src, n));
        if (vec.size() != dim)
            throw FormatError(src, n, "row has " + std::to_string(vec.size()) + " values, expected " + std::to_string(dim));
        Word w = utf8_decode(word);
        if (table.find(w)) throw FormatError(src, n, "duplicate word '" + word + "'");
        table.add(std::move(w), std::move(vec));
    }
    if (table.size() != rows)
        throw FormatError(src, 0, "declared " + std::to_string(rows) + " rows, found " + std::to_string(table.size()));
    return table;
}

inline void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table) {
    auto out = detail::open_output(path);
    out << table.size() << ' ' << table.dim() << '\n';
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << utf8_encode(table.word(i));
        for (double v : table.row(i)) out << ' ' << detail::format_double(v);
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Parallel documents: "source_text<TAB>reference_text" per line.

inline std::vector<ParallelPair> load_parallel(const std::filesystem::path& path, const TokenizerOptions& options = {}) {
    auto in = detail::open_input(path);
    std::vector<ParallelPair> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        detail::strip_cr(line);
        if (detail::blank(line)) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw FormatError(path.string(), n, "missing tab between source and reference");
        auto rest = std::string_view(line).substr(tab + 1);
        out.push_back({detail::tokenize_field(std::string_view(line).substr(0, tab), options, path.string(), n, "source side"),
                       detail::tokenize_field(rest, options, path.string(), n, "reference side")});
    }
    return out;
}

inline void write_parallel(const std::filesystem::path& path, std::span<const ParallelPair> pairs) {
    auto out = detail::open_output(path);
    for (const auto& p : pairs) out << to_utf8(p.source) << '\t' << to_utf8(p.reference) << '\n';
}

// ---------------------------------------------------------------------------
// Distillation data: "#labels<TAB>l1<TAB>...<TAB>lL" header, then
// "source_text<TAB>reference_text<TAB>p1 ... pL" per line.

struct DistillData {
    LabelSet labels;
    std::vector<DistillExample> examples;
};

inline void write_distill_data(const std::filesystem::path& path, const DistillData& data) {
    auto out = detail::open_output(path);
    out << "#labels";
    for (const auto& l : data.labels.names()) out << '\t' << l;
    out << '\n';
    for (const auto& ex : data.examples) {
        out << to_utf8(ex.pair.source) << '\t' << to_utf8(ex.pair.reference) << '\t';
        for (std::size_t i = 0; i < ex.reference_output.size(); ++i)
            out << (i ? " " : "") << detail::format_double(ex.reference_output[i]);
        out << '\n';
    }
}

inline DistillData load_distill_data(const std::filesystem::path& path, const TokenizerOptions& options = {}) {
    auto in = detail::open_input(path);
    const std::string src = path.string();
    DistillData data;
    std::string line;
    std::size_t n = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++n;
        detail::strip_cr(line);
        if (detail::blank(line)) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1)
            fields.push_back(line.substr(start, tab - start));
        fields.push_back(line.substr(start));
        if (!have_header) {
            if (fields.front() != "#labels" || fields.size() < 2) throw FormatError(src, n, "expected '#labels' header");
            data.labels = LabelSet(std::vector<std::string>(fields.begin() + 1, fields.end()));
            have_header = true;
            continue;
        }
        if (fields.size() != 3) throw FormatError(src, n, "expected source, reference and probabilities fields");
        std::istringstream ps(fields[2]);
        std::vector<double> probs;
        for (std::string tok; ps >> tok;) probs.push_back(detail::parse_double(tok, src, n));
        if (probs.size() != data.labels.size())
            throw FormatError(src, n, "expected " + std::to_string(data.labels.size()) + " probabilities");
        try {
            validate_distribution(probs, "reference output");
        } catch (const Error& e) {
            throw FormatError(src, n, e.what());
        }
        data.examples.push_back({{detail::tokenize_field(fields[0], options, src, n, "source side"),
                                  detail::tokenize_field(fields[1], options, src, n, "reference side")},
                                 Tensor::vector(std::move(probs))});
    }
    if (!have_header) throw FormatError(src, 0, "empty distillation file");
    return data;
}

} // namespace caco
