#pragma once

// Model archive layout (format version 1):
//
//   Text header, one "key value" record per line, UTF-8:
//     CACO-ARCHIVE 1
//     byte-order little-endian
//     variant <SRC|DICT|MIM|ALL|CLWE|SUP|COM>
//     distill <0|1>
//     char_dim <n>
//     hidden <n>
//     word_dim <n>
//     dan_hidden <n1,n2,...>         ("-" when there are no hidden layers)
//     dropout <shortest round-trip decimal>
//     dropout_input <0|1>
//     labels <L>                     followed by L lines "label <name>"
//     chars <N> <cp1> ... <cpN>      decimal code points, ascending
//     lookup_words <V>               followed by V lines "word <utf8>" (SUP only, else 0)
//     clwe none | clwe <rows> <dim> <fingerprint-hex> <path>
//     tensors <K>
//     payload
//   Binary payload, K tensor blocks in Model::parameters() order:
//     u32 name length, name bytes, u32 rank, rank x u64 extents,
//     prod(extents) x f64 values
//   Trailer: the 8 bytes "CACOEND\n".
// Every integer and double is little-endian regardless of host byte order.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "caco/data.hpp"
#include "caco/model.hpp"

namespace caco {

inline constexpr int archive_version = 1;

class ArchiveError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader {
public:
    ByteReader(const std::string& bytes, std::size_t pos, std::string source)
        : bytes_(bytes), pos_(pos), source_(std::move(source)) {}

    std::uint64_t u64() { return read(8); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(read(4)); }
    double f64() { return std::bit_cast<double>(read(8)); }

    std::string str(std::size_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw ArchiveError(source_ + ": archive is truncated");
    }

    std::uint64_t read(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }

    const std::string& bytes_;
    std::size_t pos_;
    std::string source_;
};

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

} // namespace detail

inline constexpr char archive_trailer[] = "CACOEND\n";

/// Serializes a model to bytes (see the layout at the top of this header).
inline std::string serialize_model(Model& model) {
    const auto& c = model.config;
    std::ostringstream h;
    h << "CACO-ARCHIVE " << archive_version << '\n';
    h << "byte-order little-endian\n";
    h << "variant " << variant_name(c.variant) << '\n';
    h << "distill " << (c.distill ? 1 : 0) << '\n';
    h << "char_dim " << c.embedder.char_dim << '\n';
    h << "hidden " << c.embedder.hidden << '\n';
    h << "word_dim " << c.embedder.word_dim << '\n';
    h << "dan_hidden ";
    if (c.dan_hidden.empty()) h << '-';
    for (std::size_t i = 0; i < c.dan_hidden.size(); ++i) h << (i ? "," : "") << c.dan_hidden[i];
    h << '\n';
    h << "dropout " << detail::format_double(c.dropout) << '\n';
    h << "dropout_input " << (c.dropout_input ? 1 : 0) << '\n';
    h << "labels " << model.labels.size() << '\n';
    for (const auto& l : model.labels.names()) h << "label " << l << '\n';
    h << "chars " << model.chars.chars().size();
    for (char32_t cp : model.chars.chars()) h << ' ' << static_cast<std::uint32_t>(cp);
    h << '\n';
    const bool sup = model.lookup && model.lookup->is_trainable();
    h << "lookup_words " << (sup ? model.lookup->vocabulary().size() : 0) << '\n';
    if (sup)
        for (const auto& w : model.lookup->vocabulary()) h << "word " << utf8_encode(w) << '\n';
    if (model.clwe_reference) {
        const auto& r = *model.clwe_reference;
        h << "clwe " << r.rows << ' ' << r.dim << ' ' << detail::hex64(r.fingerprint) << ' ' << r.path << '\n';
    } else {
        h << "clwe none\n";
    }
    const auto params = model.parameters();
    h << "tensors " << params.size() << '\n';
    h << "payload\n";

    std::string out = h.str();
    for (const Parameter* p : params) {
        detail::put_u32(out, static_cast<std::uint32_t>(p->name.size()));
        out += p->name;
        detail::put_u32(out, static_cast<std::uint32_t>(p->value.rank()));
        for (auto e : p->value.shape()) detail::put_u64(out, e);
        for (double v : p->value.data()) detail::put_u64(out, std::bit_cast<std::uint64_t>(v));
    }
    out.append(archive_trailer, 8);
    return out;
}

inline void save_model(Model& model, const std::filesystem::path& path) {
    const std::string bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ArchiveError(path.string() + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ArchiveError(path.string() + ": write failed");
}

struct LoadOptions {
    /// Replaces the CLWE path recorded in the archive.
    std::optional<std::filesystem::path> clwe_path;
};

inline Model deserialize_model(const std::string& bytes, const std::string& source, const LoadOptions& options = {}) {
    std::size_t pos = 0;
    auto next_line = [&]() -> std::string {
        auto nl = bytes.find('\n', pos);
        if (nl == std::string::npos) throw ArchiveError(source + ": archive is truncated in the header");
        std::string line = bytes.substr(pos, nl - pos);
        pos = nl + 1;
        return line;
    };
    auto expect = [&](const std::string& key) -> std::string {
        std::string line = next_line();
        if (line.compare(0, key.size() + 1, key + " ") != 0 && line != key)
            throw ArchiveError(source + ": expected '" + key + "' record, found '" + line.substr(0, 40) + "'");
        return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
    };
    auto to_size = [&](const std::string& s) -> std::size_t {
        try {
            std::size_t used = 0;
            auto v = std::stoull(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            throw ArchiveError(source + ": invalid integer '" + s + "'");
        }
    };

    const std::string magic = next_line();
    if (magic.rfind("CACO-ARCHIVE ", 0) != 0) throw ArchiveError(source + ": not a model archive");
    if (magic != "CACO-ARCHIVE " + std::to_string(archive_version))
        throw ArchiveError(source + ": unsupported archive version '" + magic.substr(13) + "' (expected " +
                           std::to_string(archive_version) + ")");
    if (expect("byte-order") != "little-endian") throw ArchiveError(source + ": unsupported byte order");

    ModelConfig c;
    try {
        c.variant = parse_variant(expect("variant"));
    } catch (const ConfigError& e) {
        throw ArchiveError(source + ": " + e.what());
    }
    c.distill = expect("distill") == "1";
    c.embedder.char_dim = to_size(expect("char_dim"));
    c.embedder.hidden = to_size(expect("hidden"));
    c.embedder.word_dim = to_size(expect("word_dim"));
    {
        const std::string dh = expect("dan_hidden");
        c.dan_hidden.clear();
        if (dh != "-") {
            std::stringstream ss(dh);
            for (std::string tok; std::getline(ss, tok, ',');) c.dan_hidden.push_back(to_size(tok));
        }
    }
    c.dropout = detail::parse_double(expect("dropout"), source, 0);
    c.dropout_input = expect("dropout_input") == "1";
    const std::size_t nlabels = to_size(expect("labels"));
    std::vector<std::string> label_names;
    for (std::size_t i = 0; i < nlabels; ++i) label_names.push_back(expect("label"));
    std::vector<char32_t> cps;
    {
        std::istringstream cs(expect("chars"));
        std::size_t n = 0;
        cs >> n;
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t cp = 0;
            if (!(cs >> cp)) throw ArchiveError(source + ": chars record is short");
            cps.push_back(static_cast<char32_t>(cp));
        }
    }
    const std::size_t nwords = to_size(expect("lookup_words"));
    std::vector<Word> words;
    for (std::size_t i = 0; i < nwords; ++i) words.push_back(utf8_decode(expect("word")));
    const std::string clwe_line = expect("clwe");
    std::optional<ClweReference> clwe_ref;
    if (clwe_line != "none") {
        std::istringstream cs(clwe_line);
        ClweReference r;
        std::string hex;
        cs >> r.rows >> r.dim >> hex;
        std::getline(cs >> std::ws, r.path);
        r.fingerprint = std::stoull(hex, nullptr, 16);
        clwe_ref = r;
    }
    const std::size_t ntensors = to_size(expect("tensors"));
    if (next_line() != "payload") throw ArchiveError(source + ": missing payload marker");

    std::optional<EmbeddingTable> clwe;
    if (uses_clwe(c.variant)) {
        if (!clwe_ref) throw ArchiveError(source + ": " + std::string(variant_name(c.variant)) + " archive lacks a clwe record");
        const std::filesystem::path path = options.clwe_path ? *options.clwe_path : std::filesystem::path(clwe_ref->path);
        if (path.empty() || !std::filesystem::exists(path))
            throw ArchiveError(source + ": model depends on the frozen CLWE table '" + path.string() +
                               "', which was not found (pass its path explicitly)");
        clwe = load_embeddings(path);
        if (clwe->size() != clwe_ref->rows || clwe->dim() != clwe_ref->dim || clwe->fingerprint() != clwe_ref->fingerprint)
            throw ArchiveError(source + ": CLWE table '" + path.string() + "' differs from the one the model was trained with");
    }

    Rng scratch(0);
    Model m = Model::create(c, LabelSet(label_names), CharVocab::from_chars(cps), scratch, clwe ? &*clwe : nullptr,
                            std::move(words));
    m.clwe_reference = clwe_ref;

    auto params = m.parameters();
    if (params.size() != ntensors)
        throw ArchiveError(source + ": archive has " + std::to_string(ntensors) + " tensors, model expects " +
                           std::to_string(params.size()));
    detail::ByteReader in(bytes, pos, source);
    for (Parameter* p : params) {
        const std::string name = in.str(in.u32());
        if (name != p->name) throw ArchiveError(source + ": expected tensor '" + p->name + "', found '" + name + "'");
        const std::uint32_t rank = in.u32();
        Shape shape;
        for (std::uint32_t i = 0; i < rank; ++i) shape.push_back(static_cast<std::size_t>(in.u64()));
        if (shape != p->value.shape())
            throw ArchiveError(source + ": tensor '" + name + "' has shape " + to_string(shape) + ", expected " +
                               to_string(p->value.shape()));
        for (double& v : p->value.data()) v = in.f64();
    }
    if (in.str(8) != std::string(archive_trailer, 8)) throw ArchiveError(source + ": corrupt archive trailer");
    if (in.remaining() != 0) throw ArchiveError(source + ": trailing bytes after archive");
    return m;
}

inline Model load_model(const std::filesystem::path& path, const LoadOptions& options = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArchiveError(path.string() + ": cannot open archive");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes, path.string(), options);
}

} // namespace caco
