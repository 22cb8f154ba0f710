#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace caco;
using namespace caco::testing;

namespace {

struct Built {
    Model model;
    std::filesystem::path clwe_path;
};

Built build(Variant v, bool distill, const TempDir& dir, std::uint64_t seed = 1) {
    EmbeddingTable clwe(4);
    clwe.add(w("gato"), {0.1, 0.2, 0.3, 0.4});
    clwe.add(w("perro"), {-0.5, 0.0, 0.5, 1.0});
    const auto clwe_path = dir / "clwe.txt";
    write_embeddings(clwe_path, clwe);
    CharVocabBuilder chars;
    chars.add(w("gatoperrñ"));
    Rng rng(seed);
    ModelConfig c = tiny_config(v, distill);
    Model m = Model::create(c, LabelSet({"A", "B", "C"}), chars.build(), rng, &clwe, {w("gato"), w("perro")});
    if (m.clwe_reference) m.clwe_reference->path = clwe_path.string();
    // Perturb every parameter so zero-initialized tensors are exercised too.
    for (auto* p : m.parameters())
        for (double& x : p->value.data()) x += rng.normal() * 1e-3;
    return {std::move(m), clwe_path};
}

const std::vector<Document>& probes() {
    static const std::vector<Document> d{doc("gato"), doc("perro gato ñu"), doc("zorro")};
    return d;
}

} // namespace

TEST(Archive, RoundTripIsBitExactForEveryVariant) {
    TempDir dir("archive");
    for (Variant v : {Variant::src, Variant::dict, Variant::mim, Variant::all, Variant::clwe, Variant::sup, Variant::com}) {
        for (bool distill : {false, true}) {
            SCOPED_TRACE(std::string(variant_name(v)) + (distill ? "+p" : ""));
            Built b = build(v, distill, dir);
            const auto path = dir / "m.caco";
            save_model(b.model, path);
            Model back = load_model(path);
            EXPECT_EQ(back.config, b.model.config);
            EXPECT_EQ(back.labels, b.model.labels);
            EXPECT_EQ(back.chars, b.model.chars);
            auto pa = b.model.parameters(), pb = back.parameters();
            ASSERT_EQ(pa.size(), pb.size());
            for (std::size_t i = 0; i < pa.size(); ++i) {
                EXPECT_EQ(pa[i]->name, pb[i]->name);
                EXPECT_EQ(pa[i]->value, pb[i]->value);
            }
            for (const auto& d : probes()) EXPECT_EQ(predict(back, d).probabilities, predict(b.model, d).probabilities);
            EXPECT_EQ(serialize_model(back), serialize_model(b.model));
        }
    }
}

TEST(Archive, PayloadIsLittleEndian) {
    TempDir dir("endian");
    Built b = build(Variant::src, false, dir);
    b.model.dan.output.b.value[0] = 1.0; // 0x3FF0000000000000
    const std::string bytes = serialize_model(b.model);
    const auto payload = bytes.find("payload\n") + 8;
    // Last tensor is dan.output.b; its first value sits 3 doubles before the trailer.
    const std::string expected("\x00\x00\x00\x00\x00\x00\xF0\x3F", 8);
    EXPECT_EQ(bytes.substr(bytes.size() - 8 - 3 * 8, 8), expected);
    // First block begins with the u32 name length, low byte first.
    const std::string first = b.model.parameters().front()->name;
    EXPECT_EQ(static_cast<unsigned char>(bytes[payload]), first.size());
    EXPECT_EQ(bytes[payload + 1], '\0');
    EXPECT_EQ(bytes.substr(bytes.size() - 8), "CACOEND\n");
}

TEST(Archive, TruncationIsDetected) {
    TempDir dir("trunc");
    Built b = build(Variant::dict, false, dir);
    std::string bytes = serialize_model(b.model);
    for (std::size_t cut : {std::size_t{1}, std::size_t{9}, bytes.size() / 2, bytes.size() - 20}) {
        SCOPED_TRACE(cut);
        EXPECT_THROW(deserialize_model(bytes.substr(0, bytes.size() - cut), "t"), ArchiveError);
    }
}

TEST(Archive, TrailingBytesAreRejected) {
    TempDir dir("trail");
    Built b = build(Variant::src, false, dir);
    EXPECT_THROW(deserialize_model(serialize_model(b.model) + "x", "t"), ArchiveError);
}

TEST(Archive, VersionMismatchIsRejected) {
    TempDir dir("version");
    Built b = build(Variant::src, false, dir);
    std::string bytes = serialize_model(b.model);
    bytes.replace(0, 14, "CACO-ARCHIVE 2");
    try {
        deserialize_model(bytes, "t");
        FAIL() << "expected ArchiveError";
    } catch (const ArchiveError& e) {
        EXPECT_NE(std::string(e.what()).find("version"), std::string::npos) << e.what();
    }
}

TEST(Archive, ShapeMismatchIsRejected) {
    TempDir dir("shape");
    Built b = build(Variant::src, false, dir);
    std::string bytes = serialize_model(b.model);
    const auto at = bytes.find("word_dim 5");
    ASSERT_NE(at, std::string::npos);
    bytes.replace(at, 10, "word_dim 6");
    EXPECT_THROW(deserialize_model(bytes, "t"), ArchiveError);
}

TEST(Archive, ClweModelsNeedTheirTable) {
    TempDir dir("clwe");
    Built b = build(Variant::com, false, dir);
    const auto path = dir / "com.caco";
    save_model(b.model, path);
    std::filesystem::rename(b.clwe_path, dir / "moved.txt");
    EXPECT_THROW(load_model(path), ArchiveError);
    Model back = load_model(path, LoadOptions{dir / "moved.txt"});
    EXPECT_EQ(predict(back, doc("gato")).probabilities, predict(b.model, doc("gato")).probabilities);

    EmbeddingTable other(4);
    other.add(w("gato"), {0.1, 0.2, 0.3, 0.5});
    other.add(w("perro"), {-0.5, 0.0, 0.5, 1.0});
    write_embeddings(dir / "other.txt", other);
    EXPECT_THROW(load_model(path, LoadOptions{dir / "other.txt"}), ArchiveError);
}

TEST(Archive, NotAnArchive) {
    EXPECT_THROW(deserialize_model("hello\nworld\n", "t"), ArchiveError);
    EXPECT_THROW(load_model("/nonexistent/model.caco"), ArchiveError);
}
