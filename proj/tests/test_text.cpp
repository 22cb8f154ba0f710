#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace caco;
using namespace caco::testing;

namespace {

std::vector<std::string> words_of(const Document& d) {
    std::vector<std::string> out;
    for (const auto& x : d.words) out.push_back(utf8_encode(x));
    return out;
}

using Strings = std::vector<std::string>;

} // namespace

TEST(Tokenize, LowercasesAndStripsEdgePunctuation) {
    EXPECT_EQ(words_of(tokenize("Cats eat Fish.")), (Strings{"cats", "eat", "fish"}));
}

TEST(Tokenize, CollapsesWhitespace) { EXPECT_EQ(words_of(tokenize("  a  ")), (Strings{"a"})); }

TEST(Tokenize, StripsInvertedExclamation) { EXPECT_EQ(words_of(tokenize("¡Hola!")), (Strings{"hola"})); }

TEST(Tokenize, LowercasesBeyondAscii) {
    EXPECT_EQ(words_of(tokenize("ÁRBOL Жук")), (Strings{"árbol", "жук"}));
}

TEST(Tokenize, KeepsInnerPunctuation) { EXPECT_EQ(words_of(tokenize("l'homme, e-mail")), (Strings{"l'homme", "e-mail"})); }

TEST(Tokenize, CaseCanBeKept) {
    EXPECT_EQ(words_of(tokenize("Cats eat", TokenizerOptions{false})), (Strings{"Cats", "eat"}));
}

TEST(Tokenize, NothingLeftIsAnError) {
    EXPECT_THROW(tokenize(""), EmptyDocumentError);
    EXPECT_THROW(tokenize(" \t "), EmptyDocumentError);
    EXPECT_THROW(tokenize("... !?"), EmptyDocumentError);
}

TEST(Tokenize, IsIdempotentOnItsOwnOutput) {
    Rng rng(7);
    const std::u32string alphabet = U"abcXYZ é,.!¡?'- \t";
    for (int trial = 0; trial < 500; ++trial) {
        std::u32string s;
        const std::size_t n = 1 + rng.index(30);
        for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[rng.index(alphabet.size())]);
        Document once;
        try {
            once = tokenize(utf8_encode(s));
        } catch (const EmptyDocumentError&) {
            continue;
        }
        EXPECT_EQ(tokenize(to_utf8(once)), once);
        EXPECT_EQ(tokenize(utf8_encode(s)), once);
    }
}

TEST(Utf8, RoundTripsAllPlanes) {
    const std::u32string s = U"aéЖ中\U0001F600";
    EXPECT_EQ(utf8_decode(utf8_encode(s)), s);
}

TEST(Utf8, MalformedBytesBecomeReplacementCharacters) {
    EXPECT_EQ(utf8_decode("a\xC3"), (std::u32string{U'a', U'�'}));
}

TEST(CharVocab, UnionOfSourcesPlusUnk) {
    CharVocabBuilder b;
    b.add(w("ab")).add(w("bc"));
    CharVocab v = b.build();
    EXPECT_EQ(v.size(), 4u);
    EXPECT_EQ(v.chars(), (std::vector<char32_t>{U'a', U'b', U'c'}));
    EXPECT_EQ(v.index(U'a'), 1u);
    EXPECT_EQ(v.index(U'z'), CharVocab::unk);
}

TEST(CharVocab, AddingTheSameCorpusTwiceChangesNothing) {
    std::vector<Document> docs{doc("perro come"), doc("cane mangia")};
    CharVocabBuilder once, twice;
    once.add(docs);
    twice.add(docs).add(docs);
    EXPECT_EQ(once.build(), twice.build());
}

TEST(CharVocab, IndependentOfResourceOrder) {
    Rng rng(8);
    std::vector<Word> items{w("tempo"), w("tiempo"), w("ñandú"), w("über"), w("x")};
    CharVocabBuilder ref;
    for (const auto& x : items) ref.add(x);
    for (int trial = 0; trial < 20; ++trial) {
        rng.shuffle(items);
        CharVocabBuilder b;
        for (const auto& x : items) b.add(x);
        EXPECT_EQ(b.build(), ref.build());
    }
}

TEST(CharVocab, SharedLettersShareAnIndex) {
    CharVocabBuilder b;
    b.add(doc("tempo")).add(doc("tiempo"));
    CharVocab v = b.build();
    EXPECT_EQ(v.encode(w("tempo"))[0], v.encode(w("tiempo"))[0]);
}

TEST(CharVocab, TargetOnlyDictionaryCharactersEnter) {
    BilingualDictionary dict{{{w("agua"), w("ħelu")}}};
    CharVocabBuilder b;
    b.add(doc("agua fria"));
    for (const auto& p : dict.pairs) b.add(p.source).add(p.target);
    EXPECT_NE(b.build().index(U'ħ'), CharVocab::unk);
}

TEST(LabelSet, RejectsDuplicates) { EXPECT_THROW(LabelSet({"A", "A"}), Error); }
