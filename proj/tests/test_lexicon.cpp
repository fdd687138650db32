#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "test_support.hpp"

using namespace accent;
using testing_support::data_path;
using testing_support::ipa;
using testing_support::symbols;

namespace {

Lexicon read(const std::string& text, bool overrides = true) {
    Lexicon lex;
    std::istringstream in(text);
    read_lexicon_into(lex, in, symbols(), "<test>", overrides);
    return lex;
}

}  // namespace

TEST(NormalizeWord, CaseAndPunctuation) {
    EXPECT_EQ(normalize_word("Wednesday"), "wednesday");
    EXPECT_EQ(normalize_word("\"Please,"), "please");
    EXPECT_EQ(normalize_word("We'll"), "we'll");
    EXPECT_EQ(normalize_word("..."), "");
}

TEST(Lexicon, SnakeOverrideHasFourPhonemes) {
    const auto lex = read("snake\tsneɪk\n");
    EXPECT_EQ(lex.at("snake").phonemes.size(), 4u);
    EXPECT_EQ(lex.at("snake").transcription, "sneik");
}

TEST(Lexicon, OverridesReplaceTranscriptions) {
    const auto lex = read("frog\tfɹɔg\nstella\tstɛlə\n");
    EXPECT_EQ(lex.at("frog").phonemes, ipa("fɹɒg"));
    EXPECT_EQ(lex.at("stella").phonemes, ipa("stɛllə"));
    const auto raw = read("frog\tfɹɔg\n", false);
    EXPECT_EQ(raw.at("frog").phonemes, ipa("fɹɔg"));
}

TEST(Lexicon, OverridesNeverInsertWords) {
    EXPECT_FALSE(read("please\tpliz\n").contains("snake"));
}

TEST(Lexicon, EmptyInputGivesEmptyLexicon) {
    const auto lex = read("");
    EXPECT_TRUE(lex.empty());
    EXPECT_EQ(lex.size(), 0u);
    EXPECT_TRUE(lex.inventory().empty());
    EXPECT_TRUE(read("# only a comment\n\n").empty());
}

TEST(Lexicon, HomophoneClass) {
    const auto lex = read("for\tfɔ\nfour\tfɔ\nsix\tsɪks\n");
    const auto classes = lex.homophone_classes();
    ASSERT_EQ(classes.size(), 1u);
    EXPECT_EQ(classes[0], (std::vector<std::string>{"for", "four"}));
}

TEST(Lexicon, DuplicateWordConflict) {
    EXPECT_THROW(read("for\tfɔ\nfor\tfɔɹ\n"), DuplicateWord);
    EXPECT_NO_THROW(read("for\tfɔ\nFor\tfɔ\n"));
}

TEST(Lexicon, BadPhonemeNamesWordAndOffset) {
    try {
        read("please\tpliz\ncall\tkQl\n");
        FAIL() << "expected BadPhoneme";
    } catch (const BadPhoneme& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("call"), std::string::npos) << msg;
        EXPECT_NE(msg.find("byte 1"), std::string::npos) << msg;
        EXPECT_NE(msg.find(":2:"), std::string::npos) << msg;
    }
    EXPECT_THROW(read("call\t\n"), BadPhoneme);
    EXPECT_THROW(read("call kɔl\n"), BadPhoneme);
}

TEST(Lexicon, MissingFileIsIoError) {
    EXPECT_THROW(load_lexicon("/nonexistent/lexicon.tsv", symbols()), IoError);
}

TEST(Lexicon, LoadingTwiceIsDeterministic) {
    const auto a = load_lexicon(data_path("lexicon/paragraph.tsv"), symbols());
    const auto b = load_lexicon(data_path("lexicon/paragraph.tsv"), symbols());
    EXPECT_EQ(a, b);
}

TEST(Lexicon, InventoryIsUnionOfPhonemes) {
    const auto& lex = testing_support::full_lexicon();
    std::set<Phoneme> expected;
    for (const auto& [w, form] : lex.entries()) expected.insert(form.phonemes.begin(), form.phonemes.end());
    EXPECT_EQ(lex.inventory(), expected);
}

TEST(ParagraphInventory, FiftyFiveWords) {
    const auto para = paragraph_inventory(testing_support::full_lexicon());
    EXPECT_EQ(para.size(), 55u);
    std::set<std::string_view> distinct(kElicitationParagraph.begin(), kElicitationParagraph.end());
    EXPECT_EQ(distinct.size(), 55u);
    EXPECT_EQ(kElicitationParagraph.size(), 69u);
    EXPECT_EQ(kElicitationParagraph[34], "we");
    EXPECT_EQ(kElicitationParagraph[35], "also");
}

TEST(ParagraphInventory, MissingWordNamed) {
    Lexicon lex;
    for (const auto& [w, form] : testing_support::paragraph_lexicon().entries())
        if (w != "wednesday") lex.add(form);
    try {
        paragraph_inventory(lex);
        FAIL() << "expected MissingWord";
    } catch (const MissingWord& e) {
        EXPECT_EQ(e.word(), "wednesday");
    }
}

TEST(Lexicon, NativeTranscriptAlignsWithParagraph) {
    const auto t = load_transcript(data_path("native.tsv"), symbols());
    ASSERT_EQ(t.entries.size(), 69u);
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
        EXPECT_EQ(t.entries[i].word, kElicitationParagraph[i]);
        EXPECT_EQ(t.entries[i].phones, testing_support::paragraph_lexicon().at(t.entries[i].word).phonemes);
    }
}

TEST(Lexicon, DistractorsAddHomophones) {
    const auto classes = testing_support::full_lexicon().homophone_classes();
    auto has = [&](std::vector<std::string> c) {
        return std::find(classes.begin(), classes.end(), c) != classes.end();
    };
    EXPECT_TRUE(has({"for", "four"}));
    EXPECT_TRUE(has({"read", "red"}));
}
