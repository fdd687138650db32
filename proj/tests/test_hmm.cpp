#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "oracles/lattice_oracle.hpp"
#include "test_support.hpp"

using namespace accent;
using testing_support::ipa;
using testing_support::sym;
using testing_support::symbols;

namespace {

WordForm form(const std::string& word, const std::string& transcription) {
    return make_word_form(word, transcription, symbols(), false);
}

ModelParams naive_for(std::initializer_list<std::string> transcriptions) {
    PhonemeInventory inv;
    for (const auto& t : transcriptions)
        for (const auto& p : ipa(t)) inv.insert(p);
    return init_naive_params(inv);
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

oracle::ToyLattice random_toy(std::mt19937& rng, std::size_t n, std::vector<std::size_t> obs) {
    std::uniform_real_distribution<double> unit(0.01, 0.6);
    oracle::ToyLattice t;
    t.p_ins = unit(rng) / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const double del_bar = unit(rng);
        t.p_del.push_back((1 - t.p_ins) * del_bar);
        t.p_prod.push_back(1 - (t.p_ins + t.p_del.back()));
        t.emit.push_back(oracle::toy_emission(rng() % oracle::kToyVectors, 0.5 + unit(rng)));
    }
    t.emit_ins.assign(oracle::kToyVectors, 1.0 / oracle::kToyVectors);
    t.obs = std::move(obs);
    return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Naive parameters

TEST(NaiveParams, PlaceFactorOfS) {
    // Direct summation over the 11 place values.
    double z = 0;
    for (int d = 1; d <= 11; ++d) z += std::exp(-9.0 * (d - 8) * (d - 8) / 8.0);
    const auto w = bell_distribution(8, {1, 11}, 2.0 / 3.0);
    EXPECT_NEAR(w[7], 1.0 / z, 1e-15);
    EXPECT_NEAR(w[7], 0.5982, 5e-5);
}

TEST(NaiveParams, EmissionOfSAtOwnVector) {
    const auto params = naive_for({"s"});
    const auto s = sym("s");
    auto factor = [](int x, int lo, int hi) {
        double z = 0;
        for (int d = lo; d <= hi; ++d) z += std::exp(-9.0 * (d - x) * (d - x) / 8.0);
        return 1.0 / z;
    };
    const double expected = factor(8, 1, 11) * factor(4, 1, 7) * factor(2, 0, 2) * factor(0, 0, 1);
    EXPECT_NEAR(params.emission(s)[FeatureSpace::index(s)], expected, 1e-15);
}

TEST(NaiveParams, KindBarrierAndNormalization) {
    const auto params = naive_for({"sa"});
    for (const auto& [p, dist] : params.emit) {
        double sum = 0;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            sum += dist[i];
            if (FeatureSpace::at(i).kind() != p.kind()) {
                EXPECT_EQ(dist[i], 0.0);
            }
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
    EXPECT_EQ(check_invariants(params), "");
}

TEST(NaiveParams, Constants) {
    const auto params = naive_for({"nid"});
    EXPECT_EQ(params.p_ins, 0.01);
    EXPECT_EQ(params.prior_weight, 20.0);
    EXPECT_EQ(params.sigma, 2.0 / 3.0);
    for (double p : params.emit_ins) EXPECT_EQ(p, 1.0 / 714.0);
    for (const auto& [p, d] : params.p_del_bar) {
        EXPECT_EQ(d, 0.01);
        EXPECT_EQ(params.p_ins + params.p_del(p) + params.p_prod(p), 1.0);
        EXPECT_NEAR(params.p_prod(p), 0.99 * 0.99, 1e-15);
    }
}

TEST(NaiveParams, RejectsBadInput) {
    EXPECT_THROW(init_naive_params({}), Error);
    NaiveSettings bad;
    bad.sigma = 0;
    EXPECT_THROW(init_naive_params({sym("s")}, bad), Error);
}

// ---------------------------------------------------------------------------
// Word automaton

TEST(WordHmm, NeedHasFiveStates) {
    const auto hmm = build_word_hmm(form("need", "nid"));
    EXPECT_EQ(hmm.state_count(), 5u);
    EXPECT_EQ(hmm.phon(1), sym("n"));
    EXPECT_EQ(hmm.phon(2), sym("i"));
    EXPECT_EQ(hmm.phon(3), sym("d"));
    EXPECT_THROW(hmm.phon(4), Error);
    EXPECT_TRUE(hmm.has_self_loop(4));
    EXPECT_FALSE(hmm.has_self_loop(5));
}

TEST(WordHmm, SinglePhonemeHasThreeStates) {
    EXPECT_EQ(build_word_hmm(form("a", "ə")).state_count(), 3u);
}

TEST(WordHmm, HomophonesShareTopology) {
    const auto a = build_word_hmm(form("for", "fɔ")), b = build_word_hmm(form("four", "fɔ"));
    EXPECT_EQ(a.phonemes(), b.phonemes());
    EXPECT_EQ(a.state_count(), b.state_count());
}

TEST(WordHmm, EmptyWordThrows) {
    EXPECT_THROW(WordHmm(WordForm{"x", {}, ""}), EmptyWord);
}

// ---------------------------------------------------------------------------
// Forward

TEST(Forward, SinglePhonemeEmptyObservation) {
    const auto params = naive_for({"ə"});
    const double lp = forward_likelihood(build_word_hmm(form("a", "ə")), {}, params);
    EXPECT_NEAR(std::exp(lp), 0.99 * 0.01 * 0.99, 1e-15);
    EXPECT_NEAR(std::exp(lp), 0.009801, 1e-12);
}

TEST(Forward, MatchesEnumerationOnToyLattices) {
    std::mt19937 rng(7);
    std::size_t checked = 0;
    for (std::size_t n = 1; n <= 3; ++n) {
        for (std::size_t m = 0; m <= 4; ++m) {
            std::size_t combos = 1;
            for (std::size_t k = 0; k < m; ++k) combos *= oracle::kToyVectors;
            for (std::size_t code = 0; code < combos; code += 7) {
                std::vector<std::size_t> obs;
                for (std::size_t k = 0, c = code; k < m; ++k, c /= oracle::kToyVectors)
                    obs.push_back(c % oracle::kToyVectors);
                const auto toy = random_toy(rng, n, obs);
                double total = 0;
                for (const auto& p : oracle::enumerate_paths(toy)) total += p.probability;
                ASSERT_LT(relative_error(std::exp(forward_log_likelihood(toy)), total), 1e-9)
                    << "n=" << n << " m=" << m;
                ++checked;
            }
        }
    }
    EXPECT_GT(checked, 500u);
}

TEST(Forward, MatchesEnumerationOnWordLattices) {
    const auto params = naive_for({"bɹɪŋ", "ʀ"});
    const ScoringTables tables(params);
    const auto hmm = build_word_hmm(form("bri", "bɹɪ"));
    for (const std::string obs : {"", "b", "bʀ", "bʀɪ", "pʀɛŋ", "bɹɪ"}) {
        const auto v = obs.empty() ? std::vector<PhoneFeatures>{} : ipa(obs);
        const WordLattice lattice(tables, hmm, v);
        double total = 0;
        for (const auto& p : oracle::enumerate_paths(lattice)) total += p.probability;
        EXPECT_LT(relative_error(std::exp(forward_likelihood(hmm, v, tables)), total), 1e-9) << obs;
    }
}

TEST(Forward, LongWordsDoNotUnderflow) {
    std::string thirty;
    for (int i = 0; i < 10; ++i) thirty += "stɪ";
    const auto params = naive_for({thirty, "ʀ"});
    const auto hmm = build_word_hmm(form("long", thirty));
    std::vector<PhoneFeatures> obs;
    for (int i = 0; i < 60; ++i) obs.push_back(sym("ʀ"));
    const double lp = forward_likelihood(hmm, obs, params);
    EXPECT_TRUE(std::isfinite(lp));
    EXPECT_LT(lp, std::log(std::numeric_limits<double>::min()));  // below the linear range
}

// ---------------------------------------------------------------------------
// Viterbi

TEST(Viterbi, MatchesEnumeratedMaximum) {
    std::mt19937 rng(11);
    for (std::size_t n = 1; n <= 3; ++n) {
        for (std::size_t m = 0; m <= 4; ++m) {
            for (int rep = 0; rep < 40; ++rep) {
                std::vector<std::size_t> obs;
                for (std::size_t k = 0; k < m; ++k) obs.push_back(rng() % oracle::kToyVectors);
                const auto toy = random_toy(rng, n, obs);
                const auto paths = oracle::enumerate_paths(toy);
                double best = 0;
                for (const auto& p : paths) best = std::max(best, p.probability);
                const auto vit = viterbi_path(toy);
                ASSERT_LT(relative_error(std::exp(vit.log_probability), best), 1e-9);
                // The decoded steps form one of the enumerated paths, with the same weight.
                auto it = std::find_if(paths.begin(), paths.end(),
                                       [&](const auto& p) { return p.steps == vit.steps; });
                ASSERT_NE(it, paths.end());
                EXPECT_LT(relative_error(it->probability, best), 1e-9);
                EXPECT_NEAR(path_log_weight(toy, vit.steps), vit.log_probability, 1e-9);
                EXPECT_GE(forward_log_likelihood(toy), vit.log_probability - 1e-12);
            }
        }
    }
}

TEST(Viterbi, TieBreakPrefersProduceThenDeleteThenInsert) {
    // One phoneme, one observation, all three routes weighted alike.
    oracle::ToyLattice toy;
    toy.p_ins = 0.25;
    toy.p_del = {0.25};
    toy.p_prod = {0.5};
    toy.emit = {{0.125, 0.875}};
    toy.emit_ins = {0.5, 0.5};
    toy.obs = {0};
    // produce: 0.5 * 0.125 = 1/16; delete then insert: 0.25 * 0.25 * 0.5 = 1/32.
    // Raise the delete/insert route to 1/16 by doubling p_del.
    toy.p_del = {0.5};
    auto path = viterbi_path(toy);
    ASSERT_EQ(path.steps.size(), 1u);
    EXPECT_EQ(path.steps[0].kind, StepKind::Produce);

    // With production impossible, the two delete/insert orders tie; the final
    // cell prefers its Delete predecessor, so the path is Insert then Delete.
    toy.emit = {{0.0, 1.0}};
    path = viterbi_path(toy);
    ASSERT_EQ(path.steps.size(), 2u);
    EXPECT_EQ(path.steps[0].kind, StepKind::Insert);
    EXPECT_EQ(path.steps[1].kind, StepKind::Delete);
}

TEST(Viterbi, EmptyObservationDeletesEverything) {
    const auto params = naive_for({"nid"});
    const auto a = viterbi_align(build_word_hmm(form("need", "nid")), {}, params);
    ASSERT_EQ(a.steps.size(), 3u);
    for (const auto& s : a.steps) EXPECT_EQ(s.kind, StepKind::Delete);
    EXPECT_EQ(a.spelled_phonemes(), ipa("nid"));
    EXPECT_NEAR(std::exp(a.log_probability), std::pow(0.99 * 0.01, 3) * 0.99, 1e-18);
}

TEST(Viterbi, ModalObservationIsAllProduce) {
    const auto params = naive_for({"plæstɪk"});
    const auto a = viterbi_align(build_word_hmm(form("plastic", "plæstɪk")), ipa("plæstɪk"), params);
    ASSERT_EQ(a.steps.size(), 7u);
    for (const auto& s : a.steps) {
        EXPECT_EQ(s.kind, StepKind::Produce);
        EXPECT_EQ(s.phoneme, s.vector);
    }
}

TEST(Viterbi, UvularTrillIsDeletionPlusInsertion) {
    const auto params = naive_for({"bɹɪŋ"});
    const auto a = viterbi_align(build_word_hmm(form("bring", "bɹɪŋ")), ipa("bʀɪŋ"), params);
    std::size_t deletes = 0, inserts = 0, produces = 0;
    for (const auto& s : a.steps) {
        if (s.kind == StepKind::Delete) {
            ++deletes;
            EXPECT_EQ(s.phoneme, sym("ɹ"));
        } else if (s.kind == StepKind::Insert) {
            ++inserts;
            EXPECT_EQ(s.vector, sym("ʀ"));
        } else {
            ++produces;
            EXPECT_EQ(s.phoneme, s.vector);
        }
    }
    EXPECT_EQ(deletes, 1u);
    EXPECT_EQ(inserts, 1u);
    EXPECT_EQ(produces, 3u);
}

TEST(Viterbi, AlignmentSpellsWordAndObservation) {
    const auto params = naive_for({"stɛllə"});
    const auto obs = ipa("stɛlʌ");
    const auto a = viterbi_align(build_word_hmm(form("stella", "stɛllə")), obs, params);
    EXPECT_EQ(a.spelled_phonemes(), ipa("stɛllə"));
    EXPECT_EQ(a.emitted_vectors(), obs);
}

// ---------------------------------------------------------------------------
// Recognition

TEST(Recognize, HomophonesTie) {
    Lexicon lex;
    lex.add(form("for", "fɔ"));
    lex.add(form("four", "fɔ"));
    lex.add(form("five", "faɪv"));
    const auto params = init_naive_params(lex.inventory());
    const auto r = recognize(ipa("fɔ"), lex, params);
    EXPECT_EQ(r.tie_set, (std::vector<std::string>{"for", "four"}));
    ASSERT_EQ(r.ranking.size(), 3u);
    EXPECT_EQ(r.ranking[2].word, "five");
}

TEST(Recognize, EmptyLexiconThrows) {
    EXPECT_THROW(recognize(ipa("fɔ"), Lexicon{}, naive_for({"fɔ"})), EmptyLexicon);
}

TEST(Recognize, ParallelMatchesSequential) {
    const auto& lex = testing_support::full_lexicon();
    const auto params = init_naive_params(lex.inventory());
    const auto a = recognize(ipa("fʀɔg"), lex, params, 1);
    const auto b = recognize(ipa("fʀɔg"), lex, params, 4);
    EXPECT_EQ(a.tie_set, b.tie_set);
    ASSERT_EQ(a.ranking.size(), b.ranking.size());
    for (std::size_t i = 0; i < a.ranking.size(); ++i) {
        EXPECT_EQ(a.ranking[i].word, b.ranking[i].word);
        EXPECT_EQ(a.ranking[i].log_probability, b.ranking[i].log_probability);
    }
}

TEST(Recognize, TieSetInvariantUnderMonotoneRescaling) {
    std::vector<ScoredWord> scores{{"a", -3.0}, {"b", -1.5}, {"c", -1.5}, {"d", -7.25}};
    const auto base = rank_scores(scores);
    for (auto& s : scores) s.log_probability = 2.0 * s.log_probability - 4.0;
    EXPECT_EQ(rank_scores(scores).tie_set, base.tie_set);
    for (auto& s : scores) s.log_probability = -std::exp(-s.log_probability);
    EXPECT_EQ(rank_scores(scores).tie_set, base.tie_set);
    EXPECT_EQ(base.tie_set, (std::vector<std::string>{"b", "c"}));
}

// ---------------------------------------------------------------------------
// Counts and updates

TEST(Counts, EmptyInput) {
    const auto c = accumulate_counts({});
    EXPECT_EQ(c.n_ins, 0u);
    EXPECT_EQ(c.n_not_ins, 0u);
    EXPECT_TRUE(c.n_del.empty() && c.n_prod.empty() && c.n_v_ins.empty() && c.n_v_prod.empty());
    EXPECT_TRUE(c.consistent());
}

TEST(Counts, ProduceAndInsertTally) {
    Alignment a;
    a.steps = {{StepKind::Produce, sym("p"), sym("b")}, {StepKind::Insert, sym("ʀ"), sym("ʀ")}};
    const auto c = accumulate_counts({a});
    EXPECT_EQ(c.prod(sym("p")), 1u);
    EXPECT_EQ(c.prod(sym("p"), sym("b")), 1u);
    EXPECT_EQ(c.n_ins, 1u);
    EXPECT_EQ(c.ins(sym("ʀ")), 1u);
    EXPECT_EQ(c.n_not_ins, 1u);
    EXPECT_TRUE(c.consistent());
}

TEST(Update, ZeroCountsAreIdentity) {
    const auto params = naive_for({"bɹɪŋ"});
    EXPECT_EQ(update_params(params, TransformCounts{}), params);
}

TEST(Update, FixedPointForInsertion) {
    auto params = naive_for({"s"});
    TransformCounts c;
    c.n_ins = 1;
    c.n_v_ins[sym("ʀ")] = 1;
    c.n_not_ins = 99;
    c.n_prod[sym("s")] = 99;
    c.n_v_prod[{sym("s"), sym("s")}] = 99;
    EXPECT_NEAR(update_params(params, c).p_ins, 1.2 / 120.0, 1e-15);
    EXPECT_NEAR(update_params(params, c).p_ins, 0.01, 1e-15);
}

TEST(Update, LaplaceRuleForEmission) {
    const auto params = naive_for({"ð"});
    TransformCounts c;
    c.n_not_ins = 4;
    c.n_prod[sym("ð")] = 3;
    c.n_v_prod[{sym("ð"), sym("d")}] = 3;
    c.n_del[sym("ð")] = 1;
    const auto up = update_params(params, c);
    const auto d = FeatureSpace::index(sym("d"));
    const double prior = params.emission(sym("ð"))[d];
    EXPECT_NEAR(up.emission(sym("ð"))[d], (3 + 20 * prior) / 23.0, 1e-15);
    EXPECT_NEAR(up.del_bar(sym("ð")), (1 + 20 * 0.01) / 24.0, 1e-15);
    EXPECT_NEAR(up.p_ins, (0 + 20 * 0.01) / 24.0, 1e-15);
    EXPECT_EQ(check_invariants(up), "");
    // The input is untouched.
    EXPECT_EQ(params, naive_for({"ð"}));
}

TEST(Update, RejectsInconsistentCounts) {
    const auto params = naive_for({"s"});
    TransformCounts c;
    c.n_ins = 2;
    EXPECT_THROW(update_params(params, c), Error);
    TransformCounts d;
    d.n_not_ins = 1;
    d.n_del[sym("z")] = 1;
    EXPECT_THROW(update_params(params, d), Error);
}

TEST(Update, RandomRoundsPreserveInvariants) {
    std::mt19937 rng(3);
    auto params = naive_for({"bɹɪŋ", "sneɪk"});
    std::vector<Phoneme> phonemes;
    for (const auto& [p, d] : params.emit) phonemes.push_back(p);
    for (int round = 0; round < 50; ++round) {
        TransformCounts c;
        for (int k = 0; k < 30; ++k) {
            const auto& p = phonemes[rng() % phonemes.size()];
            const auto& v = FeatureSpace::at(rng() % FeatureSpace::size());
            switch (rng() % 3) {
                case 0:
                    if (v.kind() == p.kind()) {
                        ++c.n_not_ins, ++c.n_prod[p], ++c.n_v_prod[{p, v}];
                        break;
                    }
                    [[fallthrough]];
                case 1: ++c.n_not_ins, ++c.n_del[p]; break;
                default: ++c.n_ins, ++c.n_v_ins[v]; break;
            }
        }
        params = update_params(params, c);
        ASSERT_EQ(check_invariants(params), "") << "round " << round;
    }
}

TEST(Adapt, EmptyTrainingSetLeavesParamsUnchanged) {
    const auto params = naive_for({"s"});
    EXPECT_EQ(adapt(params, {}), params);
}

TEST(Adapt, AlignsUnderInputParams) {
    const auto params = naive_for({"ðiz"});
    const std::vector<TrainingPair> pairs{{form("these", "ðiz"), ipa("dis")}, {form("these", "ðiz"), ipa("dis")}};
    const auto expected = update_params(params, accumulate_counts({
        viterbi_align(WordHmm(pairs[0].form), pairs[0].obs, params),
        viterbi_align(WordHmm(pairs[1].form), pairs[1].obs, params)}));
    EXPECT_EQ(adapt(params, pairs), expected);
    EXPECT_EQ(adapt(params, pairs, 4), expected);
}

// ---------------------------------------------------------------------------
// Snapshots

TEST(ParamsIo, RoundTripIsExact) {
    auto params = naive_for({"bɹɪŋ", "sneɪk", "tʃiz"});
    params = adapt(params, {{form("bring", "bɹɪŋ"), ipa("bʀɪŋ")}});
    const auto text = dump_params(params);
    const auto back = load_params_text(text);
    EXPECT_EQ(back, params);
    EXPECT_EQ(dump_params(back), text);
}

TEST(ParamsIo, SchemaMismatch) {
    EXPECT_THROW(load_params_text("not json"), SchemaMismatch);
    EXPECT_THROW(load_params_text("{}"), SchemaMismatch);
    auto j = params_to_json(naive_for({"s"}));
    j["version"] = 99;
    EXPECT_THROW(params_from_json(j), SchemaMismatch);
    j = params_to_json(naive_for({"s"}));
    j["emit_ins"].erase(0);
    EXPECT_THROW(params_from_json(j), SchemaMismatch);
    j = params_to_json(naive_for({"s"}));
    j["phonemes"][0]["features"][0] = 99;
    EXPECT_THROW(params_from_json(j), SchemaMismatch);
    j = params_to_json(naive_for({"s"}));
    j["phonemes"][0].erase("p_del_bar");
    EXPECT_THROW(params_from_json(j), SchemaMismatch);
}
